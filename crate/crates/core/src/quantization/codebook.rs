use rug::{Integer, Rational};

use super::pmf::{DiscretePmf, ErrorPmf};
use crate::error::{domain, Error, Result};

const MAGIC: &[u8; 4] = b"QCB1";

/// Sorted reconstruction levels with midpoint decision thresholds.
///
/// Cell `i` is `(threshold[i-1], threshold[i]]`, so an input sitting exactly on
/// a threshold maps to the lower index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantCodebook {
    levels: Vec<Rational>,
    thresholds: Vec<Rational>,
    source: String,
    requested: usize,
}

impl QuantCodebook {
    pub fn new(levels: Vec<Rational>, source: impl Into<String>) -> Result<Self> {
        let requested = levels.len();
        Self::with_requested(levels, source, requested)
    }

    /// As [`new`](Self::new), recording that `requested` levels were asked for
    /// (empty cells may have been dropped along the way).
    pub fn with_requested(levels: Vec<Rational>, source: impl Into<String>, requested: usize) -> Result<Self> {
        if levels.is_empty() {
            return domain("codebook needs at least one level");
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return domain("codebook levels must be strictly increasing");
        }
        let thresholds = levels
            .windows(2)
            .map(|w| Rational::from(&w[0] + &w[1]) / 2)
            .collect();
        Ok(QuantCodebook { levels, thresholds, source: source.into(), requested: requested.max(1) })
    }

    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    pub fn thresholds(&self) -> &[Rational] {
        &self.thresholds
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Levels requested at construction minus levels actually present.
    pub fn dropped_levels(&self) -> usize {
        self.requested.saturating_sub(self.levels.len())
    }

    /// Nearest level by binary search over the thresholds.
    pub fn quantize(&self, x: &Rational) -> (usize, &Rational) {
        let idx = self.thresholds.partition_point(|t| t < x);
        (idx, &self.levels[idx])
    }

    pub fn quantize_int(&self, x: i64) -> (usize, &Rational) {
        self.quantize(&Rational::from(x))
    }

    /// LCM of the level denominators.
    pub fn denominator(&self) -> Integer {
        self.levels
            .iter()
            .fold(Integer::from(1), |acc, l| acc.lcm(l.denom()))
    }

    /// Exact distribution of `x - quantize(x)` under `pmf`.
    pub fn error_pmf(&self, pmf: &DiscretePmf) -> Result<ErrorPmf> {
        ErrorPmf::from_pairs(pmf.iter().map(|(x, p)| {
            let x = Rational::from(x);
            let e = Rational::from(&x - self.quantize(&x).1);
            (e, p.clone())
        }))
    }

    pub fn mse(&self, pmf: &DiscretePmf) -> Result<Rational> {
        Ok(self.error_pmf(pmf)?.mse())
    }

    pub fn scaled(&self) -> Result<ScaledCodebook> {
        ScaledCodebook::new(self)
    }

    /// Binary encoding: magic, `L` (u32), label length (u16) and UTF-8 label,
    /// denominator `D` (i64), `L` level numerators scaled by `D`, then `L-1`
    /// threshold numerators scaled by `2D`. All integers little-endian.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let scaled = self.scaled()?;
        let label = self.source.as_bytes();
        let label_len = u16::try_from(label.len()).map_err(|_| Error::Domain("label too long".into()))?;
        let mut out = Vec::with_capacity(18 + label.len() + 16 * self.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        out.extend_from_slice(&label_len.to_le_bytes());
        out.extend_from_slice(label);
        out.extend_from_slice(&scaled.denominator.to_le_bytes());
        for v in scaled.levels.iter().chain(&scaled.thresholds) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut rd = Reader { bytes, pos: 0 };
        if rd.take(4)? != MAGIC {
            return Err(Error::Malformed("bad codebook magic".into()));
        }
        let len = u32::from_le_bytes(rd.take(4)?.try_into().unwrap()) as usize;
        if len == 0 {
            return Err(Error::Malformed("empty codebook".into()));
        }
        let label_len = u16::from_le_bytes(rd.take(2)?.try_into().unwrap()) as usize;
        let label = std::str::from_utf8(rd.take(label_len)?)
            .map_err(|_| Error::Malformed("codebook label is not UTF-8".into()))?
            .to_string();
        let den = rd.i64()?;
        if den <= 0 {
            return Err(Error::Malformed("non-positive denominator".into()));
        }
        let levels = (0..len)
            .map(|_| rd.i64().map(|n| Rational::from((n, den))))
            .collect::<Result<Vec<_>>>()?;
        let thresholds = (0..len - 1)
            .map(|_| rd.i64().map(|n| Rational::from((n, 2 * den))))
            .collect::<Result<Vec<_>>>()?;
        if rd.pos != bytes.len() {
            return Err(Error::Malformed("trailing bytes after codebook".into()));
        }
        let cb = QuantCodebook::new(levels, label).map_err(|e| Error::Malformed(e.to_string()))?;
        if cb.thresholds != thresholds {
            return Err(Error::Malformed("thresholds are not level midpoints".into()));
        }
        Ok(cb)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Malformed("truncated codebook".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// A codebook with all levels multiplied by a common denominator `D`, so that
/// quantization and reconstruction run on machine integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledCodebook {
    denominator: i64,
    levels: Vec<i64>,
    /// Thresholds times `2D`.
    thresholds: Vec<i64>,
}

impl ScaledCodebook {
    fn new(cb: &QuantCodebook) -> Result<Self> {
        let den = cb.denominator();
        let to_i64 = |r: Rational| -> Result<i64> {
            debug_assert_eq!(*r.denom(), 1);
            r.numer()
                .to_i64()
                .ok_or_else(|| Error::Resource("scaled codebook value exceeds 64 bits".into()))
        };
        let levels = cb
            .levels
            .iter()
            .map(|l| to_i64(Rational::from(l * &den)))
            .collect::<Result<Vec<_>>>()?;
        let thresholds = cb
            .thresholds
            .iter()
            .map(|t| to_i64(Rational::from(t * &den) * 2))
            .collect::<Result<Vec<_>>>()?;
        let denominator = den
            .to_i64()
            .ok_or_else(|| Error::Resource("codebook denominator exceeds 64 bits".into()))?;
        Ok(ScaledCodebook { denominator, levels, thresholds })
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Index of the nearest level to the integer `x` (ties to the lower index).
    pub fn index_of(&self, x: i64) -> usize {
        let target = 2 * self.denominator * x;
        self.thresholds.partition_point(|&t| t < target)
    }

    /// `D * level[index]`.
    pub fn scaled_level(&self, index: usize) -> Option<i64> {
        self.levels.get(index).copied()
    }

    pub fn scaled_levels(&self) -> &[i64] {
        &self.levels
    }
}
