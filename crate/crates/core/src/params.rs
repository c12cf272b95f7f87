//! Parameter sets for the three encryption variants and the size/rate
//! quantities derived from them.

use rug::Rational;

use crate::error::{domain, Error, Result};

/// Ring degree.
pub const N: usize = 256;
/// Modulus.
pub const Q: u32 = 3329;
/// Bits used to store one uncompressed coefficient of `Z_q`.
pub const RAW_BITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Kyber compression on both ciphertext parts, 2-PAM plaintext.
    Original,
    /// Lloyd-Max quantization on both ciphertext parts, 2-PAM plaintext.
    LloydMax,
    /// Lloyd-Max quantization of `u` only; `v` is sent raw and carries a
    /// BCH-coded, Gray-mapped p-PAM plaintext.
    SemiCompressed,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Original => "ORIGINAL",
            Variant::LloydMax => "LLOYD_MAX",
            Variant::SemiCompressed => "SEMI_COMPRESSED",
        }
    }
}

/// A (possibly shortened) binary BCH code over `GF(2^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    /// Codeword bits.
    pub n: usize,
    /// Message bits.
    pub k: usize,
    /// Correctable errors.
    pub t: usize,
    /// Field extension degree.
    pub m: u32,
    /// Unshortened length `2^m - 1`.
    pub parent_n: usize,
}

impl CodeSpec {
    pub fn new(n: usize, k: usize, t: usize, m: u32) -> Result<Self> {
        if !(2..=16).contains(&m) {
            return domain(format!("field degree m={m} outside 2..=16"));
        }
        let parent_n = (1usize << m) - 1;
        if n > parent_n || k == 0 || k >= n || t == 0 {
            return domain(format!("invalid code ({n},{k},{t}) over GF(2^{m})"));
        }
        Ok(CodeSpec { n, k, t, m, parent_n })
    }

    /// Number of parity bits, identical for the parent and the shortened code.
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn parent_k(&self) -> usize {
        self.parent_n - self.redundancy()
    }

    pub fn shortened_by(&self) -> usize {
        self.parent_n - self.n
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSet {
    pub name: String,
    pub n: usize,
    pub q: u32,
    pub k: usize,
    pub eta1: u32,
    pub eta2: u32,
    pub du: u32,
    /// Bits per `v` coefficient; [`RAW_BITS`] means `v` is stored uncompressed.
    pub dv: u32,
    /// PAM order.
    pub p: u32,
    pub code: Option<CodeSpec>,
    pub variant: Variant,
}

impl ParamSet {
    /// Builds a parameter set and checks its invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        k: usize,
        eta1: u32,
        eta2: u32,
        du: u32,
        dv: u32,
        p: u32,
        code: Option<CodeSpec>,
        variant: Variant,
    ) -> Result<Self> {
        let ps = ParamSet {
            name: name.into(),
            n: N,
            q: Q,
            k,
            eta1,
            eta2,
            du,
            dv,
            p,
            code,
            variant,
        };
        ps.validate()?;
        Ok(ps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != N || self.q != Q {
            return domain(format!("{}: ring must be n={N}, q={Q}", self.name));
        }
        if self.k == 0 {
            return domain(format!("{}: module rank must be positive", self.name));
        }
        if self.du == 0 || (1u64 << self.du) >= u64::from(self.q) {
            return domain(format!("{}: 2^d_u must be below q", self.name));
        }
        if !self.p.is_power_of_two() || self.p < 2 {
            return domain(format!("{}: PAM order {} is not a power of two >= 2", self.name, self.p));
        }
        match self.variant {
            Variant::Original | Variant::LloydMax => {
                if self.dv == 0 || (1u64 << self.dv) >= u64::from(self.q) {
                    return domain(format!("{}: 2^d_v must be below q", self.name));
                }
                if self.p != 2 {
                    return domain(format!("{}: 2-PAM variants need p = 2", self.name));
                }
            }
            Variant::SemiCompressed => {
                if self.dv != RAW_BITS {
                    return domain(format!("{}: semi-compressed sets store v raw (d_v = 12)", self.name));
                }
                let code = self.code.ok_or_else(|| {
                    Error::Domain(format!("{}: semi-compressed sets need a code", self.name))
                })?;
                let expected = self.n * self.p.trailing_zeros() as usize;
                if code.n != expected {
                    return domain(format!(
                        "{}: code length {} != n*log2(p) = {expected}",
                        self.name, code.n
                    ));
                }
            }
        }
        Ok(())
    }

    /// Plaintext bits carried by one ciphertext.
    pub fn message_bits(&self) -> usize {
        match self.code {
            Some(code) if self.variant == Variant::SemiCompressed => code.k,
            _ => self.n,
        }
    }

    /// Bits per `v` coefficient as transmitted.
    pub fn v_bits(&self) -> u32 {
        match self.variant {
            Variant::SemiCompressed => RAW_BITS,
            _ => self.dv,
        }
    }

    pub fn ciphertext_bits(&self) -> usize {
        self.k * self.n * self.du as usize + self.n * self.v_bits() as usize
    }

    pub fn ciphertext_bytes(&self) -> usize {
        self.ciphertext_bits().div_ceil(8)
    }

    pub fn public_key_bytes(&self) -> usize {
        self.k * self.n * RAW_BITS as usize / 8 + 32
    }

    pub fn secret_key_bytes(&self) -> usize {
        self.k * self.n * RAW_BITS as usize / 8
    }

    pub fn plaintext_bytes(&self) -> usize {
        self.message_bits().div_ceil(8)
    }

    /// `round(q/p)` with ties up: the PAM symbol spacing.
    pub fn pam_spacing(&self) -> u32 {
        round_div(self.q, self.p)
    }

    /// Copy with a different PAM order (code and variant unchanged, not re-validated).
    pub fn with_pam_order(&self, p: u32) -> ParamSet {
        ParamSet { p, ..self.clone() }
    }
}

/// `round(a/b)` with ties rounded up.
pub fn round_div(a: u32, b: u32) -> u32 {
    (2 * a + b) / (2 * b)
}

/// Ciphertext expansion rate: ciphertext bits over `message_bits` plaintext bits.
pub fn cer(ps: &ParamSet, message_bits: usize) -> Result<Rational> {
    if message_bits == 0 {
        return domain("CER needs a positive number of message bits");
    }
    Ok(Rational::from((ps.ciphertext_bits() as u64, message_bits as u64)))
}

fn kyber(name: &str, k: usize, eta1: u32, du: u32, dv: u32, variant: Variant) -> ParamSet {
    ParamSet::new(name, k, eta1, 2, du, dv, 2, None, variant).expect("built-in set is valid")
}

fn sc_kyber1024(name: &str, du: u32, n: usize, k: usize, t: usize) -> ParamSet {
    let code = CodeSpec::new(n, k, t, 10).expect("built-in code is valid");
    ParamSet::new(name, 4, 2, 2, du, RAW_BITS, 8, Some(code), Variant::SemiCompressed)
        .expect("built-in set is valid")
}

/// The standard Kyber sets, their Lloyd-Max twins and the two semi-compressed
/// KYBER1024 rows.
pub fn builtin_param_sets() -> Vec<ParamSet> {
    vec![
        kyber("KYBER512", 2, 3, 10, 4, Variant::Original),
        kyber("KYBER768", 3, 2, 10, 4, Variant::Original),
        kyber("KYBER1024", 4, 2, 11, 5, Variant::Original),
        kyber("KYBER512-LM", 2, 3, 10, 4, Variant::LloydMax),
        kyber("KYBER768-LM", 3, 2, 10, 4, Variant::LloydMax),
        kyber("KYBER1024-LM", 4, 2, 11, 5, Variant::LloydMax),
        sc_kyber1024("SC-KYBER1024-B-BCH-513", 10, 768, 513, 26),
        sc_kyber1024("SC-KYBER1024-B-BCH-638", 11, 768, 638, 13),
    ]
}

/// Deliberately noisy sets whose failure rate is large enough to observe.
///
/// `WEAK-K2-*` use `k=2`, `eta1=eta2=1`, `du=7`, `dv=2`; the `ETA1X2` twin
/// doubles the secret width. `WEAK-SC-16PAM` carries 16-PAM symbols under a
/// single-error-correcting BCH code.
pub fn weakened_param_sets() -> Vec<ParamSet> {
    let sc_code = CodeSpec::new(1024, 1024 - 11, 1, 11).expect("valid code");
    vec![
        ParamSet::new("WEAK-K2-ORIG", 2, 1, 1, 7, 2, 2, None, Variant::Original).expect("valid"),
        ParamSet::new("WEAK-K2-LM", 2, 1, 1, 7, 2, 2, None, Variant::LloydMax).expect("valid"),
        ParamSet::new("WEAK-K2-LM-ETA1X2", 2, 2, 1, 7, 2, 2, None, Variant::LloydMax).expect("valid"),
        ParamSet::new("WEAK-SC-16PAM", 4, 1, 2, 11, RAW_BITS, 16, Some(sc_code), Variant::SemiCompressed)
            .expect("valid"),
    ]
}

/// Looks up a built-in or weakened set. `SC-KYBER1024` is shorthand for the
/// 638-bit row.
pub fn param_set_by_name(name: &str) -> Result<ParamSet> {
    let wanted = if name == "SC-KYBER1024" { "SC-KYBER1024-B-BCH-638" } else { name };
    builtin_param_sets()
        .into_iter()
        .chain(weakened_param_sets())
        .find(|ps| ps.name == wanted)
        .ok_or_else(|| Error::UnknownParamSet(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let p = param_set_by_name("KYBER1024").unwrap();
        assert_eq!((p.k, p.eta1, p.eta2, p.du, p.dv), (4, 2, 2, 11, 5));
        let p = param_set_by_name("KYBER512").unwrap();
        assert_eq!((p.k, p.eta1, p.eta2, p.du, p.dv), (2, 3, 2, 10, 4));
        let p = param_set_by_name("SC-KYBER1024-B-BCH-638").unwrap();
        assert_eq!((p.p, p.du, p.dv), (8, 11, 12));
        assert_eq!(p.code.unwrap().k, 638);
        assert_eq!(p.code.unwrap().parent_k(), 893);
        let p = param_set_by_name("SC-KYBER1024-B-BCH-513").unwrap();
        assert_eq!(p.code.unwrap().parent_k(), 768);
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert_eq!(
            param_set_by_name("KYBER2048"),
            Err(Error::UnknownParamSet("KYBER2048".into()))
        );
    }

    #[test]
    fn every_set_validates() {
        for ps in builtin_param_sets().iter().chain(weakened_param_sets().iter()) {
            ps.validate().unwrap();
        }
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(ParamSet::new("x", 2, 2, 2, 12, 4, 2, None, Variant::Original).is_err());
        assert!(ParamSet::new("x", 2, 2, 2, 10, 4, 4, None, Variant::Original).is_err());
        assert!(ParamSet::new("x", 4, 2, 2, 11, 12, 8, None, Variant::SemiCompressed).is_err());
        let wrong_len = CodeSpec::new(512, 400, 10, 10).unwrap();
        assert!(ParamSet::new("x", 4, 2, 2, 11, 12, 8, Some(wrong_len), Variant::SemiCompressed).is_err());
        assert!(ParamSet::new("x", 4, 2, 2, 11, 5, 3, None, Variant::Original).is_err());
    }

    #[test]
    fn cer_values() {
        let k1024 = param_set_by_name("KYBER1024").unwrap();
        assert_eq!(cer(&k1024, 256).unwrap(), 49);
        let sc = param_set_by_name("SC-KYBER1024-B-BCH-638").unwrap();
        assert_eq!(cer(&sc, 638).unwrap(), Rational::from((14336, 638)));
        let sc10 = param_set_by_name("SC-KYBER1024-B-BCH-513").unwrap();
        assert_eq!(cer(&sc10, 513).unwrap(), Rational::from((13312, 513)));
        assert!(cer(&k1024, 0).is_err());
    }

    #[test]
    fn cer_decreases_in_message_bits() {
        let ps = param_set_by_name("KYBER768").unwrap();
        let mut last = cer(&ps, 1).unwrap();
        for k in 2..2000 {
            let next = cer(&ps, k).unwrap();
            assert!(next < last);
            last = next;
        }
    }

    #[test]
    fn sizes() {
        let k1024 = param_set_by_name("KYBER1024").unwrap();
        assert_eq!(k1024.ciphertext_bytes(), 1568);
        assert_eq!(k1024.public_key_bytes(), 1568);
        let sc = param_set_by_name("SC-KYBER1024").unwrap();
        assert_eq!(sc.ciphertext_bytes(), 1792);
        assert_eq!(sc.pam_spacing(), 416);
        assert_eq!(sc.plaintext_bytes(), 80);
    }
}
