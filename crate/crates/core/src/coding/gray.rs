use crate::error::{Error, Result};

/// PAM symbols, each in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolWord {
    symbols: Vec<u16>,
    p: u16,
}

impl SymbolWord {
    pub fn new(symbols: Vec<u16>, p: u16) -> Result<Self> {
        bits_per_symbol(p)?;
        if let Some(&s) = symbols.iter().find(|&&s| s >= p) {
            return Err(Error::Domain(format!("symbol {s} out of range for {p}-PAM")));
        }
        Ok(SymbolWord { symbols, p })
    }

    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    pub fn order(&self) -> u16 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// `log2(p)` for a PAM order that is a power of two, at least 2.
pub fn bits_per_symbol(p: u16) -> Result<usize> {
    if p < 2 || !p.is_power_of_two() {
        return Err(Error::Domain(format!("PAM order {p} is not a power of two >= 2")));
    }
    Ok(p.trailing_zeros() as usize)
}

fn gray(x: u16) -> u16 {
    x ^ (x >> 1)
}

/// Prefix XOR over all 16 bits; the operation count does not depend on `g`.
fn gray_inverse(g: u16) -> u16 {
    let mut x = g;
    for shift in [1, 2, 4, 8] {
        x ^= x >> shift;
    }
    x
}

/// Maps each `log2(p)`-bit group, read most significant bit first, to the
/// symbol whose binary-reflected Gray code it is.
pub fn gray_map(bits: &[u8], p: u16) -> Result<SymbolWord> {
    let b = bits_per_symbol(p)?;
    if !bits.len().is_multiple_of(b) {
        return Err(Error::Domain(format!(
            "{} bits do not split into {b}-bit groups",
            bits.len()
        )));
    }
    if bits.iter().any(|&x| x > 1) {
        return Err(Error::Domain("bits must be 0 or 1".into()));
    }
    let symbols = bits
        .chunks(b)
        .map(|g| gray_inverse(g.iter().fold(0u16, |acc, &x| (acc << 1) | u16::from(x))))
        .collect();
    SymbolWord::new(symbols, p)
}

pub fn gray_demap(word: &SymbolWord) -> Vec<u8> {
    let b = word.p.trailing_zeros() as usize;
    word.symbols
        .iter()
        .flat_map(|&s| {
            let g = gray(s);
            (0..b).rev().map(move |i| ((g >> i) & 1) as u8)
        })
        .collect()
}
