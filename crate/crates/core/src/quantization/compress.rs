use rug::Rational;

use super::pmf::ErrorPmf;
use crate::error::{domain, Result};
use crate::params::Q;
use crate::ring::{center, Poly};

fn check_bits(d: u32) -> Result<()> {
    if d == 0 || (1u64 << d) >= u64::from(Q) {
        return domain(format!("compression needs 0 < d and 2^d < q, got d={d}"));
    }
    Ok(())
}

/// `round(2^d x / q) mod 2^d`, ties rounded up.
pub fn compress(x: u32, d: u32) -> Result<u32> {
    check_bits(d)?;
    if x >= Q {
        return domain(format!("{x} is not reduced mod q"));
    }
    Ok(compress_unchecked(x, d))
}

/// `round(q y / 2^d)`, ties rounded up.
pub fn decompress(y: u32, d: u32) -> Result<u32> {
    check_bits(d)?;
    if y >= 1 << d {
        return domain(format!("{y} does not fit in {d} bits"));
    }
    Ok(decompress_unchecked(y, d))
}

#[inline]
pub(crate) fn compress_unchecked(x: u32, d: u32) -> u32 {
    (((x << (d + 1)) + Q) / (2 * Q)) & ((1 << d) - 1)
}

#[inline]
pub(crate) fn decompress_unchecked(y: u32, d: u32) -> u32 {
    (2 * Q * y + (1 << d)) >> (d + 1)
}

pub fn compress_poly(p: &Poly, d: u32) -> Result<Vec<u16>> {
    check_bits(d)?;
    Ok(p.coeffs().iter().map(|&c| compress_unchecked(u32::from(c), d) as u16).collect())
}

pub fn decompress_poly(indices: &[u16], d: u32) -> Result<Poly> {
    check_bits(d)?;
    if let Some(&y) = indices.iter().find(|&&y| u32::from(y) >= 1 << d) {
        return domain(format!("{y} does not fit in {d} bits"));
    }
    let coeffs: Vec<u16> = indices
        .iter()
        .map(|&y| decompress_unchecked(u32::from(y), d) as u16)
        .collect();
    Poly::from_coeffs(&coeffs)
}

/// Exact distribution of `x - Decompress(Compress(x, d), d)` (centered mod q)
/// for `x` uniform on `Z_q`.
pub fn compress_error_pmf(d: u32) -> Result<ErrorPmf> {
    check_bits(d)?;
    let p = Rational::from((1, Q));
    ErrorPmf::from_pairs((0..Q).map(|x| {
        let back = decompress_unchecked(compress_unchecked(x, d), d);
        let e = (x + Q - back) % Q;
        (Rational::from(center(e as u16)), p.clone())
    }))
}
