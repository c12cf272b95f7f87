//! Narrow-sense binary BCH codes, shortened by fixing leading message
//! positions to zero.
//!
//! Bit `i` of an `N`-bit word is the coefficient of `X^(N-1-i)`. Encoding is
//! systematic: the `K` message bits come first, followed by the parity bits.
//!
//! The decoder runs syndrome evaluation, inversionless Berlekamp-Massey and a
//! Chien search with an iteration schedule that depends only on the code
//! parameters. Field products on received data go through
//! [`GF2mField::mul_ct`]; table lookups are indexed by positions only.

use super::gf::GF2mField;
use crate::error::{Error, Result};
use crate::params::CodeSpec;

#[derive(Debug, Clone)]
pub struct BchCode {
    spec: CodeSpec,
    field: GF2mField,
    /// Generator coefficients over GF(2), lowest degree first.
    generator: Vec<u8>,
    /// Generator without its leading term, packed into 64-bit words.
    feedback: Vec<u64>,
}

/// A successful decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub message: Vec<u8>,
    /// Bits flipped to reach the codeword.
    pub corrected: usize,
}

fn gf2_poly_mul(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 1 {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= y;
            }
        }
    }
    out
}

impl BchCode {
    pub fn new(spec: CodeSpec) -> Result<Self> {
        let field = GF2mField::with_default_modulus(spec.m)?;
        Self::with_field(spec, field)
    }

    pub fn with_field(spec: CodeSpec, field: GF2mField) -> Result<Self> {
        if field.m() != spec.m {
            return Err(Error::Config("field degree does not match the code".into()));
        }
        let order = field.order();
        if 2 * spec.t >= order {
            return Err(Error::Config(format!("t={} too large for GF(2^{})", spec.t, spec.m)));
        }
        // LCM of the minimal polynomials of alpha^1 .. alpha^2t.
        let mut covered = vec![false; order];
        let mut generator = vec![1u8];
        for i in 1..=2 * spec.t {
            if covered[i % order] {
                continue;
            }
            let mut coset = Vec::new();
            let mut e = i % order;
            while !covered[e] {
                covered[e] = true;
                coset.push(e);
                e = (2 * e) % order;
            }
            // prod over the coset of (X - alpha^e), coefficients in GF(2^m)
            let mut minpoly: Vec<u16> = vec![1];
            for &e in &coset {
                let root = field.alpha_pow(e);
                let mut next = vec![0u16; minpoly.len() + 1];
                for (d, &c) in minpoly.iter().enumerate() {
                    next[d + 1] ^= c;
                    next[d] ^= field.mul(c, root);
                }
                minpoly = next;
            }
            let binary: Vec<u8> = minpoly
                .iter()
                .map(|&c| match c {
                    0 | 1 => Ok(c as u8),
                    _ => Err(Error::Config("minimal polynomial not over GF(2)".into())),
                })
                .collect::<Result<_>>()?;
            generator = gf2_poly_mul(&generator, &binary);
        }
        let degree = generator.len() - 1;
        if degree != spec.redundancy() {
            return Err(Error::Config(format!(
                "BCH code with t={} over GF(2^{}) has {} parity bits, not {}",
                spec.t,
                spec.m,
                degree,
                spec.redundancy()
            )));
        }
        let mut feedback = vec![0u64; degree.div_ceil(64)];
        for (d, &c) in generator[..degree].iter().enumerate() {
            feedback[d / 64] |= u64::from(c) << (d % 64);
        }
        Ok(BchCode { spec, field, generator, feedback })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn field(&self) -> &GF2mField {
        &self.field
    }

    /// Generator polynomial over GF(2), lowest degree first.
    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    fn redundancy(&self) -> usize {
        self.spec.redundancy()
    }

    /// Systematic encoding of `K` message bits into an `N`-bit codeword.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.spec.k {
            return Err(Error::Dimension { expected: self.spec.k, actual: message.len() });
        }
        if message.iter().any(|&b| b > 1) {
            return Err(Error::Domain("message bits must be 0 or 1".into()));
        }
        let r = self.redundancy();
        let words = self.feedback.len();
        let top_word = (r - 1) / 64;
        let top_bit = (r - 1) % 64;
        // reg holds the running remainder of m(X) X^r mod g(X)
        let mut reg = vec![0u64; words];
        for &bit in message {
            let fb = u64::from(bit) ^ ((reg[top_word] >> top_bit) & 1);
            for w in (0..words).rev() {
                let carry = if w > 0 { reg[w - 1] >> 63 } else { 0 };
                reg[w] = (reg[w] << 1) | carry;
            }
            if !r.is_multiple_of(64) {
                reg[top_word] &= (1u64 << (r % 64)) - 1;
            }
            let mask = 0u64.wrapping_sub(fb);
            for (x, f) in reg.iter_mut().zip(&self.feedback) {
                *x ^= f & mask;
            }
        }
        let mut codeword = Vec::with_capacity(self.spec.n);
        codeword.extend_from_slice(message);
        codeword.extend((0..r).rev().map(|d| ((reg[d / 64] >> (d % 64)) & 1) as u8));
        Ok(codeword)
    }

    /// Syndromes `S_j = r(alpha^j)` for `j = 1..=2t`.
    pub fn syndromes(&self, word: &[u8]) -> Result<Vec<u16>> {
        if word.len() != self.spec.n {
            return Err(Error::Dimension { expected: self.spec.n, actual: word.len() });
        }
        let n = self.spec.n;
        let order = self.field.order();
        Ok((1..=2 * self.spec.t)
            .map(|j| {
                let mut s = 0u16;
                let mut e = (j * (n - 1)) % order;
                for &bit in word {
                    s ^= self.field.alpha_pow(e) & 0u16.wrapping_sub(u16::from(bit & 1));
                    e = (e + order - j % order) % order;
                }
                s
            })
            .collect())
    }

    /// Decodes up to `t` bit errors. Words farther than `t` from every
    /// codeword are usually reported as [`Error::DecodeFailure`], but may also
    /// be miscorrected to a different codeword.
    pub fn decode(&self, word: &[u8]) -> Result<Decoded> {
        let synd = self.syndromes(word)?;
        let t = self.spec.t;
        let f = &self.field;
        let len = 2 * t + 1;

        let mut lambda = vec![0u16; len];
        let mut b = vec![0u16; len];
        lambda[0] = 1;
        b[0] = 1;
        let mut gamma: u16 = 1;
        let mut k: i64 = 0;
        for r in 0..2 * t {
            let mut delta = 0u16;
            for i in 0..=r.min(len - 1) {
                delta ^= f.mul_ct(lambda[i], synd[r - i]);
            }
            let mut next = vec![0u16; len];
            for i in 0..len {
                let shifted_b = if i > 0 { b[i - 1] } else { 0 };
                next[i] = f.mul_ct(gamma, lambda[i]) ^ f.mul_ct(delta, shifted_b);
            }
            let nonzero = (u32::from(delta) | u32::from(delta).wrapping_neg()) >> 31;
            let k_nonneg = (!(k >> 63) & 1) as u32;
            let swap = nonzero & k_nonneg;
            let mask16 = 0u16.wrapping_sub(swap as u16);
            for i in (0..len).rev() {
                let shifted_b = if i > 0 { b[i - 1] } else { 0 };
                b[i] = (lambda[i] & mask16) | (shifted_b & !mask16);
            }
            gamma = (delta & mask16) | (gamma & !mask16);
            let mask64 = 0i64.wrapping_sub(i64::from(swap));
            k = ((-k - 1) & mask64) | ((k + 1) & !mask64);
            lambda = next;
        }

        let mut degree = 0usize;
        for (i, &c) in lambda.iter().enumerate() {
            let nz = ((u32::from(c) | u32::from(c).wrapping_neg()) >> 31) as usize;
            degree = (i & 0usize.wrapping_sub(nz)) | (degree & !0usize.wrapping_sub(nz));
        }
        let overflow = lambda[t + 1..].iter().fold(0u16, |acc, &c| acc | c);

        // Chien search: bit i is in error iff lambda(alpha^-(N-1-i)) = 0.
        let n = self.spec.n;
        let order = f.order();
        let mut flips = vec![0u8; n];
        let mut roots = 0usize;
        for (i, flip) in flips.iter_mut().enumerate() {
            let inv = (order - (n - 1 - i) % order) % order;
            let mut acc = 0u16;
            for (j, &c) in lambda[..=t].iter().enumerate() {
                acc ^= f.mul_ct(c, f.alpha_pow(inv * j));
            }
            let is_root = (((u32::from(acc) | u32::from(acc).wrapping_neg()) >> 31) ^ 1) as u8;
            *flip = is_root;
            roots += usize::from(is_root);
        }

        if overflow != 0 || degree > t || roots != degree {
            return Err(Error::DecodeFailure(format!(
                "error locator of degree {degree} has {roots} roots in the codeword"
            )));
        }
        let message = word[..self.spec.k]
            .iter()
            .zip(&flips)
            .map(|(&w, &e)| (w & 1) ^ e)
            .collect();
        Ok(Decoded { message, corrected: roots })
    }
}
