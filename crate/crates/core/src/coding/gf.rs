use crate::error::{domain, Result};

/// Primitive polynomials (bitmask including the `X^m` term) for `GF(2^m)`.
pub fn default_primitive_poly(m: u32) -> Option<u32> {
    Some(match m {
        2 => 0x7,
        3 => 0xB,
        4 => 0x13,
        5 => 0x25,
        6 => 0x43,
        7 => 0x89,
        8 => 0x11D,
        9 => 0x211,
        // X^10 + X^3 + 1
        10 => 0x409,
        11 => 0x805,
        12 => 0x1053,
        13 => 0x201B,
        14 => 0x4443,
        15 => 0x8003,
        16 => 0x1100B,
        _ => return None,
    })
}

/// `GF(2^m)` in polynomial basis with log/antilog tables.
#[derive(Debug, Clone)]
pub struct GF2mField {
    m: u32,
    modulus: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl GF2mField {
    pub fn new(m: u32, modulus: u32) -> Result<Self> {
        if !(2..=16).contains(&m) {
            return domain(format!("GF(2^{m}) is not supported"));
        }
        if modulus >> m != 1 {
            return domain(format!("modulus {modulus:#x} does not have degree {m}"));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order + 1];
        let mut seen = vec![false; order + 1];
        let mut x: u32 = 1;
        for i in 0..order {
            if seen[x as usize] {
                return domain(format!("modulus {modulus:#x} is not primitive"));
            }
            seen[x as usize] = true;
            exp[i] = x as u16;
            exp[i + order] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x >> m != 0 {
                x ^= modulus;
            }
        }
        if x != 1 {
            return domain(format!("modulus {modulus:#x} is not primitive"));
        }
        Ok(GF2mField { m, modulus, exp, log })
    }

    pub fn with_default_modulus(m: u32) -> Result<Self> {
        match default_primitive_poly(m) {
            Some(p) => Self::new(m, p),
            None => domain(format!("no default primitive polynomial for m={m}")),
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Multiplicative group order `2^m - 1`.
    pub fn order(&self) -> usize {
        (1 << self.m) - 1
    }

    /// `alpha^e` for any exponent (reduced mod the group order).
    pub fn alpha_pow(&self, e: usize) -> u16 {
        self.exp[e % self.order()]
    }

    /// Discrete log of a nonzero element.
    pub fn log(&self, x: u16) -> Option<usize> {
        (x != 0).then(|| self.log[x as usize] as usize)
    }

    /// Table multiplication; for public operands only.
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    /// Shift-and-add multiplication with a data-independent instruction
    /// sequence and no memory lookups.
    #[inline]
    pub fn mul_ct(&self, a: u16, b: u16) -> u16 {
        let (a, b) = (u32::from(a), u32::from(b));
        let mut r = 0u32;
        for i in 0..self.m {
            r ^= (a << i) & 0u32.wrapping_sub((b >> i) & 1);
        }
        for i in (self.m..2 * self.m - 1).rev() {
            r ^= (self.modulus << (i - self.m)) & 0u32.wrapping_sub((r >> i) & 1);
        }
        r as u16
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_consistent() {
        for m in 2..=12 {
            let f = GF2mField::with_default_modulus(m).unwrap();
            for x in 1..=f.order() as u16 {
                assert_eq!(f.alpha_pow(f.log(x).unwrap()), x);
            }
        }
    }

    #[test]
    fn non_primitive_rejected() {
        // X^4 + X^3 + X^2 + X + 1 is irreducible but alpha has order 5.
        assert!(GF2mField::new(4, 0x1F).is_err());
        assert!(GF2mField::new(4, 0x9).is_err());
        assert!(GF2mField::new(1, 0x3).is_err());
    }

    #[test]
    fn constant_flow_mul_matches_tables() {
        let f = GF2mField::with_default_modulus(10).unwrap();
        for a in (0..1024u16).step_by(7) {
            for b in (0..1024u16).step_by(13) {
                assert_eq!(f.mul_ct(a, b), f.mul(a, b));
            }
        }
    }
}
