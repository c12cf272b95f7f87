//! Arithmetic in `R_q = Z_q[X]/(X^256 + 1)`.
//!
//! Products go through Kyber's incomplete number-theoretic transform. The
//! [`exact`] submodule multiplies small integer polynomials without any modular
//! reduction, which the rational-level decryption paths need.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::params::{N, Q};

const QI: i32 = Q as i32;

/// A polynomial with every coefficient reduced into `[0, q)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: [u16; N],
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poly({:?}, ..)", &self.coeffs[..8])
    }
}

impl Default for Poly {
    fn default() -> Self {
        Self::zero()
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: [0; N] }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// `X^deg` for `deg < n`.
    pub fn monomial(deg: usize) -> Self {
        let mut p = Self::zero();
        p.coeffs[deg] = 1;
        p
    }

    /// Fails unless there are exactly `n` coefficients, each below `q`.
    pub fn from_coeffs(coeffs: &[u16]) -> Result<Self> {
        if coeffs.len() != N {
            return Err(Error::Dimension { expected: N, actual: coeffs.len() });
        }
        if let Some(c) = coeffs.iter().find(|&&c| u32::from(c) >= Q) {
            return Err(Error::Domain(format!("coefficient {c} not reduced mod q")));
        }
        let mut p = Self::zero();
        p.coeffs.copy_from_slice(coeffs);
        Ok(p)
    }

    /// Reduces arbitrary signed integers mod q.
    pub fn from_signed(values: &[i64]) -> Result<Self> {
        if values.len() != N {
            return Err(Error::Dimension { expected: N, actual: values.len() });
        }
        let mut p = Self::zero();
        for (c, &v) in p.coeffs.iter_mut().zip(values) {
            *c = v.rem_euclid(i64::from(Q)) as u16;
        }
        Ok(p)
    }

    pub(crate) fn from_array(coeffs: [u16; N]) -> Self {
        debug_assert!(coeffs.iter().all(|&c| u32::from(c) < Q));
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[u16; N] {
        &self.coeffs
    }

    /// Coefficients as centered representatives in `(-q/2, q/2]`.
    pub fn centered(&self) -> [i32; N] {
        let mut out = [0i32; N];
        for (o, &c) in out.iter_mut().zip(&self.coeffs) {
            *o = center(c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub(crate) fn ntt(&self) -> NttPoly {
        let mut f = self.coeffs.map(i32::from);
        ntt_forward(&mut f);
        NttPoly(f)
    }
}

#[inline]
pub fn center(c: u16) -> i32 {
    let c = i32::from(c);
    if c > QI / 2 {
        c - QI
    } else {
        c
    }
}

#[inline]
fn reduce(x: i32) -> i32 {
    x.rem_euclid(QI)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = [0u16; N];
        for ((o, &a), &b) in out.iter_mut().zip(&self.coeffs).zip(&rhs.coeffs) {
            let s = a + b;
            *o = if u32::from(s) >= Q { s - Q as u16 } else { s };
        }
        Poly { coeffs: out }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = [0u16; N];
        for ((o, &a), &b) in out.iter_mut().zip(&self.coeffs).zip(&rhs.coeffs) {
            *o = reduce(i32::from(a) - i32::from(b)) as u16;
        }
        Poly { coeffs: out }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        &Poly::zero() - self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.ntt().pointwise(&rhs.ntt()).inverse()
    }
}

/// NTT-domain representation: 128 residues modulo `X^2 - zeta`.
#[derive(Clone)]
pub(crate) struct NttPoly([i32; N]);

impl NttPoly {
    fn zero() -> Self {
        NttPoly([0; N])
    }

    fn pointwise(&self, rhs: &NttPoly) -> NttPoly {
        let mut out = NttPoly::zero();
        out.mul_acc(self, rhs);
        out
    }

    /// `self += a * b`.
    fn mul_acc(&mut self, a: &NttPoly, b: &NttPoly) {
        for i in 0..N / 4 {
            let zeta = ZETAS[64 + i];
            for (off, z) in [(0, zeta), (2, QI - zeta)] {
                let j = 4 * i + off;
                let (a0, a1, b0, b1) = (a.0[j], a.0[j + 1], b.0[j], b.0[j + 1]);
                let r0 = reduce(a0 * b0 + reduce(a1 * b1) * z);
                let r1 = reduce(a0 * b1 + a1 * b0);
                self.0[j] = reduce(self.0[j] + r0);
                self.0[j + 1] = reduce(self.0[j + 1] + r1);
            }
        }
    }

    fn inverse(mut self) -> Poly {
        ntt_inverse(&mut self.0);
        Poly::from_array(self.0.map(|c| c as u16))
    }
}

const fn bitrev7(mut x: usize) -> usize {
    let mut r = 0;
    let mut i = 0;
    while i < 7 {
        r = (r << 1) | (x & 1);
        x >>= 1;
        i += 1;
    }
    r
}

/// `17^bitrev7(i) mod q`; 17 is a primitive 256-th root of unity mod 3329.
const ZETAS: [i32; 128] = {
    let mut z = [0i32; 128];
    let mut i = 0;
    while i < 128 {
        let e = bitrev7(i);
        let mut acc: i64 = 1;
        let mut j = 0;
        while j < e {
            acc = acc * 17 % Q as i64;
            j += 1;
        }
        z[i] = acc as i32;
        i += 1;
    }
    z
};

fn ntt_forward(f: &mut [i32; N]) {
    let mut k = 1;
    let mut len = 128;
    while len >= 2 {
        for start in (0..N).step_by(2 * len) {
            let zeta = ZETAS[k];
            k += 1;
            for j in start..start + len {
                let t = reduce(zeta * f[j + len]);
                f[j + len] = reduce(f[j] - t);
                f[j] = reduce(f[j] + t);
            }
        }
        len /= 2;
    }
}

fn ntt_inverse(f: &mut [i32; N]) {
    // 128^{-1} mod q
    const INV128: i32 = 3303;
    let mut k = 127;
    let mut len = 2;
    while len <= 128 {
        for start in (0..N).step_by(2 * len) {
            let zeta = ZETAS[k];
            k -= 1;
            for j in start..start + len {
                let t = f[j];
                f[j] = reduce(t + f[j + len]);
                f[j + len] = reduce(zeta * (f[j + len] - t));
            }
        }
        len *= 2;
    }
    for c in f.iter_mut() {
        *c = reduce(*c * INV128);
    }
}

/// A column vector of polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyVec(pub Vec<Poly>);

impl PolyVec {
    pub fn zero(k: usize) -> Self {
        PolyVec(vec![Poly::zero(); k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Poly> {
        self.0.iter()
    }

    pub fn add(&self, rhs: &PolyVec) -> Result<PolyVec> {
        check_dim(self.len(), rhs.len())?;
        Ok(PolyVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect()))
    }
}

/// A square `k x k` matrix of polynomials, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMat {
    k: usize,
    entries: Vec<Poly>,
}

impl PolyMat {
    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for row in rows {
            check_dim(k, row.len())?;
            entries.extend(row);
        }
        Ok(PolyMat { k, entries })
    }

    pub fn identity(k: usize) -> Self {
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { Poly::one() } else { Poly::zero() }).collect())
            .collect();
        Self::from_rows(rows).expect("square by construction")
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn get(&self, row: usize, col: usize) -> &Poly {
        &self.entries[row * self.k + col]
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}

/// `sum_i a_i * b_i`.
pub fn inner_product(a: &PolyVec, b: &PolyVec) -> Result<Poly> {
    check_dim(a.len(), b.len())?;
    let mut acc = NttPoly::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        acc.mul_acc(&x.ntt(), &y.ntt());
    }
    Ok(acc.inverse())
}

fn matvec_impl(a: &PolyMat, r: &PolyVec, transpose: bool) -> Result<PolyVec> {
    check_dim(a.rank(), r.len())?;
    let k = a.rank();
    let r_hat: Vec<NttPoly> = r.iter().map(Poly::ntt).collect();
    let out = (0..k)
        .map(|i| {
            let mut acc = NttPoly::zero();
            for (j, rj) in r_hat.iter().enumerate() {
                let entry = if transpose { a.get(j, i) } else { a.get(i, j) };
                acc.mul_acc(&entry.ntt(), rj);
            }
            acc.inverse()
        })
        .collect();
    Ok(PolyVec(out))
}

/// `A^T r`.
pub fn matvec_t(a: &PolyMat, r: &PolyVec) -> Result<PolyVec> {
    matvec_impl(a, r, true)
}

/// `A s`.
pub fn matvec(a: &PolyMat, s: &PolyVec) -> Result<PolyVec> {
    matvec_impl(a, s, false)
}

/// Negacyclic products over the integers, without reduction mod q.
///
/// Computed with a negacyclic NTT modulo the prime `2^64 - 2^32 + 1`; the result
/// is exact as long as every output coefficient has magnitude below `2^62`,
/// which [`inner_product`](exact::inner_product) checks from the input bounds.
pub mod exact {
    use super::{check_dim, N};
    use crate::error::{Error, Result};

    const P: u64 = 0xFFFF_FFFF_0000_0001;
    const GENERATOR: u64 = 7;
    const LIMIT: u128 = 1 << 62;

    fn mulm(a: u64, b: u64) -> u64 {
        ((u128::from(a) * u128::from(b)) % u128::from(P)) as u64
    }

    fn addm(a: u64, b: u64) -> u64 {
        let (s, carry) = a.overflowing_add(b);
        if carry || s >= P {
            s.wrapping_sub(P)
        } else {
            s
        }
    }

    fn subm(a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(b).wrapping_add(P)
        }
    }

    fn powm(mut b: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, b);
            }
            b = mulm(b, b);
            e >>= 1;
        }
        r
    }

    struct Tables {
        psi_pows: Vec<u64>,
        psi_inv_pows: Vec<u64>,
        omega_pows: Vec<u64>,
        omega_inv_pows: Vec<u64>,
        n_inv: u64,
    }

    fn tables() -> &'static Tables {
        static TABLES: std::sync::OnceLock<Tables> = std::sync::OnceLock::new();
        TABLES.get_or_init(|| {
            let psi = powm(GENERATOR, (P - 1) / (2 * N as u64));
            let psi_inv = powm(psi, P - 2);
            let omega = mulm(psi, psi);
            let omega_inv = mulm(psi_inv, psi_inv);
            let pows = |b: u64, len: usize| {
                let mut v = Vec::with_capacity(len);
                let mut acc = 1;
                for _ in 0..len {
                    v.push(acc);
                    acc = mulm(acc, b);
                }
                v
            };
            Tables {
                psi_pows: pows(psi, N),
                psi_inv_pows: pows(psi_inv, N),
                omega_pows: pows(omega, N / 2),
                omega_inv_pows: pows(omega_inv, N / 2),
                n_inv: powm(N as u64, P - 2),
            }
        })
    }

    fn transform(a: &mut [u64; N], roots: &[u64]) {
        let mut j = 0;
        for i in 1..N {
            let mut bit = N >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= N {
            let step = N / len;
            for start in (0..N).step_by(len) {
                for i in 0..len / 2 {
                    let w = roots[i * step];
                    let u = a[start + i];
                    let v = mulm(a[start + i + len / 2], w);
                    a[start + i] = addm(u, v);
                    a[start + i + len / 2] = subm(u, v);
                }
            }
            len <<= 1;
        }
    }

    fn to_field(x: i64) -> u64 {
        if x >= 0 {
            x as u64
        } else {
            P - x.unsigned_abs()
        }
    }

    fn forward(a: &[i64]) -> [u64; N] {
        let t = tables();
        let mut out = [0u64; N];
        for i in 0..N {
            out[i] = mulm(to_field(a[i]), t.psi_pows[i]);
        }
        transform(&mut out, &t.omega_pows);
        out
    }

    fn inverse(mut a: [u64; N]) -> Vec<i64> {
        let t = tables();
        transform(&mut a, &t.omega_inv_pows);
        a.iter()
            .zip(&t.psi_inv_pows)
            .map(|(&x, &w)| {
                let v = mulm(mulm(x, w), t.n_inv);
                if v > P / 2 {
                    -((P - v) as i64)
                } else {
                    v as i64
                }
            })
            .collect()
    }

    fn max_abs(p: &[i64]) -> u128 {
        p.iter().map(|x| u128::from(x.unsigned_abs())).max().unwrap_or(0)
    }

    /// `sum_i a_i * b_i` in `Z[X]/(X^n + 1)`.
    pub fn inner_product(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<i64>> {
        check_dim(a.len(), b.len())?;
        let mut bound: u128 = 0;
        for (x, y) in a.iter().zip(b) {
            check_dim(N, x.len())?;
            check_dim(N, y.len())?;
            bound += max_abs(x) * max_abs(y) * N as u128;
        }
        if bound >= LIMIT {
            return Err(Error::Resource(format!(
                "exact product bound {bound} exceeds 2^62"
            )));
        }
        let mut acc = [0u64; N];
        for (x, y) in a.iter().zip(b) {
            let (fx, fy) = (forward(x), forward(y));
            for i in 0..N {
                acc[i] = addm(acc[i], mulm(fx[i], fy[i]));
            }
        }
        Ok(inverse(acc))
    }

    pub fn mul(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
        inner_product(&[a.to_vec()], &[b.to_vec()])
    }
}
