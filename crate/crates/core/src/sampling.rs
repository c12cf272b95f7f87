//! Seed expansion: uniform matrices via SHAKE-128 rejection sampling and
//! centered-binomial noise via SHAKE-256.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::{Shake128, Shake256};

use crate::error::{domain, Error, Result};
use crate::params::{N, Q};
use crate::ring::{Poly, PolyMat, PolyVec};

/// Widest supported binomial parameter.
pub const MAX_ETA: u32 = 4;

/// 32 bytes of seed material.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub [u8; 32]);

impl std::fmt::Debug for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Seed({})", hex::encode(self.0))
    }
}

impl Seed {
    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| Error::Malformed(format!("seed must be 32 bytes, got {}", bytes.len())))?;
        Ok(Seed(arr))
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s.trim()).map_err(|e| Error::Malformed(format!("seed hex: {e}")))?;
        Self::from_slice(&bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Derives an independent child seed; used to give every Monte-Carlo trial
    /// its own stream.
    pub fn derive(&self, label: &[u8], index: u64) -> Seed {
        let mut h = Shake256::default();
        h.update(&self.0);
        h.update(label);
        h.update(&index.to_le_bytes());
        let mut out = [0u8; 32];
        h.finalize_xof().read(&mut out);
        Seed(out)
    }
}

/// Parses one uniform polynomial from a SHAKE-128 stream, discarding 12-bit
/// candidates that are not below q.
fn sample_uniform(rho: &Seed, i: u8, j: u8) -> Poly {
    let mut h = Shake128::default();
    h.update(&rho.0);
    h.update(&[j, i]);
    let mut reader = h.finalize_xof();
    let mut coeffs = [0u16; N];
    let mut filled = 0;
    let mut buf = [0u8; 168];
    while filled < N {
        reader.read(&mut buf);
        for chunk in buf.chunks_exact(3) {
            let d1 = u16::from(chunk[0]) | (u16::from(chunk[1] & 0x0f) << 8);
            let d2 = u16::from(chunk[1] >> 4) | (u16::from(chunk[2]) << 4);
            for d in [d1, d2] {
                if u32::from(d) < Q && filled < N {
                    coeffs[filled] = d;
                    filled += 1;
                }
            }
        }
    }
    Poly::from_array(coeffs)
}

/// Expands `rho` into a uniformly random `k x k` matrix; entry `(i, j)` reads
/// the stream for `rho || j || i`.
pub fn expand_matrix(rho: &Seed, k: usize) -> PolyMat {
    assert!(k <= u8::MAX as usize, "module rank must fit in a byte");
    let rows = (0..k)
        .map(|i| (0..k).map(|j| sample_uniform(rho, i as u8, j as u8)).collect())
        .collect();
    PolyMat::from_rows(rows).expect("square by construction")
}

/// Samples a polynomial from the centered binomial distribution of width
/// `eta`: each coefficient is a difference of two `eta`-bit popcounts.
pub fn cbd(sigma: &Seed, nonce: u8, eta: u32) -> Result<Poly> {
    Ok(Poly::from_array(cbd_signed(sigma, nonce, eta)?.map(|v| {
        v.rem_euclid(Q as i32) as u16
    })))
}

/// As [`cbd`], with coefficients left as signed integers in `[-eta, eta]`.
pub fn cbd_signed(sigma: &Seed, nonce: u8, eta: u32) -> Result<[i32; N]> {
    if eta == 0 || eta > MAX_ETA {
        return domain(format!("unsupported binomial width eta={eta} (supported 1..={MAX_ETA})"));
    }
    let mut h = Shake256::default();
    h.update(&sigma.0);
    h.update(&[nonce]);
    let mut buf = vec![0u8; 64 * eta as usize];
    h.finalize_xof().read(&mut buf);

    let bit = |i: usize| i32::from((buf[i / 8] >> (i % 8)) & 1);
    let eta = eta as usize;
    let mut out = [0i32; N];
    for (c, o) in out.iter_mut().enumerate() {
        let base = 2 * eta * c;
        let a: i32 = (0..eta).map(|j| bit(base + j)).sum();
        let b: i32 = (0..eta).map(|j| bit(base + eta + j)).sum();
        *o = a - b;
    }
    Ok(out)
}

/// `k` binomial polynomials using consecutive nonces starting at `first_nonce`.
pub fn cbd_vec(sigma: &Seed, first_nonce: u8, k: usize, eta: u32) -> Result<PolyVec> {
    (0..k)
        .map(|i| cbd(sigma, first_nonce + i as u8, eta))
        .collect::<Result<Vec<_>>>()
        .map(PolyVec)
}
