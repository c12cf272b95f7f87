//! Byte formats. Values are packed at a fixed bit width, least significant
//! bit first, into a little-endian bit stream.

use crate::error::{Error, Result};
use crate::params::{ParamSet, Variant, N, Q, RAW_BITS};
use crate::ring::{Poly, PolyVec};
use crate::sampling::Seed;

use super::{Ciphertext, PublicKey, SecretKey, VPart};

pub fn pack_bits(values: &[u16], width: u32) -> Vec<u8> {
    let mut out = vec![0u8; (values.len() * width as usize).div_ceil(8)];
    let mut pos = 0usize;
    for &v in values {
        for b in 0..width {
            out[pos / 8] |= (((v >> b) & 1) as u8) << (pos % 8);
            pos += 1;
        }
    }
    out
}

/// Inverse of [`pack_bits`]; the length must match exactly and padding bits
/// must be zero.
pub fn unpack_bits(bytes: &[u8], width: u32, count: usize) -> Result<Vec<u16>> {
    let total = count * width as usize;
    if bytes.len() != total.div_ceil(8) {
        return Err(Error::Malformed(format!(
            "expected {} bytes for {count} values of {width} bits, got {}",
            total.div_ceil(8),
            bytes.len()
        )));
    }
    let bit = |i: usize| u16::from((bytes[i / 8] >> (i % 8)) & 1);
    if (total..bytes.len() * 8).any(|i| bit(i) != 0) {
        return Err(Error::Malformed("nonzero padding bits".into()));
    }
    Ok((0..count)
        .map(|c| (0..width as usize).fold(0u16, |acc, b| acc | bit(c * width as usize + b) << b))
        .collect())
}

/// Plaintext bytes to `nbits` bits.
pub fn bytes_to_bits(bytes: &[u8], nbits: usize) -> Result<Vec<u8>> {
    Ok(unpack_bits(bytes, 1, nbits)?.into_iter().map(|b| b as u8).collect())
}

pub fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    pack_bits(&bits.iter().map(|&b| u16::from(b & 1)).collect::<Vec<_>>(), 1)
}

fn pack_polys(polys: &PolyVec) -> Vec<u8> {
    let coeffs: Vec<u16> = polys.iter().flat_map(|p| p.coeffs().iter().copied()).collect();
    pack_bits(&coeffs, RAW_BITS)
}

fn unpack_polys(bytes: &[u8], k: usize) -> Result<PolyVec> {
    let coeffs = unpack_bits(bytes, RAW_BITS, k * N)?;
    coeffs
        .chunks(N)
        .map(|c| Poly::from_coeffs(c).map_err(|_| Error::Malformed("coefficient not below q".into())))
        .collect::<Result<Vec<_>>>()
        .map(PolyVec)
}

fn check_rank(ps: &ParamSet, len: usize) -> Result<()> {
    if len == ps.k {
        Ok(())
    } else {
        Err(Error::Dimension { expected: ps.k, actual: len })
    }
}

impl PublicKey {
    /// `t` at 12 bits per coefficient, then `rho`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = pack_polys(&self.t);
        out.extend_from_slice(self.rho.as_bytes());
        out
    }

    pub fn from_bytes(ps: &ParamSet, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != ps.public_key_bytes() {
            return Err(Error::Malformed(format!(
                "public key for {} has {} bytes, got {}",
                ps.name,
                ps.public_key_bytes(),
                bytes.len()
            )));
        }
        let split = bytes.len() - 32;
        let t = unpack_polys(&bytes[..split], ps.k)?;
        Ok(PublicKey { t, rho: Seed::from_slice(&bytes[split..])? })
    }
}

impl SecretKey {
    /// `s` at 12 bits per coefficient.
    pub fn to_bytes(&self) -> Vec<u8> {
        pack_polys(&self.s)
    }

    pub fn from_bytes(ps: &ParamSet, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != ps.secret_key_bytes() {
            return Err(Error::Malformed(format!(
                "secret key for {} has {} bytes, got {}",
                ps.name,
                ps.secret_key_bytes(),
                bytes.len()
            )));
        }
        Ok(SecretKey { s: unpack_polys(bytes, ps.k)? })
    }
}

impl Ciphertext {
    /// `u` indices at `d_u` bits, then `v` at `d_v` bits (or 12 bits when raw).
    /// The two parts are packed separately, each padded to whole bytes.
    pub fn to_bytes(&self, ps: &ParamSet) -> Result<Vec<u8>> {
        if self.variant != ps.variant {
            return Err(Error::Domain(format!(
                "{} ciphertext does not belong to {}",
                self.variant.as_str(),
                ps.name
            )));
        }
        check_rank(ps, self.u.len() / N)?;
        let mut out = pack_bits(&self.u, ps.du);
        match &self.v {
            VPart::Indices(idx) => out.extend(pack_bits(idx, ps.dv)),
            VPart::Raw(p) => out.extend(pack_bits(p.coeffs(), RAW_BITS)),
        }
        Ok(out)
    }

    pub fn from_bytes(ps: &ParamSet, bytes: &[u8]) -> Result<Self> {
        let u_len = (ps.k * N * ps.du as usize).div_ceil(8);
        let v_len = (N * ps.v_bits() as usize).div_ceil(8);
        if bytes.len() != u_len + v_len {
            return Err(Error::Malformed(format!(
                "ciphertext for {} has {} bytes, got {}",
                ps.name,
                u_len + v_len,
                bytes.len()
            )));
        }
        let u = unpack_bits(&bytes[..u_len], ps.du, ps.k * N)?;
        let v_vals = unpack_bits(&bytes[u_len..], ps.v_bits(), N)?;
        let v = match ps.variant {
            Variant::SemiCompressed => VPart::Raw(
                Poly::from_coeffs(&v_vals)
                    .map_err(|_| Error::Malformed(format!("raw v coefficient not below {Q}")))?,
            ),
            _ => VPart::Indices(v_vals),
        };
        Ok(Ciphertext { variant: ps.variant, u, v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lsb_first_layout() {
        assert_eq!(pack_bits(&[0b101, 0b011], 3), vec![0b011_101]);
        assert_eq!(pack_bits(&[0xABC], 12), vec![0xBC, 0x0A]);
        assert_eq!(unpack_bits(&[0xBC, 0x0A], 12, 1).unwrap(), vec![0xABC]);
    }

    #[test]
    fn rejects_padding_and_length() {
        assert!(unpack_bits(&[0xff], 3, 2).is_err());
        assert!(unpack_bits(&[0, 0], 3, 2).is_err());
        assert_eq!(bytes_to_bits(&[0b10], 2).unwrap(), vec![0, 1]);
        assert_eq!(bits_to_bytes(&[0, 1, 1]), vec![0b110]);
    }
}
