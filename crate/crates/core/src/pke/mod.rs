//! Kyber CPA public-key encryption in three flavours.
//!
//! * `Original`: both ciphertext parts compressed with Kyber's rounding.
//! * `LloydMax`: both parts quantized with Lloyd-Max codebooks designed for a
//!   uniform source on `Z_q`; ciphertext sizes are unchanged.
//! * `SemiCompressed`: `u` quantized with Lloyd-Max, `v` sent raw, and the
//!   plaintext carried as BCH-coded, Gray-mapped `p`-PAM symbols.
//!
//! Rational reconstruction levels are handled by scaling everything by the
//! common denominator `D` of the codebooks and working over the integers.
//! Decryption avoids branches and table lookups indexed by secret data.

mod encoding;

pub use encoding::{bits_to_bytes, bytes_to_bits, pack_bits, unpack_bits};

use sha3::{Digest, Sha3_512};

use crate::coding::{dec_symbols, enc_pipeline, BchCode, SymbolWord};
use crate::error::{Error, Result};
use crate::params::{ParamSet, Variant, N, Q};
use crate::quantization::{
    compress_poly, decompress_poly, uniform_codebook, DiscretePmf, QuantCodebook, ScaledCodebook,
};
use crate::ring::{self, exact, Poly, PolyVec};
use crate::sampling::{cbd, cbd_vec, expand_matrix, Seed};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub t: PolyVec,
    pub rho: Seed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    pub s: PolyVec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VPart {
    /// Quantizer indices.
    Indices(Vec<u16>),
    /// Uncompressed `v`.
    Raw(Poly),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub variant: Variant,
    /// `k * n` quantizer indices for `u`, polynomial by polynomial.
    pub u: Vec<u16>,
    pub v: VPart,
}

/// Unquantized `v` and the plaintext term added to it, kept by
/// [`Scheme::encrypt_traced`] for noise measurements.
#[derive(Debug, Clone)]
pub struct EncryptionTrace {
    pub v: Poly,
    pub payload: Poly,
}

/// Decoding noise of one decryption, scaled by `denominator`.
#[derive(Debug, Clone)]
pub struct NoiseParts {
    pub denominator: i64,
    /// `D * (e^T r + e_2 - s^T(e_1 + e_u))`, centered.
    pub gaussian: Vec<i64>,
    /// `D * e_v`, the quantization error of `v` (zero when `v` is raw).
    pub v_error: Vec<i64>,
}

#[derive(Debug, Clone)]
struct Book {
    codebook: QuantCodebook,
    scaled: ScaledCodebook,
}

impl Book {
    fn new(codebook: QuantCodebook, bits: u32, part: &str) -> Result<Self> {
        let expected = 1usize << bits;
        if codebook.len() != expected {
            return Err(Error::Config(format!(
                "{part} codebook has {} levels, the parameter set needs {expected}",
                codebook.len()
            )));
        }
        let source = DiscretePmf::uniform(Q)?;
        if codebook.source() != source.label() {
            return Err(Error::Config(format!(
                "{part} codebook was designed for `{}`, not `{}`",
                codebook.source(),
                source.label()
            )));
        }
        let scaled = codebook.scaled()?;
        Ok(Book { codebook, scaled })
    }
}

/// A parameter set together with the codebooks and code it needs.
#[derive(Debug, Clone)]
pub struct Scheme {
    ps: ParamSet,
    u_book: Option<Book>,
    v_book: Option<Book>,
    code: Option<BchCode>,
}

fn bit_masked(bits: &[u8], weight: u16) -> Result<Poly> {
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::Domain("message bits must be 0 or 1".into()));
    }
    Ok(Poly::from_array(std::array::from_fn(|i| u16::from(bits[i]) * weight)))
}

fn signed(p: &Poly) -> Vec<i64> {
    p.centered().iter().map(|&c| i64::from(c)).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Scheme {
    /// Builds the scheme, designing any Lloyd-Max codebooks from scratch.
    pub fn new(ps: &ParamSet) -> Result<Self> {
        let u = (ps.variant != Variant::Original).then(|| uniform_codebook(ps.du)).transpose()?;
        let v = (ps.variant == Variant::LloydMax).then(|| uniform_codebook(ps.dv)).transpose()?;
        Self::with_codebooks(ps, u, v)
    }

    /// Uses caller-supplied codebooks. A codebook the variant needs must be
    /// present with `2^d` levels for a uniform source on `Z_q`.
    pub fn with_codebooks(
        ps: &ParamSet,
        u_codebook: Option<QuantCodebook>,
        v_codebook: Option<QuantCodebook>,
    ) -> Result<Self> {
        ps.validate()?;
        let need = |cb: Option<QuantCodebook>, wanted: bool, bits: u32, part: &str| match (cb, wanted) {
            (Some(cb), true) => Book::new(cb, bits, part).map(Some),
            (None, true) => Err(Error::Config(format!(
                "{} needs a {part} codebook with {} levels",
                ps.name,
                1usize << bits
            ))),
            (_, false) => Ok(None),
        };
        let u_book = need(u_codebook, ps.variant != Variant::Original, ps.du, "u")?;
        let v_book = need(v_codebook, ps.variant == Variant::LloydMax, ps.dv, "v")?;
        let code = match (ps.variant, ps.code) {
            (Variant::SemiCompressed, Some(spec)) => Some(BchCode::new(spec)?),
            _ => None,
        };
        Ok(Scheme { ps: ps.clone(), u_book, v_book, code })
    }

    pub fn params(&self) -> &ParamSet {
        &self.ps
    }

    pub fn u_codebook(&self) -> Option<&QuantCodebook> {
        self.u_book.as_ref().map(|b| &b.codebook)
    }

    pub fn v_codebook(&self) -> Option<&QuantCodebook> {
        self.v_book.as_ref().map(|b| &b.codebook)
    }

    pub fn code(&self) -> Option<&BchCode> {
        self.code.as_ref()
    }

    /// Deterministic key generation: `(rho, sigma) = SHA3-512(seed)`,
    /// `t = A s + e`.
    pub fn keygen(&self, seed: &Seed) -> Result<(PublicKey, SecretKey)> {
        let digest = Sha3_512::digest(seed.as_bytes());
        let rho = Seed::from_slice(&digest[..32])?;
        let sigma = Seed::from_slice(&digest[32..])?;
        let k = self.ps.k;
        let a = expand_matrix(&rho, k);
        let s = cbd_vec(&sigma, 0, k, self.ps.eta1)?;
        let e = cbd_vec(&sigma, k as u8, k, self.ps.eta1)?;
        let t = ring::matvec(&a, &s)?.add(&e)?;
        Ok((PublicKey { t, rho }, SecretKey { s }))
    }

    fn check_key(&self, len: usize) -> Result<()> {
        if len == self.ps.k {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.ps.k, actual: len })
        }
    }

    fn require(&self, variant: Variant) -> Result<()> {
        if self.ps.variant == variant {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{} is a {} parameter set, not {}",
                self.ps.name,
                self.ps.variant.as_str(),
                variant.as_str()
            )))
        }
    }

    /// `u = A^T r + e_1` and `v = t^T r + e_2 + payload`.
    fn encrypt_raw(&self, pk: &PublicKey, coins: &Seed, payload: &Poly) -> Result<(PolyVec, Poly)> {
        self.check_key(pk.t.len())?;
        let k = self.ps.k;
        let a = expand_matrix(&pk.rho, k);
        let r = cbd_vec(coins, 0, k, self.ps.eta1)?;
        let e1 = cbd_vec(coins, k as u8, k, self.ps.eta2)?;
        let e2 = cbd(coins, 2 * k as u8, self.ps.eta2)?;
        let u = ring::matvec_t(&a, &r)?.add(&e1)?;
        let v = &(&ring::inner_product(&pk.t, &r)? + &e2) + payload;
        Ok((u, v))
    }

    fn quantize_u(&self, u: &PolyVec) -> Result<Vec<u16>> {
        let mut out = Vec::with_capacity(self.ps.k * N);
        for p in u.iter() {
            match &self.u_book {
                Some(book) => out.extend(
                    p.coeffs().iter().map(|&c| book.scaled.index_of(i64::from(c)) as u16),
                ),
                None => out.extend(compress_poly(p, self.ps.du)?),
            }
        }
        Ok(out)
    }

    fn payload(&self, message: &[u8]) -> Result<Poly> {
        let expected = self.ps.message_bits();
        if message.len() != expected {
            return Err(Error::Dimension { expected, actual: message.len() });
        }
        match &self.code {
            Some(code) => {
                let symbols = enc_pipeline(message, code, self.ps.p as u16)?;
                let c = self.ps.pam_spacing() as u16;
                Ok(Poly::from_array(std::array::from_fn(|i| symbols.symbols()[i] * c)))
            }
            None => bit_masked(message, Q.div_ceil(2) as u16),
        }
    }

    /// Encrypts with the variant of the parameter set and also returns the
    /// unquantized `v`.
    pub fn encrypt_traced(
        &self,
        pk: &PublicKey,
        message: &[u8],
        coins: &Seed,
    ) -> Result<(Ciphertext, EncryptionTrace)> {
        let payload = self.payload(message)?;
        let (u, v) = self.encrypt_raw(pk, coins, &payload)?;
        let u_idx = self.quantize_u(&u)?;
        let v_part = match self.ps.variant {
            Variant::Original => VPart::Indices(compress_poly(&v, self.ps.dv)?),
            Variant::LloydMax => {
                let book = self.v_book.as_ref().expect("checked at construction");
                VPart::Indices(
                    v.coeffs().iter().map(|&c| book.scaled.index_of(i64::from(c)) as u16).collect(),
                )
            }
            Variant::SemiCompressed => VPart::Raw(v.clone()),
        };
        let ct = Ciphertext { variant: self.ps.variant, u: u_idx, v: v_part };
        Ok((ct, EncryptionTrace { v, payload }))
    }

    /// Encrypts `message` (bits) with explicit coins.
    pub fn encrypt(&self, pk: &PublicKey, message: &[u8], coins: &Seed) -> Result<Ciphertext> {
        Ok(self.encrypt_traced(pk, message, coins)?.0)
    }

    pub fn encrypt_original(&self, pk: &PublicKey, message: &[u8], coins: &Seed) -> Result<Ciphertext> {
        self.require(Variant::Original)?;
        self.encrypt(pk, message, coins)
    }

    pub fn encrypt_lm(&self, pk: &PublicKey, message: &[u8], coins: &Seed) -> Result<Ciphertext> {
        self.require(Variant::LloydMax)?;
        self.encrypt(pk, message, coins)
    }

    pub fn encrypt_sc(&self, pk: &PublicKey, message: &[u8], coins: &Seed) -> Result<Ciphertext> {
        self.require(Variant::SemiCompressed)?;
        self.encrypt(pk, message, coins)
    }

    fn check_ciphertext(&self, ct: &Ciphertext) -> Result<()> {
        if ct.variant != self.ps.variant {
            return Err(Error::Domain(format!(
                "{} ciphertext given to a {} scheme",
                ct.variant.as_str(),
                self.ps.variant.as_str()
            )));
        }
        let expected = self.ps.k * N;
        if ct.u.len() != expected {
            return Err(Error::Dimension { expected, actual: ct.u.len() });
        }
        let u_limit = 1usize << self.ps.du;
        if ct.u.iter().any(|&i| usize::from(i) >= u_limit) {
            return Err(Error::Malformed("u index out of range".into()));
        }
        match (&ct.v, self.ps.variant) {
            (VPart::Raw(_), Variant::SemiCompressed) => Ok(()),
            (VPart::Indices(idx), Variant::Original | Variant::LloydMax) => {
                if idx.len() != N {
                    return Err(Error::Dimension { expected: N, actual: idx.len() });
                }
                if idx.iter().any(|&i| usize::from(i) >= 1usize << self.ps.dv) {
                    return Err(Error::Malformed("v index out of range".into()));
                }
                Ok(())
            }
            _ => Err(Error::Malformed("v part does not match the variant".into())),
        }
    }

    /// Common denominator `D` and the scaled reconstructions `D*u_hat`,
    /// `D*v_hat`.
    fn reconstruct(&self, ct: &Ciphertext) -> Result<(i64, Vec<Vec<i64>>, Vec<i64>)> {
        let du = self.u_book.as_ref().map_or(1, |b| b.scaled.denominator());
        let dv = self.v_book.as_ref().map_or(1, |b| b.scaled.denominator());
        let d = du / gcd(du, dv) * dv;
        let (fu, fv) = (d / du, d / dv);
        let u_hat: Vec<Vec<i64>> = match &self.u_book {
            Some(book) => {
                let levels = book.scaled.scaled_levels();
                ct.u.chunks(N)
                    .map(|c| c.iter().map(|&i| levels[usize::from(i)] * fu).collect())
                    .collect()
            }
            None => ct
                .u
                .chunks(N)
                .map(|c| {
                    let p = decompress_poly(c, self.ps.du)?;
                    Ok(p.coeffs().iter().map(|&x| i64::from(x) * fu).collect())
                })
                .collect::<Result<_>>()?,
        };
        let v_hat: Vec<i64> = match (&ct.v, &self.v_book) {
            (VPart::Raw(p), _) => p.coeffs().iter().map(|&x| i64::from(x) * fv).collect(),
            (VPart::Indices(idx), Some(book)) => {
                let levels = book.scaled.scaled_levels();
                idx.iter().map(|&i| levels[usize::from(i)] * fv).collect()
            }
            (VPart::Indices(idx), None) => decompress_poly(idx, self.ps.dv)?
                .coeffs()
                .iter()
                .map(|&x| i64::from(x) * fv)
                .collect(),
        };
        Ok((d, u_hat, v_hat))
    }

    /// `D * (v_hat - s^T u_hat)` reduced into `[0, D q)`.
    fn scaled_w(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<(i64, Vec<i64>)> {
        self.check_key(sk.s.len())?;
        self.check_ciphertext(ct)?;
        let (d, u_hat, v_hat) = self.reconstruct(ct)?;
        let s: Vec<Vec<i64>> = sk.s.iter().map(signed).collect();
        let su = exact::inner_product(&s, &u_hat)?;
        let modulus = d * i64::from(Q);
        Ok((d, v_hat.iter().zip(&su).map(|(v, x)| (v - x).rem_euclid(modulus)).collect()))
    }

    /// Decrypts to plaintext bits. Coded variants report an uncorrectable
    /// word as [`Error::DecodeFailure`].
    pub fn decrypt(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<Vec<u8>> {
        let (d, w) = self.scaled_w(sk, ct)?;
        let q = i64::from(Q);
        match &self.code {
            None => {
                // round(2w/q) mod 2 with w = W/D
                Ok(w.iter().map(|&x| (((4 * x + d * q) / (2 * d * q)) & 1) as u8).collect())
            }
            Some(code) => {
                let c = i64::from(self.ps.pam_spacing());
                let p = i64::from(self.ps.p);
                let symbols = w
                    .iter()
                    .map(|&x| (((2 * x + d * c) / (2 * d * c)) % p) as u16)
                    .collect();
                let word = SymbolWord::new(symbols, self.ps.p as u16)?;
                Ok(dec_symbols(&word, code)?.message)
            }
        }
    }

    pub fn decrypt_original(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<Vec<u8>> {
        self.require(Variant::Original)?;
        self.decrypt(sk, ct)
    }

    pub fn decrypt_lm(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<Vec<u8>> {
        self.require(Variant::LloydMax)?;
        self.decrypt(sk, ct)
    }

    pub fn decrypt_sc(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<Vec<u8>> {
        self.require(Variant::SemiCompressed)?;
        self.decrypt(sk, ct)
    }

    /// Splits the decoding noise of `ct` into its approximately Gaussian part
    /// and the `v` quantization error.
    pub fn noise_parts(&self, sk: &SecretKey, ct: &Ciphertext, trace: &EncryptionTrace) -> Result<NoiseParts> {
        let (d, u_hat, v_hat) = self.reconstruct(ct)?;
        self.check_key(sk.s.len())?;
        let s: Vec<Vec<i64>> = sk.s.iter().map(signed).collect();
        let su = exact::inner_product(&s, &u_hat)?;
        let modulus = d * i64::from(Q);
        let centre = |x: i64| {
            let r = x.rem_euclid(modulus);
            if 2 * r > modulus {
                r - modulus
            } else {
                r
            }
        };
        let raw = (&trace.v - &trace.payload).coeffs().map(|x| d * i64::from(x));
        let gaussian = raw.iter().zip(&su).map(|(v, x)| centre(v - x)).collect();
        let v_error = v_hat
            .iter()
            .zip(trace.v.coeffs())
            .map(|(vh, &v)| centre(vh - d * i64::from(v)))
            .collect();
        Ok(NoiseParts { denominator: d, gaussian, v_error })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::param_set_by_name;

    fn bits(seed: u8, len: usize) -> Vec<u8> {
        let s = Seed([seed; 32]).derive(b"msg", 0);
        (0..len).map(|i| (s.as_bytes()[i % 32] >> (i % 8)) & 1 ^ (i % 3 == 0) as u8).collect()
    }

    #[test]
    fn roundtrip_each_variant() {
        for name in ["KYBER512", "KYBER768-LM", "SC-KYBER1024-B-BCH-513"] {
            let ps = param_set_by_name(name).unwrap();
            let scheme = Scheme::new(&ps).unwrap();
            let (pk, sk) = scheme.keygen(&Seed([1; 32])).unwrap();
            let m = bits(3, ps.message_bits());
            let ct = scheme.encrypt(&pk, &m, &Seed([2; 32])).unwrap();
            assert_eq!(scheme.decrypt(&sk, &ct).unwrap(), m, "{name}");
            assert_eq!(ct.to_bytes(&ps).unwrap().len(), ps.ciphertext_bytes());
        }
    }

    #[test]
    fn missing_codebook_is_config_error() {
        let ps = param_set_by_name("KYBER1024-LM").unwrap();
        let u = uniform_codebook(ps.du).unwrap();
        assert!(matches!(Scheme::with_codebooks(&ps, Some(u.clone()), None), Err(Error::Config(_))));
        let wrong = uniform_codebook(4).unwrap();
        assert!(matches!(Scheme::with_codebooks(&ps, Some(u), Some(wrong)), Err(Error::Config(_))));
    }

    #[test]
    fn variant_mismatch() {
        let ps = param_set_by_name("KYBER512").unwrap();
        let scheme = Scheme::new(&ps).unwrap();
        let (pk, sk) = scheme.keygen(&Seed([0; 32])).unwrap();
        assert!(scheme.encrypt_lm(&pk, &[0; 256], &Seed([0; 32])).is_err());
        let mut ct = scheme.encrypt_original(&pk, &[0; 256], &Seed([0; 32])).unwrap();
        ct.variant = Variant::LloydMax;
        assert!(scheme.decrypt(&sk, &ct).is_err());
    }

    #[test]
    fn noise_parts_explain_the_decryption_input() {
        let ps = param_set_by_name("KYBER1024-LM").unwrap();
        let scheme = Scheme::new(&ps).unwrap();
        let (pk, sk) = scheme.keygen(&Seed([4; 32])).unwrap();
        let m = bits(5, 256);
        let (ct, trace) = scheme.encrypt_traced(&pk, &m, &Seed([6; 32])).unwrap();
        let parts = scheme.noise_parts(&sk, &ct, &trace).unwrap();
        let (d, w) = scheme.scaled_w(&sk, &ct).unwrap();
        assert_eq!(d, parts.denominator);
        let dq = d * i64::from(Q);
        for i in 0..N {
            let payload = d * i64::from(trace.payload.coeffs()[i]);
            let total = parts.gaussian[i] + parts.v_error[i] + payload;
            assert_eq!(total.rem_euclid(dq), w[i]);
        }
    }
}
