use rug::{Float, Integer, Rational};

use super::marcum::{gaussian_tail, marcum_q_half};
use super::NoiseModel;
use crate::error::{Error, Result};
use crate::params::{round_div, ParamSet, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfrMethod {
    Theorem2,
    CodedLemma4,
    MonteCarlo,
}

#[derive(Debug, Clone)]
pub struct DfrResult {
    /// `log2` of the failure rate; `-inf` when the rate is exactly zero.
    pub log2_dfr: Float,
    pub method: DfrMethod,
    pub precision_bits: u32,
}

impl DfrResult {
    fn from_prob(delta: Float, method: DfrMethod, prec: u32) -> Self {
        let log2_dfr = if delta == 0 {
            Float::with_val(prec, rug::float::Special::NegInfinity)
        } else {
            delta.log2()
        };
        DfrResult { log2_dfr, method, precision_bits: prec }
    }

    pub fn log2_f64(&self) -> f64 {
        self.log2_dfr.to_f64()
    }

    pub fn dfr(&self) -> Float {
        self.log2_dfr.clone().exp2()
    }
}

/// `round(q/4)`: a coefficient decodes wrongly once its noise exceeds this.
pub fn decision_threshold(q: u32) -> u32 {
    round_div(q, 4)
}

/// `P(|Y + e_v| > z)` for `Y ~ N(0, sigma_G^2)` and `e_v` from the model's PMF.
pub fn coefficient_failure_prob(nm: &NoiseModel, z: u32, prec: u32) -> Float {
    let mut total = Float::new(prec);
    if *nm.sigma_g2() == 0 {
        for (e, p) in nm.e_lv().iter() {
            if Rational::from(e.abs_ref()) > z {
                total += Float::with_val(prec, p);
            }
        }
        return total;
    }
    let sigma = Float::with_val(prec, nm.sigma_g2()).sqrt();
    let b = Float::with_val(prec, z) / &sigma;
    for (e, p) in nm.e_lv().iter() {
        let a = Float::with_val(prec, Rational::from(e.abs_ref())) / &sigma;
        total += marcum_q_half(&a, &b, prec) * Float::with_val(prec, p);
    }
    total
}

/// `delta = 1 - (1 - P)^n` for independent per-coefficient failures.
pub fn dfr_theorem2(nm: &NoiseModel, q: u32, n: usize, prec: u32) -> DfrResult {
    let p = coefficient_failure_prob(nm, decision_threshold(q), prec);
    let log_keep = Float::with_val(prec, -p).ln_1p() * n as u32;
    let delta = -log_keep.exp_m1();
    DfrResult::from_prob(delta, DfrMethod::Theorem2, prec)
}

/// How the raw bit error rate of the coded variant is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RberMode {
    /// `2 Q(c/(2 sigma)) / log2 p`: every symbol can err to both neighbours.
    #[default]
    Bound,
    /// Average over the actual decision cells on the `Z_q` circle. The cell of
    /// symbol 0 is one unit wider on its lower side because `q = p c + 1`
    /// need not hold with equality.
    Exact,
}

fn require_coded(ps: &ParamSet) -> Result<crate::params::CodeSpec> {
    match (ps.variant, ps.code) {
        (Variant::SemiCompressed, Some(code)) => Ok(code),
        _ => Err(Error::Domain(format!("{} has no plaintext code", ps.name))),
    }
}

/// Raw bit error rate after Gray demapping.
pub fn rber(ps: &ParamSet, nm: &NoiseModel, mode: RberMode, prec: u32) -> Result<Float> {
    require_coded(ps)?;
    let c = ps.pam_spacing();
    let bits = ps.p.trailing_zeros();
    if *nm.sigma_g2() == 0 {
        return Ok(Float::new(prec));
    }
    let sigma = Float::with_val(prec, nm.sigma_g2()).sqrt();
    let half = Float::with_val(prec, c) / 2u32 / &sigma;
    let tail = gaussian_tail(&half, prec);
    Ok(match mode {
        RberMode::Bound => tail * 2u32 / bits,
        RberMode::Exact => {
            let wrap = i64::from(ps.q) - i64::from(ps.p * c);
            let wide = (Float::with_val(prec, c) / 2u32 + wrap) / &sigma;
            let sum = tail * (2 * ps.p - 1) + gaussian_tail(&wide, prec);
            sum / ps.p / bits
        }
    })
}

/// `sum_{j > t} C(N, j) r^j (1 - r)^(N - j)` with exact binomials.
pub fn binomial_tail(n: usize, t: usize, r: &Float, prec: u32) -> Float {
    let mut total = Float::new(prec);
    if *r == 0 || t >= n {
        return total;
    }
    let log_r = Float::with_val(prec, r.ln_ref());
    let log_keep = Float::with_val(prec, -r.clone()).ln_1p();
    for j in (t + 1)..=n {
        let binom = Integer::from(Integer::binomial_u(n as u32, j as u32));
        let log_term = Float::with_val(prec, &log_r * j as u32) + Float::with_val(prec, &log_keep * (n - j) as u32);
        total += log_term.exp() * Float::with_val(prec, &binom);
    }
    total
}

/// Coded failure rate with the bound-based RBER.
pub fn dfr_coded(ps: &ParamSet, nm: &NoiseModel, prec: u32) -> Result<DfrResult> {
    dfr_coded_with(ps, nm, RberMode::Bound, prec)
}

pub fn dfr_coded_with(ps: &ParamSet, nm: &NoiseModel, mode: RberMode, prec: u32) -> Result<DfrResult> {
    let code = require_coded(ps)?;
    let r = rber(ps, nm, mode, prec)?;
    Ok(DfrResult::from_prob(binomial_tail(code.n, code.t, &r, prec), DfrMethod::CodedLemma4, prec))
}

/// Information-theoretic limit on plaintext bits per semi-compressed
/// ciphertext for `p`-PAM, and the ciphertext expansion it implies.
#[derive(Debug, Clone)]
pub struct CapacityBound {
    pub p: u32,
    pub gamma: f64,
    pub k_ub_real: f64,
    /// `ceil(k_ub_real)`.
    pub k_ub: u64,
    /// Ciphertext bits over `k_ub`.
    pub cer_lb: Rational,
}

/// `K_UB = n/2 log2((1 + gamma)/(1 + gamma/p^2))` with
/// `gamma = c^2 (p^2 - 1) / (12 sigma_G^2)` and `c = round(q/p)`.
pub fn capacity_bound(ps: &ParamSet, nm: &NoiseModel) -> Result<CapacityBound> {
    let p = ps.p;
    if p < 2 || !p.is_power_of_two() {
        return Err(Error::Domain(format!("PAM order {p} is not a power of two >= 2")));
    }
    if *nm.sigma_g2() == 0 {
        return Err(Error::Domain("capacity is unbounded without noise".into()));
    }
    let prec = 256;
    let c = Rational::from(round_div(ps.q, p));
    let p2 = Rational::from(p) * p;
    let gamma = Rational::from(&c * &c) * (Rational::from(&p2 - 1u32)) / 12u32 / nm.sigma_g2();
    let num = Float::with_val(prec, Rational::from(&gamma + 1u32));
    let den = Float::with_val(prec, gamma.clone() / &p2 + 1u32);
    let k_real = Float::with_val(prec, num / den).log2() * (ps.n as u32) / 2u32;
    let k_ub = k_real.clone().ceil().to_integer().and_then(|i| i.to_u64()).unwrap_or(0);
    let bits = (ps.k * ps.n * ps.du as usize + ps.n * 12) as u64;
    let cer_lb = if k_ub == 0 { Rational::new() } else { Rational::from((bits, k_ub)) };
    Ok(CapacityBound { p, gamma: gamma.to_f64(), k_ub_real: k_real.to_f64(), k_ub, cer_lb })
}
