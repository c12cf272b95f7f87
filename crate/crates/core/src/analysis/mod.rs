//! Decryption-noise model, failure-rate formulas, capacity bounds and the
//! Monte-Carlo machinery used to check them.
//!
//! The decoding noise of one coefficient is `Y + e_v`, where
//! `Y = e^T r + e_2 - s^T(e_1 + e_u)` is treated as Gaussian with variance
//! `sigma_G^2` and `e_v` is the quantization error of `v` with an exact PMF.

mod dfr;
mod marcum;
mod montecarlo;
mod stats;
mod tables;

pub use dfr::{
    binomial_tail, capacity_bound, coefficient_failure_prob, decision_threshold, dfr_coded,
    dfr_coded_with, dfr_theorem2, rber, CapacityBound, DfrMethod, DfrResult, RberMode,
};
pub use marcum::{gaussian_tail, marcum_q_half, marcum_q_half_f64, DEFAULT_PREC};
pub use montecarlo::{empirical_dfr, random_bits, simulate_noise, EmpiricalDfr, NoiseSample};
pub use stats::{
    chi_square_counts, chi_square_normal, ks_lattice_normal, ks_statistic, normal_cdf,
    wilson_interval, wilson_interval_around, ChiSquareTest, LatticeKs, WILSON_Z99,
};
pub use tables::{
    bound_table, cer_table, coded_dfr_table, dfr_table, mse_table, pmf_table, Table,
};

use rug::Rational;

use crate::error::{Error, Result};
use crate::params::{ParamSet, Variant, Q};
use crate::quantization::{compress_error_pmf, uniform_codebook, DiscretePmf, ErrorPmf};

/// `sigma_G^2 = kn eta1^2/4 + kn eta1/2 (eta2/2 + mse_u) + eta2/2`.
pub fn sigma_g2(ps: &ParamSet, mse_u: &Rational) -> Result<Rational> {
    if *mse_u < 0 {
        return Err(Error::Domain("MSE must be nonnegative".into()));
    }
    let kn = Rational::from((ps.k * ps.n) as u64);
    let eta1 = Rational::from(ps.eta1);
    let eta2 = Rational::from(ps.eta2);
    let first = Rational::from(&kn * &eta1) * &eta1 / 4u32;
    let inner = Rational::from(&eta2 / 2u32) + mse_u;
    let second = Rational::from(&kn * &eta1) / 2u32 * inner;
    Ok(first + second + eta2 / 2u32)
}

/// MSE of the `u` quantizer for a uniform coefficient on `Z_q`.
pub fn u_error_mse(ps: &ParamSet) -> Result<Rational> {
    match ps.variant {
        Variant::Original => Ok(compress_error_pmf(ps.du)?.mse()),
        Variant::LloydMax | Variant::SemiCompressed => {
            uniform_codebook(ps.du)?.mse(&DiscretePmf::uniform(Q)?)
        }
    }
}

/// PMF of the `v` quantization error (a point mass at zero when `v` is raw).
pub fn v_error_pmf(ps: &ParamSet) -> Result<ErrorPmf> {
    match ps.variant {
        Variant::Original => compress_error_pmf(ps.dv),
        Variant::LloydMax => uniform_codebook(ps.dv)?.error_pmf(&DiscretePmf::uniform(Q)?),
        Variant::SemiCompressed => Ok(ErrorPmf::zero()),
    }
}

/// Variance of the Gaussian part and the exact PMF of `e_v`.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    sigma_g2: Rational,
    e_lv: ErrorPmf,
}

impl NoiseModel {
    pub fn new(sigma_g2: Rational, e_lv: ErrorPmf) -> Result<Self> {
        if sigma_g2 < 0 {
            return Err(Error::Domain("variance must be nonnegative".into()));
        }
        Ok(NoiseModel { sigma_g2, e_lv })
    }

    /// The model for a parameter set, with the `u` quantization MSE included.
    pub fn for_params(ps: &ParamSet) -> Result<Self> {
        Self::new(sigma_g2(ps, &u_error_mse(ps)?)?, v_error_pmf(ps)?)
    }

    /// As [`for_params`](Self::for_params) but with the `u` quantization
    /// error left out of `sigma_G^2`.
    pub fn without_u_error(ps: &ParamSet) -> Result<Self> {
        Self::new(sigma_g2(ps, &Rational::new())?, v_error_pmf(ps)?)
    }

    pub fn sigma_g2(&self) -> &Rational {
        &self.sigma_g2
    }

    pub fn sigma_g(&self) -> f64 {
        self.sigma_g2.to_f64().sqrt()
    }

    pub fn e_lv(&self) -> &ErrorPmf {
        &self.e_lv
    }
}
