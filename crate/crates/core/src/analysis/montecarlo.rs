//! Monte-Carlo runs. Trial `i` draws everything from `seed.derive(label, i)`,
//! so results do not depend on the number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pke::Scheme;
use crate::sampling::Seed;

use super::stats::wilson_interval;

/// `nbits` pseudorandom bits expanded from `seed`.
pub fn random_bits(seed: &Seed, nbits: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(nbits);
    let mut block = 0;
    while out.len() < nbits {
        let bytes = seed.derive(b"bits", block);
        out.extend(
            bytes
                .as_bytes()
                .iter()
                .flat_map(|&b| (0..8).map(move |i| (b >> i) & 1))
                .take(nbits - out.len()),
        );
        block += 1;
    }
    out
}

struct Trial {
    key: Seed,
    coins: Seed,
    message: Vec<u8>,
}

fn trial(scheme: &Scheme, seed: &Seed, label: &[u8], index: u64) -> Trial {
    let base = seed.derive(label, index);
    Trial {
        key: base.derive(b"keygen", 0),
        coins: base.derive(b"coins", 0),
        message: random_bits(&base.derive(b"message", 0), scheme.params().message_bits()),
    }
}

/// Decoding-noise coefficients from full encryptions under fresh keys, all
/// scaled by the common denominator `D` of the reconstruction levels.
#[derive(Debug, Clone)]
pub struct NoiseSample {
    pub denominator: i64,
    /// `D * Y` for every coefficient of every trial.
    pub gaussian: Vec<i64>,
    /// `D * e_v`, aligned with `gaussian`.
    pub v_error: Vec<i64>,
}

impl NoiseSample {
    pub fn len(&self) -> usize {
        self.gaussian.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaussian.is_empty()
    }

    pub fn gaussian_f64(&self) -> Vec<f64> {
        let d = self.denominator as f64;
        self.gaussian.iter().map(|&y| y as f64 / d).collect()
    }

    pub fn mean(&self) -> f64 {
        let sum: i128 = self.gaussian.iter().map(|&y| i128::from(y)).sum();
        sum as f64 / self.len() as f64 / self.denominator as f64
    }

    /// Sample variance of `Y` (denominator `len - 1`).
    pub fn variance(&self) -> f64 {
        let n = self.len() as f64;
        let mean = self.mean() * self.denominator as f64;
        let ss: f64 = self.gaussian.iter().map(|&y| (y as f64 - mean).powi(2)).sum();
        ss / (n - 1.0) / (self.denominator as f64).powi(2)
    }
}

/// Runs `trials` key generations and encryptions, each contributing `n`
/// noise coefficients.
pub fn simulate_noise(scheme: &Scheme, trials: usize, seed: &Seed) -> Result<NoiseSample> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is needed".into()));
    }
    let parts = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let t = trial(scheme, seed, b"noise", i);
            let (pk, sk) = scheme.keygen(&t.key)?;
            let (ct, trace) = scheme.encrypt_traced(&pk, &t.message, &t.coins)?;
            scheme.noise_parts(&sk, &ct, &trace)
        })
        .collect::<Result<Vec<_>>>()?;
    let denominator = parts[0].denominator;
    let mut sample = NoiseSample { denominator, gaussian: Vec::new(), v_error: Vec::new() };
    for p in parts {
        sample.gaussian.extend(p.gaussian);
        sample.v_error.extend(p.v_error);
    }
    Ok(sample)
}

/// Observed decryption failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmpiricalDfr {
    pub trials: u64,
    pub failures: u64,
}

impl EmpiricalDfr {
    pub fn rate(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }

    pub fn wilson(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.failures, self.trials, z)
    }
}

/// Counts trials whose decryption differs from the plaintext, including
/// coded-variant decoder failures.
pub fn empirical_dfr(scheme: &Scheme, trials: u64, seed: &Seed) -> Result<EmpiricalDfr> {
    let failures = (0..trials)
        .into_par_iter()
        .map(|i| {
            let t = trial(scheme, seed, b"dfr", i);
            let (pk, sk) = scheme.keygen(&t.key)?;
            let ct = scheme.encrypt(&pk, &t.message, &t.coins)?;
            match scheme.decrypt(&sk, &ct) {
                Ok(m) => Ok(u64::from(m != t.message)),
                Err(Error::DecodeFailure(_)) => Ok(1),
                Err(e) => Err(e),
            }
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(EmpiricalDfr { trials, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::param_set_by_name;

    #[test]
    fn bits_are_deterministic() {
        let s = Seed([9; 32]);
        assert_eq!(random_bits(&s, 700), random_bits(&s, 700));
        assert_eq!(random_bits(&s, 700)[..256], random_bits(&s, 256)[..]);
        let ones: usize = random_bits(&s, 4000).iter().map(|&b| b as usize).sum();
        assert!((1800..2200).contains(&ones));
    }

    #[test]
    fn small_simulation() {
        let ps = param_set_by_name("KYBER512").unwrap();
        let scheme = Scheme::new(&ps).unwrap();
        let sample = simulate_noise(&scheme, 4, &Seed([1; 32])).unwrap();
        assert_eq!(sample.len(), 4 * 256);
        assert_eq!(sample.denominator, 1);
        let dfr = empirical_dfr(&scheme, 8, &Seed([2; 32])).unwrap();
        assert_eq!(dfr.failures, 0);
    }
}
