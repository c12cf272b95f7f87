use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Two-sided 99% standard normal quantile.
pub const WILSON_Z99: f64 = 2.5758293035489;

pub fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("valid normal").cdf(x)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    wilson_interval_around(successes as f64 / trials as f64, trials, z)
}

/// Wilson score interval for a proportion `phat` observed over `trials`.
pub fn wilson_interval_around(phat: f64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let z2 = z * z;
    let centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and a
/// continuous `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// KS distances of a lattice sample `values / D` against `N(0, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeKs {
    /// Plain statistic: the empirical CDF steps at every atom.
    pub raw: f64,
    /// With continuity correction: the empirical CDF at atom `x` is compared
    /// with the normal CDF half a lattice step above `x`.
    pub corrected: f64,
}

pub fn ks_lattice_normal(values: &[i64], denominator: i64, sigma: f64) -> LatticeKs {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let d = denominator as f64;
    let cdf = |scaled: f64| normal_cdf(scaled / d / sigma);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let mut raw: f64 = 0.0;
    let mut corrected: f64 = cdf(lo as f64 - 0.5);
    let mut idx = 0usize;
    for x in lo..=hi {
        let below = idx as f64 / n;
        while idx < sorted.len() && sorted[idx] == x {
            idx += 1;
        }
        let at = idx as f64 / n;
        let f = cdf(x as f64);
        raw = raw.max((f - below).abs()).max((at - f).abs());
        corrected = corrected.max((at - cdf(x as f64 + 0.5)).abs());
    }
    LatticeKs { raw, corrected }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: usize,
    pub critical: f64,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passed(&self) -> bool {
        self.statistic < self.critical
    }
}

/// Pearson test of observed counts against expected probabilities.
pub fn chi_square_counts(observed: &[u64], expected_probs: &[f64], alpha: f64) -> ChiSquareTest {
    let n: u64 = observed.iter().sum();
    let statistic = observed
        .iter()
        .zip(expected_probs)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = observed.len() - 1;
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    ChiSquareTest { statistic, df, critical: dist.inverse_cdf(1.0 - alpha), p_value: dist.sf(statistic) }
}

/// Bins a lattice sample `values / D` into `bins` cells of roughly equal
/// normal probability, with edges on half-lattice points, and tests it
/// against `N(0, sigma^2)`.
pub fn chi_square_normal(values: &[i64], denominator: i64, sigma: f64, bins: usize, alpha: f64) -> ChiSquareTest {
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let d = denominator as f64;
    // edges in scaled units, each at an integer + 1/2
    let mut edges: Vec<f64> = (1..bins)
        .map(|j| (normal.inverse_cdf(j as f64 / bins as f64) * sigma * d).floor() + 0.5)
        .collect();
    edges.dedup();
    let probs: Vec<f64> = std::iter::once(f64::NEG_INFINITY)
        .chain(edges.iter().copied())
        .zip(edges.iter().copied().chain(std::iter::once(f64::INFINITY)))
        .map(|(a, b)| normal.cdf(b / d / sigma) - normal.cdf(a / d / sigma))
        .collect();
    let mut counts = vec![0u64; probs.len()];
    for &v in values {
        counts[edges.partition_point(|&e| e < v as f64)] += 1;
    }
    chi_square_counts(&counts, &probs, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_value() {
        // 10 of 100 at z = 1.96: (0.0552, 0.1744)
        let (lo, hi) = wilson_interval(10, 100, 1.959964);
        assert!((lo - 0.0552).abs() < 1e-4 && (hi - 0.1744).abs() < 1e-4);
        assert!((WILSON_Z99 - Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.995)).abs() < 1e-9);
    }

    #[test]
    fn ks_of_a_perfect_grid() {
        let n = 1000;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&samples, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn lattice_correction_removes_the_atom_jump() {
        // Discretized normal with sigma = 10 on the integers, exact frequencies.
        let sigma = 10.0;
        let mut values = Vec::new();
        for x in -60i64..=60 {
            let p = normal_cdf((x as f64 + 0.5) / sigma) - normal_cdf((x as f64 - 0.5) / sigma);
            values.extend(std::iter::repeat_n(x, (p * 1e5).round() as usize));
        }
        let ks = ks_lattice_normal(&values, 1, sigma);
        assert!(ks.raw > 0.015);
        assert!(ks.corrected < 1e-4);
    }
}
