//! Lloyd-Max design of MMSE scalar quantizers for discrete sources, plus an
//! exhaustive dynamic-programming optimum used to cross-check it.

use rug::Rational;

use super::codebook::QuantCodebook;
use super::pmf::DiscretePmf;
use crate::error::{Error, Result};

/// Prefix sums of mass, first and second moments over a sorted support.
struct Moments {
    mass: Vec<Rational>,
    first: Vec<Rational>,
    second: Vec<Rational>,
}

impl Moments {
    fn new(support: &[i64], probs: &[Rational]) -> Self {
        let n = support.len();
        let mut m = Moments {
            mass: Vec::with_capacity(n + 1),
            first: Vec::with_capacity(n + 1),
            second: Vec::with_capacity(n + 1),
        };
        m.mass.push(Rational::new());
        m.first.push(Rational::new());
        m.second.push(Rational::new());
        for (i, (&x, p)) in support.iter().zip(probs).enumerate() {
            let px = Rational::from(p * x);
            let pxx = Rational::from(&px * x);
            m.mass.push(Rational::from(&m.mass[i] + p));
            m.first.push(Rational::from(&m.first[i] + &px));
            m.second.push(Rational::from(&m.second[i] + &pxx));
        }
        m
    }

    /// `(mass, conditional mean)` of support indices `lo..hi`.
    fn cell(&self, lo: usize, hi: usize) -> Option<(Rational, Rational)> {
        let mass = Rational::from(&self.mass[hi] - &self.mass[lo]);
        if mass == 0 {
            return None;
        }
        let first = Rational::from(&self.first[hi] - &self.first[lo]);
        let mean = Rational::from(&first / &mass);
        Some((mass, mean))
    }

    /// Squared error of the cell `lo..hi` around its conditional mean.
    fn cost(&self, lo: usize, hi: usize) -> Rational {
        let mass = Rational::from(&self.mass[hi] - &self.mass[lo]);
        if mass == 0 {
            return mass;
        }
        let first = Rational::from(&self.first[hi] - &self.first[lo]);
        let second = Rational::from(&self.second[hi] - &self.second[lo]);
        second - Rational::from(&first * &first) / mass
    }
}

/// Result of a Lloyd-Max run.
#[derive(Debug, Clone)]
pub struct LloydMaxReport {
    pub codebook: QuantCodebook,
    /// MSE after each level update; non-increasing.
    pub mse_history: Vec<Rational>,
    pub iterations: usize,
}

impl LloydMaxReport {
    pub fn mse(&self) -> &Rational {
        self.mse_history.last().expect("at least one iteration")
    }
}

/// Designs an `levels`-level MMSE quantizer for `pmf`.
///
/// Levels start at the centres of `levels` equal-width cells spanning
/// `[x_min, x_max]`, then alternate midpoint thresholds and conditional means
/// until the assignment of support points to cells stops changing. Cells that
/// lose all their mass are dropped, and requests for more levels than support
/// points are capped.
pub fn lloyd_max(pmf: &DiscretePmf, levels: usize) -> Result<QuantCodebook> {
    Ok(lloyd_max_report(pmf, levels)?.codebook)
}

pub fn lloyd_max_report(pmf: &DiscretePmf, levels: usize) -> Result<LloydMaxReport> {
    if levels == 0 {
        return Err(Error::Domain("a codebook needs at least one level".into()));
    }
    let (support, probs) = pmf.positive_part();
    if support.is_empty() {
        return Err(Error::Domain("PMF has no mass".into()));
    }
    let moments = Moments::new(&support, &probs);
    let count = levels.min(support.len());
    let (x_min, x_max) = (support[0], support[support.len() - 1]);
    let span = Rational::from(x_max - x_min);
    let mut current: Vec<Rational> = (1..=count as i64)
        .map(|i| Rational::from(&span * (2 * i - 1)) / (2 * count as i64) + x_min)
        .collect();

    let mut previous_cells: Option<Vec<usize>> = None;
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let thresholds: Vec<Rational> = current
            .windows(2)
            .map(|w| Rational::from(&w[0] + &w[1]) / 2)
            .collect();
        // cells[i]..cells[i+1] are the support indices assigned to level i
        let mut cells = Vec::with_capacity(current.len() + 1);
        cells.push(0);
        cells.extend(thresholds.iter().map(|t| support.partition_point(|&x| *t >= x)));
        cells.push(support.len());
        if previous_cells.as_ref() == Some(&cells) {
            break;
        }
        iterations += 1;

        let mut next = Vec::with_capacity(current.len());
        let mut mse = Rational::new();
        for w in cells.windows(2) {
            if let Some((_, mean)) = moments.cell(w[0], w[1]) {
                mse += moments.cost(w[0], w[1]);
                next.push(mean);
            }
        }
        history.push(mse);
        previous_cells = (next.len() == current.len()).then_some(cells);
        current = next;
    }

    let codebook = QuantCodebook::with_requested(current, pmf.label(), levels)?;
    Ok(LloydMaxReport { codebook, mse_history: history, iterations })
}

/// Upper bound on `|support|^2 * L` for [`dp_optimal_quantizer`].
pub const DP_WORK_LIMIT: usize = 50_000_000;

/// Globally MSE-optimal quantizer by dynamic programming over all partitions
/// of the support into contiguous cells.
pub fn dp_optimal_quantizer(pmf: &DiscretePmf, levels: usize) -> Result<QuantCodebook> {
    if levels == 0 {
        return Err(Error::Domain("a codebook needs at least one level".into()));
    }
    let (support, probs) = pmf.positive_part();
    let n = support.len();
    if n == 0 {
        return Err(Error::Domain("PMF has no mass".into()));
    }
    let count = levels.min(n);
    if n.saturating_mul(n).saturating_mul(count) > DP_WORK_LIMIT {
        return Err(Error::Resource(format!(
            "optimal-quantizer search over {n} points with {count} levels exceeds the work limit"
        )));
    }
    let moments = Moments::new(&support, &probs);

    // best[l][j]: minimal cost of covering the first j points with l cells
    let mut best: Vec<Vec<Option<Rational>>> = vec![vec![None; n + 1]; count + 1];
    let mut split = vec![vec![0usize; n + 1]; count + 1];
    best[0][0] = Some(Rational::new());
    for l in 1..=count {
        for j in l..=n {
            let mut choice: Option<(Rational, usize)> = None;
            for i in (l - 1)..j {
                let Some(prev) = &best[l - 1][i] else { continue };
                let c = Rational::from(prev + &moments.cost(i, j));
                if choice.as_ref().is_none_or(|(b, _)| c < *b) {
                    choice = Some((c, i));
                }
            }
            if let Some((c, i)) = choice {
                best[l][j] = Some(c);
                split[l][j] = i;
            }
        }
    }

    let mut bounds = vec![n];
    let mut j = n;
    for l in (1..=count).rev() {
        j = split[l][j];
        bounds.push(j);
    }
    bounds.reverse();
    let levels_out = bounds
        .windows(2)
        .map(|w| moments.cell(w[0], w[1]).expect("positive mass").1)
        .collect();
    QuantCodebook::with_requested(levels_out, pmf.label(), levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_level_is_the_mean() {
        let pmf = DiscretePmf::uniform(31).unwrap();
        let cb = lloyd_max(&pmf, 1).unwrap();
        assert_eq!(cb.levels(), &[Rational::from(15)]);
        let dp = dp_optimal_quantizer(&pmf, 1).unwrap();
        assert_eq!(dp.levels(), &[Rational::from(15)]);
    }

    #[test]
    fn full_resolution_is_lossless() {
        let pmf = DiscretePmf::uniform(13).unwrap();
        for cb in [lloyd_max(&pmf, 13).unwrap(), dp_optimal_quantizer(&pmf, 13).unwrap()] {
            let expect: Vec<Rational> = (0..13).map(Rational::from).collect();
            assert_eq!(cb.levels(), &expect[..]);
            assert_eq!(cb.mse(&pmf).unwrap(), 0);
        }
    }

    #[test]
    fn oversized_requests_are_capped() {
        let pmf = DiscretePmf::uniform(7).unwrap();
        let cb = lloyd_max(&pmf, 16).unwrap();
        assert_eq!(cb.len(), 7);
        assert_eq!(cb.dropped_levels(), 9);
    }

    #[test]
    fn empty_cells_are_dropped() {
        // Two far clusters; the middle initial level never receives mass.
        let support = vec![0, 1, 100, 101];
        let quarter = Rational::from((1, 4));
        let pmf = DiscretePmf::new(support, vec![quarter; 4], "clusters").unwrap();
        let report = lloyd_max_report(&pmf, 3).unwrap();
        assert!(report.codebook.len() <= 3);
        assert!(report.mse_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn dp_rejects_huge_instances() {
        let pmf = DiscretePmf::uniform(3329).unwrap();
        assert!(matches!(dp_optimal_quantizer(&pmf, 2048), Err(Error::Resource(_))));
    }
}
