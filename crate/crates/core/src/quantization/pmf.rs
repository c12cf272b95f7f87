use std::collections::BTreeMap;

use rug::Rational;

use crate::error::{domain, Result};

/// A probability mass function on sorted, distinct integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretePmf {
    support: Vec<i64>,
    probs: Vec<Rational>,
    label: String,
}

impl DiscretePmf {
    pub fn new(support: Vec<i64>, probs: Vec<Rational>, label: impl Into<String>) -> Result<Self> {
        if support.is_empty() {
            return domain("empty PMF");
        }
        if support.len() != probs.len() {
            return domain("support and probabilities differ in length");
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return domain("support must be strictly increasing");
        }
        if probs.iter().any(|p| *p < 0) {
            return domain("negative probability");
        }
        let total: Rational = probs.iter().sum();
        if total != 1 {
            return domain(format!("probabilities sum to {total}, not 1"));
        }
        Ok(DiscretePmf { support, probs, label: label.into() })
    }

    /// The uniform distribution on `{0, ..., q-1}`.
    pub fn uniform(q: u32) -> Result<Self> {
        if q == 0 {
            return domain("empty PMF");
        }
        let p = Rational::from((1, q));
        Self::new((0..i64::from(q)).collect(), vec![p; q as usize], format!("uniform-Z{q}"))
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.support.iter().copied().zip(&self.probs)
    }

    /// Drops support points of probability zero.
    pub(crate) fn positive_part(&self) -> (Vec<i64>, Vec<Rational>) {
        self.iter().filter(|(_, p)| **p > 0).map(|(x, p)| (x, p.clone())).unzip()
    }
}

/// The exact distribution of a quantization error `x - x_hat`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorPmf {
    support: Vec<Rational>,
    probs: Vec<Rational>,
}

impl ErrorPmf {
    /// Collects `(value, probability)` pairs, merging repeated values.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (v, p) in pairs {
            if p < 0 {
                return domain("negative probability");
            }
            *map.entry(v).or_default() += p;
        }
        let (support, probs): (Vec<_>, Vec<_>) = map.into_iter().unzip();
        let total: Rational = probs.iter().sum();
        if total != 1 {
            return domain(format!("error probabilities sum to {total}, not 1"));
        }
        Ok(ErrorPmf { support, probs })
    }

    /// All mass on zero.
    pub fn zero() -> Self {
        ErrorPmf { support: vec![Rational::new()], probs: vec![Rational::from(1)] }
    }

    pub fn support(&self) -> &[Rational] {
        &self.support
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.support.iter().zip(&self.probs)
    }

    pub fn prob_of(&self, value: &Rational) -> Rational {
        match self.support.binary_search(value) {
            Ok(i) => self.probs[i].clone(),
            Err(_) => Rational::new(),
        }
    }

    pub fn mean(&self) -> Rational {
        self.iter().map(|(v, p)| Rational::from(v * p)).sum()
    }

    /// Second moment `E[e^2]`.
    pub fn mse(&self) -> Rational {
        self.iter().map(|(v, p)| Rational::from(v * v) * p).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_pmfs() {
        assert!(DiscretePmf::new(vec![], vec![], "e").is_err());
        assert!(DiscretePmf::new(vec![1, 1], vec![Rational::from((1, 2)); 2], "d").is_err());
        assert!(DiscretePmf::new(vec![0, 1], vec![Rational::from((1, 3)); 2], "s").is_err());
        assert!(DiscretePmf::new(
            vec![0, 1],
            vec![Rational::from(2), Rational::from(-1)],
            "n"
        )
        .is_err());
        assert!(DiscretePmf::uniform(0).is_err());
    }

    #[test]
    fn error_pmf_merges() {
        let half = Rational::from((1, 2));
        let quarter = Rational::from((1, 4));
        let e = ErrorPmf::from_pairs([
            (Rational::from(1), quarter.clone()),
            (Rational::from(-1), quarter.clone()),
            (Rational::new(), quarter.clone()),
            (Rational::new(), quarter),
        ])
        .unwrap();
        assert_eq!(e.support().len(), 3);
        assert_eq!(e.prob_of(&Rational::new()), half);
        assert_eq!(e.mean(), 0);
        assert_eq!(e.mse(), half);
    }
}
