//! Finite distributions and the base-2 information quantities built on them.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

/// Information measured in bits.
pub type Bits = f64;

/// Tolerance used when validating that probabilities sum to one.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// A finite distribution over distinct outcome labels.
///
/// Construction validates the probabilities and renormalizes them when the
/// total is within [`PROBABILITY_TOLERANCE`] of one.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution<L> {
    outcomes: Vec<(L, f64)>,
}

impl<L: PartialEq> OutcomeDistribution<L> {
    pub fn new(outcomes: Vec<(L, f64)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Domain("distribution has no outcomes".into()));
        }
        let mut total = 0.0;
        for (i, (label, p)) in outcomes.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::Domain(format!("outcome {i} has invalid probability {p}")));
            }
            if outcomes[..i].iter().any(|(other, _)| other == label) {
                return Err(Error::Domain(format!("outcome {i} repeats an earlier label")));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
        }
        let outcomes = outcomes.into_iter().map(|(l, p)| (l, p / total)).collect();
        Ok(Self { outcomes })
    }

    /// A single outcome with probability one.
    pub fn certain(label: L) -> Self {
        Self {
            outcomes: vec![(label, 1.0)],
        }
    }

    /// Uniform distribution over the given labels.
    pub fn uniform(labels: Vec<L>) -> Result<Self> {
        let n = labels.len() as f64;
        Self::new(labels.into_iter().map(|l| (l, 1.0 / n)).collect())
    }
}

impl<L> OutcomeDistribution<L> {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, f64)> {
        self.outcomes.iter().map(|(l, p)| (l, *p))
    }

    /// Outcomes that can actually occur.
    pub fn support(&self) -> impl Iterator<Item = (&L, f64)> {
        self.iter().filter(|(_, p)| *p > 0.0)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.outcomes.iter().map(|(_, p)| *p)
    }

    /// True when a single outcome carries all the mass.
    pub fn is_point_mass(&self) -> bool {
        self.support().count() == 1
    }

    /// Draws an outcome and its probability by inverse-CDF sampling from a
    /// uniform variate in `[0, 1)`.
    pub fn draw_with(&self, uniform: f64) -> (&L, f64) {
        let mut acc = 0.0;
        let mut last = None;
        for (label, p) in self.support() {
            acc += p;
            last = Some((label, p));
            if uniform < acc {
                return (label, p);
            }
        }
        // rounding can leave acc a hair under one
        last.expect("validated distributions have non-empty support")
    }

    pub fn sample_with(&self, uniform: f64) -> &L {
        self.draw_with(uniform).0
    }

    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> (&L, f64) {
        self.draw_with(rng.gen::<f64>())
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> &L {
        self.draw(rng).0
    }

    pub fn entropy(&self) -> Bits {
        entropy_of(self.probabilities())
    }
}

/// Shannon information content `log2(1/p)` of an outcome of probability `p`.
pub fn information_content(p: f64) -> Result<Bits> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("information content needs 0 < p <= 1, got {p}")));
    }
    Ok(-p.log2())
}

/// Entropy of a validated distribution, with `0 log 0 = 0`.
pub fn entropy<L>(d: &OutcomeDistribution<L>) -> Bits {
    d.entropy()
}

fn entropy_of(probabilities: impl Iterator<Item = f64>) -> Bits {
    probabilities.filter(|p| *p > 0.0).map(|p| -p * p.log2()).sum()
}

/// Differential entropy of a Gaussian with the given variance, `½ log2(2πe σ²)`.
///
/// Negative for variances below `1/(2πe)`.
pub fn gaussian_entropy(variance: f64) -> Result<Bits> {
    if !variance.is_finite() || variance <= 0.0 {
        return Err(Error::Domain(format!(
            "gaussian entropy needs a positive finite variance, got {variance}"
        )));
    }
    Ok(0.5 * (2.0 * PI * E * variance).log2())
}
