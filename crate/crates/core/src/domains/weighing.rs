//! Finding a single heavy ball among `n` with a two-pan balance.
//!
//! The measurement state is the number of balls that may still be the heavy
//! one; a measurement places `u` of them (an even number, half per pan) on the
//! balance.

use crate::dp::MeasurementProcess;
use crate::entropy::OutcomeDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighing {
    LeftHeavier,
    RightHeavier,
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeighingModel {
    n: u32,
}

impl WeighingModel {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("weighing needs at least 2 balls, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn balls(&self) -> u32 {
        self.n
    }
}

/// Even pan loads `2, 4, ...` up to `x` (or `x - 1` when `x` is odd).
///
/// Once the heavy ball is identified (`x = 1`) the only admissible action is
/// the empty weighing `0`, which is certain to balance.
pub fn admissible_loads(x: u32) -> Vec<u32> {
    if x <= 1 {
        return vec![0];
    }
    (2..=x).step_by(2).collect()
}

impl MeasurementProcess for WeighingModel {
    type State = u32;
    type Measurement = u32;
    type Outcome = Weighing;

    fn initial_state(&self) -> u32 {
        self.n
    }

    fn measurements(&self, _k: usize, x: &u32) -> Vec<u32> {
        admissible_loads(*x)
    }

    fn outcomes(&self, _k: usize, x: &u32, u: &u32) -> Result<OutcomeDistribution<Weighing>> {
        let (x, u) = (f64::from(*x), f64::from(*u));
        OutcomeDistribution::new(vec![
            (Weighing::LeftHeavier, u / (2.0 * x)),
            (Weighing::RightHeavier, u / (2.0 * x)),
            (Weighing::Balanced, (x - u) / x),
        ])
    }

    fn transition(&self, _k: usize, x: &u32, u: &u32, m: &Weighing) -> u32 {
        match m {
            Weighing::LeftHeavier | Weighing::RightHeavier => u / 2,
            Weighing::Balanced => x - u,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{bellman_backup, solve, SolveOptions};

    fn prob(model: &WeighingModel, x: u32, u: u32, m: Weighing) -> f64 {
        model
            .outcomes(0, &x, &u)
            .unwrap()
            .iter()
            .find(|(l, _)| **l == m)
            .unwrap()
            .1
    }

    #[test]
    fn parameterization() {
        let w = WeighingModel::new(4).unwrap();
        assert!((prob(&w, 3, 2, Weighing::Balanced) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(w.transition(0, &3, &2, &Weighing::Balanced), 1);
        assert_eq!(prob(&w, 4, 4, Weighing::LeftHeavier), 0.5);
        assert_eq!(w.transition(0, &4, &4, &Weighing::LeftHeavier), 2);
        let d = w.outcomes(0, &4, &4).unwrap();
        assert!(d.support().all(|(m, _)| *m != Weighing::Balanced));
    }

    #[test]
    fn loads() {
        assert_eq!(admissible_loads(4), vec![2, 4]);
        assert_eq!(admissible_loads(5), vec![2, 4]);
        assert_eq!(admissible_loads(2), vec![2]);
        assert_eq!(admissible_loads(1), vec![0]);
    }

    #[test]
    fn too_few_balls() {
        assert!(WeighingModel::new(1).is_err());
    }

    #[test]
    fn tail_subproblems() {
        let w = WeighingModel::new(4).unwrap();
        let (v, best) = bellman_backup(&w, 0, &2, |_| Some(0.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(best, vec![2]);
        let (v, best) = bellman_backup(&w, 0, &3, |_| Some(0.0)).unwrap();
        assert!((v - 3f64.log2()).abs() < 1e-12);
        assert_eq!(best, vec![2]);
    }

    #[test]
    fn four_balls_two_weighings() {
        let w = WeighingModel::new(4).unwrap();
        let sol = solve(&w, 2, SolveOptions::default()).unwrap();
        assert!((sol.value() - 2.0).abs() < 1e-9);
        assert_eq!(sol.initial_argmax(), &[2, 4]);
    }

    #[test]
    fn successor_sizes_conserve_count() {
        let w = WeighingModel::new(30).unwrap();
        for x in 1..=30 {
            for u in admissible_loads(x) {
                let total: u32 = [Weighing::LeftHeavier, Weighing::RightHeavier, Weighing::Balanced]
                    .iter()
                    .map(|m| w.transition(0, &x, &u, m))
                    .sum();
                assert_eq!(total, x);
            }
        }
    }
}
