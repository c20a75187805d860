//! Guessing an integer in `[0, n)` with yes/no interval questions.
//!
//! The measurement state is the size of the interval still containing the
//! number; a question asks whether it lies in a proper subinterval of size `u`.

use crate::dp::MeasurementProcess;
use crate::entropy::OutcomeDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GuessModel {
    n: u32,
}

impl GuessModel {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("range must hold at least 2 integers, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn range(&self) -> u32 {
        self.n
    }
}

impl MeasurementProcess for GuessModel {
    type State = u32;
    type Measurement = u32;
    type Outcome = Answer;

    fn initial_state(&self) -> u32 {
        self.n
    }

    /// Subinterval sizes `1..x`; a resolved range only admits the empty question `0`.
    fn measurements(&self, _k: usize, x: &u32) -> Vec<u32> {
        if *x <= 1 {
            vec![0]
        } else {
            (1..*x).collect()
        }
    }

    fn outcomes(&self, _k: usize, x: &u32, u: &u32) -> Result<OutcomeDistribution<Answer>> {
        let (x, u) = (f64::from(*x), f64::from(*u));
        OutcomeDistribution::new(vec![(Answer::Yes, u / x), (Answer::No, (x - u) / x)])
    }

    fn transition(&self, _k: usize, x: &u32, u: &u32, m: &Answer) -> u32 {
        match m {
            Answer::Yes => *u,
            Answer::No => x - u,
        }
    }
}
