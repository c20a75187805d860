//! Planning sequences of informative measurements.
//!
//! A measurement is informative when its outcome is hard to predict: under a
//! fully observed model, the information gained equals the entropy of the
//! outcome. This crate plans measurement sequences that maximize the summed
//! outcome entropy, exactly by backward induction ([`dp`], [`agent`]), on-line
//! by rollout ([`rollout`]), and for Gaussian-process fields ([`gp`]).

pub mod agent;
pub mod domains;
pub mod dp;
pub mod entropy;
pub mod error;
pub mod gp;
pub mod rollout;

pub use entropy::{Bits, OutcomeDistribution};
pub use error::{Error, Result};
