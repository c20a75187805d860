//! Exact finite-horizon dynamic programming over a measurement process.
//!
//! The solver maximizes the expected sum of Shannon information contents of
//! measurement outcomes,
//!
//! ```text
//! J_N(x)  = h_N(x)
//! J_k(x)  = max_{u in U_k(x)} E_m [ log2 1/p_k(m|x,u) + J_{k+1}(f_k(x,u,m)) ]
//! ```
//!
//! Only states reachable from the initial state are enumerated: a forward pass
//! collects the reachable set of every stage, then backward induction fills the
//! value function and the full argmax sets.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::entropy::{information_content, Bits, OutcomeDistribution};
use crate::error::{Error, Result};

/// Absolute tolerance (bits) under which two decision values are considered tied.
pub const VALUE_TOLERANCE: Bits = 1e-9;

/// Default cap on the total number of reachable (stage, state) entries.
pub const DEFAULT_STATE_CAP: usize = 5_000_000;

/// A sequential measurement problem with fully observed measurement state.
///
/// States are opaque to the solver; they only need to be hashable.
pub trait MeasurementProcess {
    type State: Clone + Eq + Hash + Debug;
    /// Measurements are totally ordered so argmax sets have a canonical order.
    type Measurement: Clone + Ord + Debug;
    type Outcome: Clone + PartialEq + Debug;

    fn initial_state(&self) -> Self::State;

    /// Admissible measurements `U_k(x)`.
    fn measurements(&self, k: usize, x: &Self::State) -> Vec<Self::Measurement>;

    /// Outcome distribution `p_k(m | x, u)`.
    fn outcomes(&self, k: usize, x: &Self::State, u: &Self::Measurement) -> Result<OutcomeDistribution<Self::Outcome>>;

    /// Next measurement state `f_k(x, u, m)`.
    fn transition(&self, k: usize, x: &Self::State, u: &Self::Measurement, m: &Self::Outcome) -> Self::State;

    /// Terminal information `h_N(x)`.
    fn terminal_entropy(&self, _x: &Self::State) -> Bits {
        0.0
    }
}

/// Stage-indexed values `J_k(x)` for `k = 0..=N`.
#[derive(Debug, Clone)]
pub struct ValueFunction<S> {
    stages: Vec<HashMap<S, Bits>>,
}

impl<S: Eq + Hash> ValueFunction<S> {
    pub(crate) fn new(stages: Vec<HashMap<S, Bits>>) -> Self {
        Self { stages }
    }

    pub fn horizon(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn get(&self, k: usize, x: &S) -> Option<Bits> {
        self.stages.get(k)?.get(x).copied()
    }

    pub fn stage(&self, k: usize) -> &HashMap<S, Bits> {
        &self.stages[k]
    }

    /// Number of stored (stage, state) entries.
    pub fn len(&self) -> usize {
        self.stages.iter().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Stage-indexed sets of maximizing decisions, for `k = 0..N`.
#[derive(Debug, Clone)]
pub struct PolicyTable<S, D> {
    stages: Vec<HashMap<S, D>>,
}

impl<S: Eq + Hash, D> PolicyTable<S, D> {
    pub(crate) fn new(stages: Vec<HashMap<S, D>>) -> Self {
        Self { stages }
    }

    pub fn get(&self, k: usize, x: &S) -> Option<&D> {
        self.stages.get(k)?.get(x)
    }

    pub fn stage(&self, k: usize) -> &HashMap<S, D> {
        &self.stages[k]
    }

    pub fn stages(&self) -> usize {
        self.stages.len()
    }
}

/// Output of [`solve`].
#[derive(Debug, Clone)]
pub struct Solution<S, U> {
    pub values: ValueFunction<S>,
    pub policy: PolicyTable<S, Vec<U>>,
    pub initial_state: S,
}

impl<S: Eq + Hash, U> Solution<S, U> {
    /// `J_0(x_0)`.
    pub fn value(&self) -> Bits {
        self.values
            .get(0, &self.initial_state)
            .expect("initial state is always solved")
    }

    /// Maximizing measurements at the initial state.
    pub fn initial_argmax(&self) -> &[U] {
        self.policy
            .get(0, &self.initial_state)
            .expect("initial state is always solved")
    }
}

/// Solver limits.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Maximum number of reachable (stage, state) entries.
    pub state_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

/// Keeps every candidate within [`VALUE_TOLERANCE`] of the running maximum.
#[derive(Debug)]
pub(crate) struct ArgmaxSet<T> {
    best: Bits,
    items: Vec<(Bits, T)>,
}

impl<T> ArgmaxSet<T> {
    pub(crate) fn new() -> Self {
        Self {
            best: f64::NEG_INFINITY,
            items: Vec::new(),
        }
    }

    pub(crate) fn offer(&mut self, value: Bits, item: T) {
        if value > self.best {
            self.best = value;
            self.items.retain(|(v, _)| *v >= value - VALUE_TOLERANCE);
        }
        if value >= self.best - VALUE_TOLERANCE {
            self.items.push((value, item));
        }
    }

    /// The maximum value and the maximizers, in offer order.
    pub(crate) fn finish(self) -> Option<(Bits, Vec<T>)> {
        if self.items.is_empty() {
            return None;
        }
        Some((self.best, self.items.into_iter().map(|(_, t)| t).collect()))
    }
}

/// One Bellman backup: the best expected information content plus
/// continuation value at `(k, x)`, with every maximizing measurement.
pub fn bellman_backup<P, F>(process: &P, k: usize, x: &P::State, next_value: F) -> Result<(Bits, Vec<P::Measurement>)>
where
    P: MeasurementProcess,
    F: Fn(&P::State) -> Option<Bits>,
{
    let measurements = process.measurements(k, x);
    if measurements.is_empty() {
        return Err(Error::Model(format!(
            "no admissible measurement at stage {k}, state {x:?}"
        )));
    }
    let mut argmax = ArgmaxSet::new();
    for u in measurements {
        let q = expected_return(process, k, x, &u, &next_value)?;
        argmax.offer(q, u);
    }
    let (value, mut best) = argmax.finish().expect("measurement set is non-empty");
    best.sort();
    best.dedup();
    Ok((value, best))
}

fn expected_return<P, F>(process: &P, k: usize, x: &P::State, u: &P::Measurement, next_value: &F) -> Result<Bits>
where
    P: MeasurementProcess,
    F: Fn(&P::State) -> Option<Bits>,
{
    let dist = process.outcomes(k, x, u)?;
    let mut q = 0.0;
    for (m, p) in dist.support() {
        let next = process.transition(k, x, u, m);
        let j = next_value(&next)
            .ok_or_else(|| Error::Internal(format!("successor {next:?} of stage {k} was never reached")))?;
        q += p * (information_content(p)? + j);
    }
    Ok(q)
}

/// Exact backward induction over the states reachable in `horizon` stages.
pub fn solve<P: MeasurementProcess>(
    process: &P,
    horizon: usize,
    options: SolveOptions,
) -> Result<Solution<P::State, P::Measurement>> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    let layers = reachable_layers(process, horizon, options.state_cap)?;

    let mut values: Vec<HashMap<P::State, Bits>> = vec![HashMap::new(); horizon + 1];
    let mut policy: Vec<HashMap<P::State, Vec<P::Measurement>>> = vec![HashMap::new(); horizon];
    values[horizon] = layers[horizon]
        .iter()
        .map(|x| (x.clone(), process.terminal_entropy(x)))
        .collect();

    for k in (0..horizon).rev() {
        let (head, tail) = values.split_at_mut(k + 1);
        let next = &tail[0];
        for x in &layers[k] {
            let (v, best) = bellman_backup(process, k, x, |s| next.get(s).copied())?;
            head[k].insert(x.clone(), v);
            policy[k].insert(x.clone(), best);
        }
    }

    Ok(Solution {
        values: ValueFunction::new(values),
        policy: PolicyTable::new(policy),
        initial_state: process.initial_state(),
    })
}

/// Forward reachability: the distinct states of every stage, in discovery order.
fn reachable_layers<P: MeasurementProcess>(process: &P, horizon: usize, cap: usize) -> Result<Vec<Vec<P::State>>> {
    let mut layers = vec![vec![process.initial_state()]];
    let mut total = 1usize;
    for k in 0..horizon {
        let mut seen = HashMap::new();
        let mut layer = Vec::new();
        for x in &layers[k] {
            for u in process.measurements(k, x) {
                let dist = process.outcomes(k, x, &u)?;
                for (m, _) in dist.support() {
                    let next = process.transition(k, x, &u, m);
                    if seen.insert(next.clone(), ()).is_none() {
                        layer.push(next);
                        total += 1;
                        if total > cap {
                            return Err(Error::Resource {
                                what: "reachable state entries".into(),
                                cap,
                            });
                        }
                    }
                }
            }
        }
        layers.push(layer);
    }
    Ok(layers)
}

/// Smallest horizon whose optimal value reaches `target` bits.
///
/// Re-solves with `N = 1, 2, ...` up to `max_stages`.
pub fn min_stages_for_information<P: MeasurementProcess>(
    process: &P,
    target: Bits,
    max_stages: usize,
    options: SolveOptions,
) -> Result<(usize, Bits)> {
    if target.is_nan() || target <= 0.0 {
        return Err(Error::Domain(format!("target must be positive, got {target}")));
    }
    if max_stages == 0 {
        return Err(Error::Domain("max_stages must be at least 1".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for n in 1..=max_stages {
        let value = solve(process, n, options)?.value();
        best = best.max(value);
        if value >= target - VALUE_TOLERANCE {
            return Ok((n, value));
        }
    }
    Err(Error::TargetNotReached {
        target,
        best,
        max_stages,
    })
}
