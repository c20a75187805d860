//! On-line approximate dynamic programming by stochastic rollout.
//!
//! At each stage every (control, measurement) pair is scored by its immediate
//! information plus a simulated continuation under a cheap base policy, and
//! the best pair is applied. The base policy is an optimistic one-step
//! lookahead that replaces every expectation by a single sample.
//!
//! Randomness is drawn from ChaCha streams keyed by `(seed, stage, pair
//! index)`, so runs are reproducible and independent of evaluation order.
//!
//! [`submarine`] holds the deterministic specialization used for the sonar
//! search.

pub mod submarine;

use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::CoupledProcess;
use crate::dp::VALUE_TOLERANCE;
use crate::entropy::{information_content, Bits, OutcomeDistribution};
use crate::error::{Error, Result};

/// How ties between equally valued decisions are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// The first maximizer in the order the model enumerates decisions.
    #[default]
    FirstInEnumeration,
    /// The smallest maximizer under the decision type's ordering.
    LowestControlId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutConfig {
    /// Continuation samples per candidate decision and first-stage branch.
    pub samples_per_control: usize,
    pub rng_seed: u64,
    /// Stage count for [`Stop::Horizon`].
    pub horizon: usize,
    pub tie_break: TieBreak,
    /// Bound on simulated stages, both for the run and for continuations.
    pub step_cap: usize,
}

impl RolloutConfig {
    pub fn new(horizon: usize) -> Self {
        Self {
            samples_per_control: 1,
            rng_seed: 0,
            horizon,
            tie_break: TieBreak::default(),
            step_cap: horizon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_control == 0 {
            return Err(Error::Domain("samples_per_control must be at least 1".into()));
        }
        if self.step_cap < self.horizon {
            return Err(Error::Domain(format!(
                "step_cap {} is below the horizon {}",
                self.step_cap, self.horizon
            )));
        }
        Ok(())
    }
}

pub type StopPredicate<X, S> = Box<dyn Fn(&X, &S) -> bool + Send + Sync>;

/// When a run ends.
pub enum Stop<X, S> {
    /// After `config.horizon` stages.
    Horizon,
    /// As soon as the predicate holds; continuations look ahead to `config.step_cap`.
    When(StopPredicate<X, S>),
}

impl<X, S> Stop<X, S> {
    pub fn when(predicate: impl Fn(&X, &S) -> bool + Send + Sync + 'static) -> Self {
        Self::When(Box::new(predicate))
    }

    fn done(&self, k: usize, config: &RolloutConfig, position: &X, x: &S) -> bool {
        match self {
            Stop::Horizon => k >= config.horizon,
            Stop::When(f) => f(position, x),
        }
    }

    fn lookahead(&self, config: &RolloutConfig) -> usize {
        match self {
            Stop::Horizon => config.horizon,
            Stop::When(_) => config.step_cap,
        }
    }
}

impl<X, S> Debug for Stop<X, S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stop::Horizon => f.write_str("Horizon"),
            Stop::When(_) => f.write_str("When(..)"),
        }
    }
}

/// One applied stage of a simulated run.
#[derive(Clone)]
pub struct Step<P: CoupledProcess> {
    pub k: usize,
    pub position: P::Position,
    pub state: P::State,
    pub control: P::Control,
    pub measurement: P::Measurement,
    pub disturbance: P::Disturbance,
    pub outcome: P::Outcome,
    /// Realized information content `h_k`.
    pub information: Bits,
    /// Entropy of the outcome distribution the measurement was drawn from.
    pub entropy: Bits,
}

impl<P: CoupledProcess> PartialEq for Step<P> {
    fn eq(&self, o: &Self) -> bool {
        self.k == o.k
            && self.position == o.position
            && self.state == o.state
            && self.control == o.control
            && self.measurement == o.measurement
            && self.disturbance == o.disturbance
            && self.outcome == o.outcome
            && self.information.to_bits() == o.information.to_bits()
            && self.entropy.to_bits() == o.entropy.to_bits()
    }
}

impl<P: CoupledProcess> Debug for Step<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Step")
            .field("k", &self.k)
            .field("position", &self.position)
            .field("state", &self.state)
            .field("control", &self.control)
            .field("measurement", &self.measurement)
            .field("disturbance", &self.disturbance)
            .field("outcome", &self.outcome)
            .field("information", &self.information)
            .field("entropy", &self.entropy)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    /// The stopping rule did not fire within the step cap; the trajectory is partial.
    StepCapReached,
}

#[derive(Clone)]
pub struct Trajectory<P: CoupledProcess> {
    pub steps: Vec<Step<P>>,
    pub final_position: P::Position,
    pub final_state: P::State,
    pub status: RunStatus,
}

impl<P: CoupledProcess> PartialEq for Trajectory<P> {
    fn eq(&self, o: &Self) -> bool {
        self.steps == o.steps
            && self.final_position == o.final_position
            && self.final_state == o.final_state
            && self.status == o.status
    }
}

impl<P: CoupledProcess> Debug for Trajectory<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Trajectory")
            .field("steps", &self.steps)
            .field("final_position", &self.final_position)
            .field("final_state", &self.final_state)
            .field("status", &self.status)
            .finish()
    }
}

impl<P: CoupledProcess> Trajectory<P> {
    pub fn total_information(&self) -> Bits {
        self.steps.iter().map(|s| s.information).sum()
    }

    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }
}

/// Stream id reserved for the realized disturbance and outcome of a stage.
const REALIZED: u32 = u32::MAX;
/// Stream id reserved for base-policy draws of the driving policy.
const BASE: u32 = u32::MAX - 1;

/// Independent generator for `(seed, stage, slot)`.
pub fn stream(seed: u64, k: usize, slot: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | u64::from(slot));
    rng
}

/// Picks the winning index among `(value, index)` candidates.
///
/// Candidates within [`VALUE_TOLERANCE`] of the best value tie; `lowest`
/// orders tied indices when the tie-break asks for it.
pub(crate) fn select<T>(
    candidates: &[(Bits, T)],
    tie_break: TieBreak,
    lowest: impl Fn(&T, &T) -> std::cmp::Ordering,
) -> Option<usize> {
    let best = candidates.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let tied = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.0 >= best - VALUE_TOLERANCE);
    match tie_break {
        TieBreak::FirstInEnumeration => tied.map(|(i, _)| i).next(),
        TieBreak::LowestControlId => tied.min_by(|a, b| lowest(&a.1 .1, &b.1 .1)).map(|(i, _)| i),
    }
}

fn decision_pairs<P: CoupledProcess>(
    process: &P,
    k: usize,
    position: &P::Position,
    x: &P::State,
) -> Result<Vec<(P::Control, P::Measurement)>> {
    let controls = process.controls(k, position);
    if controls.is_empty() {
        return Err(Error::Model(format!(
            "no admissible control at stage {k}, position {position:?}"
        )));
    }
    let measurements = process.measurements(k, position, x);
    if measurements.is_empty() {
        return Err(Error::Model(format!(
            "no admissible measurement at stage {k}, position {position:?}, state {x:?}"
        )));
    }
    Ok(controls
        .iter()
        .flat_map(|c| measurements.iter().map(move |u| (c.clone(), u.clone())))
        .collect())
}

fn draw<'d, L, R: Rng + ?Sized>(d: &'d OutcomeDistribution<L>, rng: &mut R, random: &mut bool) -> (&'d L, f64) {
    if !d.is_point_mass() {
        *random = true;
    }
    d.draw(rng)
}

/// Optimistic one-step lookahead base policy.
///
/// One uniform variate is drawn for each of `w_k`, `m_k` and `m_{k+1}` and
/// shared by every candidate, so all candidates see the same single-sample
/// realization. Returns the maximizing `(u'_k, u_k)`; the stage-`k+1`
/// measurement that achieves the maximum is discarded. Beyond `horizon` the
/// second stage contributes nothing.
pub fn generate_base_policy<P: CoupledProcess, R: Rng + ?Sized>(
    process: &P,
    k: usize,
    position: &P::Position,
    x: &P::State,
    horizon: usize,
    tie_break: TieBreak,
    rng: &mut R,
) -> Result<(P::Control, P::Measurement)> {
    let pairs = decision_pairs(process, k, position, x)?;
    if pairs.len() == 1 {
        return Ok(pairs.into_iter().next().expect("one pair"));
    }
    let (vw, vm, vm1): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let mut scored = Vec::with_capacity(pairs.len());
    for (c, u) in pairs {
        let dist = process.outcomes(k, x, &u)?;
        let (m, pm) = dist.draw_with(vm);
        let mut value = information_content(pm)?;
        if k + 1 < horizon {
            let next = process.transition(k, x, &u, m);
            let w_dist = process.disturbances(k, position, &c)?;
            let landing = process.dynamics(k, position, &c, w_dist.sample_with(vw));
            let mut best_next = f64::NEG_INFINITY;
            for u1 in process.measurements(k + 1, &landing, &next) {
                let d1 = process.outcomes(k + 1, &next, &u1)?;
                best_next = best_next.max(information_content(d1.draw_with(vm1).1)?);
            }
            if best_next == f64::NEG_INFINITY {
                return Err(Error::Model(format!(
                    "no admissible measurement at stage {}, position {landing:?}",
                    k + 1
                )));
            }
            value += best_next;
        }
        scored.push((value, (c, u)));
    }
    let i = select(&scored, tie_break, |a, b| a.cmp(b)).expect("pairs are non-empty");
    Ok(scored.swap_remove(i).1)
}

/// Monte Carlo estimate of `Q_k(x', x, u', u)`.
///
/// The stage-`k` disturbance and outcome are enumerated exactly; each branch
/// is continued by the base policy `samples_per_control` times and the
/// continuation totals averaged. A continuation that meets only point masses
/// is evaluated once. Continuations stop at the lookahead horizon of `stop`
/// or when its predicate holds.
#[allow(clippy::too_many_arguments)]
pub fn estimate_q<P: CoupledProcess, R: Rng + ?Sized>(
    process: &P,
    k: usize,
    position: &P::Position,
    x: &P::State,
    control: &P::Control,
    measurement: &P::Measurement,
    config: &RolloutConfig,
    stop: &Stop<P::Position, P::State>,
    rng: &mut R,
) -> Result<Bits> {
    config.validate()?;
    let horizon = stop.lookahead(config);
    let w_dist = process.disturbances(k, position, control)?;
    let m_dist = process.outcomes(k, x, measurement)?;
    let mut q = 0.0;
    for (w, pw) in w_dist.support() {
        let landing = process.dynamics(k, position, control, w);
        for (m, pm) in m_dist.support() {
            let next = process.transition(k, x, measurement, m);
            let mut tail = 0.0;
            let mut runs = 0usize;
            for _ in 0..config.samples_per_control {
                let (value, random) = continuation(process, k + 1, &landing, &next, horizon, config, stop, rng)?;
                tail += value;
                runs += 1;
                if !random {
                    break;
                }
            }
            q += pw * pm * (information_content(pm)? + tail / runs as f64);
        }
    }
    Ok(q)
}

/// Information collected by the base policy from stage `k` to the horizon,
/// and whether any draw along the way was genuinely random.
#[allow(clippy::too_many_arguments)]
fn continuation<P: CoupledProcess, R: Rng + ?Sized>(
    process: &P,
    k: usize,
    position: &P::Position,
    x: &P::State,
    horizon: usize,
    config: &RolloutConfig,
    stop: &Stop<P::Position, P::State>,
    rng: &mut R,
) -> Result<(Bits, bool)> {
    let mut position = position.clone();
    let mut x = x.clone();
    let mut total = 0.0;
    let mut random = false;
    let mut i = k;
    loop {
        match stop {
            Stop::Horizon if i >= horizon => break,
            Stop::When(f) if f(&position, &x) => break,
            _ => {}
        }
        if i >= config.step_cap {
            return Err(Error::Resource {
                what: "rollout continuation stages".into(),
                cap: config.step_cap,
            });
        }
        let (c, u) = generate_base_policy(process, i, &position, &x, horizon, config.tie_break, rng)?;
        let w_dist = process.disturbances(i, &position, &c)?;
        let (w, _) = draw(&w_dist, rng, &mut random);
        let m_dist = process.outcomes(i, &x, &u)?;
        let (m, pm) = draw(&m_dist, rng, &mut random);
        total += information_content(pm)?;
        let next_x = process.transition(i, &x, &u, m);
        position = process.dynamics(i, &position, &c, w);
        x = next_x;
        i += 1;
    }
    Ok((total + process.terminal_entropy(&position, &x), random))
}

/// Runs the rollout policy from `start` until `stop` fires or the step cap is hit.
pub fn run_rollout<P: CoupledProcess>(
    process: &P,
    start: (P::Position, P::State),
    config: &RolloutConfig,
    stop: &Stop<P::Position, P::State>,
) -> Result<Trajectory<P>> {
    drive(process, start, config, stop, |k, position, x| {
        let pairs = decision_pairs(process, k, position, x)?;
        let mut scored = Vec::with_capacity(pairs.len());
        for (idx, (c, u)) in pairs.into_iter().enumerate() {
            let mut rng = stream(config.rng_seed, k, idx as u32);
            let q = estimate_q(process, k, position, x, &c, &u, config, stop, &mut rng)?;
            scored.push((q, (c, u)));
        }
        let i = select(&scored, config.tie_break, |a, b| a.cmp(b)).expect("pairs are non-empty");
        Ok(scored.swap_remove(i).1)
    })
}

/// Runs the base policy directly, without the rollout layer.
pub fn run_base_policy<P: CoupledProcess>(
    process: &P,
    start: (P::Position, P::State),
    config: &RolloutConfig,
    stop: &Stop<P::Position, P::State>,
) -> Result<Trajectory<P>> {
    let horizon = stop.lookahead(config);
    drive(process, start, config, stop, |k, position, x| {
        let mut rng = stream(config.rng_seed, k, BASE);
        generate_base_policy(process, k, position, x, horizon, config.tie_break, &mut rng)
    })
}

fn drive<P, F>(
    process: &P,
    start: (P::Position, P::State),
    config: &RolloutConfig,
    stop: &Stop<P::Position, P::State>,
    mut decide: F,
) -> Result<Trajectory<P>>
where
    P: CoupledProcess,
    F: FnMut(usize, &P::Position, &P::State) -> Result<(P::Control, P::Measurement)>,
{
    config.validate()?;
    let (mut position, mut x) = start;
    let mut steps = Vec::new();
    let mut k = 0;
    let status = loop {
        if stop.done(k, config, &position, &x) {
            break RunStatus::Completed;
        }
        if k >= config.step_cap {
            break RunStatus::StepCapReached;
        }
        let (control, measurement) = decide(k, &position, &x)?;
        let mut rng = stream(config.rng_seed, k, REALIZED);
        let mut random = false;
        let w_dist = process.disturbances(k, &position, &control)?;
        let (w, _) = draw(&w_dist, &mut rng, &mut random);
        let m_dist = process.outcomes(k, &x, &measurement)?;
        let (m, pm) = draw(&m_dist, &mut rng, &mut random);
        let next_x = process.transition(k, &x, &measurement, m);
        let next_position = process.dynamics(k, &position, &control, w);
        steps.push(Step {
            k,
            position: position.clone(),
            state: x.clone(),
            control,
            measurement,
            disturbance: w.clone(),
            outcome: m.clone(),
            information: information_content(pm)?,
            entropy: m_dist.entropy(),
        });
        position = next_position;
        x = next_x;
        k += 1;
    };
    Ok(Trajectory {
        steps,
        final_position: position,
        final_state: x,
        status,
    })
}

/// Replays recorded decisions and realizations through the model and checks
/// that every recorded state is reproduced.
pub fn replay<P: CoupledProcess>(process: &P, trajectory: &Trajectory<P>) -> bool {
    let mut pair: Option<(P::Position, P::State)> = None;
    for s in &trajectory.steps {
        if let Some((p, x)) = &pair {
            if *p != s.position || *x != s.state {
                return false;
            }
        }
        let position = process.dynamics(s.k, &s.position, &s.control, &s.disturbance);
        let x = process.transition(s.k, &s.state, &s.measurement, &s.outcome);
        pair = Some((position, x));
    }
    match pair {
        Some((p, x)) => p == trajectory.final_position && x == trajectory.final_state,
        None => true,
    }
}
