//! Exact dynamic programming for a measuring agent that moves.
//!
//! The measurement state is augmented with the agent position, and the
//! recurrence nests a maximization over agent controls and an expectation
//! over motion disturbances around the measurement backup:
//!
//! ```text
//! J_k(x', x) = max_{u'} E_w [ max_{u in U_k(x', x)} E_m [ h_k(x, u, m) + J_{k+1}(v_k(x', u', w), f_k(x, u, m)) ] ]
//! ```
//!
//! [`brute_force_value`] evaluates the same objective by walking every
//! closed-loop decision tree over realization histories, without any
//! state-keyed reuse, and serves as the oracle for [`solve_extended`].

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::dp::{ArgmaxSet, MeasurementProcess, PolicyTable, SolveOptions, ValueFunction};
use crate::entropy::{information_content, Bits, OutcomeDistribution};
use crate::error::{Error, Result};

/// A measurement process coupled to an agent whose position constrains the
/// admissible measurements.
pub trait CoupledProcess {
    type Position: Clone + Eq + Hash + Ord + Debug;
    type Control: Clone + Ord + Debug;
    type Disturbance: Clone + PartialEq + Debug;
    type State: Clone + Eq + Hash + Debug;
    type Measurement: Clone + Ord + Debug;
    type Outcome: Clone + PartialEq + Debug;

    /// Candidate starting positions `x'_0`.
    fn initial_positions(&self) -> Vec<Self::Position>;

    fn initial_state(&self) -> Self::State;

    /// Admissible agent controls `U'_k(x')`.
    fn controls(&self, k: usize, position: &Self::Position) -> Vec<Self::Control>;

    /// Distribution of the motion disturbance `w_k`; a point mass for deterministic agents.
    fn disturbances(
        &self,
        k: usize,
        position: &Self::Position,
        control: &Self::Control,
    ) -> Result<OutcomeDistribution<Self::Disturbance>>;

    /// Agent dynamics `v_k(x', u', w)`.
    fn dynamics(
        &self,
        k: usize,
        position: &Self::Position,
        control: &Self::Control,
        w: &Self::Disturbance,
    ) -> Self::Position;

    /// Admissible measurements `U_k(x', x)`.
    fn measurements(&self, k: usize, position: &Self::Position, x: &Self::State) -> Vec<Self::Measurement>;

    fn outcomes(&self, k: usize, x: &Self::State, u: &Self::Measurement) -> Result<OutcomeDistribution<Self::Outcome>>;

    fn transition(&self, k: usize, x: &Self::State, u: &Self::Measurement, m: &Self::Outcome) -> Self::State;

    fn terminal_entropy(&self, _position: &Self::Position, _x: &Self::State) -> Bits {
        0.0
    }
}

/// A plain measurement process seen as a coupled one with a single, motionless agent.
#[derive(Debug, Clone)]
pub struct Stationary<P>(pub P);

impl<P: MeasurementProcess> CoupledProcess for Stationary<P> {
    type Position = ();
    type Control = ();
    type Disturbance = ();
    type State = P::State;
    type Measurement = P::Measurement;
    type Outcome = P::Outcome;

    fn initial_positions(&self) -> Vec<()> {
        vec![()]
    }
    fn initial_state(&self) -> P::State {
        self.0.initial_state()
    }
    fn controls(&self, _k: usize, _position: &()) -> Vec<()> {
        vec![()]
    }
    fn disturbances(&self, _k: usize, _position: &(), _c: &()) -> Result<OutcomeDistribution<()>> {
        Ok(OutcomeDistribution::certain(()))
    }
    fn dynamics(&self, _k: usize, _position: &(), _c: &(), _w: &()) {}
    fn measurements(&self, k: usize, _position: &(), x: &P::State) -> Vec<P::Measurement> {
        self.0.measurements(k, x)
    }
    fn outcomes(&self, k: usize, x: &P::State, u: &P::Measurement) -> Result<OutcomeDistribution<P::Outcome>> {
        self.0.outcomes(k, x, u)
    }
    fn transition(&self, k: usize, x: &P::State, u: &P::Measurement, m: &P::Outcome) -> P::State {
        self.0.transition(k, x, u, m)
    }
    fn terminal_entropy(&self, _position: &(), x: &P::State) -> Bits {
        self.0.terminal_entropy(x)
    }
}

type Augmented<P> = (<P as CoupledProcess>::Position, <P as CoupledProcess>::State);

/// Maximizing decisions at one augmented state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledDecision<C, X, U> {
    /// Every maximizing agent control.
    pub controls: Vec<C>,
    /// For each position reachable under a maximizing control, every
    /// maximizing measurement (the inner maximization sees the realized
    /// disturbance through the next position).
    pub measurements: Vec<(X, Vec<U>)>,
}

pub type DecisionOf<P> = CoupledDecision<
    <P as CoupledProcess>::Control,
    <P as CoupledProcess>::Position,
    <P as CoupledProcess>::Measurement,
>;

/// Output of [`solve_extended`].
#[derive(Debug, Clone)]
pub struct CoupledSolution<P: CoupledProcess> {
    pub values: ValueFunction<Augmented<P>>,
    pub policy: PolicyTable<Augmented<P>, DecisionOf<P>>,
    pub initial_positions: Vec<P::Position>,
    pub initial_state: P::State,
}

impl<P: CoupledProcess> CoupledSolution<P> {
    /// `max_{x'_0} J_0(x'_0, x_0)` and its maximizers.
    pub fn best_start(&self) -> Result<(Bits, Vec<P::Position>)> {
        maximize_initial(&self.values, &self.initial_positions, &self.initial_state)
    }

    pub fn value(&self, k: usize, position: &P::Position, x: &P::State) -> Option<Bits> {
        self.values.get(k, &(position.clone(), x.clone()))
    }

    pub fn decision(&self, k: usize, position: &P::Position, x: &P::State) -> Option<&DecisionOf<P>> {
        self.policy.get(k, &(position.clone(), x.clone()))
    }
}

/// Maximizes `J_0(x'_0, x_0)` over the candidate starting positions.
pub fn maximize_initial<X, S>(values: &ValueFunction<(X, S)>, positions: &[X], x0: &S) -> Result<(Bits, Vec<X>)>
where
    X: Clone + Eq + Hash + Ord + Debug,
    S: Clone + Eq + Hash + Debug,
{
    if positions.is_empty() {
        return Err(Error::Model("no candidate initial positions".into()));
    }
    let mut argmax = ArgmaxSet::new();
    for p in positions {
        let v = values
            .get(0, &(p.clone(), x0.clone()))
            .ok_or_else(|| Error::Internal(format!("initial position {p:?} missing from the value function")))?;
        argmax.offer(v, p.clone());
    }
    let (v, mut best) = argmax.finish().expect("positions are non-empty");
    best.sort();
    best.dedup();
    Ok((v, best))
}

/// Exact backward induction over reachable augmented states.
pub fn solve_extended<P: CoupledProcess>(
    process: &P,
    horizon: usize,
    options: SolveOptions,
) -> Result<CoupledSolution<P>> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    let initial_positions = process.initial_positions();
    if initial_positions.is_empty() {
        return Err(Error::Model("no candidate initial positions".into()));
    }
    let layers = reachable_layers(process, &initial_positions, horizon, options.state_cap)?;

    let mut values: Vec<HashMap<Augmented<P>, Bits>> = vec![HashMap::new(); horizon + 1];
    let mut policy: Vec<HashMap<Augmented<P>, DecisionOf<P>>> = vec![HashMap::new(); horizon];
    values[horizon] = layers[horizon]
        .iter()
        .map(|(p, x)| ((p.clone(), x.clone()), process.terminal_entropy(p, x)))
        .collect();

    for k in (0..horizon).rev() {
        let (head, tail) = values.split_at_mut(k + 1);
        let next = &tail[0];
        for (p, x) in &layers[k] {
            let (v, decision) = extended_backup(process, k, p, x, |s| next.get(s).copied())?;
            head[k].insert((p.clone(), x.clone()), v);
            policy[k].insert((p.clone(), x.clone()), decision);
        }
    }

    Ok(CoupledSolution {
        values: ValueFunction::new(values),
        policy: PolicyTable::new(policy),
        initial_positions,
        initial_state: process.initial_state(),
    })
}

/// One backup of the coupled recurrence at `(k, x', x)`.
pub fn extended_backup<P, F>(
    process: &P,
    k: usize,
    position: &P::Position,
    x: &P::State,
    next_value: F,
) -> Result<(Bits, DecisionOf<P>)>
where
    P: CoupledProcess,
    F: Fn(&Augmented<P>) -> Option<Bits>,
{
    let controls = process.controls(k, position);
    if controls.is_empty() {
        return Err(Error::Model(format!(
            "no admissible control at stage {k}, position {position:?}"
        )));
    }
    // The inner maximization only depends on where the agent lands.
    let mut inner: HashMap<P::Position, (Bits, Vec<P::Measurement>)> = HashMap::new();
    let mut argmax = ArgmaxSet::new();
    for c in controls {
        let disturbances = process.disturbances(k, position, &c)?;
        let mut q = 0.0;
        let mut landings = Vec::new();
        for (w, pw) in disturbances.support() {
            let landing = process.dynamics(k, position, &c, w);
            if !inner.contains_key(&landing) {
                let best = best_measurement(process, k, position, x, &landing, &next_value)?;
                inner.insert(landing.clone(), best);
            }
            q += pw * inner[&landing].0;
            landings.push(landing);
        }
        argmax.offer(q, (c, landings));
    }
    let (value, best) = argmax.finish().expect("control set is non-empty");

    let mut controls = Vec::with_capacity(best.len());
    let mut measurements: Vec<(P::Position, Vec<P::Measurement>)> = Vec::new();
    for (c, landings) in best {
        controls.push(c);
        for landing in landings {
            if !measurements.iter().any(|(p, _)| *p == landing) {
                let us = inner[&landing].1.clone();
                measurements.push((landing, us));
            }
        }
    }
    controls.sort();
    controls.dedup();
    measurements.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((value, CoupledDecision { controls, measurements }))
}

fn best_measurement<P, F>(
    process: &P,
    k: usize,
    position: &P::Position,
    x: &P::State,
    landing: &P::Position,
    next_value: &F,
) -> Result<(Bits, Vec<P::Measurement>)>
where
    P: CoupledProcess,
    F: Fn(&Augmented<P>) -> Option<Bits>,
{
    let measurements = process.measurements(k, position, x);
    if measurements.is_empty() {
        return Err(Error::Model(format!(
            "no admissible measurement at stage {k}, position {position:?}, state {x:?}"
        )));
    }
    let mut argmax = ArgmaxSet::new();
    for u in measurements {
        let dist = process.outcomes(k, x, &u)?;
        let mut q = 0.0;
        for (m, pm) in dist.support() {
            let next = (landing.clone(), process.transition(k, x, &u, m));
            let j = next_value(&next)
                .ok_or_else(|| Error::Internal(format!("successor {next:?} of stage {k} was never reached")))?;
            q += pm * (information_content(pm)? + j);
        }
        argmax.offer(q, u);
    }
    let (v, mut best) = argmax.finish().expect("measurement set is non-empty");
    best.sort();
    best.dedup();
    Ok((v, best))
}

fn reachable_layers<P: CoupledProcess>(
    process: &P,
    starts: &[P::Position],
    horizon: usize,
    cap: usize,
) -> Result<Vec<Vec<Augmented<P>>>> {
    let x0 = process.initial_state();
    let mut first: Vec<Augmented<P>> = Vec::new();
    for p in starts {
        let s = (p.clone(), x0.clone());
        if !first.contains(&s) {
            first.push(s);
        }
    }
    let mut total = first.len();
    let mut layers = vec![first];
    let over_cap = || Error::Resource {
        what: "reachable augmented state entries".into(),
        cap,
    };
    if total > cap {
        return Err(over_cap());
    }
    for k in 0..horizon {
        let mut seen: HashMap<Augmented<P>, ()> = HashMap::new();
        let mut layer = Vec::new();
        for (p, x) in &layers[k] {
            let mut landings: Vec<P::Position> = Vec::new();
            for c in process.controls(k, p) {
                for (w, _) in process.disturbances(k, p, &c)?.support() {
                    let landing = process.dynamics(k, p, &c, w);
                    if !landings.contains(&landing) {
                        landings.push(landing);
                    }
                }
            }
            let mut successors: Vec<P::State> = Vec::new();
            for u in process.measurements(k, p, x) {
                for (m, _) in process.outcomes(k, x, &u)?.support() {
                    let next = process.transition(k, x, &u, m);
                    if !successors.contains(&next) {
                        successors.push(next);
                    }
                }
            }
            for landing in &landings {
                for next in &successors {
                    let s = (landing.clone(), next.clone());
                    if seen.insert(s.clone(), ()).is_none() {
                        layer.push(s);
                        total += 1;
                        if total > cap {
                            return Err(over_cap());
                        }
                    }
                }
            }
        }
        layers.push(layer);
    }
    Ok(layers)
}

/// Default node budget of [`brute_force_value`].
pub const BRUTE_FORCE_NODE_CAP: usize = 50_000_000;

/// Maximum over closed-loop policies of the expected total information,
/// found by exhaustive search over decision trees.
///
/// Decisions are allowed to depend on the full realization history. Each
/// leaf contributes its path probability times the information accumulated
/// along the path; subtree choices are independent, so the best tree is
/// assembled node by node. No value is ever cached across histories.
pub fn brute_force_value<P: CoupledProcess>(process: &P, horizon: usize, node_cap: usize) -> Result<Bits> {
    let starts = process.initial_positions();
    if starts.is_empty() {
        return Err(Error::Model("no candidate initial positions".into()));
    }
    let x0 = process.initial_state();
    let mut walker = TreeWalker {
        process,
        horizon,
        nodes: 0,
        cap: node_cap,
    };
    let mut best = f64::NEG_INFINITY;
    for p in &starts {
        best = best.max(walker.subtree(0, p, &x0, 1.0, 0.0)?);
    }
    Ok(best)
}

struct TreeWalker<'a, P> {
    process: &'a P,
    horizon: usize,
    nodes: usize,
    cap: usize,
}

impl<P: CoupledProcess> TreeWalker<'_, P> {
    fn visit(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::Resource {
                what: "policy-tree nodes".into(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Best achievable `Σ_leaves P(path) · info(path)` over the leaves below a node.
    fn subtree(
        &mut self,
        k: usize,
        position: &P::Position,
        x: &P::State,
        path_probability: f64,
        accumulated: Bits,
    ) -> Result<Bits> {
        self.visit()?;
        if k == self.horizon {
            let leaf = accumulated + self.process.terminal_entropy(position, x);
            return Ok(path_probability * leaf);
        }
        let mut best_tree = f64::NEG_INFINITY;
        let controls = self.process.controls(k, position);
        if controls.is_empty() {
            return Err(Error::Model(format!("no admissible control at stage {k}")));
        }
        for c in controls {
            let mut tree = 0.0;
            for (w, pw) in self.process.disturbances(k, position, &c)?.support() {
                let landing = self.process.dynamics(k, position, &c, w);
                let mut best_branch = f64::NEG_INFINITY;
                let measurements = self.process.measurements(k, position, x);
                if measurements.is_empty() {
                    return Err(Error::Model(format!("no admissible measurement at stage {k}")));
                }
                for u in measurements {
                    let mut branch = 0.0;
                    for (m, pm) in self.process.outcomes(k, x, &u)?.support() {
                        let next = self.process.transition(k, x, &u, m);
                        let info = accumulated + information_content(pm)?;
                        branch += self.subtree(k + 1, &landing, &next, path_probability * pw * pm, info)?;
                    }
                    best_branch = best_branch.max(branch);
                }
                tree += best_branch;
            }
            best_tree = best_tree.max(tree);
        }
        Ok(best_tree)
    }
}
