//! Gaussian-process fields and entropy-driven transect planning.
//!
//! The posterior keeps a lower-triangular Cholesky factor of the noisy Gram
//! matrix over the visited locations and extends it one row at a time. The
//! predictive variance at a query depends only on where the field was
//! sampled, never on what was observed, so the planner works on location
//! histories alone.
//!
//! Stage entropies are those of the measurement outcome, whose predictive
//! variance is the latent posterior variance plus the noise variance. Summed
//! along a path they equal the joint entropy of the noisy observations.

use std::f64::consts::{E, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dp::VALUE_TOLERANCE;
use crate::entropy::{gaussian_entropy, Bits};
use crate::error::{Error, Result};
use crate::rollout::{stream, RolloutConfig, TieBreak};

pub type Point = [f64; 2];

/// Tolerance below zero within which a predictive variance is clamped to zero.
pub const VARIANCE_CLAMP: f64 = 1e-9;

/// Relative pivot below which a new Cholesky row is treated as singular.
const PIVOT_FLOOR: f64 = 1e-12;

/// Squared-exponential covariance `σ_f² exp(-|a-b|² / 2ℓ²)` with additive
/// observation noise `σ_ν²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquaredExponential {
    pub length_scale: f64,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl SquaredExponential {
    pub fn new(length_scale: f64, signal_variance: f64, noise_variance: f64) -> Result<Self> {
        let finite = |v: f64| v.is_finite();
        if !(length_scale > 0.0 && finite(length_scale)) {
            return Err(Error::Domain(format!(
                "length scale must be positive, got {length_scale}"
            )));
        }
        if !(signal_variance > 0.0 && finite(signal_variance)) {
            return Err(Error::Domain(format!(
                "signal variance must be positive, got {signal_variance}"
            )));
        }
        if !(noise_variance >= 0.0 && finite(noise_variance)) {
            return Err(Error::Domain(format!(
                "noise variance must be non-negative, got {noise_variance}"
            )));
        }
        Ok(Self {
            length_scale,
            signal_variance,
            noise_variance,
        })
    }

    /// Noise-free covariance between two locations.
    pub fn covariance(&self, a: &Point, b: &Point) -> f64 {
        let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
        self.signal_variance * (-d2 / (2.0 * self.length_scale * self.length_scale)).exp()
    }

    /// Prior variance `κ` at any location.
    pub fn prior_variance(&self) -> f64 {
        self.signal_variance
    }

    /// Gram matrix with noise on the diagonal, row-major.
    pub fn gram(&self, points: &[Point]) -> Vec<Vec<f64>> {
        points
            .iter()
            .enumerate()
            .map(|(i, a)| {
                points
                    .iter()
                    .enumerate()
                    .map(|(j, b)| self.covariance(a, b) + if i == j { self.noise_variance } else { 0.0 })
                    .collect()
            })
            .collect()
    }
}

/// Posterior of a GP over the locations sampled so far.
#[derive(Debug, Clone, PartialEq)]
pub struct GpPosterior {
    kernel: SquaredExponential,
    locations: Vec<Point>,
    /// Row `i` of the lower Cholesky factor holds `i + 1` entries.
    factor: Vec<Vec<f64>>,
    window: Option<f64>,
}

impl GpPosterior {
    pub fn new(kernel: SquaredExponential) -> Self {
        Self {
            kernel,
            locations: Vec::new(),
            factor: Vec::new(),
            window: None,
        }
    }

    /// Conditions queries only on locations within `radius` of the query.
    pub fn with_window(mut self, radius: Option<f64>) -> Self {
        self.window = radius;
        self
    }

    pub fn kernel(&self) -> &SquaredExponential {
        &self.kernel
    }

    pub fn locations(&self) -> &[Point] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// Appends a sampling location, extending the factor by one row.
    pub fn push(&mut self, location: Point) -> Result<()> {
        let row = factor_row(&self.kernel, &self.locations, &self.factor, &location)?;
        self.locations.push(location);
        self.factor.push(row);
        Ok(())
    }

    /// A copy with one more sampling location.
    pub fn extended(&self, location: Point) -> Result<Self> {
        let mut next = self.clone();
        next.push(location)?;
        Ok(next)
    }

    /// Predictive mean and latent variance at `query` given observed `outcomes`.
    pub fn predict(&self, outcomes: &[f64], query: &Point) -> Result<(f64, f64)> {
        if outcomes.len() != self.locations.len() {
            return Err(Error::Domain(format!(
                "{} outcomes for {} sampled locations",
                outcomes.len(),
                self.locations.len()
            )));
        }
        match self.window {
            Some(radius) => {
                let near: Vec<usize> = (0..self.locations.len())
                    .filter(|i| distance(&self.locations[*i], query) <= radius)
                    .collect();
                let mut local = GpPosterior::new(self.kernel);
                for i in &near {
                    local.push(self.locations[*i])?;
                }
                let values: Vec<f64> = near.iter().map(|i| outcomes[*i]).collect();
                local.conditional(&values, query)
            }
            None => self.conditional(outcomes, query),
        }
    }

    /// Latent predictive variance at `query`.
    pub fn variance(&self, query: &Point) -> Result<f64> {
        let zeros = vec![0.0; self.locations.len()];
        Ok(self.predict(&zeros, query)?.1)
    }

    fn conditional(&self, outcomes: &[f64], query: &Point) -> Result<(f64, f64)> {
        let kappa = self.kernel.prior_variance();
        if self.locations.is_empty() {
            return Ok((0.0, kappa));
        }
        let p: Vec<f64> = self
            .locations
            .iter()
            .map(|x| self.kernel.covariance(x, query))
            .collect();
        let v = forward_substitute(&self.factor, &p);
        let a = forward_substitute(&self.factor, outcomes);
        let mean = dot(&v, &a);
        let mut var = kappa - dot(&v, &v);
        if var < 0.0 {
            if var < -VARIANCE_CLAMP {
                return Err(Error::Numerical(format!("predictive variance {var} is negative")));
            }
            var = 0.0;
        }
        Ok((mean, var))
    }
}

fn distance(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `L y = b` for lower-triangular `L` stored by rows.
fn forward_substitute(factor: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let mut y = Vec::with_capacity(b.len());
    for (i, row) in factor.iter().enumerate() {
        let s = b[i] - dot(&row[..i], &y);
        y.push(s / row[i]);
    }
    y
}

fn factor_row(kernel: &SquaredExponential, locations: &[Point], factor: &[Vec<f64>], z: &Point) -> Result<Vec<f64>> {
    let b: Vec<f64> = locations.iter().map(|x| kernel.covariance(x, z)).collect();
    let mut row = forward_substitute(factor, &b);
    let total = kernel.prior_variance() + kernel.noise_variance;
    let pivot = total - dot(&row, &row);
    if pivot.is_nan() || pivot <= PIVOT_FLOOR * total {
        let (j, _) = locations
            .iter()
            .enumerate()
            .map(|(j, x)| (j, distance(x, z)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, 0.0));
        let i = locations.len();
        return Err(Error::Numerical(format!(
            "covariance is singular: location {i} {z:?} duplicates location {j} {:?} (noise variance {})",
            locations.get(j).copied().unwrap_or(*z),
            kernel.noise_variance
        )));
    }
    row.push(pivot.sqrt());
    Ok(row)
}

/// Predictive mean and variance at `query` after observing `outcomes` at the
/// posterior's locations.
pub fn posterior(gp: &GpPosterior, outcomes: &[f64], query: &Point) -> Result<(f64, f64)> {
    gp.predict(outcomes, query)
}

/// Differential entropy of the next measurement outcome at `query`.
pub fn stage_entropy(gp: &GpPosterior, query: &Point) -> Result<Bits> {
    let var = gp.variance(query)? + gp.kernel().noise_variance;
    if var <= 0.0 {
        return Err(Error::Numerical(format!(
            "predictive variance at {query:?} collapsed to zero; the location was already sampled without noise"
        )));
    }
    gaussian_entropy(var).map_err(|e| Error::Numerical(e.to_string()))
}

/// Joint differential entropy of noisy observations along `path`, from the
/// log-determinant of its Gram matrix.
pub fn joint_path_entropy(kernel: &SquaredExponential, path: &[Point]) -> Result<Bits> {
    if path.is_empty() {
        return Err(Error::Domain("path is empty".into()));
    }
    let mut gp = GpPosterior::new(*kernel);
    for p in path {
        gp.push(*p)?;
    }
    let log_det: f64 = gp.factor.iter().enumerate().map(|(i, row)| 2.0 * row[i].log2()).sum();
    Ok(0.5 * (path.len() as f64 * (2.0 * PI * E).log2() + log_det))
}

/// Candidate sampling waypoints and the waypoints reachable from each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub points: Vec<Point>,
    pub neighbors: Vec<Vec<usize>>,
}

impl Lattice {
    pub fn new(points: Vec<Point>, neighbors: Vec<Vec<usize>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("lattice has no waypoints".into()));
        }
        if neighbors.len() != points.len() {
            return Err(Error::Domain(format!(
                "{} neighbor lists for {} waypoints",
                neighbors.len(),
                points.len()
            )));
        }
        for (i, list) in neighbors.iter().enumerate() {
            if let Some(bad) = list.iter().find(|j| **j >= points.len()) {
                return Err(Error::Domain(format!("waypoint {i} lists missing neighbor {bad}")));
            }
        }
        Ok(Self { points, neighbors })
    }

    /// Points `0, s, 2s, …` on the x-axis; each may move up to `reach` points either way.
    pub fn line(n: usize, spacing: f64, reach: usize) -> Result<Self> {
        let points = (0..n).map(|i| [i as f64 * spacing, 0.0]).collect();
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|j| *j != i && i.abs_diff(*j) <= reach).collect())
            .collect();
        Self::new(points, neighbors)
    }

    /// A `width × height` grid with king moves between adjacent points.
    pub fn grid(width: usize, height: usize, spacing: f64) -> Result<Self> {
        let id = |r: usize, c: usize| r * width + c;
        let mut points = Vec::new();
        let mut neighbors = Vec::new();
        for r in 0..height {
            for c in 0..width {
                points.push([c as f64 * spacing, r as f64 * spacing]);
                let mut list = Vec::new();
                for dr in -1isize..=1 {
                    for dc in -1isize..=1 {
                        let (nr, nc) = (r as isize + dr, c as isize + dc);
                        if (dr, dc) != (0, 0) && nr >= 0 && nc >= 0 && (nr as usize) < height && (nc as usize) < width {
                            list.push(id(nr as usize, nc as usize));
                        }
                    }
                }
                neighbors.push(list);
            }
        }
        Self::new(points, neighbors)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransectMode {
    /// The robot reaches the waypoint it aims for.
    Deterministic,
    /// With probability `slip` the robot lands on one of the other admissible
    /// waypoints instead, each equally likely.
    Stochastic { slip: f64 },
    /// Several fields sensed along one path. `selections` lists which fields
    /// may be measured together at a stage; every field is conditioned on the
    /// full location history.
    MultiField {
        kernels: Vec<SquaredExponential>,
        selections: Vec<Vec<bool>>,
    },
}

/// How candidate moves are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lookahead {
    /// Simulated continuation under the greedy next-stage-entropy policy.
    #[default]
    Rollout,
    /// Exact search over every continuation.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransectProblem {
    pub lattice: Lattice,
    pub kernel: SquaredExponential,
    /// Number of moves; the start counts as already sampled.
    pub horizon: usize,
    pub mode: TransectMode,
    /// Optional conditioning radius, see [`GpPosterior::with_window`].
    pub window: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransectStep {
    pub k: usize,
    /// Waypoint aimed for; equal to `waypoint` unless the robot slipped.
    pub intended: usize,
    pub waypoint: usize,
    pub location: Point,
    /// Fields measured at this stage.
    pub selection: Vec<bool>,
    pub entropy: Bits,
    pub cumulative: Bits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransectPlan {
    pub steps: Vec<TransectStep>,
    pub total_entropy: Bits,
    /// Joint entropy of the visited locations, for single-field problems.
    pub joint_entropy: Option<Bits>,
}

impl TransectPlan {
    pub fn waypoints(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.waypoint).collect()
    }
}

impl TransectProblem {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Domain("horizon must be at least 1".into()));
        }
        match &self.mode {
            TransectMode::Deterministic => {}
            TransectMode::Stochastic { slip } => {
                if !(0.0..=1.0).contains(slip) {
                    return Err(Error::Domain(format!("slip probability {slip} is outside [0, 1]")));
                }
            }
            TransectMode::MultiField { kernels, selections } => {
                if kernels.is_empty() {
                    return Err(Error::Domain("multi-field mode needs at least one field".into()));
                }
                if selections.is_empty() {
                    return Err(Error::Domain(
                        "multi-field mode needs at least one sensor selection".into(),
                    ));
                }
                for s in selections {
                    if s.len() != kernels.len() || !s.iter().any(|b| *b) {
                        return Err(Error::Domain(format!(
                            "selection {s:?} must flag {} fields with at least one set",
                            kernels.len()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn fields(&self) -> Vec<SquaredExponential> {
        match &self.mode {
            TransectMode::MultiField { kernels, .. } => kernels.clone(),
            _ => vec![self.kernel],
        }
    }

    fn selections(&self) -> Vec<Vec<bool>> {
        match &self.mode {
            TransectMode::MultiField { selections, .. } => selections.clone(),
            _ => vec![vec![true]],
        }
    }

    fn slip(&self) -> f64 {
        match self.mode {
            TransectMode::Stochastic { slip } => slip,
            _ => 0.0,
        }
    }

    /// Revisiting a waypoint is only meaningful when every field is observed with noise.
    fn revisits_allowed(&self) -> bool {
        self.fields().iter().all(|k| k.noise_variance > 0.0)
    }
}

/// Location history with one posterior per field.
#[derive(Debug, Clone)]
struct History {
    waypoints: Vec<usize>,
    posteriors: Vec<GpPosterior>,
}

struct Planner<'a> {
    problem: &'a TransectProblem,
    selections: Vec<Vec<bool>>,
    revisits: bool,
    tie_break: TieBreak,
}

impl<'a> Planner<'a> {
    fn new(problem: &'a TransectProblem, tie_break: TieBreak) -> Self {
        Self {
            problem,
            selections: problem.selections(),
            revisits: problem.revisits_allowed(),
            tie_break,
        }
    }

    fn empty_history(&self) -> History {
        History {
            waypoints: Vec::new(),
            posteriors: self
                .problem
                .fields()
                .into_iter()
                .map(|k| GpPosterior::new(k).with_window(self.problem.window))
                .collect(),
        }
    }

    fn point(&self, w: usize) -> Point {
        self.problem.lattice.points[w]
    }

    /// Best sensor selection at `w` and its summed entropy.
    fn stage(&self, h: &History, w: usize) -> Result<(Bits, usize)> {
        let q = self.point(w);
        let per_field: Vec<Bits> = h
            .posteriors
            .iter()
            .map(|p| stage_entropy(p, &q))
            .collect::<Result<_>>()?;
        let mut best: Option<(Bits, usize)> = None;
        for (i, sel) in self.selections.iter().enumerate() {
            let v: Bits = sel.iter().zip(&per_field).filter(|(s, _)| **s).map(|(_, e)| e).sum();
            if best.is_none_or(|(b, _)| v > b + VALUE_TOLERANCE) {
                best = Some((v, i));
            }
        }
        Ok(best.expect("selections are validated non-empty"))
    }

    fn visit(&self, h: &History, w: usize) -> Result<History> {
        let q = self.point(w);
        let mut waypoints = h.waypoints.clone();
        waypoints.push(w);
        let posteriors = h.posteriors.iter().map(|p| p.extended(q)).collect::<Result<_>>()?;
        Ok(History { waypoints, posteriors })
    }

    fn admissible(&self, h: &History) -> Vec<usize> {
        let last = *h.waypoints.last().expect("history holds the start");
        self.problem.lattice.neighbors[last]
            .iter()
            .copied()
            .filter(|w| self.revisits || !h.waypoints.contains(w))
            .collect()
    }

    /// Landing distribution when aiming for `target` from the end of `h`.
    fn landings(&self, h: &History, target: usize) -> Vec<(usize, f64)> {
        let slip = self.problem.slip();
        let others: Vec<usize> = self.admissible(h).into_iter().filter(|w| *w != target).collect();
        if slip == 0.0 || others.is_empty() {
            return vec![(target, 1.0)];
        }
        let mut out = vec![(target, 1.0 - slip)];
        let each = slip / others.len() as f64;
        out.extend(others.into_iter().map(|w| (w, each)));
        out
    }

    /// Picks among scored candidates; `None` scores are infeasible.
    fn choose(&self, scored: &[(Option<Bits>, usize)]) -> Option<usize> {
        let feasible: Vec<(Bits, usize)> = scored.iter().filter_map(|(v, w)| v.map(|v| (v, *w))).collect();
        crate::rollout::select(&feasible, self.tie_break, |a, b| a.cmp(b)).map(|i| feasible[i].1)
    }

    /// Exact optimal expected entropy over `remaining` further moves.
    fn exact_value(&self, h: &History, remaining: usize) -> Result<Option<Bits>> {
        if remaining == 0 {
            return Ok(Some(0.0));
        }
        let mut best: Option<Bits> = None;
        for c in self.admissible(h) {
            if let Some(q) = self.exact_q(h, c, remaining)? {
                best = Some(best.map_or(q, |b: f64| b.max(q)));
            }
        }
        Ok(best)
    }

    fn exact_q(&self, h: &History, target: usize, remaining: usize) -> Result<Option<Bits>> {
        let mut q = 0.0;
        for (w, p) in self.landings(h, target) {
            let (e, _) = self.stage(h, w)?;
            let next = self.visit(h, w)?;
            match self.exact_value(&next, remaining - 1)? {
                Some(v) => q += p * (e + v),
                None => return Ok(None),
            }
        }
        Ok(Some(q))
    }

    fn greedy(&self, h: &History) -> Result<Option<usize>> {
        let mut scored = Vec::new();
        for c in self.admissible(h) {
            scored.push((Some(self.stage(h, c)?.0), c));
        }
        Ok(self.choose(&scored))
    }

    fn sample_landing<R: Rng + ?Sized>(&self, h: &History, target: usize, rng: &mut R) -> usize {
        let landings = self.landings(h, target);
        if landings.len() == 1 {
            return landings[0].0;
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (w, p) in &landings {
            acc += p;
            if u < acc {
                return *w;
            }
        }
        landings.last().expect("non-empty").0
    }

    /// Sampled Q value of aiming for `target`, continuing greedily for the
    /// remaining moves.
    fn rollout_q<R: Rng + ?Sized>(
        &self,
        h: &History,
        target: usize,
        remaining: usize,
        samples: usize,
        rng: &mut R,
    ) -> Result<Option<Bits>> {
        let random = self.problem.slip() > 0.0;
        let runs = if random { samples } else { 1 };
        let mut total = 0.0;
        for _ in 0..runs {
            let mut cur = h.clone();
            let mut aim = target;
            let mut value = 0.0;
            for step in 0..remaining {
                if step > 0 {
                    match self.greedy(&cur)? {
                        Some(c) => aim = c,
                        None => return Ok(None),
                    }
                }
                let w = self.sample_landing(&cur, aim, rng);
                value += self.stage(&cur, w)?.0;
                cur = self.visit(&cur, w)?;
            }
            total += value;
        }
        Ok(Some(total / runs as f64))
    }
}

/// Plans a transect from `start` with rollout lookahead.
pub fn plan_transect(problem: &TransectProblem, start: usize, config: &RolloutConfig) -> Result<TransectPlan> {
    plan_transect_with(problem, start, config, Lookahead::Rollout)
}

/// Plans a transect from `start`, scoring moves with the chosen lookahead.
///
/// Each stage picks a target waypoint, the robot lands (possibly slipping),
/// and the realized waypoint joins the history. Landings are drawn from the
/// ChaCha stream for the stage, so plans are reproducible from the seed.
pub fn plan_transect_with(
    problem: &TransectProblem,
    start: usize,
    config: &RolloutConfig,
    lookahead: Lookahead,
) -> Result<TransectPlan> {
    problem.validate()?;
    config.validate()?;
    if start >= problem.lattice.len() {
        return Err(Error::Domain(format!("start waypoint {start} is not on the lattice")));
    }
    if problem.horizon > config.step_cap {
        return Err(Error::Resource {
            what: "transect stages".into(),
            cap: config.step_cap,
        });
    }
    let planner = Planner::new(problem, config.tie_break);
    let mut history = planner.empty_history();
    let mut steps = Vec::with_capacity(problem.horizon + 1);

    let (e0, s0) = planner.stage(&history, start)?;
    history = planner.visit(&history, start)?;
    steps.push(TransectStep {
        k: 0,
        intended: start,
        waypoint: start,
        location: planner.point(start),
        selection: planner.selections[s0].clone(),
        entropy: e0,
        cumulative: e0,
    });

    for k in 1..=problem.horizon {
        let remaining = problem.horizon - k + 1;
        let candidates = planner.admissible(&history);
        let mut scored = Vec::with_capacity(candidates.len());
        for (idx, c) in candidates.iter().enumerate() {
            let q = match lookahead {
                Lookahead::Exhaustive => planner.exact_q(&history, *c, remaining)?,
                Lookahead::Rollout => {
                    let mut rng = stream(config.rng_seed, k, idx as u32);
                    planner.rollout_q(&history, *c, remaining, config.samples_per_control, &mut rng)?
                }
            };
            scored.push((q, *c));
        }
        let target = planner.choose(&scored).ok_or_else(|| {
            Error::Model(format!(
                "no admissible waypoint can be continued for {remaining} more moves from waypoint {}",
                history.waypoints.last().expect("start")
            ))
        })?;
        let mut rng = stream(config.rng_seed, k, u32::MAX);
        let w = planner.sample_landing(&history, target, &mut rng);
        let (e, s) = planner.stage(&history, w)?;
        history = planner.visit(&history, w)?;
        let cumulative = steps.last().map_or(0.0, |p: &TransectStep| p.cumulative) + e;
        steps.push(TransectStep {
            k,
            intended: target,
            waypoint: w,
            location: planner.point(w),
            selection: planner.selections[s].clone(),
            entropy: e,
            cumulative,
        });
    }

    let total_entropy = steps.last().map_or(0.0, |s| s.cumulative);
    let joint_entropy = match (&problem.mode, problem.window) {
        (TransectMode::MultiField { .. }, _) | (_, Some(_)) => None,
        _ => {
            let path: Vec<Point> = steps.iter().map(|s| s.location).collect();
            Some(joint_path_entropy(&problem.kernel, &path)?)
        }
    };
    Ok(TransectPlan {
        steps,
        total_entropy,
        joint_entropy,
    })
}
