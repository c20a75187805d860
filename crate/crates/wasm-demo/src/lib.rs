//! Browser bindings for three demo operations: a sonar search, a Gaussian
//! process transect, and the exact puzzle solvers.
//!
//! Each operation is a plain function returning JSON so it can be tested
//! natively; the `#[wasm_bindgen]` wrappers only convert errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use infoplan::domains::{CellSet, Grid, GuessModel, WeighingModel};
use infoplan::dp::{min_stages_for_information, solve, SolveOptions};
use infoplan::gp::{
    plan_transect_with, GpPosterior, Lattice, Lookahead, SquaredExponential, TransectMode, TransectProblem,
};
use infoplan::rollout::submarine::{run_search, SearchConfig, SearchPolicy};
use infoplan::rollout::RolloutConfig;

#[derive(Serialize)]
struct SweepView {
    k: usize,
    ship: u16,
    row: usize,
    col: usize,
    coverage: usize,
    information: f64,
    cumulative: f64,
    /// Cells searched once this sweep is done.
    searched: Vec<u16>,
}

#[derive(Serialize)]
struct SearchView {
    width: usize,
    height: usize,
    start: u16,
    policy: String,
    completed: bool,
    measurements: usize,
    percentage: f64,
    steps: Vec<SweepView>,
}

/// Greedy or rollout sonar search from `start` (cells numbered from 1, row by row).
pub fn search(width: usize, height: usize, start: u16, rollout: bool) -> Result<String, String> {
    let grid = Grid::new(width, height).map_err(|e| e.to_string())?;
    let policy = if rollout {
        SearchPolicy::Rollout
    } else {
        SearchPolicy::Greedy
    };
    let run = run_search(&grid, start, policy, &SearchConfig::default()).map_err(|e| e.to_string())?;
    let mut searched = CellSet::empty();
    let steps = run
        .steps
        .iter()
        .map(|s| {
            searched = searched.union(&grid.footprint(s.ship));
            let (row, col) = grid.coords(s.ship);
            SweepView {
                k: s.k,
                ship: s.ship,
                row,
                col,
                coverage: s.coverage,
                information: s.information,
                cumulative: s.cumulative,
                searched: searched.iter().collect(),
            }
        })
        .collect();
    let view = SearchView {
        width,
        height,
        start,
        policy: policy.to_string(),
        completed: run.completed(),
        measurements: run.measurements(),
        percentage: run.percentage(),
        steps,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct WaypointView {
    k: usize,
    waypoint: usize,
    intended: usize,
    x: f64,
    y: f64,
    entropy: f64,
    cumulative: f64,
}

#[derive(Serialize)]
struct TransectView {
    width: usize,
    height: usize,
    total_entropy: f64,
    joint_entropy: Option<f64>,
    path: Vec<WaypointView>,
    /// Posterior variance after the run, `resolution` samples per lattice
    /// spacing, row by row.
    field_cols: usize,
    field_rows: usize,
    field: Vec<f64>,
}

/// Plans a transect on a `width x height` lattice with unit spacing and
/// returns the path and the posterior variance field it leaves behind.
#[allow(clippy::too_many_arguments)]
pub fn transect(
    width: usize,
    height: usize,
    length_scale: f64,
    noise_variance: f64,
    horizon: usize,
    start: usize,
    slip: f64,
    seed: u64,
    resolution: usize,
) -> Result<String, String> {
    let s = |e: infoplan::Error| e.to_string();
    let lattice = Lattice::grid(width, height, 1.0).map_err(s)?;
    let kernel = SquaredExponential::new(length_scale, 1.0, noise_variance).map_err(s)?;
    let mode = if slip > 0.0 {
        TransectMode::Stochastic { slip }
    } else {
        TransectMode::Deterministic
    };
    let problem = TransectProblem {
        lattice,
        kernel,
        horizon,
        mode,
        window: None,
    };
    let mut config = RolloutConfig::new(horizon);
    config.samples_per_control = 8;
    config.rng_seed = seed;
    let plan = plan_transect_with(&problem, start, &config, Lookahead::Rollout).map_err(s)?;

    let mut gp = GpPosterior::new(kernel);
    for step in &plan.steps {
        gp.push(step.location).map_err(s)?;
    }
    let resolution = resolution.max(1);
    let cols = (width - 1) * resolution + 1;
    let rows = (height - 1) * resolution + 1;
    let mut field = Vec::with_capacity(cols * rows);
    for r in 0..rows {
        for c in 0..cols {
            let q = [c as f64 / resolution as f64, r as f64 / resolution as f64];
            field.push(gp.variance(&q).map_err(s)?);
        }
    }
    let path = plan
        .steps
        .iter()
        .map(|st| WaypointView {
            k: st.k,
            waypoint: st.waypoint,
            intended: st.intended,
            x: st.location[0],
            y: st.location[1],
            entropy: st.entropy,
            cumulative: st.cumulative,
        })
        .collect();
    let view = TransectView {
        width,
        height,
        total_entropy: plan.total_entropy,
        joint_entropy: plan.joint_entropy,
        path,
        field_cols: cols,
        field_rows: rows,
        field,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PuzzleView {
    kind: String,
    n: u32,
    stages: usize,
    value_bits: f64,
    first_choices: Vec<u32>,
}

/// Fewest weighings or questions that identify one of `n` items, and the
/// optimal first measurements.
pub fn puzzle(kind: &str, n: u32) -> Result<String, String> {
    let s = |e: infoplan::Error| e.to_string();
    let target = f64::from(n).log2();
    let options = SolveOptions::default();
    let (stages, value, first) = match kind {
        "weighing" => {
            let m = WeighingModel::new(n).map_err(s)?;
            let (stages, v) = min_stages_for_information(&m, target, 32, options).map_err(s)?;
            (
                stages,
                v,
                solve(&m, stages, options).map_err(s)?.initial_argmax().to_vec(),
            )
        }
        "guess" => {
            let m = GuessModel::new(n).map_err(s)?;
            let (stages, v) = min_stages_for_information(&m, target, 32, options).map_err(s)?;
            (
                stages,
                v,
                solve(&m, stages, options).map_err(s)?.initial_argmax().to_vec(),
            )
        }
        other => return Err(format!("unknown puzzle {other:?}; use weighing or guess")),
    };
    serde_json::to_string(&PuzzleView {
        kind: kind.to_string(),
        n,
        stages,
        value_bits: value,
        first_choices: first,
    })
    .map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = search)]
pub fn search_js(width: usize, height: usize, start: u16, rollout: bool) -> Result<String, JsError> {
    search(width, height, start, rollout).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = transect)]
#[allow(clippy::too_many_arguments)]
pub fn transect_js(
    width: usize,
    height: usize,
    length_scale: f64,
    noise_variance: f64,
    horizon: usize,
    start: usize,
    slip: f64,
    seed: u64,
    resolution: usize,
) -> Result<String, JsError> {
    transect(
        width,
        height,
        length_scale,
        noise_variance,
        horizon,
        start,
        slip,
        seed,
        resolution,
    )
    .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = puzzle)]
pub fn puzzle_js(kind: &str, n: u32) -> Result<String, JsError> {
    puzzle(kind, n).map_err(|e| JsError::new(&e))
}
