//! One report builder per subcommand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::hash::Hash;

use infoplan::agent::{solve_extended, CoupledProcess};
use infoplan::domains::submarine::{Move, NOMINAL_MOVES};
use infoplan::domains::{CellSet, Grid, GuessModel, Sonar, SubmarineProcess, WeighingModel};
use infoplan::dp::{min_stages_for_information, solve, MeasurementProcess, SolveOptions, DEFAULT_STATE_CAP};
use infoplan::gp::{plan_transect_with, Lattice, Lookahead, SquaredExponential, TransectMode, TransectProblem};
use infoplan::rollout::submarine::{
    best_run, interior_peaks, survey, SearchConfig, SearchPolicy, GREEDY_COMPLETE_ORDER,
};
use infoplan::rollout::{RolloutConfig, RunStatus};
use infoplan::Error;

use crate::args::{ExactArgs, LookaheadArg, ModeArg, PolicyArg, PuzzleArgs, RolloutArgs, TransectArgs};
use crate::error::CliError;
use crate::report::{Table, Value};

pub const STATE_CAP_ENV: &str = "INFOPLAN_STATE_CAP";

/// Solver limits, honouring `INFOPLAN_STATE_CAP`.
pub fn solve_options() -> Result<SolveOptions, CliError> {
    match std::env::var(STATE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(|state_cap| SolveOptions { state_cap })
            .map_err(|_| CliError::Usage(format!("{STATE_CAP_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(SolveOptions {
            state_cap: DEFAULT_STATE_CAP,
        }),
    }
}

fn joined<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub fn move_label(m: &Move) -> String {
    format!("{}:{}", m.dr, m.dc)
}

/// `4`, `2-27` or `2,5,9`.
pub fn parse_sizes(spec: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("cannot read sizes from {spec:?}"));
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let (a, b): (u32, u32) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

/// Smallest `N` with `base^N >= n`.
pub fn power_bound(n: u32, base: u64) -> usize {
    let mut reach = 1u64;
    let mut stages = 0;
    while reach < u64::from(n) {
        reach *= base;
        stages += 1;
    }
    stages
}

/// Exact solves for the weighing and guessing puzzles.
pub fn puzzle<P, F>(args: &PuzzleArgs, build: F, bound_base: u64) -> Result<Vec<Table>, CliError>
where
    P: MeasurementProcess,
    P::State: Ord + Display + Hash + Eq + Clone,
    P::Measurement: Display,
    F: Fn(u32) -> infoplan::Result<P>,
{
    let sizes = parse_sizes(
        args.n
            .as_deref()
            .ok_or_else(|| CliError::Usage("--n is required".into()))?,
    )?;
    let options = solve_options()?;
    let mut summary = Table::new(
        "summary",
        &[
            "n",
            "horizon",
            "value_bits",
            "log2_n",
            "target_bits",
            "min_stages",
            "bound_stages",
        ],
    );
    let mut values = Table::new("values", &["n", "k", "state", "value_bits", "argmax"]);
    for n in sizes {
        let process = build(n)?;
        let log2_n = f64::from(n).log2();
        let (horizon, target, min_stages) = match args.horizon {
            Some(h) => (h, None, None),
            None => {
                let target = args.target_bits.unwrap_or(log2_n);
                let (stages, _) = min_stages_for_information(&process, target, args.max_stages, options)?;
                (stages, Some(target), Some(stages))
            }
        };
        let sol = solve(&process, horizon, options)?;
        summary.push(vec![
            n.into(),
            horizon.into(),
            sol.value().into(),
            log2_n.into(),
            target.into(),
            min_stages.into(),
            power_bound(n, bound_base).into(),
        ]);
        for k in 0..horizon {
            let mut states: Vec<_> = sol.values.stage(k).iter().collect();
            states.sort_by(|a, b| a.0.cmp(b.0));
            for (x, v) in states {
                let argmax = sol.policy.get(k, x).map(|u| joined(u.iter())).unwrap_or_default();
                values.push(vec![
                    n.into(),
                    k.into(),
                    x.to_string().into(),
                    (*v).into(),
                    argmax.into(),
                ]);
            }
        }
    }
    Ok(vec![summary, values])
}

pub fn weighing(args: &PuzzleArgs) -> Result<Vec<Table>, CliError> {
    puzzle(args, WeighingModel::new, 3)
}

pub fn guess(args: &PuzzleArgs) -> Result<Vec<Table>, CliError> {
    puzzle(args, GuessModel::new, 2)
}

const EXACT_HINT: &str = "the exact solver cannot handle a grid this large; use `infoplan submarine-rollout` \
                          or raise INFOPLAN_STATE_CAP";

pub fn submarine_exact(args: &ExactArgs) -> Result<Vec<Table>, CliError> {
    let (w, h) = args.grid.dims()?;
    let grid = Grid::new(w, h)?;
    let process = SubmarineProcess::new(grid.clone());
    let options = solve_options()?;
    let target = (grid.len() as f64).log2();
    let hint = |e: Error| match e {
        Error::Resource { .. } => CliError::Hint(e, EXACT_HINT.into()),
        other => CliError::Core(other),
    };

    let (sol, horizon) = match args.horizon {
        Some(n) => (solve_extended(&process, n, options).map_err(hint)?, n),
        None => {
            let max = args.max_stages.unwrap_or(grid.len());
            let mut best = f64::NEG_INFINITY;
            let mut found = None;
            for n in 1..=max {
                let sol = solve_extended(&process, n, options).map_err(hint)?;
                let v = sol.best_start()?.0;
                best = best.max(v);
                if v >= target - 1e-9 {
                    found = Some((sol, n));
                    break;
                }
            }
            found.ok_or(CliError::Core(Error::TargetNotReached {
                target,
                best,
                max_stages: max,
            }))?
        }
    };
    let (value, starts) = sol.best_start()?;

    let mut summary = Table::new(
        "summary",
        &[
            "width",
            "height",
            "cells",
            "horizon",
            "value_bits",
            "target_bits",
            "optimal_starts",
            "start_coverage",
        ],
    );
    summary.push(vec![
        w.into(),
        h.into(),
        grid.len().into(),
        horizon.into(),
        value.into(),
        target.into(),
        joined(starts.iter()).into(),
        joined(starts.iter().map(|s| grid.sonar_coverage(*s, &CellSet::empty()).0)).into(),
    ]);

    // optimal controls along every all-clear branch from the optimal starts
    let mut controls = Table::new(
        "controls",
        &[
            "start",
            "k",
            "ship_cell",
            "remaining",
            "value_bits",
            "controls",
            "offsets",
        ],
    );
    let mut seen = BTreeSet::new();
    for start in &starts {
        let mut frontier = vec![(0usize, *start, CellSet::empty())];
        while let Some((k, ship, mask)) = frontier.pop() {
            if k + 1 >= horizon || !seen.insert((*start, k, ship, format!("{mask:?}"))) {
                continue;
            }
            let Some(decision) = sol.decision(k, &ship, &mask) else {
                continue;
            };
            let v = sol.value(k, &ship, &mask).unwrap_or(f64::NAN);
            controls.push(vec![
                (*start).into(),
                k.into(),
                ship.into(),
                grid.remaining(&mask).into(),
                v.into(),
                joined(decision.controls.iter().map(move_label)).into(),
                joined(decision.controls.iter().map(|m| m.cell_offset(w))).into(),
            ]);
            let next_mask = process.transition(k, &mask, &ship, &Sonar::Clear);
            if grid.remaining(&next_mask) <= 1 {
                continue;
            }
            for m in decision.controls.iter().rev() {
                if let Some(d) = grid.destination(ship, *m) {
                    frontier.push((k + 1, d, next_mask));
                }
            }
        }
    }
    controls.rows.sort_by(|a, b| {
        let key = |r: &Vec<Value>| match (&r[0], &r[1], &r[2]) {
            (Value::Int(s), Value::Int(k), Value::Int(c)) => (*s, *k, *c),
            _ => (0, 0, 0),
        };
        key(a).cmp(&key(b))
    });
    Ok(vec![summary, controls])
}

/// `natural`, `greedy-complete`, or `dr:dc,...`.
pub fn parse_move_order(spec: &str) -> Result<Option<Vec<Move>>, CliError> {
    match spec.trim() {
        "natural" => Ok(Some(NOMINAL_MOVES.to_vec())),
        "greedy-complete" => Ok(Some(GREEDY_COMPLETE_ORDER.to_vec())),
        list => list
            .split(',')
            .map(|m| {
                let (a, b) = m
                    .trim()
                    .split_once(':')
                    .ok_or_else(|| CliError::Usage(format!("move {m:?} is not dr:dc")))?;
                let parse = |s: &str| {
                    s.trim()
                        .parse::<i8>()
                        .map_err(|_| CliError::Usage(format!("move {m:?} is not dr:dc")))
                };
                Ok(Move::new(parse(a)?, parse(b)?))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

fn parse_starts(spec: &str, grid: &Grid) -> Result<Vec<u16>, CliError> {
    if spec.trim() == "all" {
        return Ok(grid.cells().collect());
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<u16>()
                .map_err(|_| CliError::Usage(format!("start {s:?} is not a cell number")))
        })
        .collect()
}

pub fn submarine_rollout(args: &RolloutArgs) -> Result<Vec<Table>, CliError> {
    let (w, h) = args.grid.dims()?;
    let grid = Grid::new(w, h)?;
    let config = SearchConfig {
        tie_break: args.tie_break.into(),
        step_cap: args.step_cap,
        move_order: args.move_order.as_deref().map(parse_move_order).transpose()?.flatten(),
    };
    let policy = match args.policy {
        PolicyArg::Greedy => SearchPolicy::Greedy,
        PolicyArg::Rollout => SearchPolicy::Rollout,
    };
    let starts = parse_starts(&args.starts, &grid)?;
    let runs = survey(&grid, &starts, policy, &config)?;

    let mut trajectories = Table::new(
        "trajectories",
        &[
            "start",
            "k",
            "ship_cell",
            "move",
            "coverage_u_k",
            "stage_entropy_bits",
            "cumulative_bits",
        ],
    );
    let mut per_start = Table::new(
        "starts",
        &["start", "status", "measurements", "percentage", "interior_peaks"],
    );
    for run in &runs {
        for s in &run.steps {
            trajectories.push(vec![
                run.start.into(),
                s.k.into(),
                s.ship.into(),
                s.next_move.as_ref().map(move_label).into(),
                s.coverage.into(),
                s.information.into(),
                s.cumulative.into(),
            ]);
        }
        per_start.push(vec![
            run.start.into(),
            match run.status {
                RunStatus::Completed => "completed",
                RunStatus::StepCapReached => "step-cap-reached",
            }
            .into(),
            run.measurements().into(),
            run.percentage().into(),
            interior_peaks(&run.coverage()).into(),
        ]);
    }

    let mut summary = Table::new(
        "summary",
        &[
            "grid",
            "cells",
            "measurements",
            "percentage",
            "best_start",
            "policy",
            "completed_starts",
            "total_starts",
        ],
    );
    let best = best_run(&runs);
    summary.push(vec![
        format!("{w}x{h}").into(),
        grid.len().into(),
        best.map(|r| r.measurements()).into(),
        best.map(|r| r.percentage()).into(),
        best.map(|r| r.start).into(),
        policy.to_string().into(),
        runs.iter().filter(|r| r.completed()).count().into(),
        runs.len().into(),
    ]);
    Ok(vec![trajectories, per_start, summary])
}

/// `line:N[:spacing[:reach]]` or `grid:WxH[:spacing]`.
pub fn parse_lattice(spec: &str) -> Result<Lattice, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "cannot read lattice {spec:?}; use line:N[:spacing[:reach]] or grid:WxH[:spacing]"
        ))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let field = |i: usize| parts.get(i).copied().filter(|s| !s.is_empty());
    let spacing = |i: usize| -> Result<f64, CliError> { field(i).map_or(Ok(1.0), |s| s.parse().map_err(|_| bad())) };
    match parts.first().copied() {
        Some("line") if (2..=4).contains(&parts.len()) => {
            let n: usize = parts[1].parse().map_err(|_| bad())?;
            let reach = field(3).map_or(Ok(1), |s| s.parse().map_err(|_| bad()))?;
            Ok(Lattice::line(n, spacing(2)?, reach)?)
        }
        Some("grid") if (2..=3).contains(&parts.len()) => {
            let (a, b) = parts[1].split_once('x').ok_or_else(bad)?;
            Ok(Lattice::grid(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
                spacing(2)?,
            )?)
        }
        _ => Err(bad()),
    }
}

fn parse_fields(spec: &str) -> Result<Vec<SquaredExponential>, CliError> {
    spec.split(';')
        .map(|f| {
            let v: Vec<f64> = f
                .split(':')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("field {f:?} is not length:signal:noise")))?;
            match v.as_slice() {
                [l, s, n] => Ok(SquaredExponential::new(*l, *s, *n)?),
                _ => Err(CliError::Usage(format!("field {f:?} is not length:signal:noise"))),
            }
        })
        .collect()
}

fn parse_selections(spec: &str) -> Result<Vec<Vec<bool>>, CliError> {
    spec.split(';')
        .map(|s| {
            s.trim()
                .chars()
                .map(|c| match c {
                    '1' => Ok(true),
                    '0' => Ok(false),
                    _ => Err(CliError::Usage(format!("selection {s:?} is not a bit string"))),
                })
                .collect()
        })
        .collect()
}

pub fn gp_transect(args: &TransectArgs, seed: u64) -> Result<Vec<Table>, CliError> {
    let lattice = parse_lattice(&args.lattice)?;
    let kernel = SquaredExponential::new(args.length_scale, args.signal_variance, args.noise_variance)?;
    let mode = match args.mode {
        ModeArg::Deterministic => TransectMode::Deterministic,
        ModeArg::Stochastic => TransectMode::Stochastic { slip: args.slip },
        ModeArg::MultiField => {
            let kernels = match &args.fields {
                Some(f) => parse_fields(f)?,
                None => return Err(CliError::Usage("multi-field mode needs --fields".into())),
            };
            let selections = match &args.selections {
                Some(s) => parse_selections(s)?,
                None => vec![vec![true; kernels.len()]],
            };
            TransectMode::MultiField { kernels, selections }
        }
    };
    let problem = TransectProblem {
        lattice,
        kernel,
        horizon: args.horizon,
        mode,
        window: args.window,
    };
    let mut config = RolloutConfig::new(args.horizon);
    config.samples_per_control = args.samples;
    config.rng_seed = seed;
    config.tie_break = args.tie_break.into();
    let lookahead = match args.lookahead {
        LookaheadArg::Rollout => Lookahead::Rollout,
        LookaheadArg::Exhaustive => Lookahead::Exhaustive,
    };
    let plan = plan_transect_with(&problem, args.start, &config, lookahead)?;

    let mut path = Table::new(
        "path",
        &[
            "k",
            "waypoint",
            "intended",
            "x",
            "y",
            "selection",
            "stage_entropy_bits",
            "cumulative_bits",
        ],
    );
    for s in &plan.steps {
        let sel: String = s.selection.iter().map(|b| if *b { '1' } else { '0' }).collect();
        path.push(vec![
            s.k.into(),
            s.waypoint.into(),
            s.intended.into(),
            s.location[0].into(),
            s.location[1].into(),
            sel.into(),
            s.entropy.into(),
            s.cumulative.into(),
        ]);
    }
    let mut summary = Table::new(
        "summary",
        &["stages", "total_entropy_bits", "joint_entropy_bits", "chain_rule_gap"],
    );
    summary.push(vec![
        plan.steps.len().into(),
        plan.total_entropy.into(),
        plan.joint_entropy.into(),
        plan.joint_entropy.map(|j| (j - plan.total_entropy).abs()).into(),
    ]);
    Ok(vec![path, summary])
}

/// Settings echoed into every report.
pub fn echo_common(seed: u64, format: &str, extra: BTreeMap<String, String>) -> BTreeMap<String, String> {
    let mut config = extra;
    config.insert("seed".into(), seed.to_string());
    config.insert("format".into(), format.into());
    config
}
