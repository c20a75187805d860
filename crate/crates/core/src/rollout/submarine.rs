//! Rollout for the sonar search.
//!
//! The search has deterministic ship motion and a single measurement per
//! stage, so only the ship's move is decided. A detection ends the search, so
//! the run follows the all-clear branch: that is the branch that needs the
//! most sweeps and therefore fixes the number of measurements that
//! guarantees a find.
//!
//! The base policy maximizes next-stage coverage. The rollout policy scores
//! each move by simulating the base policy from the move's destination until
//! the search completes or the step cap is hit. Scores compare the coverage
//! collected (capped at the cells that must still be searched) first and the
//! completion stage second, so the rollout policy minimizes the number of
//! measurements whenever some continuation completes.

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use super::{RunStatus, TieBreak};
use crate::domains::submarine::{Cell, CellSet, Grid, Move, NOMINAL_MOVES};
use crate::entropy::Bits;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchPolicy {
    Greedy,
    Rollout,
}

impl std::fmt::Display for SearchPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchPolicy::Greedy => "greedy",
            SearchPolicy::Rollout => "rollout",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchConfig {
    pub tie_break: TieBreak,
    /// Maximum number of sweeps; `None` means twice the cell count.
    pub step_cap: Option<usize>,
    /// Explicit move priority, overriding `tie_break`.
    pub move_order: Option<Vec<Move>>,
}

impl SearchConfig {
    pub fn step_cap_for(&self, grid: &Grid) -> usize {
        self.step_cap.unwrap_or(2 * grid.len())
    }

    pub fn order_for(&self, grid: &Grid) -> Result<Vec<Move>> {
        match &self.move_order {
            None => Ok(move_order(grid, self.tie_break)),
            Some(order) => {
                let mut sorted = order.clone();
                sorted.sort();
                let mut nominal = NOMINAL_MOVES.to_vec();
                nominal.sort();
                if sorted != nominal {
                    return Err(Error::Domain(format!(
                        "move order must list each of the eight moves once, got {order:?}"
                    )));
                }
                Ok(order.clone())
            }
        }
    }
}

/// A move priority under which the greedy base policy finishes from every
/// start on every square grid from 3x3 to 6x6. Of the 40320 priorities only
/// 16 have this property; this is the smallest in lexicographic order.
pub const GREEDY_COMPLETE_ORDER: [Move; 8] = [
    Move::new(-1, -1),
    Move::new(0, 2),
    Move::new(2, 0),
    Move::new(1, -1),
    Move::new(0, -2),
    Move::new(-2, 0),
    Move::new(-1, 1),
    Move::new(1, 1),
];

/// One sweep of a search run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStep {
    pub k: usize,
    pub ship: Cell,
    /// Cells still possibly holding the submarine before the sweep.
    pub remaining: usize,
    /// Newly searched cells `u_k`.
    pub coverage: usize,
    /// Information of the sweep on the all-clear branch, or of the detection
    /// when the sweep covers every remaining cell.
    pub information: Bits,
    pub cumulative: Bits,
    /// Move taken after the sweep; `None` after the final sweep.
    pub next_move: Option<Move>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRun {
    pub width: usize,
    pub height: usize,
    pub start: Cell,
    pub policy: SearchPolicy,
    pub steps: Vec<SearchStep>,
    pub status: RunStatus,
}

impl SearchRun {
    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    /// Sweeps taken; for a completed run, the number that guarantees a find.
    pub fn measurements(&self) -> usize {
        self.steps.len()
    }

    pub fn coverage(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.coverage).collect()
    }

    /// Measurements as a percentage of the cells that must be searched.
    pub fn percentage(&self) -> f64 {
        100.0 * self.measurements() as f64 / (self.width * self.height - 1) as f64
    }

    pub fn total_information(&self) -> Bits {
        self.steps.last().map_or(0.0, |s| s.cumulative)
    }
}

/// Moves in tie-break order.
pub fn move_order(grid: &Grid, tie_break: TieBreak) -> Vec<Move> {
    let mut order = NOMINAL_MOVES.to_vec();
    if tie_break == TieBreak::LowestControlId {
        order.sort_by_key(|m| (m.cell_offset(grid.width()), *m));
    }
    order
}

fn admissible_in_order(grid: &Grid, ship: Cell, order: &[Move]) -> Vec<(Move, Cell)> {
    order
        .iter()
        .filter_map(|m| grid.destination(ship, *m).map(|d| (*m, d)))
        .collect()
}

fn done(grid: &Grid, searched: &CellSet) -> bool {
    grid.remaining(searched) <= 1
}

/// Every move maximizing `u_k(x') + u_{k+1}(x' + u')`, where `searched` is
/// the mask before the sweep at `ship`. Returned in `order`.
pub fn base_policy_ties(grid: &Grid, ship: Cell, searched: &CellSet, order: &[Move]) -> Vec<Move> {
    let after = searched.union(&grid.footprint(ship));
    let scored: Vec<(Move, usize)> = admissible_in_order(grid, ship, order)
        .into_iter()
        .map(|(m, d)| (m, grid.footprint(d).count_difference(&after)))
        .collect();
    let best = scored.iter().map(|s| s.1).max().unwrap_or(0);
    scored.into_iter().filter(|s| s.1 == best).map(|s| s.0).collect()
}

/// The base policy: the first move in `order` maximizing next-stage coverage.
pub fn base_policy_submarine(grid: &Grid, ship: Cell, searched: &CellSet, order: &[Move]) -> Result<Move> {
    base_policy_ties(grid, ship, searched, order)
        .first()
        .copied()
        .ok_or_else(|| Error::Model(format!("no admissible move from cell {ship}")))
}

/// Outcome of simulating the base policy: capped coverage and the completion stage.
type Score = (usize, Reverse<usize>);

fn simulate_base(
    grid: &Grid,
    mut ship: Cell,
    mut searched: CellSet,
    mut k: usize,
    cap: usize,
    order: &[Move],
) -> Result<Score> {
    let need = grid.len() - 1 - searched.len().min(grid.len() - 1);
    let mut collected = 0;
    loop {
        if done(grid, &searched) {
            return Ok((need, Reverse(k)));
        }
        if k >= cap {
            return Ok((collected.min(need), Reverse(usize::MAX)));
        }
        let mv = base_policy_submarine(grid, ship, &searched, order)?;
        let new = grid.footprint(ship).difference(&searched);
        collected += new.len();
        searched = searched.union(&new);
        k += 1;
        ship = grid.destination(ship, mv).expect("admissible move");
    }
}

fn sweep_information(remaining: usize, coverage: usize) -> Bits {
    if coverage == 0 {
        0.0
    } else if coverage >= remaining {
        (remaining as f64).log2()
    } else {
        (remaining as f64 / (remaining - coverage) as f64).log2()
    }
}

/// Searches from `start` until at most one candidate cell is left.
pub fn run_search(grid: &Grid, start: Cell, policy: SearchPolicy, config: &SearchConfig) -> Result<SearchRun> {
    let order = config.order_for(grid)?;
    run_search_ordered(grid, start, policy, config.step_cap_for(grid), &order)
}

/// [`run_search`] with an explicit move priority; earlier moves win ties.
pub fn run_search_ordered(
    grid: &Grid,
    start: Cell,
    policy: SearchPolicy,
    cap: usize,
    order: &[Move],
) -> Result<SearchRun> {
    if !grid.contains(start) {
        return Err(Error::Domain(format!("start cell {start} is off the grid")));
    }
    let mut ship = start;
    let mut searched = CellSet::empty();
    let mut steps: Vec<SearchStep> = Vec::new();
    let mut cumulative = 0.0;
    let status = loop {
        if done(grid, &searched) {
            break RunStatus::Completed;
        }
        if steps.len() >= cap {
            break RunStatus::StepCapReached;
        }
        let k = steps.len();
        let remaining = grid.remaining(&searched);
        let (coverage, _) = grid.sonar_coverage(ship, &searched);
        let information = sweep_information(remaining, coverage);
        cumulative += information;
        searched = searched.union(&grid.footprint(ship));
        let next_move = if done(grid, &searched) {
            None
        } else {
            Some(match policy {
                // the sweep at `ship` is already in `searched`; re-applying it is a no-op
                SearchPolicy::Greedy => base_policy_submarine(grid, ship, &searched, order)?,
                SearchPolicy::Rollout => rollout_move(grid, ship, &searched, k + 1, cap, order)?,
            })
        };
        steps.push(SearchStep {
            k,
            ship,
            remaining,
            coverage,
            information,
            cumulative,
            next_move,
        });
        if let Some(mv) = next_move {
            ship = grid.destination(ship, mv).expect("admissible move");
        }
    };
    Ok(SearchRun {
        width: grid.width(),
        height: grid.height(),
        start,
        policy,
        steps,
        status,
    })
}

/// Rollout choice after the sweep at `ship`; `k` is the index of the next sweep.
fn rollout_move(grid: &Grid, ship: Cell, searched: &CellSet, k: usize, cap: usize, order: &[Move]) -> Result<Move> {
    let mut best: Option<(Score, Move)> = None;
    for (mv, dest) in admissible_in_order(grid, ship, order) {
        let score = simulate_base(grid, dest, *searched, k, cap, order)?;
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, mv));
        }
    }
    best.map(|(_, m)| m)
        .ok_or_else(|| Error::Model(format!("no admissible move from cell {ship}")))
}

/// Runs every start in `starts`, spreading the work over available cores.
/// Results come back in the order of `starts`.
pub fn survey(grid: &Grid, starts: &[Cell], policy: SearchPolicy, config: &SearchConfig) -> Result<Vec<SearchRun>> {
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(starts.len().max(1));
    let chunk = starts.len().div_ceil(threads.max(1)).max(1);
    let results: Vec<Result<Vec<SearchRun>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|s| run_search(grid, *s, policy, config))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    let mut runs = Vec::with_capacity(starts.len());
    for r in results {
        runs.extend(r?);
    }
    Ok(runs)
}

/// Number of interior peaks: maximal runs of equal values strictly above
/// both neighbouring values.
pub fn interior_peaks(series: &[usize]) -> usize {
    let mut runs: Vec<usize> = series.to_vec();
    runs.dedup();
    runs.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count()
}

/// The completed run with the fewest measurements, earliest start on ties.
pub fn best_run(runs: &[SearchRun]) -> Option<&SearchRun> {
    runs.iter()
        .filter(|r| r.completed())
        .min_by_key(|r| (r.measurements(), r.start))
}
