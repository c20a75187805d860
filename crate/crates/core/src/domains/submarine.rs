//! Locating a stationary submarine with a ship-mounted sonar.
//!
//! Cells are numbered `1..=width*height` in row-major order from the top-left.
//! A sonar sweep covers the ship's own cell and its four orthogonal
//! neighbours, clipped at the grid edge. Between sweeps the ship either moves
//! two cells along an axis or one cell diagonally.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agent::CoupledProcess;
use crate::entropy::{Bits, OutcomeDistribution};
use crate::error::{Error, Result};

/// Cell identifier, 1-based row-major.
pub type Cell = u16;

/// Largest grid (in cells) a [`CellSet`] can describe.
pub const MAX_CELLS: usize = 256;

/// Fixed-capacity bitset over cell ids.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct CellSet([u64; 4]);

impl CellSet {
    pub const fn empty() -> Self {
        Self([0; 4])
    }

    fn slot(cell: Cell) -> (usize, u64) {
        let i = usize::from(cell) - 1;
        (i / 64, 1u64 << (i % 64))
    }

    pub fn contains(&self, cell: Cell) -> bool {
        let (w, bit) = Self::slot(cell);
        self.0[w] & bit != 0
    }

    pub fn insert(&mut self, cell: Cell) {
        let (w, bit) = Self::slot(cell);
        self.0[w] |= bit;
    }

    pub fn remove(&mut self, cell: Cell) {
        let (w, bit) = Self::slot(cell);
        self.0[w] &= !bit;
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] | other.0[i]))
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] & !other.0[i]))
    }

    /// `|self \ other|` without materializing the difference.
    pub fn count_difference(&self, other: &Self) -> usize {
        (0..4).map(|i| (self.0[i] & !other.0[i]).count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..4).flat_map(move |w| {
            let mut bits = self.0[w];
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros();
                bits &= bits - 1;
                Some((w * 64 + tz as usize + 1) as Cell)
            })
        })
    }
}

impl FromIterator<Cell> for CellSet {
    fn from_iter<I: IntoIterator<Item = Cell>>(iter: I) -> Self {
        let mut s = Self::empty();
        for c in iter {
            s.insert(c);
        }
        s
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A ship move as a (row, column) displacement.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub dr: i8,
    pub dc: i8,
}

impl Move {
    pub const fn new(dr: i8, dc: i8) -> Self {
        Self { dr, dc }
    }

    /// The move as a difference of cell ids, `destination - source`.
    pub fn cell_offset(&self, width: usize) -> i32 {
        i32::from(self.dr) * width as i32 + i32::from(self.dc)
    }
}

impl fmt::Debug for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+},{:+})", self.dr, self.dc)
    }
}

/// The eight nominal moves in enumeration order: axis moves by two
/// (right, down, left, up), then diagonal moves by one.
pub const NOMINAL_MOVES: [Move; 8] = [
    Move::new(0, 2),
    Move::new(2, 0),
    Move::new(0, -2),
    Move::new(-2, 0),
    Move::new(1, 1),
    Move::new(1, -1),
    Move::new(-1, -1),
    Move::new(-1, 1),
];

/// Rectangular search area with precomputed sonar footprints.
#[derive(Clone, PartialEq, Eq)]
pub struct Grid {
    width: usize,
    height: usize,
    footprints: Vec<CellSet>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({}x{})", self.width, self.height)
    }
}

impl Grid {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::Domain(format!(
                "grid must be at least 2x2, got {width}x{height}"
            )));
        }
        if width * height > MAX_CELLS {
            return Err(Error::Resource {
                what: format!("grid cells ({width}x{height})"),
                cap: MAX_CELLS,
            });
        }
        let mut grid = Self {
            width,
            height,
            footprints: Vec::with_capacity(width * height),
        };
        for cell in grid.cells() {
            let (r, c) = grid.coords(cell);
            let footprint = [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)]
                .iter()
                .filter_map(|(dr, dc)| grid.cell_at(r as isize + dr, c as isize + dc))
                .collect();
            grid.footprints.push(footprint);
        }
        Ok(grid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> {
        1..=(self.len() as Cell)
    }

    pub fn all(&self) -> CellSet {
        self.cells().collect()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell >= 1 && usize::from(cell) <= self.len()
    }

    /// Zero-based (row, column) of a cell.
    pub fn coords(&self, cell: Cell) -> (usize, usize) {
        let i = usize::from(cell) - 1;
        (i / self.width, i % self.width)
    }

    pub fn cell_at(&self, row: isize, col: isize) -> Option<Cell> {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            return None;
        }
        Some((row as usize * self.width + col as usize + 1) as Cell)
    }

    /// Cells swept by a sonar ping from `ship`.
    pub fn footprint(&self, ship: Cell) -> CellSet {
        self.footprints[usize::from(ship) - 1]
    }

    /// Destination of a move, if it stays on the grid.
    pub fn destination(&self, ship: Cell, mv: Move) -> Option<Cell> {
        let (r, c) = self.coords(ship);
        self.cell_at(r as isize + isize::from(mv.dr), c as isize + isize::from(mv.dc))
    }

    /// Admissible moves from `ship`, in [`NOMINAL_MOVES`] order.
    pub fn admissible_moves(&self, ship: Cell) -> Vec<Move> {
        NOMINAL_MOVES
            .iter()
            .copied()
            .filter(|mv| self.destination(ship, *mv).is_some())
            .collect()
    }

    /// Number of previously unsearched cells a ping from `ship` covers, and those cells.
    pub fn sonar_coverage(&self, ship: Cell, searched: &CellSet) -> (usize, CellSet) {
        let new = self.footprint(ship).difference(searched);
        (new.len(), new)
    }

    /// Cell count still possibly holding the submarine.
    pub fn remaining(&self, searched: &CellSet) -> usize {
        self.len() - searched.len()
    }
}

/// Ship position together with the cells already searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchState {
    pub ship: Cell,
    pub searched: CellSet,
}

/// Result of one sonar ping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sonar {
    /// Submarine found in this cell.
    Detected(Cell),
    Clear,
}

/// The search as a coupled process: the ship is the agent, the searched-cell
/// set is the measurement state, and the only measurement at each stage is a
/// ping from the ship's current cell.
///
/// A detection pins the submarine to one cell; the state then becomes "every
/// cell but that one searched", so later pings carry no information.
#[derive(Debug, Clone)]
pub struct SubmarineProcess {
    grid: Grid,
    starts: Vec<Cell>,
}

impl SubmarineProcess {
    pub fn new(grid: Grid) -> Self {
        let starts = grid.cells().collect();
        Self { grid, starts }
    }

    /// Restricts the candidate starting cells.
    pub fn with_starts(mut self, starts: Vec<Cell>) -> Result<Self> {
        if let Some(bad) = starts.iter().find(|c| !self.grid.contains(**c)) {
            return Err(Error::Domain(format!("start cell {bad} is off the grid")));
        }
        self.starts = starts;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Information content of a ping that covers `u` of `x` remaining cells
    /// and comes back clear.
    pub fn clear_information(x: usize, u: usize) -> Bits {
        (x as f64 / (x - u) as f64).log2()
    }
}

impl CoupledProcess for SubmarineProcess {
    type Position = Cell;
    type Control = Move;
    type Disturbance = ();
    type State = CellSet;
    type Measurement = Cell;
    type Outcome = Sonar;

    fn initial_positions(&self) -> Vec<Cell> {
        self.starts.clone()
    }

    fn initial_state(&self) -> CellSet {
        CellSet::empty()
    }

    fn controls(&self, _k: usize, ship: &Cell) -> Vec<Move> {
        self.grid.admissible_moves(*ship)
    }

    fn disturbances(&self, _k: usize, _ship: &Cell, _mv: &Move) -> Result<OutcomeDistribution<()>> {
        Ok(OutcomeDistribution::certain(()))
    }

    fn dynamics(&self, _k: usize, ship: &Cell, mv: &Move, _w: &()) -> Cell {
        self.grid
            .destination(*ship, *mv)
            .expect("controls only contains on-grid moves")
    }

    fn measurements(&self, _k: usize, ship: &Cell, _searched: &CellSet) -> Vec<Cell> {
        vec![*ship]
    }

    fn outcomes(&self, _k: usize, searched: &CellSet, ping: &Cell) -> Result<OutcomeDistribution<Sonar>> {
        let x = self.grid.remaining(searched);
        let (u, new) = self.grid.sonar_coverage(*ping, searched);
        let x_f = x as f64;
        let mut outcomes: Vec<(Sonar, f64)> = new.iter().map(|c| (Sonar::Detected(c), 1.0 / x_f)).collect();
        outcomes.push((Sonar::Clear, (x - u) as f64 / x_f));
        OutcomeDistribution::new(outcomes)
    }

    fn transition(&self, _k: usize, searched: &CellSet, ping: &Cell, m: &Sonar) -> CellSet {
        match m {
            Sonar::Detected(cell) => {
                let mut s = self.grid.all();
                s.remove(*cell);
                s
            }
            Sonar::Clear => searched.union(&self.grid.footprint(*ping)),
        }
    }
}
