//! Reference measurement problems.

pub mod guess;
pub mod submarine;
pub mod weighing;

pub use guess::GuessModel;
pub use submarine::{Cell, CellSet, Grid, Move, SearchState, Sonar, SubmarineProcess};
pub use weighing::WeighingModel;
