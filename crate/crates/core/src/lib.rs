//! Wall-in placement search for RTS chokepoints.
//!
//! Given a window of build tiles around a chokepoint, a catalogue of building
//! types with their pixel side gaps, and the buildings to use, find placements
//! that stop an enemy unit from walking (or squeezing) from the outside anchor
//! to the base anchor, ranked by total seam width.

pub mod asp;
pub mod cli;
pub mod error;
pub mod facts;
pub mod grid;
pub mod occupancy;
pub mod reach;

pub use asp::{emit_program, extract_facts, parse_answer, AnswerParse, AnswerStatus};
pub use error::{AnswerError, OverlapError, ProblemError, SolveError};
pub use facts::{parse_document, parse_problem};
pub use grid::{
    footprint, validate_problem, Assignment, BuildingInstance, BuildingTypeSpec, Diagnostic,
    ReachMode, TerrainWindow, TileCoord, WallProblem,
};
pub use occupancy::{gap_seams, gap_totals, occupied_map, GapSeam, OccupancyMap, Orientation};
pub use reach::{blocked_set, is_tight, reach_fixpoint, BlockedSet, ReachSet};
pub mod solver;

pub use solver::{
    brute_force_oracle, check_assignment, checked_stages, enumerate_valid, solve_first,
    solve_incremental, solve_optimal, Score, SearchOptions, Solution, Verdict,
};
