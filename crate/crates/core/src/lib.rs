//! Compatibility-matrix depletion for Boolean systems and SAT.
//!
//! A Boolean system is split into per-equation truth tables. Satisfying rows
//! of every pair of equations are related by a compatibility box, and the
//! boxes are repeatedly depleted with `T_ij <- T_ij & T_iu * T_uj` until they
//! stop changing. Depletion never removes a cell that belongs to a solution
//! grid, so an all-false result proves unsatisfiability. Whether every
//! surviving cell belongs to some grid is treated as an open hypothesis: the
//! [`grids`] module runs a complete backtracking search over the depleted
//! matrix and reports [`grids::Verdict::ClaimViolated`] when cells survive
//! without any extending grid.
//!
//! The [`harness`] module cross-checks everything against brute force.

pub mod boolmat;
pub mod cli;
pub mod compat;
pub mod deplete;
mod error;
pub mod formula;
pub mod grids;
pub mod harness;
pub mod pipeline;

pub use boolmat::BoolMatrix;
pub use compat::{BoxGrid, CompatMatrix};
pub use deplete::{deplete, DepleteOptions, DepletionOutcome, IterationSchema};
pub use error::{Error, Result};
pub use formula::{BooleanEquation, BooleanSystem, Clause, CnfFormula, Literal, PartialAssignment};
pub use grids::{decide, Decision, SolutionGrid, Verdict};
