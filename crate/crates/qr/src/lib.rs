//! Deterministic simulator and analysis toolkit for tiled QR factorization
//! elimination schemes.
//!
//! The factorization of a p x q tile grid is described by an ordered list of
//! eliminations elim(i, piv, k), each zeroing tile (i, k) against pivot row
//! piv. Executing a list with the TT or TS kernel family yields a weighted
//! task DAG whose unbounded-processor makespan is the scheme's critical path.
//! This crate generates the classic schemes (FlatTree/Sameh-Kuck, Fibonacci,
//! Greedy, BinaryTree, PlasmaTree) and the dynamic ASAP/Grasap policies,
//! simulates them, checks the known closed forms and bounds, searches for
//! optimal schedules on small banded instances, and evaluates a
//! roofline-style performance prediction.

pub mod analysis;
pub mod coarse;
pub mod dynamic;
pub mod error;
pub mod graph;
pub mod grid;
pub mod list;
pub mod matrix;
pub mod perf;
pub mod schemes;
pub mod search;
pub mod sim;
pub mod tables;

pub use error::QrError;
pub use grid::{Elimination, GridShape, KernelFamily, KernelKind, Task};
pub use list::{total_weight, EliminationList, ValidationReport, Violation};
pub use matrix::TimestepMatrix;
pub use schemes::{generate_list, SchemeSpec};
