//! σ-stable maps and the fixed-point machinery built on them.

pub mod borsuk;
pub mod families;
pub mod label;
pub mod map;
pub mod project;
pub mod solve;

pub use borsuk::borsuk_retraction;
pub use label::{label_from_map, label_rule, label_with_fallback};
pub use map::{Domain, RandomBall, SigmaStableMap};
pub use project::{min_norm_point, project_ball, project_convex, project_simplex};
pub use solve::{
    circumscribing_simplex, residual, solve_on_convex, solve_on_simplex, CellSelection, SolveTrace,
    SolverOptions, TraceStep,
};
