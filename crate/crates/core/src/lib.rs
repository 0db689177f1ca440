//! Random simplexes over finite atomic probability spaces: subdivisions,
//! Sperner labelings, and fixed points of σ-stable maps.

pub mod error;
pub mod fixpoint;
pub mod l0;
pub mod linalg;
pub mod locality;
pub mod measure;
pub mod scalar;
pub mod simplex;
pub mod sperner;
pub mod subdivision;

pub use error::{Error, Result};
pub use l0::{
    compare_event, compare_event_with_tol, concatenate, l0_inner, l0_norm, l0_norm_squared,
    random_subsequence_bw, Concatenate, L0Label, L0Scalar, L0Vector, RandomSubsequence, Relation,
};
pub use measure::{event_algebra, Event, EventOp, PartitionOfUnity, ProbabilitySpace, Weights};
pub use scalar::{Arithmetic, Rational, Scalar};
pub use simplex::{
    barycentric_coordinates, check_l0_affine_independence, concatenate_simplexes, l0_diameter,
    l0_diameter_squared, BarycentricCoords, ClassicalSimplex, Independence, L0Simplex,
};
pub use subdivision::{
    barycentric_subdivision, iterated_barycentric_subdivision, l0_extreme_points,
    midpoint_subdivision_2simplex, ExtremePoints, RegistryVertex, Subdivision,
};
pub use sperner::{
    chi_support, decompose_labeling, enumerate_completely_labeled, is_proper_l0, proper_labelings,
    random_sperner_search, CompletelyLabeled, Decomposition, L0Labeling, ProperLabeling, Properness,
};
pub use fixpoint::{
    borsuk_retraction, label_from_map, project_convex, solve_on_convex, solve_on_simplex,
    CellSelection, Domain, RandomBall, SigmaStableMap, SolveTrace, SolverOptions,
};
pub use locality::commutes_with_concatenation;
