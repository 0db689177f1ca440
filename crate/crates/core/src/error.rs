use thiserror::Error;

/// Errors raised by constructors and algorithms in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("objects live on different probability spaces")]
    SpaceMismatch,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("atom {atom}: vertices are affinely dependent")]
    AffinelyDependent { atom: usize },

    #[error("atom {atom}: point is outside the simplex ({detail})")]
    OutsideSimplex { atom: usize, detail: String },

    #[error("atom {atom}: point is outside the domain ({detail})")]
    OutsideDomain { atom: usize, detail: String },

    #[error("improper labeling: vertex {vertex} has label {label} on atom {atom}, outside its carrier face")]
    ImproperLabeling {
        vertex: usize,
        label: usize,
        atom: usize,
    },

    #[error("label {label} is out of range 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },

    #[error("empty sequence")]
    EmptySequence,

    #[error("atom {atom}: f(x) = x, the retraction ray is undefined")]
    DegenerateRetraction { atom: usize },

    #[error("atom {atom}: map leaves its domain ({detail})")]
    MapLeavesDomain { atom: usize, detail: String },

    #[error("atom {atom}: no label qualifies at registry vertex {vertex}")]
    NoQualifyingLabel { vertex: usize, atom: usize },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
