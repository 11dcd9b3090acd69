use thiserror::Error;

/// Everything that can go wrong while building or analysing representations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quiver has no vertices")]
    EmptyQuiver,
    #[error("arrow `{arrow}` references undeclared vertex `{vertex}`")]
    DanglingArrow { arrow: String, vertex: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("matrix for arrow `{arrow}` has shape {got_rows}x{got_cols}, expected {want_rows}x{want_cols}")]
    ShapeMismatch {
        arrow: String,
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("representations live on different quivers")]
    QuiverMismatch,
    #[error("dimension vector is zero")]
    ZeroDimensionVector,
    #[error("subspace witness residual {residual:e} exceeds tolerance {tol:e}")]
    WitnessResidual { residual: f64, tol: f64 },
    #[error("morphism does not intertwine: residual {0:e}")]
    NotIntertwining(f64),
    #[error("hermitian family is not positive definite at vertex `{0}`")]
    NotPositiveDefinite(String),
    #[error("Lie-algebra element is not skew-hermitian: residual {0:e}")]
    NotSkewHermitian(f64),
    #[error("group element is singular at vertex `{0}`")]
    SingularGroupElement(String),
    #[error("point is not Einstein-Hermitian: moment-map norm {0:e}")]
    NotEinsteinHermitian(f64),
    #[error("base point is not Schur: endomorphism algebra has dimension {0}")]
    NotSchur(usize),
    #[error("representation is not semistable")]
    NotSemistable,
    #[error("representations are not isomorphic")]
    NotIsomorphic,
    #[error("representations being compared are not both semistable")]
    SEquivalenceUndefined,
    #[error("numerical routine failed: {0}")]
    Numeric(String),
    #[error("dimension vectors differ")]
    DimensionMismatch,
    #[error("weights lie in different facets")]
    DifferentFacets,
    #[error("weight entry `{value}` for vertex `{vertex}` is not a rational number")]
    MalformedRational { vertex: String, value: String },
    #[error("instance: {0}")]
    Instance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
