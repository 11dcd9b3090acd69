//! Stability and moduli geometry of finite-dimensional complex quiver
//! representations.
//!
//! The crate decides slope stability of a representation for a rational
//! weight by running a moment-map gradient flow along the orbit of the
//! complexified symmetry group: the flow converges to an Einstein-Hermitian
//! point exactly on polystable orbits, and the limit realises the associated
//! graded object.  Around that analytic core sit exact-arithmetic tools
//! (degrees, slopes, the weight-space hyperplane arrangement and its facets),
//! filtration algorithms (Harder-Narasimhan and Jordan-Holder, with
//! S-equivalence), and numerical checks of the Kahler-quotient metric and of
//! the curvature of the natural Hermitian line bundle on the stable moduli.
//!
//! The floating-point layer is generic over the scalar (`f32` or `f64`)
//! through [`scalar::Real`]; all slope and sign decisions are exact
//! (`BigRational`).  The aliases below fix the `f64` instantiation used by
//! the CLI.

pub mod arrangement;
pub mod error;
pub mod flow;
pub mod hom;
pub mod linalg;
pub mod moment;
pub mod quiver;
pub mod rep;
pub mod scalar;
pub mod filtration;
pub mod io;
pub mod line_bundle;
pub mod moduli;
pub mod search;
pub mod stability;
pub mod weight;

pub use arrangement::{
    enumerate_subdims, facet_signature, integral_weight_in_facet, same_facet, Arrangement,
    FacetSignature,
};
pub use error::{Error, Result};
pub use flow::{
    eh_orthogonal_decomposition, eh_uniqueness_check, kempf_ness_flow, EhDecomposition,
    FlowOptions, FlowReport,
};
pub use hom::{
    endomorphism_basis, hom_basis, is_isomorphic, skew_endomorphism_dimension, IsoCheck,
    IsoOptions, Morphism,
};
pub use moment::{
    k_operator, moment_identity_residual, moment_map, GroupElement, HermitianFamily, LieElement,
    MomentMap,
};
pub use weight::{slope, SlopeData, Weight};
pub use quiver::{Arrow, Quiver};
pub use rep::{subquotient, Distribution, Representation, SubQuotient, SubrepWitness};
pub use scalar::Real;
pub use filtration::{
    graded_object, hn_filtration, jh_filtration, revalidate_jh_at_weight, s_equivalent,
    Filtration, FiltrationOptions,
};
pub use io::{
    audit_instance, check_report, chern_report, facet_report, filtration_report, flow_summary,
    instance_from_parts, instance_representation, moduli_report, parse_instance, parse_theta_arg,
    read_instance, to_json, validate_instance, AuditCheck, AuditReport, ChartSampleReport,
    ChernReport, CheckReport, FacetReport, FiltrationReport, FlowSummary, InstanceFile,
    InstanceOptions, ModuliReport, ParsedInstance, SEquivalenceReport, WitnessReport,
};
pub use line_bundle::{
    ambient_chern_fd, ambient_line_metric, character_chi, connection_covariance_check,
    descended_chern_integral, descended_metric_chart, minimal_n, ChartSample, ChernIntegralReport,
    LineBundleData, Section,
};
pub use moduli::{
    complement_identity_residual, horizontal_dimension, horizontal_project,
    kronecker_moduli_report, moduli_metric, orbit_operator, HorizontalProjector,
    KroneckerModuliReport, ModuliOptions, ModuliPairing, OrbitOperator, TangentVector,
};
pub use search::{find_destabilizing_subrep, SearchMethod, SearchOptions, SearchOutcome};
pub use stability::{classify_stability, ClassifyOptions, StabilityVerdict, Verdict};

/// Default floating-point scalar.
pub type Scalar = f64;
/// Dense complex matrix over the default scalar.
pub type CMat = linalg::CMat<Scalar>;
/// Dense complex vector over the default scalar.
pub type CVec = linalg::CVec<Scalar>;
