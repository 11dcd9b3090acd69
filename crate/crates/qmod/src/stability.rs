//! Slope-stability classification.
//!
//! The analytic route: run the moment-map flow towards an Einstein–Hermitian
//! metric.  Convergence means the orbit closure meets the zero level, so the
//! representation is semistable; the limit is then a polystable point, and
//! comparing it with the start separates the semistable flavours.  A stall at
//! a critical point with `‖L‖` away from zero means instability, and the
//! structural search supplies the destabilizing witness.
//!
//! The structural route — [`find_destabilizing_subrep`] — is always consulted
//! as a cross-check.  When its exact passes cover every qualifying
//! subdimension vector, the two verdicts must agree; a mismatch is reported
//! as a numeric error instead of silently preferring one route.

use num::BigRational;

use crate::error::{Error, Result};
use crate::flow::{kempf_ness_flow, FlowOptions, FlowReport};
use crate::hom::{endomorphism_basis, is_isomorphic, IsoOptions};
use crate::rep::{Representation, SubrepWitness};
use crate::scalar::Real;
use crate::search::{find_destabilizing_subrep, SearchMethod, SearchOptions};
use crate::weight::{slope, weight_to_scalars, Weight};

/// Outcome of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    StrictlySemistablePolystable,
    StrictlySemistableNotPolystable,
    Unstable,
}

impl Verdict {
    pub fn is_semistable(self) -> bool {
        !matches!(self, Verdict::Unstable)
    }

    pub fn is_polystable(self) -> bool {
        matches!(
            self,
            Verdict::Stable | Verdict::StrictlySemistablePolystable
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::StrictlySemistablePolystable => "strictly-semistable-polystable",
            Verdict::StrictlySemistableNotPolystable => "strictly-semistable-not-polystable",
            Verdict::Unstable => "unstable",
        }
    }
}

/// Tuning for [`classify_stability`].
#[derive(Debug, Clone, Default)]
pub struct ClassifyOptions<S: Real = f64> {
    pub flow: FlowOptions<S>,
    pub search: SearchOptions<S>,
    pub iso: IsoOptions<S>,
}

/// A classification with its evidence.
#[derive(Debug, Clone)]
pub struct StabilityVerdict<S: Real = f64> {
    pub verdict: Verdict,
    /// Destabilizing subrepresentation (always present for honest Unstable
    /// verdicts; `None` there only when flagged `no-witness`).
    pub witness: Option<SubrepWitness<S>>,
    /// Exact slope of the witness subdimension vector.
    pub witness_slope: Option<BigRational>,
    /// Exact slope of the representation itself.
    pub slope: BigRational,
    pub flow: FlowReport<S>,
    pub end_dim: usize,
    /// Whether the exact search passes covered every qualifying
    /// subdimension vector.
    pub search_exhaustive: bool,
    /// Which routes contributed: "flow", "structural", "heuristic".
    pub methods: Vec<&'static str>,
    /// Irregularities worth surfacing (e.g. "no-witness").
    pub flags: Vec<String>,
}

/// Classifies `rep` against the weight, combining the flow with the
/// structural search.
pub fn classify_stability<S: Real>(
    rep: &Representation<S>,
    theta: &Weight,
    opts: &ClassifyOptions<S>,
) -> Result<StabilityVerdict<S>> {
    if theta.len() != rep.quiver().num_vertices() {
        return Err(Error::DimensionMismatch);
    }
    let total = slope(theta, rep.dims())?;
    let theta_f: Vec<S> = weight_to_scalars(theta);

    let flow = kempf_ness_flow(rep, &theta_f, &opts.flow)?;
    let search = find_destabilizing_subrep(rep, theta, &opts.search)?;
    let end_dim = endomorphism_basis(rep).len();

    let mut methods = vec!["flow", "structural"];
    if search.method == Some(SearchMethod::Heuristic) {
        methods.push("heuristic");
    }
    let mut flags = Vec::new();

    let verdict = if flow.converged {
        if let Some(w) = &search.witness {
            // An exact destabilizer contradicts convergence outright; a
            // near-miss from the heuristic pass is only worth a flag.
            if w.residual() <= S::of(1e-12) {
                return Err(Error::Numeric(format!(
                    "flow converged (‖L‖ = {:.3e}) but an invariant destabilizer with \
                     subdims {:?} and residual {:.3e} exists",
                    flow.final_moment_norm.to_f64(),
                    w.subdims(),
                    w.residual().to_f64(),
                )));
            }
            flags.push(format!(
                "near-destabilizer at subdims {:?} with residual {:.3e}",
                w.subdims(),
                w.residual().to_f64(),
            ));
        }
        let iso = is_isomorphic(rep, &flow.final_rep, &opts.iso);
        if iso.isomorphic {
            if end_dim == 1 {
                Verdict::Stable
            } else {
                Verdict::StrictlySemistablePolystable
            }
        } else {
            Verdict::StrictlySemistableNotPolystable
        }
    } else if flow.stalled {
        if search.witness.is_none() {
            if search.exhaustive {
                return Err(Error::Numeric(format!(
                    "flow stalled at ‖L‖ = {:.3e} but the exhaustive search \
                     finds no destabilizer",
                    flow.final_moment_norm.to_f64(),
                )));
            }
            flags.push("no-witness".to_string());
        }
        Verdict::Unstable
    } else {
        return Err(Error::Numeric(format!(
            "flow budget exhausted after {} iterations at ‖L‖ = {:.3e} \
             without converging or stalling",
            flow.iterations,
            flow.final_moment_norm.to_f64(),
        )));
    };

    if verdict.is_semistable() && search.exhaustive && search.witness.is_some() {
        // cannot happen together with the checks above, but keep the
        // cross-validation airtight
        return Err(Error::Numeric(
            "semistable flow verdict contradicts an exhaustive structural witness".into(),
        ));
    }

    Ok(StabilityVerdict {
        verdict,
        witness: search.witness,
        witness_slope: search.witness_slope,
        slope: total.slope,
        flow,
        end_dim,
        search_exhaustive: search.exhaustive,
        methods,
        flags,
    })
}
