//! JSON instance files and machine-readable reports.
//!
//! An instance file describes a quiver with named vertices and arrows, a
//! dimension vector, and optionally a weight, explicit matrices, a seed and
//! option overrides.  Weights are rationals written as strings (`"1/3"`),
//! so no float parsing ever touches an exact quantity; complex matrix
//! entries are `[re, im]` pairs in row-major order.  Report structures
//! mirror the analysis results with camel-case JSON fields and only ordered
//! containers, so output is byte-identical across runs with the same seed.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::Filtration;
use crate::flow::{kempf_ness_flow, FlowOptions, FlowReport};
use crate::line_bundle::{ChartSample, ChernIntegralReport, LineBundleData};
use crate::linalg::{gaussian_matrix, CMat};
use crate::moduli::{complement_identity_residual, KroneckerModuliReport};
use crate::moment::{eh_residual, moment_identity_residual, moment_map, HermitianFamily, LieElement};
use crate::quiver::Quiver;
use crate::rep::{Distribution, Representation};
use crate::stability::{StabilityVerdict, Verdict};
use crate::weight::{format_rational, parse_rational, weight_to_scalars, Weight};
use crate::arrangement::{facet_signature, integral_weight_in_facet, same_facet};
use crate::hom::endomorphism_basis;

/// One arrow of the instance quiver, with endpoint vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowEntry {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// The quiver block of an instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverEntry {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowEntry>,
}

/// Optional numeric overrides carried by an instance.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

/// The serialized form of a problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub quiver: QuiverEntry,
    /// Dimension at each vertex, keyed by vertex id.
    pub dims: BTreeMap<String, usize>,
    /// Weight entries as exact rational strings, keyed by vertex id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<BTreeMap<String, String>>,
    /// Row-major `[re, im]` entries per arrow; an arrow matrix has
    /// `dims[dst]` rows and `dims[src]` columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<BTreeMap<String, Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<InstanceOptions>,
}

/// A validated instance: exact weight, optional explicit representation.
#[derive(Debug, Clone)]
pub struct ParsedInstance {
    pub quiver: Arc<Quiver>,
    pub dims: Vec<usize>,
    pub weight: Option<Weight>,
    pub rep: Option<Representation<f64>>,
    pub seed: Option<u64>,
    pub options: InstanceOptions,
}

/// Parse and validate an instance from JSON text.
pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Instance(e.to_string()))?;
    validate_instance(&file)
}

/// Read and parse an instance file from disk.
pub fn read_instance(path: &str) -> Result<ParsedInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Instance(format!("cannot read `{path}`: {e}")))?;
    parse_instance(&text)
}

/// Validate a deserialized instance into exact and numeric objects.
pub fn validate_instance(file: &InstanceFile) -> Result<ParsedInstance> {
    let quiver = Quiver::new(
        file.quiver.vertices.iter().cloned(),
        file.quiver
            .arrows
            .iter()
            .map(|a| (a.id.clone(), a.src.clone(), a.dst.clone())),
    )?;

    let mut dims = Vec::with_capacity(quiver.num_vertices());
    for id in quiver.vertex_ids() {
        let d = file
            .dims
            .get(id)
            .ok_or_else(|| Error::Instance(format!("dims: missing entry for vertex `{id}`")))?;
        dims.push(*d);
    }
    for key in file.dims.keys() {
        if !quiver.vertex_ids().contains(key) {
            return Err(Error::Instance(format!(
                "dims.{key}: not a declared vertex",
            )));
        }
    }

    let weight = match &file.weight {
        None => None,
        Some(map) => {
            let mut theta = Vec::with_capacity(quiver.num_vertices());
            for id in quiver.vertex_ids() {
                let raw = map.get(id).ok_or_else(|| {
                    Error::Instance(format!("weight: missing entry for vertex `{id}`"))
                })?;
                let value = parse_rational(raw).ok_or_else(|| Error::MalformedRational {
                    vertex: id.clone(),
                    value: raw.clone(),
                })?;
                theta.push(value);
            }
            for key in map.keys() {
                if !quiver.vertex_ids().contains(key) {
                    return Err(Error::Instance(format!(
                        "weight.{key}: not a declared vertex",
                    )));
                }
            }
            Some(theta)
        }
    };

    let rep = match &file.matrices {
        None => None,
        Some(map) => {
            let mut mats = Vec::with_capacity(quiver.arrows().len());
            for ar in quiver.arrows() {
                let rows = dims[ar.dst];
                let cols = dims[ar.src];
                let flat = map.get(&ar.id).ok_or_else(|| {
                    Error::Instance(format!("matrices: missing entry for arrow `{}`", ar.id))
                })?;
                if flat.len() != rows * cols {
                    return Err(Error::Instance(format!(
                        "matrices.{}: expected {} entries for a {rows}x{cols} block, got {}",
                        ar.id,
                        rows * cols,
                        flat.len(),
                    )));
                }
                let entries: Vec<num::complex::Complex<f64>> = flat
                    .iter()
                    .map(|&[re, im]| num::complex::Complex::new(re, im))
                    .collect();
                mats.push(CMat::<f64>::from_row_slice(rows, cols, &entries));
            }
            for key in map.keys() {
                if !quiver.arrows().iter().any(|a| &a.id == key) {
                    return Err(Error::Instance(format!(
                        "matrices.{key}: not a declared arrow",
                    )));
                }
            }
            Some(Representation::new(quiver.clone(), dims.clone(), mats)?)
        }
    };

    Ok(ParsedInstance {
        quiver,
        dims,
        weight,
        rep,
        seed: file.seed,
        options: file.options.unwrap_or_default(),
    })
}

/// Serialize parsed data back into the file format.
pub fn instance_from_parts(
    quiver: &Quiver,
    dims: &[usize],
    weight: Option<&Weight>,
    rep: Option<&Representation<f64>>,
    seed: Option<u64>,
    options: Option<InstanceOptions>,
) -> InstanceFile {
    let quiver_entry = QuiverEntry {
        vertices: quiver.vertex_ids().to_vec(),
        arrows: quiver
            .arrows()
            .iter()
            .map(|a| ArrowEntry {
                id: a.id.clone(),
                src: quiver.vertex_ids()[a.src].clone(),
                dst: quiver.vertex_ids()[a.dst].clone(),
            })
            .collect(),
    };
    let dims_map = quiver
        .vertex_ids()
        .iter()
        .cloned()
        .zip(dims.iter().copied())
        .collect();
    let weight_map = weight.map(|w| {
        quiver
            .vertex_ids()
            .iter()
            .cloned()
            .zip(w.iter().map(format_rational))
            .collect()
    });
    let matrices = rep.map(|r| {
        quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let m = r.matrix(i);
                let mut flat = Vec::with_capacity(m.len());
                for row in 0..m.nrows() {
                    for col in 0..m.ncols() {
                        let z = m[(row, col)];
                        flat.push([z.re, z.im]);
                    }
                }
                (a.id.clone(), flat)
            })
            .collect()
    });
    InstanceFile {
        quiver: quiver_entry,
        dims: dims_map,
        weight: weight_map,
        matrices,
        seed,
        options,
    }
}

/// Pretty-printed JSON for any serializable report or instance.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

/// The representation an instance denotes: explicit matrices when present,
/// otherwise a seeded Gaussian sample (seed override, then instance seed,
/// then zero).
pub fn instance_representation(
    parsed: &ParsedInstance,
    seed_override: Option<u64>,
) -> Representation<f64> {
    match &parsed.rep {
        Some(rep) => rep.clone(),
        None => {
            let seed = seed_override.or(parsed.seed).unwrap_or(0);
            Representation::random(
                parsed.quiver.clone(),
                parsed.dims.clone(),
                seed,
                Distribution::ComplexGaussian,
            )
        }
    }
}

/// Parse a comma-separated list of exact rationals, as passed on the
/// command line.
pub fn parse_theta_arg(text: &str) -> Result<Weight> {
    text.split(',')
        .enumerate()
        .map(|(i, part)| {
            parse_rational(part.trim()).ok_or_else(|| Error::MalformedRational {
                vertex: format!("#{i}"),
                value: part.trim().to_string(),
            })
        })
        .collect()
}

/// Summary of one gradient-flow run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowSummary {
    pub iterations: usize,
    pub converged: bool,
    pub stalled: bool,
    pub final_moment_norm: f64,
    /// Relative residual of `initial . group = final`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_consistency: Option<f64>,
    /// `F = ‖L‖^2 / 2` per iteration, when history was recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_history: Option<Vec<f64>>,
}

/// Build the JSON summary of a flow report.
pub fn flow_summary(report: &FlowReport<f64>, with_history: bool) -> FlowSummary {
    FlowSummary {
        iterations: report.iterations,
        converged: report.converged,
        stalled: report.stalled,
        final_moment_norm: report.final_moment_norm,
        group_consistency: report.group_consistency().ok(),
        f_history: if with_history && !report.f_history.is_empty() {
            Some(report.f_history.clone())
        } else {
            None
        },
    }
}

/// A destabilizing witness in report form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessReport {
    pub subdims: Vec<usize>,
    pub slope: String,
    pub invariance_residual: f64,
}

/// Stability classification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub verdict: String,
    pub semistable: bool,
    pub polystable: bool,
    pub slope: String,
    pub dim_end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    pub search_exhaustive: bool,
    pub methods: Vec<String>,
    pub flags: Vec<String>,
    pub flow: FlowSummary,
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Stable => "Stable",
        Verdict::StrictlySemistablePolystable => "StrictlySemistablePolystable",
        Verdict::StrictlySemistableNotPolystable => "StrictlySemistableNotPolystable",
        Verdict::Unstable => "Unstable",
    }
}

/// Build the JSON report of a stability classification.
pub fn check_report(v: &StabilityVerdict<f64>) -> CheckReport {
    CheckReport {
        verdict: verdict_name(v.verdict).to_string(),
        semistable: v.verdict.is_semistable(),
        polystable: v.verdict.is_polystable(),
        slope: format_rational(&v.slope),
        dim_end: v.end_dim,
        witness: v.witness.as_ref().map(|w| WitnessReport {
            subdims: w.subdims().to_vec(),
            slope: v
                .witness_slope
                .as_ref()
                .map(format_rational)
                .unwrap_or_default(),
            invariance_residual: w.residual(),
        }),
        search_exhaustive: v.search_exhaustive,
        methods: v.methods.iter().map(|m| m.to_string()).collect(),
        flags: v.flags.clone(),
        flow: flow_summary(&v.flow, false),
    }
}

/// Facet data of a weight: hyperplane signs and the primitive integral
/// weight on the same ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FacetReport {
    /// Sign of the wall functional at each proper subdimension vector,
    /// keyed by the vector written as `(e1,...,ek)`.
    pub signature: BTreeMap<String, i64>,
    pub integral_weight: Vec<i64>,
    /// The integral weight lies in the same facet (a positive-ray rescale).
    pub same_signature: bool,
}

fn subdim_key(e: &[usize]) -> String {
    let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Build the facet report of a weight for a dimension vector.
pub fn facet_report(theta: &Weight, dims: &[usize]) -> Result<FacetReport> {
    let signature = facet_signature(theta, dims)?;
    let integral = integral_weight_in_facet(theta, dims)?;
    let mut map = BTreeMap::new();
    for (e, sign) in signature.entries() {
        map.insert(subdim_key(e), i64::from(*sign));
    }
    let integral_weight = integral
        .iter()
        .map(|t| {
            t.to_integer()
                .to_i64()
                .ok_or_else(|| Error::Instance("integral weight entry exceeds 64 bits".into()))
        })
        .collect::<Result<Vec<i64>>>()?;
    let same_signature = same_facet(theta, &integral, dims)?;
    Ok(FacetReport {
        signature: map,
        integral_weight,
        same_signature,
    })
}

/// A filtration in report form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FiltrationReport {
    pub kind: String,
    /// Subdimension vectors of the terms, outermost first.
    pub terms: Vec<Vec<usize>>,
    pub factor_dims: Vec<Vec<usize>>,
    pub factor_slopes: Vec<String>,
    pub length: usize,
    pub flags: Vec<String>,
}

/// Build the JSON report of a filtration.
pub fn filtration_report(kind: &str, f: &Filtration<f64>) -> FiltrationReport {
    FiltrationReport {
        kind: kind.to_string(),
        terms: f.terms.iter().map(|t| t.subdims().to_vec()).collect(),
        factor_dims: f.factors.iter().map(|r| r.dims().to_vec()).collect(),
        factor_slopes: f.factor_slopes.iter().map(format_rational).collect(),
        length: f.len(),
        flags: f.flags.clone(),
    }
}

/// S-equivalence verdict between two instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SEquivalenceReport {
    pub equivalent: bool,
    pub dims: Vec<usize>,
}

/// Quadrature report of the descended Kähler form on the Kronecker moduli.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModuliReport {
    pub n_grid: usize,
    pub r_max: f64,
    pub interior: f64,
    pub tail: f64,
    pub tail_error: f64,
    pub total: f64,
    pub density_at_origin: f64,
    pub min_density: f64,
    pub max_density: f64,
    pub radial_profile: Vec<[f64; 2]>,
}

/// Build the JSON report of the moduli quadrature.
pub fn moduli_report(r: &KroneckerModuliReport<f64>) -> ModuliReport {
    ModuliReport {
        n_grid: r.n_grid,
        r_max: r.r_max,
        interior: r.interior,
        tail: r.tail,
        tail_error: r.tail_error,
        total: r.total,
        density_at_origin: r.density_at_origin,
        min_density: r.min_density,
        max_density: r.max_density,
        radial_profile: r.radial_profile.iter().map(|&(a, b)| [a, b]).collect(),
    }
}

/// One chart sample of the descended line-bundle metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChartSampleReport {
    pub u: f64,
    pub v: f64,
    pub metric: f64,
    pub chern_density: f64,
    pub form_density: f64,
    pub ratio: f64,
}

/// Line-bundle curvature report on the Kronecker moduli.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChernReport {
    pub twist: u64,
    pub lambda: f64,
    pub exponents: Vec<i64>,
    pub n_grid: usize,
    pub interior: f64,
    pub tail: f64,
    pub tail_error: f64,
    pub total: f64,
    pub samples: Vec<ChartSampleReport>,
}

/// Build the JSON report of the descended curvature data.
pub fn chern_report(
    data: &LineBundleData,
    integral: &ChernIntegralReport<f64>,
    samples: &[ChartSample<f64>],
) -> ChernReport {
    ChernReport {
        twist: data.twist(),
        lambda: data.lambda(),
        exponents: data.exponents().to_vec(),
        n_grid: integral.n_grid,
        interior: integral.interior,
        tail: integral.tail,
        tail_error: integral.tail_error,
        total: integral.total,
        samples: samples
            .iter()
            .map(|s| ChartSampleReport {
                u: s.u,
                v: s.v,
                metric: s.metric,
                chern_density: s.chern_density,
                form_density: s.form_density,
                ratio: s.ratio,
            })
            .collect(),
    }
}

/// One audit check: a named residual against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditCheck {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// The full audit battery on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
    pub pass: bool,
}

/// Run the internal-consistency battery on an instance: the defining
/// identity of the moment map on random skew directions, the vanishing
/// trace pairing, monotonicity and group bookkeeping of the flow, agreement
/// of the two curvature-residual formulas, and the symplectic/metric
/// complement identity on a random subspace.
pub fn audit_instance(
    rep: &Representation<f64>,
    theta: &Weight,
    seed: u64,
    flow_opts: &FlowOptions<f64>,
) -> Result<AuditReport> {
    let theta_f = weight_to_scalars::<f64>(theta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut push = |name: &str, value: f64, tolerance: f64| {
        checks.push(AuditCheck {
            name: name.to_string(),
            value,
            tolerance,
            pass: value <= tolerance,
        });
    };

    let mut worst = 0.0f64;
    for _ in 0..5 {
        let xi = LieElement::random_skew(rep.dims(), &mut rng);
        worst = worst.max(moment_identity_residual(rep, &xi, &theta_f)?);
    }
    push("moment-identity", worst, 1e-8);

    let mm = moment_map(rep, &theta_f)?;
    push(
        "moment-trace-sum",
        mm.l.trace_sum().norm(),
        1e-12 * (1.0 + mm.norm),
    );

    let mut opts = flow_opts.clone();
    opts.record_history = true;
    let flow = kempf_ness_flow(rep, &theta_f, &opts)?;
    let mut max_rise = 0.0f64;
    for pair in flow.f_history.windows(2) {
        max_rise = max_rise.max(pair[1] - pair[0]);
    }
    let f0 = flow.f_history.first().copied().unwrap_or(0.0);
    push("flow-monotone", max_rise, 1e-12 * (1.0 + f0));
    push("flow-group-consistency", flow.group_consistency()?, 1e-8);

    let h = HermitianFamily::identity(rep.dims());
    let residual_gap =
        (eh_residual(&flow.final_rep, &h, &theta_f)? - flow.final_moment_norm).abs();
    push(
        "curvature-residual-agreement",
        residual_gap,
        1e-10 * (1.0 + flow.final_moment_norm),
    );

    let ambient: usize = rep.matrices().iter().map(|m| m.len()).sum();
    let span: Vec<Vec<num::complex::Complex<f64>>> = (0..ambient.min(3))
        .map(|_| gaussian_matrix::<f64>(&mut rng, ambient, 1).iter().copied().collect())
        .collect();
    push(
        "complement-identity",
        complement_identity_residual(ambient, &span)?,
        1e-8,
    );

    let end_dim = endomorphism_basis(rep).len();
    push(
        "endomorphisms-contain-identity",
        if end_dim >= 1 { 0.0 } else { 1.0 },
        0.5,
    );

    let pass = checks.iter().all(|c| c.pass);
    Ok(AuditReport { checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::weight_from_integers;
    use num::rational::BigRational;

    fn kronecker_instance_text() -> &'static str {
        r#"{
            "quiver": {
                "vertices": ["1", "2"],
                "arrows": [
                    {"id": "x", "src": "1", "dst": "2"},
                    {"id": "y", "src": "1", "dst": "2"}
                ]
            },
            "dims": {"1": 1, "2": 1},
            "weight": {"1": "1", "2": "-1"},
            "matrices": {"x": [[1, 0]], "y": [[0, 0]]}
        }"#
    }

    #[test]
    fn kronecker_instance_parses_to_the_expected_objects() {
        let parsed = parse_instance(kronecker_instance_text()).unwrap();
        assert_eq!(parsed.dims, vec![1, 1]);
        assert_eq!(parsed.weight.as_ref().unwrap(), &weight_from_integers(&[1, -1]));
        let rep = parsed.rep.unwrap();
        assert_eq!(rep.matrix(0)[(0, 0)], num::complex::Complex::new(1.0, 0.0));
        assert_eq!(rep.matrix(1)[(0, 0)], num::complex::Complex::new(0.0, 0.0));
        assert_eq!(parsed.quiver.vertex_ids(), &["1".to_string(), "2".to_string()]);
    }

    #[test]
    fn rational_weight_entries_parse_exactly() {
        let text = kronecker_instance_text().replace("\"1\": \"1\",", "\"1\": \"1/3\",");
        let parsed = parse_instance(&text).unwrap();
        let theta = parsed.weight.unwrap();
        assert_eq!(theta[0], BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn wrong_shape_matrix_error_names_the_arrow() {
        let text = kronecker_instance_text().replace("[[1, 0]]", "[[1, 0], [2, 0]]");
        let err = parse_instance(&text).unwrap_err();
        assert!(err.to_string().contains('x'), "error should name the arrow: {err}");
    }

    #[test]
    fn malformed_rational_is_reported_with_its_vertex() {
        let text = kronecker_instance_text().replace("\"1\": \"1\",", "\"1\": \"one\",");
        match parse_instance(&text).unwrap_err() {
            Error::MalformedRational { vertex, value } => {
                assert_eq!(vertex, "1");
                assert_eq!(value, "one");
            }
            other => panic!("expected a malformed-rational error, got {other}"),
        }
    }

    #[test]
    fn key_discipline_is_enforced() {
        let missing_dim = kronecker_instance_text().replace("\"1\": 1, ", "");
        assert!(parse_instance(&missing_dim).is_err());

        let extra = kronecker_instance_text().replace(
            "\"dims\": {\"1\": 1, \"2\": 1}",
            "\"dims\": {\"1\": 1, \"2\": 1, \"3\": 1}",
        );
        assert!(parse_instance(&extra).is_err());

        let missing_matrix = kronecker_instance_text().replace("\"y\": [[0, 0]]", "\"z\": [[0, 0]]");
        assert!(parse_instance(&missing_matrix).is_err());
    }

    #[test]
    fn instances_round_trip_through_json() {
        let parsed = parse_instance(kronecker_instance_text()).unwrap();
        let file = instance_from_parts(
            &parsed.quiver,
            &parsed.dims,
            parsed.weight.as_ref(),
            parsed.rep.as_ref(),
            Some(7),
            Some(InstanceOptions {
                tol: Some(1e-9),
                max_iters: None,
                grid: Some(64),
            }),
        );
        let json = to_json(&file);
        let back: InstanceFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, file);
        let reparsed = validate_instance(&back).unwrap();
        assert_eq!(reparsed.dims, parsed.dims);
        assert_eq!(reparsed.weight, parsed.weight);
        assert_eq!(reparsed.seed, Some(7));
        assert_eq!(reparsed.options.grid, Some(64));
    }

    #[test]
    fn seeded_instances_are_reproducible() {
        let text = r#"{
            "quiver": {"vertices": ["a"], "arrows": [{"id": "l", "src": "a", "dst": "a"}]},
            "dims": {"a": 2},
            "seed": 11
        }"#;
        let parsed = parse_instance(text).unwrap();
        assert!(parsed.rep.is_none());
        let r1 = instance_representation(&parsed, None);
        let r2 = instance_representation(&parsed, None);
        assert_eq!(r1.matrix(0), r2.matrix(0));
        let r3 = instance_representation(&parsed, Some(12));
        assert_ne!(r1.matrix(0), r3.matrix(0));
    }

    #[test]
    fn theta_arguments_parse_as_exact_rationals() {
        let theta = parse_theta_arg("1, -1/2").unwrap();
        assert_eq!(theta[0], BigRational::from_integer(1.into()));
        assert_eq!(theta[1], BigRational::new((-1).into(), 2.into()));
        assert!(parse_theta_arg("1, squiggle").is_err());
    }

    #[test]
    fn facet_report_matches_the_exact_arrangement() {
        let theta = vec![
            BigRational::new(1.into(), 2.into()),
            BigRational::new((-3).into(), 10.into()),
        ];
        let report = facet_report(&theta, &[1, 1]).unwrap();
        assert_eq!(report.integral_weight, vec![5, -3]);
        assert_eq!(report.signature.get("(1,0)"), Some(&-1));
        assert_eq!(report.signature.get("(0,1)"), Some(&1));
        assert!(report.same_signature);
    }

    #[test]
    fn reports_round_trip_through_json() {
        let report = CheckReport {
            verdict: "Stable".into(),
            semistable: true,
            polystable: true,
            slope: "0".into(),
            dim_end: 1,
            witness: None,
            search_exhaustive: true,
            methods: vec!["flow".into(), "structural".into()],
            flags: vec![],
            flow: FlowSummary {
                iterations: 41,
                converged: true,
                stalled: false,
                final_moment_norm: 3.2e-9,
                group_consistency: Some(1.1e-12),
                f_history: Some(vec![0.5, 0.25, 0.125]),
            },
        };
        let json = to_json(&report);
        assert!(json.contains("\"dimEnd\": 1"), "camel-case field names");
        let back: CheckReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);

        let facet = FacetReport {
            signature: BTreeMap::from([("(1,0)".to_string(), -1)]),
            integral_weight: vec![5, -3],
            same_signature: true,
        };
        let back: FacetReport = serde_json::from_str(&to_json(&facet)).unwrap();
        assert_eq!(back, facet);

        let filtration = FiltrationReport {
            kind: "harder-narasimhan".into(),
            terms: vec![vec![1, 1], vec![0, 1], vec![0, 0]],
            factor_dims: vec![vec![1, 0], vec![0, 1]],
            factor_slopes: vec!["1".into(), "-1".into()],
            length: 2,
            flags: vec![],
        };
        let back: FiltrationReport = serde_json::from_str(&to_json(&filtration)).unwrap();
        assert_eq!(back, filtration);
    }

    #[test]
    fn audit_passes_on_a_clean_kronecker_instance() {
        let parsed = parse_instance(kronecker_instance_text()).unwrap();
        let rep = parsed.rep.unwrap();
        let theta = parsed.weight.unwrap();
        let report = audit_instance(&rep, &theta, 3, &FlowOptions::default()).unwrap();
        assert!(report.pass, "audit failed: {}", to_json(&report));
        assert_eq!(report.checks.len(), 7);
        let json = to_json(&report);
        let back: AuditReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
