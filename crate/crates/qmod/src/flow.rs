//! Gradient flow of the squared moment-map norm along gauge orbits, driving
//! representations toward the Einstein–Hermitian locus, plus the structure
//! theory available once a point is Einstein–Hermitian: orthogonal
//! decomposition into stable summands and uniqueness of the metric up to
//! the unitary centraliser.
//!
//! One step moves `rho` to `rho . exp(-s i L)` where `L` is the moment map;
//! `i L` is Hermitian per vertex, so steps travel the non-compact orbit
//! directions.  The step size comes from Armijo backtracking on
//! `F = (1/2) ‖L‖^2`, whose directional derivative at `s = 0` is
//! `-2 ‖D_rho(L)‖^2`.

use num::complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hom::{endomorphism_basis, is_isomorphic, IsoOptions, Morphism};
use crate::linalg::{self, CMat};
use crate::moment::{
    ambient_norm, moment_map, orbit_derivative, GroupElement, LieElement,
};
use crate::rep::{subquotient, Representation, SubrepWitness};
use crate::scalar::{c, Real};

/// Knobs for the descent loop.
#[derive(Debug, Clone)]
pub struct FlowOptions<S: Real = f64> {
    /// Convergence threshold on `‖L‖`.
    pub epsilon: S,
    pub max_iters: usize,
    /// Initial trial step; later iterations reuse twice the last accepted
    /// step, clamped to `[step_min, step_max]`.
    pub step0: S,
    pub step_min: S,
    pub step_max: S,
    /// Armijo sufficient-decrease constant.
    pub armijo: S,
    /// Below this `‖D_rho(L)‖` the point is declared critical.  Kept far
    /// below `epsilon`: on slope-degenerating orbits the gradient scales
    /// like `‖L‖^{3/2}`, so a loose floor here would freeze flows that are
    /// still converging.
    pub grad_tol: S,
    /// Keep the per-iteration `F` values in the report.
    pub record_history: bool,
}

impl<S: Real> Default for FlowOptions<S> {
    fn default() -> Self {
        FlowOptions {
            epsilon: S::of(1e-8),
            max_iters: 10_000,
            step0: S::of(0.1),
            step_min: S::of(1e-16),
            // Slope-degenerating orbits need steps that grow like the
            // inverse square of ‖L‖; the Armijo test keeps actual moves
            // moderate, so the cap is effectively "unbounded".
            step_max: S::of(1e12),
            armijo: S::of(1e-4),
            grad_tol: S::of(1e-14),
            record_history: true,
        }
    }
}

/// Everything a flow run produces.
#[derive(Debug, Clone)]
pub struct FlowReport<S: Real = f64> {
    pub initial: Representation<S>,
    pub final_rep: Representation<S>,
    pub iterations: usize,
    /// `F = (1/2) ‖L‖^2` per iteration (first entry = initial point).
    pub f_history: Vec<S>,
    pub final_moment_norm: S,
    /// `‖L‖ <= epsilon` was reached.
    pub converged: bool,
    /// Descent died before convergence: critical point or step collapse.
    pub stalled: bool,
    /// Cumulative group element with `final = initial . group`.
    pub group: GroupElement<S>,
}

impl<S: Real> FlowReport<S> {
    /// Relative residual of `initial . group = final`.
    pub fn group_consistency(&self) -> Result<S> {
        let acted = self.group.act(&self.initial)?;
        Ok(acted.distance(&self.final_rep) / (S::one() + self.final_rep.norm()))
    }
}

/// Run the descent from `rho` for the weight `theta` (as floats).
pub fn kempf_ness_flow<S: Real>(
    rho: &Representation<S>,
    theta: &[S],
    opts: &FlowOptions<S>,
) -> Result<FlowReport<S>> {
    let dims = rho.dims().to_vec();
    let mut current = rho.clone();
    let mut group = GroupElement::identity(&dims);
    let mut history = Vec::new();
    let mut step = opts.step0;
    let mut iterations = 0;
    let mut converged = false;
    let mut stalled = false;
    let two = S::one() + S::one();

    let mut mm = moment_map(&current, theta)?;
    loop {
        let f_val = mm.norm * mm.norm / two;
        if opts.record_history {
            history.push(f_val);
        }
        if mm.norm <= opts.epsilon {
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        // xi = i L is the Hermitian direction of steepest descent.
        let xi = mm.l.scaled(c::<S>(0.0, 1.0));
        let grad = ambient_norm(&orbit_derivative(&current, &xi));
        if grad <= opts.grad_tol {
            stalled = true;
            break;
        }
        let rate = two * grad * grad;

        let mut s = step;
        let mut accepted = None;
        while s >= opts.step_min {
            let (candidate, g_step) = try_step(&current, &xi, s);
            let mm_new = moment_map(&candidate, theta)?;
            let f_new = mm_new.norm * mm_new.norm / two;
            if f_new <= f_val - opts.armijo * s * rate {
                accepted = Some((candidate, g_step, mm_new));
                break;
            }
            s = s / two;
        }
        match accepted {
            Some((candidate, g_step, mm_new)) => {
                current = candidate;
                group = group.compose(&g_step);
                mm = mm_new;
                step = <S as num_traits::Float>::min(s * two, opts.step_max);
                iterations += 1;
            }
            None => {
                stalled = true;
                break;
            }
        }
    }

    Ok(FlowReport {
        initial: rho.clone(),
        final_rep: current,
        iterations,
        f_history: history,
        final_moment_norm: mm.norm,
        converged,
        stalled,
        group,
    })
}

/// One trial step `rho . exp(-s xi)` for Hermitian `xi`, computed without
/// matrix inversion: the inverse of `exp(-s xi)` is `exp(s xi)` exactly.
fn try_step<S: Real>(
    rep: &Representation<S>,
    xi: &LieElement<S>,
    s: S,
) -> (Representation<S>, GroupElement<S>) {
    let minus: Vec<CMat<S>> = xi
        .mats()
        .iter()
        .map(|m| linalg::matrix_exp(&(m * c::<S>(-s.to_f64(), 0.0))))
        .collect();
    let plus: Vec<CMat<S>> = xi
        .mats()
        .iter()
        .map(|m| linalg::matrix_exp(&(m * c::<S>(s.to_f64(), 0.0))))
        .collect();
    let mats = rep
        .quiver()
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, ar)| &plus[ar.dst] * rep.matrix(i) * &minus[ar.src])
        .collect();
    let candidate = Representation::new(rep.quiver().clone(), rep.dims().to_vec(), mats)
        .expect("shapes preserved by the action");
    (candidate, GroupElement::new(minus))
}

/// Decomposition of an Einstein–Hermitian representation into pairwise
/// orthogonal stable summands, each given as a witness inside the original
/// spaces.
#[derive(Debug, Clone)]
pub struct EhDecomposition<S: Real = f64> {
    pub summands: Vec<SubrepWitness<S>>,
    /// `max_{i != j, a} ‖W_i,a^H W_j,a‖`.
    pub orthogonality_residual: S,
}

/// Split an Einstein–Hermitian point into orthogonal stable summands by
/// eigen-splitting random Hermitian endomorphisms, recursively.
pub fn eh_orthogonal_decomposition<S: Real>(
    rep: &Representation<S>,
    theta: &[S],
    epsilon: S,
    seed: u64,
) -> Result<EhDecomposition<S>> {
    let mm = moment_map(rep, theta)?;
    if mm.norm > epsilon {
        return Err(Error::NotEinsteinHermitian(mm.norm.to_f64()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = SubrepWitness::full(rep);
    let mut summands = Vec::new();
    split_recursive(rep, theta, epsilon, &full, &mut rng, 0, &mut summands)?;

    let mut worst = S::zero();
    for i in 0..summands.len() {
        for j in 0..summands.len() {
            if i == j {
                continue;
            }
            for (wa, wb) in summands[i].basis().iter().zip(summands[j].basis()) {
                let gram = (wa.adjoint() * wb).norm();
                if gram > worst {
                    worst = gram;
                }
            }
        }
    }
    Ok(EhDecomposition {
        summands,
        orthogonality_residual: worst,
    })
}

fn split_recursive<S: Real>(
    ambient: &Representation<S>,
    theta: &[S],
    epsilon: S,
    witness: &SubrepWitness<S>,
    rng: &mut ChaCha8Rng,
    depth: usize,
    out: &mut Vec<SubrepWitness<S>>,
) -> Result<()> {
    if depth > ambient.rank() {
        return Err(Error::Numeric(
            "orthogonal decomposition did not terminate".into(),
        ));
    }
    let piece = subquotient(ambient, witness, S::of(1e-6))?.sub;
    let mm = moment_map(&piece, theta)?;
    if mm.norm > S::of(10.0) * epsilon {
        return Err(Error::NotEinsteinHermitian(mm.norm.to_f64()));
    }
    let basis = endomorphism_basis(&piece);
    if basis.len() <= 1 {
        out.push(witness.clone());
        return Ok(());
    }
    // Random Hermitian endomorphism: X + X^H stays an endomorphism at an
    // Einstein–Hermitian point, and its eigenspaces are subrepresentations.
    for _attempt in 0..8 {
        let coeffs: Vec<Complex<S>> = (0..basis.len())
            .map(|_| linalg::standard_complex_gaussian(rng))
            .collect();
        let x = Morphism::combine(&basis, &coeffs);
        let herm: Vec<CMat<S>> = x
            .components()
            .iter()
            .map(|m| m + m.adjoint())
            .collect();
        let y = Morphism::new(herm);
        if y.intertwining_residual(&piece, &piece) > S::of(1e-6) {
            continue;
        }
        let clusters = eigenvalue_clusters(&y);
        if clusters.len() < 2 {
            continue;
        }
        for (lo, hi) in clusters {
            let spans: Vec<CMat<S>> = y
                .components()
                .iter()
                .map(|m| {
                    if m.nrows() == 0 {
                        return CMat::zeros(0, 0);
                    }
                    let (eigs, vecs) = linalg::hermitian_eigen(m);
                    let cols: Vec<usize> = eigs
                        .iter()
                        .enumerate()
                        .filter(|&(_, &l)| l >= lo && l <= hi)
                        .map(|(i, _)| i)
                        .collect();
                    let mut span = CMat::<S>::zeros(m.nrows(), cols.len());
                    for (k, &i) in cols.iter().enumerate() {
                        span.set_column(k, &vecs.column(i));
                    }
                    span
                })
                .collect();
            let inner = SubrepWitness::from_spans(&piece, spans);
            if inner.rank() == 0 {
                continue;
            }
            // Lift to the ambient spaces: outer basis times inner basis.
            let lifted: Vec<CMat<S>> = witness
                .basis()
                .iter()
                .zip(inner.basis())
                .map(|(w, b)| w * b)
                .collect();
            let lifted_witness = SubrepWitness::from_spans(ambient, lifted);
            split_recursive(ambient, theta, epsilon, &lifted_witness, rng, depth + 1, out)?;
        }
        return Ok(());
    }
    Err(Error::Numeric(
        "no splitting endomorphism found at an Einstein-Hermitian point with dim End > 1".into(),
    ))
}

/// Gap-cluster the joint spectrum of a Hermitian endomorphism family into
/// disjoint `[lo, hi]` ranges.
fn eigenvalue_clusters<S: Real>(y: &Morphism<S>) -> Vec<(S, S)> {
    let mut all: Vec<S> = Vec::new();
    for m in y.components() {
        if m.nrows() == 0 {
            continue;
        }
        let (eigs, _) = linalg::hermitian_eigen(m);
        all.extend(eigs);
    }
    if all.is_empty() {
        return Vec::new();
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let spread = *all.last().unwrap() - all[0];
    let gap = S::of(1e-6) * (S::one() + spread);
    let mut clusters = Vec::new();
    let mut lo = all[0];
    let mut hi = all[0];
    for &l in &all[1..] {
        if l - hi > gap {
            clusters.push((lo - gap / S::of(2.0), hi + gap / S::of(2.0)));
            lo = l;
        }
        hi = l;
    }
    clusters.push((lo - gap / S::of(2.0), hi + gap / S::of(2.0)));
    clusters
}

/// Report of the uniqueness check: the isomorphism connecting two
/// Einstein–Hermitian Schur points is a scalar times a unitary family.
#[derive(Debug, Clone)]
pub struct EhUniquenessReport<S: Real = f64> {
    /// `|c|` with `g^H g = |c|^2 id`.
    pub scale: S,
    /// `max_a ‖g_a^H g_a - |c|^2 id‖ / |c|^2`.
    pub residual: S,
}

/// Verify that two isomorphic Einstein–Hermitian Schur representations are
/// connected by an element of (scalars x unitaries).
pub fn eh_uniqueness_check<S: Real>(
    rho: &Representation<S>,
    sigma: &Representation<S>,
    theta: &[S],
    epsilon: S,
) -> Result<EhUniquenessReport<S>> {
    for rep in [rho, sigma] {
        let mm = moment_map(rep, theta)?;
        if mm.norm > epsilon {
            return Err(Error::NotEinsteinHermitian(mm.norm.to_f64()));
        }
        let end_dim = endomorphism_basis(rep).len();
        if end_dim != 1 {
            return Err(Error::NotSchur(end_dim));
        }
    }
    let check = is_isomorphic(rho, sigma, &IsoOptions::default());
    let g = check.witness.ok_or(Error::NotIsomorphic)?;
    let mut tr = S::zero();
    for comp in g.components() {
        tr += (comp.adjoint() * comp).trace().re;
    }
    let c2 = tr / S::of(rho.rank() as f64);
    let mut worst = S::zero();
    for comp in g.components() {
        let d = comp.ncols();
        let res = (comp.adjoint() * comp
            - CMat::<S>::identity(d, d) * Complex::new(c2, S::zero()))
        .norm();
        if res > worst {
            worst = res;
        }
    }
    Ok(EhUniquenessReport {
        scale: <S as num_traits::Float>::sqrt(c2),
        residual: worst / c2,
    })
}
