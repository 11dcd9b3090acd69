//! Search for destabilizing subrepresentations.
//!
//! Given a representation `M` with dimension vector `d` and a rational weight
//! `theta`, this module looks for a proper nonzero subrepresentation whose
//! slope exceeds (or, in equality mode, at least matches) the slope of `M`.
//! Candidate subdimension vectors are scanned from the most destabilizing
//! downwards, so the first hit is a maximal destabilizer.
//!
//! Three passes run for each candidate subdimension vector:
//!
//! 1. an exact pass over vertex-support subspaces (every coordinate either
//!    fully inside or fully outside), which is complete for those vectors
//!    because the subspace at a "full" vertex is forced;
//! 2. an exact pass over kernels and images of endomorphisms, including
//!    spectral shifts `f - lambda` so that eigenline subrepresentations of
//!    loops are found;
//! 3. a seeded multi-start projected-gradient minimization of the invariance
//!    residual over products of Grassmannians, with thin-QR retraction.
//!
//! The heuristic pass can miss witnesses, so the outcome records whether the
//! exact passes alone covered every qualifying subdimension vector.

use std::collections::BTreeMap;

use num::complex::Complex;
use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hom::{endomorphism_basis, Morphism};
use crate::linalg::{frobenius, gaussian_matrix, CMat};
use crate::rep::{Representation, SubrepWitness};
use crate::scalar::Real;
use crate::weight::{slope, Weight};

/// Tuning knobs for [`find_destabilizing_subrep`].
#[derive(Debug, Clone)]
pub struct SearchOptions<S: Real = f64> {
    /// Acceptance threshold for the invariance residual of a witness.
    pub tol: S,
    /// Accept witnesses with slope equal to the slope of the whole
    /// representation (used when splitting semistables into stables).
    pub include_equality: bool,
    /// Number of random starts per subdimension vector in the heuristic pass.
    pub starts: usize,
    /// Gradient-descent iteration budget per start.
    pub iters: usize,
    /// Base seed for the heuristic starts and random endomorphism combos.
    pub seed: u64,
    /// Worker threads for the multi-start pass; `None` reads `QMOD_THREADS`
    /// and falls back to 1.  Results do not depend on the thread count.
    pub threads: Option<usize>,
    /// Skip the heuristic pass entirely (exact passes only).
    pub skip_heuristic: bool,
}

impl<S: Real> Default for SearchOptions<S> {
    fn default() -> Self {
        SearchOptions {
            tol: S::of(1e-8),
            include_equality: false,
            starts: 32,
            iters: 500,
            seed: 0x5eac4,
            threads: None,
            skip_heuristic: false,
        }
    }
}

/// Which pass produced a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    VertexSupport,
    Endomorphism,
    Heuristic,
}

/// Result of a destabilizer search.
#[derive(Debug, Clone)]
pub struct SearchOutcome<S: Real = f64> {
    /// A maximal destabilizing subrepresentation, if one was found.
    pub witness: Option<SubrepWitness<S>>,
    /// Slope data of the witness's subdimension vector.
    pub witness_slope: Option<BigRational>,
    /// True when the exact passes alone covered every qualifying
    /// subdimension vector, so "no witness" is a proof of semistability.
    pub exhaustive: bool,
    /// Pass that found the witness.
    pub method: Option<SearchMethod>,
}

impl<S: Real> SearchOutcome<S> {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }
}

/// Searches for a proper nonzero subrepresentation of maximal slope subject
/// to `mu(sub) > mu(M)` (or `>=` in equality mode).  Candidates are ordered
/// by slope, then total rank, then lexicographically, all descending, so the
/// returned witness is maximal for that order among everything found.
pub fn find_destabilizing_subrep<S: Real>(
    rep: &Representation<S>,
    theta: &Weight,
    opts: &SearchOptions<S>,
) -> Result<SearchOutcome<S>> {
    let d = rep.dims();
    if theta.len() != d.len() {
        return Err(Error::DimensionMismatch);
    }
    let total = slope(theta, d)?;

    // All proper nonzero subdimension vectors that would (weakly) destabilize,
    // from the most destabilizing downwards.
    let mut qualifying: Vec<(Vec<usize>, BigRational)> = Vec::new();
    let mut e = vec![0usize; d.len()];
    loop {
        let rank: usize = e.iter().sum();
        let proper = rank > 0 && e.iter().zip(d).any(|(x, y)| x < y);
        if proper {
            let se = slope(theta, &e)?;
            let qualifies = if opts.include_equality {
                se.slope >= total.slope
            } else {
                se.slope > total.slope
            };
            if qualifies {
                qualifying.push((e.clone(), se.slope));
            }
        }
        // odometer over the box [0, d]
        let mut carry = true;
        for (x, &cap) in e.iter_mut().zip(d) {
            if *x < cap {
                *x += 1;
                carry = false;
                break;
            }
            *x = 0;
        }
        if carry {
            break;
        }
    }
    qualifying.sort_by(|(ea, sa), (eb, sb)| {
        sb.cmp(sa)
            .then_with(|| {
                let ra: usize = ea.iter().sum();
                let rb: usize = eb.iter().sum();
                rb.cmp(&ra)
            })
            .then_with(|| eb.cmp(ea))
    });

    let searcher = SubspaceSearcher::new(rep, opts);
    let exhaustive = qualifying.iter().all(|(e, _)| searcher.support_type(e));

    for (e, sl) in &qualifying {
        if let Some((w, method)) = searcher.witness_for(e) {
            return Ok(SearchOutcome {
                witness: Some(w),
                witness_slope: Some(sl.clone()),
                exhaustive,
                method: Some(method),
            });
        }
    }

    Ok(SearchOutcome {
        witness: None,
        witness_slope: None,
        exhaustive,
        method: None,
    })
}

/// Per-subdimension-vector witness machinery, shared by the destabilizer
/// search and the filtration builders (which scan candidates in a different
/// order).
pub(crate) struct SubspaceSearcher<'a, S: Real> {
    rep: &'a Representation<S>,
    opts: &'a SearchOptions<S>,
    endo: BTreeMap<Vec<usize>, SubrepWitness<S>>,
}

impl<'a, S: Real> SubspaceSearcher<'a, S> {
    pub(crate) fn new(rep: &'a Representation<S>, opts: &'a SearchOptions<S>) -> Self {
        SubspaceSearcher {
            rep,
            opts,
            endo: endomorphism_candidates(rep, opts),
        }
    }

    /// Every component either zero or full; for such vectors the candidate
    /// subspace is forced, so the exact check below is complete.
    pub(crate) fn support_type(&self, e: &[usize]) -> bool {
        e.iter()
            .zip(self.rep.dims())
            .all(|(&x, &y)| x == 0 || x == y)
    }

    /// Best witness with the given subdimensions, trying the exact passes
    /// before the heuristic one.
    pub(crate) fn witness_for(&self, e: &[usize]) -> Option<(SubrepWitness<S>, SearchMethod)> {
        if self.support_type(e) {
            let support: Vec<bool> = e.iter().map(|&x| x > 0).collect();
            let w = SubrepWitness::vertex_span(self.rep, &support);
            if w.residual() <= self.opts.tol {
                return Some((w, SearchMethod::VertexSupport));
            }
            // the subspace at a full vertex is forced, so this candidate is
            // the only one with these subdimensions
            return None;
        }
        if let Some(w) = self.endo.get(e) {
            return Some((w.clone(), SearchMethod::Endomorphism));
        }
        if !self.opts.skip_heuristic {
            if let Some(w) = invariant_subspace_search(self.rep, e, self.opts) {
                return Some((w, SearchMethod::Heuristic));
            }
        }
        None
    }
}

/// Kernels and images of endomorphisms (and their spectral shifts), bucketed
/// by subdimension vector, keeping the smallest residual per bucket.
fn endomorphism_candidates<S: Real>(
    rep: &Representation<S>,
    opts: &SearchOptions<S>,
) -> BTreeMap<Vec<usize>, SubrepWitness<S>> {
    let mut out: BTreeMap<Vec<usize>, SubrepWitness<S>> = BTreeMap::new();
    let basis = endomorphism_basis(rep);
    if basis.is_empty() {
        return out;
    }

    let mut elements: Vec<Morphism<S>> = basis.clone();
    if basis.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xe2d0);
        for _ in 0..4 {
            let coeffs: Vec<Complex<S>> = (0..basis.len())
                .map(|_| crate::linalg::standard_complex_gaussian(&mut rng))
                .collect();
            elements.push(Morphism::combine(&basis, &coeffs));
        }
    }

    let mut consider = |w: SubrepWitness<S>| {
        if w.rank() == 0 || w.subdims() == rep.dims() || w.residual() > opts.tol {
            return;
        }
        let key = w.subdims().to_vec();
        match out.get(&key) {
            Some(best) if best.residual() <= w.residual() => {}
            _ => {
                out.insert(key, w);
            }
        }
    };

    for f in &elements {
        let mut shifts = vec![Complex::new(S::zero(), S::zero())];
        shifts.extend(spectrum_shifts(f));
        for lambda in &shifts {
            let shifted = Morphism::new(
                f.components()
                    .iter()
                    .map(|m| {
                        let mut g = m.clone();
                        for k in 0..g.nrows().min(g.ncols()) {
                            g[(k, k)] -= *lambda;
                        }
                        g
                    })
                    .collect(),
            );
            consider(shifted.kernel(rep));
            consider(shifted.image(rep));
        }
    }
    out
}

/// Deduplicated approximate eigenvalues of an endomorphism across all
/// vertices, read off the triangular factor of a complex Schur form.
fn spectrum_shifts<S: Real>(f: &Morphism<S>) -> Vec<Complex<S>> {
    let mut values: Vec<Complex<S>> = Vec::new();
    for m in f.components() {
        if m.nrows() == 0 {
            continue;
        }
        if let Some(schur) = m.clone().try_schur(S::of(1e-12), 200) {
            let t = schur.unpack().1;
            for k in 0..t.nrows() {
                values.push(t[(k, k)]);
            }
        }
    }
    let spread = values
        .iter()
        .map(|v| v.norm())
        .fold(S::zero(), |a, b| if a > b { a } else { b });
    let gap = S::of(1e-8) * (S::one() + spread);
    let mut distinct: Vec<Complex<S>> = Vec::new();
    for v in values {
        if !distinct.iter().any(|u| (*u - v).norm() < gap) {
            distinct.push(v);
        }
    }
    distinct
}

/// Multi-start projected-gradient minimization of
/// `sum_a ||(I - P_dst) rho_a P_src||_F^2` over frames with the prescribed
/// column counts.  Starts run in parallel; the winner is chosen by
/// (residual, start index), so the result is independent of scheduling.
fn invariant_subspace_search<S: Real>(
    rep: &Representation<S>,
    subdims: &[usize],
    opts: &SearchOptions<S>,
) -> Option<SubrepWitness<S>> {
    let threads = opts
        .threads
        .or_else(|| {
            std::env::var("QMOD_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1)
        .max(1);

    let mut tag = 0u64;
    for &x in subdims {
        tag = tag.wrapping_mul(1099511628211).wrapping_add(x as u64 + 1);
    }

    let run_start = |start: usize| -> Option<(S, usize, SubrepWitness<S>)> {
        let seed = opts
            .seed
            .wrapping_add(tag)
            .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(start as u64 + 1));
        let w = descend_invariance(rep, subdims, seed, opts.iters)?;
        Some((w.residual(), start, w))
    };

    let mut results: Vec<(S, usize, SubrepWitness<S>)> = if threads <= 1 {
        (0..opts.starts).filter_map(run_start).collect()
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for chunk in 0..threads {
                let run = &run_start;
                handles.push(scope.spawn(move || {
                    (chunk..opts.starts)
                        .step_by(threads)
                        .filter_map(run)
                        .collect::<Vec<_>>()
                }));
            }
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("search worker panicked"))
                .collect()
        })
    };

    results.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    results
        .into_iter()
        .next()
        .filter(|(residual, _, _)| *residual <= opts.tol)
        .map(|(_, _, w)| w)
}

/// Single projected-gradient descent on the product of Grassmannians.
fn descend_invariance<S: Real>(
    rep: &Representation<S>,
    subdims: &[usize],
    seed: u64,
    iters: usize,
) -> Option<SubrepWitness<S>> {
    let d = rep.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames: Vec<CMat<S>> = d
        .iter()
        .zip(subdims)
        .map(|(&da, &ea)| thin_q(&gaussian_matrix::<S>(&mut rng, da, ea)))
        .collect();

    let scale: S = rep
        .matrices()
        .iter()
        .map(|m| frobenius(m))
        .fold(S::zero(), |a, b| a + b * b);
    let mut eta = S::of(0.5) / (S::one() + scale);
    let mut phi = invariance_objective(rep, &frames);
    let armijo = S::of(1e-4);

    for _ in 0..iters {
        if phi <= S::of(1e-20) {
            break;
        }
        // project onto the tangent space at the current frames; the normal
        // component is killed by the retraction, so leaving it in would
        // inflate the Armijo denominator and stall the line search
        let grads: Vec<CMat<S>> = invariance_gradient(rep, &frames)
            .into_iter()
            .zip(&frames)
            .map(|(g, w)| {
                if w.ncols() == 0 {
                    g
                } else {
                    &g - w * (w.adjoint() * &g)
                }
            })
            .collect();
        let gnorm2: S = grads
            .iter()
            .map(|g| {
                let n = frobenius(g);
                n * n
            })
            .fold(S::zero(), |a, b| a + b);
        if gnorm2 <= S::of(1e-30) {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<CMat<S>> = frames
                .iter()
                .zip(&grads)
                .map(|(w, g)| {
                    let step = w - g * Complex::new(eta, S::zero());
                    thin_q(&step)
                })
                .collect();
            let phi_trial = invariance_objective(rep, &trial);
            if phi_trial <= phi - armijo * eta * gnorm2 {
                frames = trial;
                phi = phi_trial;
                eta = eta * S::of(1.5);
                accepted = true;
                break;
            }
            eta = eta * S::of(0.5);
            if eta < S::of(1e-18) {
                break;
            }
        }
        if !accepted {
            break;
        }
    }

    Some(SubrepWitness::from_spans(rep, frames))
}

fn invariance_objective<S: Real>(rep: &Representation<S>, frames: &[CMat<S>]) -> S {
    let mut phi = S::zero();
    for (k, arrow) in rep.quiver().arrows().iter().enumerate() {
        let ws = &frames[arrow.src];
        let wt = &frames[arrow.dst];
        if ws.ncols() == 0 {
            continue;
        }
        let u = rep.matrix(k) * ws;
        let v = &u - wt * (wt.adjoint() * &u);
        let n = frobenius(&v);
        phi += n * n;
    }
    phi
}

fn invariance_gradient<S: Real>(rep: &Representation<S>, frames: &[CMat<S>]) -> Vec<CMat<S>> {
    let d = rep.dims();
    let mut grads: Vec<CMat<S>> = d
        .iter()
        .zip(frames)
        .map(|(&da, w)| CMat::<S>::zeros(da, w.ncols()))
        .collect();
    for (k, arrow) in rep.quiver().arrows().iter().enumerate() {
        let ws = &frames[arrow.src];
        let wt = &frames[arrow.dst];
        if ws.ncols() == 0 {
            continue;
        }
        let rho = rep.matrix(k);
        let u = rho * ws;
        let v = &u - wt * (wt.adjoint() * &u);
        grads[arrow.src] += rho.adjoint() * &v;
        if wt.ncols() > 0 {
            grads[arrow.dst] -= &u * (u.adjoint() * wt);
        }
    }
    grads
}

/// Thin QR orthonormalization that preserves the column count even when the
/// input is numerically rank-deficient (unlike an SVD-based span).
fn thin_q<S: Real>(m: &CMat<S>) -> CMat<S> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return m.clone();
    }
    m.clone().qr().q()
}
