//! Harder–Narasimhan and Jordan–Hölder filtrations, graded objects, and
//! S-equivalence.
//!
//! Both filtrations are stored bottom-heavy: the last nonzero term is the
//! distinguished subrepresentation (maximal destabilizer for HN, a stable
//! equal-slope subrep for JH), and the earlier terms are preimages of the
//! corresponding filtration of the quotient.  Factor `i` is
//! `terms[i-1] / terms[i]`, so HN factor slopes strictly increase along the
//! index and JH factor slopes all equal the slope of the whole
//! representation.  Every invariant is re-checked on the assembled output in
//! exact rational arithmetic.

use num::BigRational;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMat};
use crate::rep::{subquotient, Representation, SubrepWitness};
use crate::scalar::Real;
use crate::search::{SearchOptions, SubspaceSearcher};
use crate::stability::{classify_stability, ClassifyOptions, Verdict};
use crate::weight::{slope, Weight};

/// A finite filtration of a representation by nested subrepresentations.
#[derive(Debug, Clone)]
pub struct Filtration<S: Real = f64> {
    /// `terms[0]` is the full space, `terms[n]` is zero, and every witness
    /// is expressed relative to the filtered representation.
    pub terms: Vec<SubrepWitness<S>>,
    /// `factors[i] = terms[i] / terms[i+1]`, in its own coordinates.
    pub factors: Vec<Representation<S>>,
    /// Exact slope of each factor.
    pub factor_slopes: Vec<BigRational>,
    /// Irregularities (search incompleteness, skipped candidates).
    pub flags: Vec<String>,
}

impl<S: Real> Filtration<S> {
    /// Number of factors.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// A single-step filtration: the representation was already of the
    /// requested kind.
    pub fn is_trivial(&self) -> bool {
        self.factors.len() == 1
    }

    /// Largest deviation from nesting and invariance across the terms.
    pub fn witness_residual(&self) -> S {
        let mut worst = S::zero();
        for w in &self.terms {
            if w.residual() > worst {
                worst = w.residual();
            }
        }
        for pair in self.terms.windows(2) {
            let r = containment_residual(&pair[1], &pair[0]);
            if r > worst {
                worst = r;
            }
        }
        worst
    }
}

/// `max_a ‖(I - P_outer) B_inner‖`: how far `inner` sticks out of `outer`.
fn containment_residual<S: Real>(inner: &SubrepWitness<S>, outer: &SubrepWitness<S>) -> S {
    let mut worst = S::zero();
    for (bi, bo) in inner.basis().iter().zip(outer.basis()) {
        if bi.ncols() == 0 {
            continue;
        }
        let proj = bo * (bo.adjoint() * bi);
        let r = frobenius(&(bi - proj));
        if r > worst {
            worst = r;
        }
    }
    worst
}

/// Tuning for the filtration builders.
#[derive(Debug, Clone, Default)]
pub struct FiltrationOptions<S: Real = f64> {
    pub search: SearchOptions<S>,
    pub classify: ClassifyOptions<S>,
    /// Re-classify every factor (semistable for HN, stable for JH).  On by
    /// default; turning it off skips the per-factor flow runs.
    pub skip_verification: bool,
}

/// Computes the Harder–Narasimhan filtration: the last nonzero term is the
/// maximal destabilizing subrepresentation, the rest is the pulled-back
/// filtration of the quotient.  Factor slopes strictly increase.
pub fn hn_filtration<S: Real>(
    rep: &Representation<S>,
    theta: &Weight,
    opts: &FiltrationOptions<S>,
) -> Result<Filtration<S>> {
    if theta.len() != rep.quiver().num_vertices() {
        return Err(Error::DimensionMismatch);
    }
    slope(theta, rep.dims())?;

    let mut flags = Vec::new();
    let (terms, factors) = hn_build(rep, theta, opts, &mut flags)?;
    let filtration = assemble(rep, theta, terms, factors, flags)?;

    for pair in filtration.factor_slopes.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::Numeric(format!(
                "Harder–Narasimhan factor slopes fail to increase: {} then {}",
                pair[0], pair[1],
            )));
        }
    }
    if !opts.skip_verification {
        for factor in &filtration.factors {
            let cls = classify_stability(factor, theta, &opts.classify)?;
            if !cls.verdict.is_semistable() {
                return Err(Error::Numeric(format!(
                    "Harder–Narasimhan factor with dims {:?} classifies as {}",
                    factor.dims(),
                    cls.verdict.label(),
                )));
            }
        }
    }
    Ok(filtration)
}

fn hn_build<S: Real>(
    rep: &Representation<S>,
    theta: &Weight,
    opts: &FiltrationOptions<S>,
    flags: &mut Vec<String>,
) -> Result<(Vec<SubrepWitness<S>>, Vec<Representation<S>>)> {
    // strict destabilizers only: a semistable stage ends the recursion, and
    // taking an equal-slope subrep here would break the strict slope increase
    let mut search_opts = opts.search.clone();
    search_opts.include_equality = false;
    let found = crate::search::find_destabilizing_subrep(rep, theta, &search_opts)?;
    if !found.exhaustive && found.witness.is_none() {
        flags.push(format!(
            "destabilizer search at dims {:?} was not exhaustive; stage treated as semistable",
            rep.dims(),
        ));
    }
    let witness = match found.witness {
        None => {
            return Ok((
                vec![SubrepWitness::full(rep), SubrepWitness::zero(rep)],
                vec![rep.clone()],
            ))
        }
        Some(w) => w,
    };

    let split = subquotient(rep, &witness, opts.search.tol)?;
    let (q_terms, q_factors) = hn_build(&split.quot, theta, opts, flags)?;
    let terms = pull_back_terms(rep, &witness, &split.quot_basis, &q_terms);
    let mut factors = q_factors;
    factors.push(split.sub);
    Ok((terms, factors))
}

/// Lifts a filtration of the quotient through `rep -> rep / witness`: the
/// preimage of a quotient term is the witness plus the embedded term, and the
/// preimage of zero is the witness itself.  A trailing zero term is added.
fn pull_back_terms<S: Real>(
    rep: &Representation<S>,
    witness: &SubrepWitness<S>,
    quot_basis: &[CMat<S>],
    q_terms: &[SubrepWitness<S>],
) -> Vec<SubrepWitness<S>> {
    let mut terms = Vec::with_capacity(q_terms.len() + 1);
    for qt in q_terms {
        let spans: Vec<CMat<S>> = witness
            .basis()
            .iter()
            .zip(quot_basis)
            .zip(qt.basis())
            .map(|((wb, qb), tb)| {
                let lifted = qb * tb;
                let mut span = CMat::<S>::zeros(wb.nrows(), wb.ncols() + lifted.ncols());
                span.view_mut((0, 0), (wb.nrows(), wb.ncols())).copy_from(wb);
                span.view_mut((0, wb.ncols()), (lifted.nrows(), lifted.ncols()))
                    .copy_from(&lifted);
                span
            })
            .collect();
        terms.push(SubrepWitness::from_spans(rep, spans));
    }
    terms.push(SubrepWitness::zero(rep));
    terms
}

/// Shared assembly: computes exact factor slopes from the term dimension
/// drops, and checks nesting, dimension bookkeeping, and witness quality.
fn assemble<S: Real>(
    rep: &Representation<S>,
    theta: &Weight,
    terms: Vec<SubrepWitness<S>>,
    factors: Vec<Representation<S>>,
    flags: Vec<String>,
) -> Result<Filtration<S>> {
    assert_eq!(terms.len(), factors.len() + 1);
    debug_assert_eq!(terms[0].subdims(), rep.dims());
    let mut factor_slopes = Vec::with_capacity(factors.len());
    for (i, factor) in factors.iter().enumerate() {
        let drop: Vec<usize> = terms[i]
            .subdims()
            .iter()
            .zip(terms[i + 1].subdims())
            .map(|(&a, &b)| {
                a.checked_sub(b)
                    .expect("filtration terms must have decreasing subdims")
            })
            .collect();
        if drop != factor.dims() {
            return Err(Error::Numeric(format!(
                "filtration factor {} has dims {:?} but the term drop is {:?}",
                i,
                factor.dims(),
                drop,
            )));
        }
        factor_slopes.push(slope(theta, &drop)?.slope);
    }

    let filtration = Filtration {
        terms,
        factors,
        factor_slopes,
        flags,
    };
    let residual = filtration.witness_residual();
    if residual > S::of(1e-6) {
        return Err(Error::Numeric(format!(
            "filtration witnesses drift from invariance/nesting by {:.3e}",
            residual.to_f64(),
        )));
    }
    Ok(filtration)
}

/// Computes a Jordan–Hölder filtration of a semistable representation: each
/// factor is stable of the same slope.  The factor multiset is unique up to
/// isomorphism and order; the filtration itself is not.
pub fn jh_filtration<S: Real>(
    rep: &Representation<S>,
    theta: &Weight,
    opts: &FiltrationOptions<S>,
) -> Result<Filtration<S>> {
    if theta.len() != rep.quiver().num_vertices() {
        return Err(Error::DimensionMismatch);
    }
    let cls = classify_stability(rep, theta, &opts.classify)?;
    if !cls.verdict.is_semistable() {
        return Err(Error::NotSemistable);
    }

    let mut flags = Vec::new();
    let (terms, factors) = jh_build(rep, theta, opts, &mut flags, Some(cls.verdict))?;
    let filtration = assemble(rep, theta, terms, factors, flags)?;

    let mu = slope(theta, rep.dims())?.slope;
    for s in &filtration.factor_slopes {
        if *s != mu {
            return Err(Error::Numeric(format!(
                "Jordan–Hölder factor slope {} differs from the total slope {}",
                s, mu,
            )));
        }
    }
    Ok(filtration)
}

fn jh_build<S: Real>(
    rep: &Representation<S>,
    theta: &Weight,
    opts: &FiltrationOptions<S>,
    flags: &mut Vec<String>,
    known_verdict: Option<Verdict>,
) -> Result<(Vec<SubrepWitness<S>>, Vec<Representation<S>>)> {
    let verdict = match known_verdict {
        Some(v) => v,
        None => {
            let cls = classify_stability(rep, theta, &opts.classify)?;
            if !cls.verdict.is_semistable() {
                return Err(Error::Numeric(format!(
                    "Jordan–Hölder stage with dims {:?} classifies as {}",
                    rep.dims(),
                    cls.verdict.label(),
                )));
            }
            cls.verdict
        }
    };
    if verdict == Verdict::Stable {
        return Ok((
            vec![SubrepWitness::full(rep), SubrepWitness::zero(rep)],
            vec![rep.clone()],
        ));
    }

    let mu = slope(theta, rep.dims())?.slope;
    let searcher = SubspaceSearcher::new(rep, &opts.search);

    // proper nonzero equal-slope subdimension vectors, smallest rank first:
    // a minimal-rank invariant subspace of the right slope is automatically
    // stable, and small subs terminate the recursion fastest
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    let d = rep.dims();
    let mut e = vec![0usize; d.len()];
    loop {
        let rank: usize = e.iter().sum();
        if rank > 0 && e.iter().zip(d).any(|(x, y)| x < y) && slope(theta, &e)?.slope == mu {
            candidates.push(e.clone());
        }
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
    candidates.sort_by(|a, b| {
        let ra: usize = a.iter().sum();
        let rb: usize = b.iter().sum();
        ra.cmp(&rb).then_with(|| a.cmp(b))
    });

    for e in &candidates {
        let Some((witness, _method)) = searcher.witness_for(e) else {
            continue;
        };
        let split = subquotient(rep, &witness, opts.search.tol)?;
        let sub_cls = classify_stability(&split.sub, theta, &opts.classify)?;
        if sub_cls.verdict != Verdict::Stable {
            flags.push(format!(
                "equal-slope subrep at subdims {:?} classifies as {}; skipped",
                e,
                sub_cls.verdict.label(),
            ));
            continue;
        }
        let (q_terms, q_factors) = jh_build(&split.quot, theta, opts, flags, None)?;
        let terms = pull_back_terms(rep, &witness, &split.quot_basis, &q_terms);
        let mut factors = q_factors;
        factors.push(split.sub);
        return Ok((terms, factors));
    }

    Err(Error::Numeric(format!(
        "no stable equal-slope subrepresentation found at dims {:?}; \
         the candidate search is incomplete here",
        rep.dims(),
    )))
}

/// Direct sum of the Jordan–Hölder factors: the polystable degeneration.
pub fn graded_object<S: Real>(
    rep: &Representation<S>,
    theta: &Weight,
    opts: &FiltrationOptions<S>,
) -> Result<Representation<S>> {
    let filtration = jh_filtration(rep, theta, opts)?;
    let refs: Vec<&Representation<S>> = filtration.factors.iter().collect();
    Representation::direct_sum(rep.quiver(), &refs)
}

/// Two semistable representations are S-equivalent when their Jordan–Hölder
/// factor multisets match up to isomorphism.
pub fn s_equivalent<S: Real>(
    m: &Representation<S>,
    n: &Representation<S>,
    theta: &Weight,
    opts: &FiltrationOptions<S>,
) -> Result<bool> {
    if m.dims() != n.dims() {
        return Err(Error::DimensionMismatch);
    }
    let fm = jh_filtration(m, theta, opts)?;
    let fn_ = jh_filtration(n, theta, opts)?;
    if fm.len() != fn_.len() {
        return Ok(false);
    }
    let mut used = vec![false; fn_.len()];
    for gm in &fm.factors {
        let mut matched = false;
        for (j, gn) in fn_.factors.iter().enumerate() {
            if used[j] || gm.dims() != gn.dims() {
                continue;
            }
            if crate::hom::is_isomorphic(gm, gn, &opts.classify.iso).isomorphic {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that a Jordan–Hölder filtration computed at one weight is still a
/// Jordan–Hölder filtration at `omega`: factor slopes all equal the total
/// slope, and every factor is still stable.  Failure means the two weights
/// do not lie in a common facet.
pub fn revalidate_jh_at_weight<S: Real>(
    rep: &Representation<S>,
    filtration: &Filtration<S>,
    omega: &Weight,
    opts: &FiltrationOptions<S>,
) -> Result<()> {
    let mu = slope(omega, rep.dims())?.slope;
    for factor in &filtration.factors {
        if slope(omega, factor.dims())?.slope != mu {
            return Err(Error::DifferentFacets);
        }
    }
    if !opts.skip_verification {
        for factor in &filtration.factors {
            let cls = classify_stability(factor, omega, &opts.classify)?;
            if cls.verdict != Verdict::Stable {
                return Err(Error::DifferentFacets);
            }
        }
    }
    Ok(())
}
