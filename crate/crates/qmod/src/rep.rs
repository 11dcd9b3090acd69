//! Representations of a quiver: a complex vector space per vertex, a matrix
//! per arrow, plus subspace witnesses and the sub/quotient constructions.

use std::sync::Arc;

use num::complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::quiver::Quiver;
use crate::scalar::Real;

/// Entry distributions for randomly sampled representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distribution {
    /// i.i.d. standard complex Gaussian entries.
    #[default]
    ComplexGaussian,
    /// i.i.d. entries uniform on the closed unit disk.
    UnitDisk,
}

/// A finite-dimensional representation: `dims[a]` is the dimension at vertex
/// `a` and `mats[alpha]` the matrix of arrow `alpha`, of shape
/// `dims[dst] x dims[src]`.
#[derive(Debug, Clone)]
pub struct Representation<S: Real = f64> {
    quiver: Arc<Quiver>,
    dims: Vec<usize>,
    mats: Vec<CMat<S>>,
}

impl<S: Real> Representation<S> {
    /// Build a representation, validating every matrix shape against the
    /// dimension vector.
    pub fn new(quiver: Arc<Quiver>, dims: Vec<usize>, mats: Vec<CMat<S>>) -> Result<Self> {
        assert_eq!(dims.len(), quiver.num_vertices(), "one dimension per vertex");
        assert_eq!(mats.len(), quiver.arrows().len(), "one matrix per arrow");
        for (arrow, m) in quiver.arrows().iter().zip(&mats) {
            let (want_rows, want_cols) = (dims[arrow.dst], dims[arrow.src]);
            if m.nrows() != want_rows || m.ncols() != want_cols {
                return Err(Error::ShapeMismatch {
                    arrow: arrow.id.clone(),
                    got_rows: m.nrows(),
                    got_cols: m.ncols(),
                    want_rows,
                    want_cols,
                });
            }
        }
        Ok(Representation { quiver, dims, mats })
    }

    /// The representation with the given dimensions and all matrices zero.
    pub fn zero(quiver: Arc<Quiver>, dims: Vec<usize>) -> Self {
        let mats = quiver
            .arrows()
            .iter()
            .map(|a| CMat::zeros(dims[a.dst], dims[a.src]))
            .collect();
        Representation { quiver, dims, mats }
    }

    /// Random representation with i.i.d. entries, deterministic per seed.
    pub fn random(quiver: Arc<Quiver>, dims: Vec<usize>, seed: u64, dist: Distribution) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats = quiver
            .arrows()
            .iter()
            .map(|a| {
                let (rows, cols) = (dims[a.dst], dims[a.src]);
                match dist {
                    Distribution::ComplexGaussian => linalg::gaussian_matrix(&mut rng, rows, cols),
                    Distribution::UnitDisk => CMat::from_fn(rows, cols, |_, _| {
                        use rand::Rng;
                        loop {
                            let re: f64 = rng.gen_range(-1.0..=1.0);
                            let im: f64 = rng.gen_range(-1.0..=1.0);
                            if re * re + im * im <= 1.0 {
                                break Complex::new(S::of(re), S::of(im));
                            }
                        }
                    }),
                }
            })
            .collect();
        Representation { quiver, dims, mats }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    /// The dimension vector `(dim V_a)_a`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total dimension `sum_a dim V_a`.
    pub fn rank(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn matrix(&self, arrow: usize) -> &CMat<S> {
        &self.mats[arrow]
    }

    pub fn matrices(&self) -> &[CMat<S>] {
        &self.mats
    }

    pub fn matrices_mut(&mut self) -> &mut [CMat<S>] {
        &mut self.mats
    }

    /// All matrices scaled by the same complex number.
    pub fn scaled(&self, c: Complex<S>) -> Self {
        let mats = self.mats.iter().map(|m| m * c).collect();
        Representation {
            quiver: self.quiver.clone(),
            dims: self.dims.clone(),
            mats,
        }
    }

    /// Square root of the summed squared Frobenius norms of the matrices.
    pub fn norm(&self) -> S {
        let mut acc = S::zero();
        for m in &self.mats {
            let n = m.norm();
            acc += n * n;
        }
        <S as num_traits::Float>::sqrt(acc)
    }

    /// Entry-wise distance to another representation of the same shape.
    pub fn distance(&self, other: &Self) -> S {
        let mut acc = S::zero();
        for (a, b) in self.mats.iter().zip(&other.mats) {
            let n = (a - b).norm();
            acc += n * n;
        }
        <S as num_traits::Float>::sqrt(acc)
    }

    /// Direct sum of representations on a common quiver (block-diagonal
    /// matrices, dimensions add).  The empty sum is the zero representation.
    pub fn direct_sum(quiver: &Arc<Quiver>, summands: &[&Representation<S>]) -> Result<Self> {
        for s in summands {
            if *s.quiver() != *quiver {
                return Err(Error::QuiverMismatch);
            }
        }
        let n = quiver.num_vertices();
        let dims: Vec<usize> = (0..n)
            .map(|a| summands.iter().map(|s| s.dims[a]).sum())
            .collect();
        let mut mats = Vec::with_capacity(quiver.arrows().len());
        for (idx, arrow) in quiver.arrows().iter().enumerate() {
            let mut m = CMat::zeros(dims[arrow.dst], dims[arrow.src]);
            let mut row = 0;
            let mut col = 0;
            for s in summands {
                let block = &s.mats[idx];
                m.view_mut((row, col), block.shape()).copy_from(block);
                row += block.nrows();
                col += block.ncols();
            }
            mats.push(m);
        }
        Ok(Representation {
            quiver: quiver.clone(),
            dims,
            mats,
        })
    }

    /// Convenience constructor for the two-vertex Kronecker quiver with
    /// dimension vector `(1, 1)` and arrow scalars `a`, `b`.
    pub fn kronecker(a: Complex<S>, b: Complex<S>) -> Self {
        let quiver = Quiver::kronecker();
        let mats = vec![
            CMat::from_element(1, 1, a),
            CMat::from_element(1, 1, b),
        ];
        Representation {
            quiver,
            dims: vec![1, 1],
            mats,
        }
    }
}

/// Certificate of a (near-)subrepresentation: one orthonormal-column basis
/// per vertex, together with the invariance residual
/// `max_alpha ‖(I - P_dst) rho_alpha P_src‖_F`.
#[derive(Debug, Clone)]
pub struct SubrepWitness<S: Real = f64> {
    basis: Vec<CMat<S>>,
    subdims: Vec<usize>,
    residual: S,
}

impl<S: Real> SubrepWitness<S> {
    /// Orthonormalise the given per-vertex spans and measure how far they
    /// are from being arrow-invariant in `rep`.
    pub fn from_spans(rep: &Representation<S>, spans: Vec<CMat<S>>) -> Self {
        assert_eq!(spans.len(), rep.dims().len(), "one span per vertex");
        let basis: Vec<CMat<S>> = spans
            .iter()
            .zip(rep.dims())
            .map(|(span, &d)| {
                assert_eq!(span.nrows(), d, "span rows match vertex dimension");
                linalg::orthonormalize(span)
            })
            .collect();
        let subdims = basis.iter().map(|b| b.ncols()).collect();
        let residual = invariance_residual(rep, &basis);
        SubrepWitness {
            basis,
            subdims,
            residual,
        }
    }

    /// The full spaces: always invariant.
    pub fn full(rep: &Representation<S>) -> Self {
        let basis = rep.dims().iter().map(|&d| CMat::identity(d, d)).collect();
        SubrepWitness {
            basis,
            subdims: rep.dims().to_vec(),
            residual: S::zero(),
        }
    }

    /// The zero spaces: always invariant.
    pub fn zero(rep: &Representation<S>) -> Self {
        let basis = rep.dims().iter().map(|&d| CMat::zeros(d, 0)).collect();
        SubrepWitness {
            basis,
            subdims: vec![0; rep.dims().len()],
            residual: S::zero(),
        }
    }

    /// Coordinate-subspace witness: the full space at vertices in `support`,
    /// zero elsewhere.
    pub fn vertex_span(rep: &Representation<S>, support: &[bool]) -> Self {
        let spans = rep
            .dims()
            .iter()
            .enumerate()
            .map(|(a, &d)| {
                if support[a] {
                    CMat::identity(d, d)
                } else {
                    CMat::zeros(d, 0)
                }
            })
            .collect();
        Self::from_spans(rep, spans)
    }

    pub fn basis(&self) -> &[CMat<S>] {
        &self.basis
    }

    /// The subdimension vector `e`.
    pub fn subdims(&self) -> &[usize] {
        &self.subdims
    }

    pub fn rank(&self) -> usize {
        self.subdims.iter().sum()
    }

    pub fn residual(&self) -> S {
        self.residual
    }

    /// Proper means neither zero nor the whole representation.
    pub fn is_proper(&self, rep: &Representation<S>) -> bool {
        let r = self.rank();
        r > 0 && r < rep.rank()
    }
}

/// Invariance residual of orthonormal per-vertex bases in `rep`.
pub fn invariance_residual<S: Real>(rep: &Representation<S>, basis: &[CMat<S>]) -> S {
    let mut worst = S::zero();
    for (idx, arrow) in rep.quiver().arrows().iter().enumerate() {
        let w_src = &basis[arrow.src];
        let w_dst = &basis[arrow.dst];
        if w_src.ncols() == 0 {
            continue;
        }
        let mapped = rep.matrix(idx) * w_src;
        let inside = w_dst * (w_dst.adjoint() * &mapped);
        let r = (mapped - inside).norm();
        if r > worst {
            worst = r;
        }
    }
    worst
}

/// Result of splitting a representation along a subrepresentation witness.
#[derive(Debug, Clone)]
pub struct SubQuotient<S: Real = f64> {
    /// The subrepresentation, in the witness coordinates.
    pub sub: Representation<S>,
    /// The quotient, in orthonormal coordinates on the complements.
    pub quot: Representation<S>,
    /// Per-vertex orthonormal bases of the complements (the quotient's
    /// coordinates inside the ambient spaces).
    pub quot_basis: Vec<CMat<S>>,
}

/// Split `rep` along an invariant-within-tolerance witness into the induced
/// subrepresentation and quotient.  The sub matrices are `W_dst^H rho W_src`;
/// the quotient lives on orthonormal bases of the orthocomplements.
pub fn subquotient<S: Real>(
    rep: &Representation<S>,
    witness: &SubrepWitness<S>,
    tol: S,
) -> Result<SubQuotient<S>> {
    if witness.residual() > tol {
        return Err(Error::WitnessResidual {
            residual: witness.residual().to_f64(),
            tol: tol.to_f64(),
        });
    }
    let quot_basis: Vec<CMat<S>> = witness
        .basis()
        .iter()
        .zip(rep.dims())
        .map(|(b, &d)| linalg::orthocomplement(b, d))
        .collect();
    let mut sub_mats = Vec::new();
    let mut quot_mats = Vec::new();
    for (idx, arrow) in rep.quiver().arrows().iter().enumerate() {
        let rho = rep.matrix(idx);
        let w_s = &witness.basis()[arrow.src];
        let w_d = &witness.basis()[arrow.dst];
        sub_mats.push(w_d.adjoint() * rho * w_s);
        let c_s = &quot_basis[arrow.src];
        let c_d = &quot_basis[arrow.dst];
        quot_mats.push(c_d.adjoint() * rho * c_s);
    }
    let sub = Representation::new(rep.quiver().clone(), witness.subdims().to_vec(), sub_mats)?;
    let quot_dims = quot_basis.iter().map(|b| b.ncols()).collect();
    let quot = Representation::new(rep.quiver().clone(), quot_dims, quot_mats)?;
    Ok(SubQuotient {
        sub,
        quot,
        quot_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;

    type R = Representation<f64>;

    #[test]
    fn shape_validation() {
        let q = Quiver::kronecker();
        let bad = R::new(
            q.clone(),
            vec![1, 1],
            vec![CMat::zeros(2, 1), CMat::zeros(1, 1)],
        );
        assert!(matches!(bad, Err(Error::ShapeMismatch { arrow, .. }) if arrow == "a"));
    }

    #[test]
    fn zero_dims_make_empty_matrices() {
        let q = Quiver::kronecker();
        let rep = R::random(q, vec![0, 2], 3, Distribution::ComplexGaussian);
        assert_eq!(rep.matrix(0).shape(), (2, 0));
        assert_eq!(rep.rank(), 2);
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let q = Quiver::kronecker();
        let a = R::random(q.clone(), vec![2, 2], 11, Distribution::ComplexGaussian);
        let b = R::random(q.clone(), vec![2, 2], 11, Distribution::ComplexGaussian);
        let c = R::random(q, vec![2, 2], 12, Distribution::ComplexGaussian);
        assert_eq!(a.distance(&b), 0.0);
        assert!(a.distance(&c) > 1e-3);
    }

    #[test]
    fn direct_sum_blocks_and_dims() {
        let q = Quiver::kronecker();
        let m = R::kronecker(re(1.0), re(0.0));
        let n = R::kronecker(re(0.0), re(1.0));
        let sum = R::direct_sum(&q, &[&m, &n]).unwrap();
        assert_eq!(sum.dims(), &[2, 2]);
        assert_eq!(sum.matrix(0)[(0, 0)], re::<f64>(1.0));
        assert_eq!(sum.matrix(0)[(1, 1)], re::<f64>(0.0));
        assert_eq!(sum.matrix(1)[(1, 1)], re::<f64>(1.0));
        // Additivity of the dimension vector over an empty sum too.
        let empty = R::direct_sum(&q, &[]).unwrap();
        assert_eq!(empty.dims(), &[0, 0]);
        assert_eq!(empty.rank(), 0);
    }

    #[test]
    fn target_vertex_span_is_invariant() {
        // No arrow leaves the sink of the Kronecker quiver, so (0, V_2) is a
        // subrepresentation of anything.
        let rep = R::kronecker(re(2.0), re(-1.0));
        let w = SubrepWitness::vertex_span(&rep, &[false, true]);
        assert_eq!(w.subdims(), &[0, 1]);
        assert_eq!(w.residual(), 0.0);
        let split = subquotient(&rep, &w, 1e-12).unwrap();
        assert_eq!(split.sub.dims(), &[0, 1]);
        assert_eq!(split.quot.dims(), &[1, 0]);
        assert_eq!(split.quot.matrix(0).shape(), (0, 1));
    }

    #[test]
    fn source_vertex_span_catches_noninvariance() {
        let rep = R::kronecker(re(1.0), re(0.0));
        let w = SubrepWitness::vertex_span(&rep, &[true, false]);
        // rho_a maps V_1 outside the zero space at vertex 2 with norm 1.
        assert!((w.residual() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_and_zero_witnesses() {
        let rep = R::kronecker(re(1.0), re(2.0));
        let full = SubrepWitness::full(&rep);
        let zero = SubrepWitness::zero(&rep);
        assert_eq!(full.residual(), 0.0);
        assert_eq!(zero.residual(), 0.0);
        let s1 = subquotient(&rep, &full, 0.0).unwrap();
        assert_eq!(s1.sub.dims(), rep.dims());
        assert_eq!(s1.quot.rank(), 0);
        let s2 = subquotient(&rep, &zero, 0.0).unwrap();
        assert_eq!(s2.sub.rank(), 0);
        assert_eq!(s2.quot.dims(), rep.dims());
    }

    #[test]
    fn subquotient_dimensions_add() {
        let q = Quiver::kronecker();
        let rep = R::random(q, vec![3, 2], 5, Distribution::ComplexGaussian);
        let w = SubrepWitness::vertex_span(&rep, &[false, true]);
        let split = subquotient(&rep, &w, 1e-10).unwrap();
        for a in 0..2 {
            assert_eq!(split.sub.dims()[a] + split.quot.dims()[a], rep.dims()[a]);
        }
    }

    #[test]
    fn residual_above_tolerance_is_an_error() {
        let rep = R::kronecker(re(1.0), re(0.0));
        let w = SubrepWitness::vertex_span(&rep, &[true, false]);
        assert!(matches!(
            subquotient(&rep, &w, 1e-3),
            Err(Error::WitnessResidual { .. })
        ));
    }
}
