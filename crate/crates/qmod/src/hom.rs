//! Spaces of morphisms between representations.
//!
//! A morphism `f: (V, rho) -> (W, sigma)` is a tuple of linear maps
//! `f_a: V_a -> W_a` with `f_dst rho_alpha = sigma_alpha f_src` for every
//! arrow.  The full space is computed as the kernel of the linear map
//! `f |-> (f_dst rho_alpha - sigma_alpha f_src)_alpha` in vectorised
//! coordinates.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, CMat};
use crate::rep::{Representation, SubrepWitness};
use crate::scalar::Real;

/// A vertex-wise linear map between two representations of the same quiver.
#[derive(Debug, Clone)]
pub struct Morphism<S: Real = f64> {
    components: Vec<CMat<S>>,
}

impl<S: Real> Morphism<S> {
    pub fn new(components: Vec<CMat<S>>) -> Self {
        Morphism { components }
    }

    pub fn identity(rep: &Representation<S>) -> Self {
        Morphism {
            components: rep.dims().iter().map(|&d| CMat::identity(d, d)).collect(),
        }
    }

    pub fn components(&self) -> &[CMat<S>] {
        &self.components
    }

    pub fn component(&self, vertex: usize) -> &CMat<S> {
        &self.components[vertex]
    }

    /// Linear combination `sum_i coeffs[i] * basis[i]`.
    pub fn combine(basis: &[Morphism<S>], coeffs: &[num::complex::Complex<S>]) -> Self {
        assert_eq!(basis.len(), coeffs.len());
        assert!(!basis.is_empty(), "cannot combine an empty basis");
        let mut components: Vec<CMat<S>> = basis[0]
            .components
            .iter()
            .map(|m| CMat::zeros(m.nrows(), m.ncols()))
            .collect();
        for (b, &c) in basis.iter().zip(coeffs) {
            for (acc, m) in components.iter_mut().zip(&b.components) {
                *acc += m * c;
            }
        }
        Morphism { components }
    }

    /// `max_alpha ‖f_dst rho_alpha - sigma_alpha f_src‖_F`.
    pub fn intertwining_residual(
        &self,
        src: &Representation<S>,
        dst: &Representation<S>,
    ) -> S {
        let mut worst = S::zero();
        for (idx, arrow) in src.quiver().arrows().iter().enumerate() {
            let lhs = &self.components[arrow.dst] * src.matrix(idx);
            let rhs = dst.matrix(idx) * &self.components[arrow.src];
            let r = (lhs - rhs).norm();
            if r > worst {
                worst = r;
            }
        }
        worst
    }

    /// Kernel of the morphism, as a subrepresentation witness in the source.
    pub fn kernel(&self, src: &Representation<S>) -> SubrepWitness<S> {
        let spans = self
            .components
            .iter()
            .map(|f| linalg::null_space(f, None))
            .collect();
        SubrepWitness::from_spans(src, spans)
    }

    /// Image of the morphism, as a subrepresentation witness in the target.
    pub fn image(&self, dst: &Representation<S>) -> SubrepWitness<S> {
        let spans = self
            .components
            .iter()
            .map(|f| linalg::column_space(f, None))
            .collect();
        SubrepWitness::from_spans(dst, spans)
    }
}

/// Orthonormal basis of `Hom(src, dst)` with respect to the vectorised
/// Frobenius inner product.  Representations must share a quiver.
pub fn hom_basis<S: Real>(
    src: &Representation<S>,
    dst: &Representation<S>,
) -> Vec<Morphism<S>> {
    assert_eq!(
        **src.quiver(),
        **dst.quiver(),
        "hom requires a common quiver"
    );
    let quiver = src.quiver();
    let n = quiver.num_vertices();
    let chunk: Vec<usize> = (0..n).map(|a| dst.dims()[a] * src.dims()[a]).collect();
    let offset: Vec<usize> = chunk
        .iter()
        .scan(0, |acc, &c| {
            let o = *acc;
            *acc += c;
            Some(o)
        })
        .collect();
    let total: usize = chunk.iter().sum();

    let row_sizes: Vec<usize> = quiver
        .arrows()
        .iter()
        .map(|ar| dst.dims()[ar.dst] * src.dims()[ar.src])
        .collect();
    let total_rows: usize = row_sizes.iter().sum();

    // In column-major vectorisation, f |-> A f corresponds to I (x) A and
    // f |-> f B to B^T (x) I.
    let mut u = CMat::<S>::zeros(total_rows, total);
    let mut row = 0;
    for (idx, arrow) in quiver.arrows().iter().enumerate() {
        let rho_t = src.matrix(idx).transpose();
        let eye_dst = CMat::<S>::identity(dst.dims()[arrow.dst], dst.dims()[arrow.dst]);
        let left = rho_t.kronecker(&eye_dst);
        let mut view = u.view_mut((row, offset[arrow.dst]), left.shape());
        view += &left;

        let eye_src = CMat::<S>::identity(src.dims()[arrow.src], src.dims()[arrow.src]);
        let sigma = dst.matrix(idx);
        let right = eye_src.kronecker(sigma);
        let mut view = u.view_mut((row, offset[arrow.src]), right.shape());
        view -= &right;
        row += row_sizes[idx];
    }

    let kernel = linalg::null_space(&u, None);
    (0..kernel.ncols())
        .map(|col| {
            let v = kernel.column(col);
            let components = (0..n)
                .map(|a| {
                    let rows = dst.dims()[a];
                    let cols = src.dims()[a];
                    let slice: Vec<_> = (0..chunk[a]).map(|k| v[offset[a] + k]).collect();
                    DMatrix::from_column_slice(rows, cols, &slice)
                })
                .collect();
            Morphism { components }
        })
        .collect()
}

/// Basis of the endomorphism algebra of a representation.
pub fn endomorphism_basis<S: Real>(rep: &Representation<S>) -> Vec<Morphism<S>> {
    hom_basis(rep, rep)
}

/// Real dimension of the space of skew-Hermitian endomorphisms,
/// `{f in End : f_a^H = -f_a at every vertex}`.  Solved as a real-linear
/// system over a complex hom basis: writing `f = sum (x_j + i y_j) B_j`,
/// skewness means `sum x_j (B_j + B_j^H) + i y_j (B_j - B_j^H) = 0`.
pub fn skew_endomorphism_dimension<S: Real>(rep: &Representation<S>) -> usize {
    let basis = endomorphism_basis(rep);
    if basis.is_empty() {
        return 0;
    }
    let total: usize = rep.dims().iter().map(|&d| d * d).sum();
    // Stack the real and imaginary parts of every vertex block; one column
    // per real coefficient.
    let mut m = CMat::<S>::zeros(2 * total, 2 * basis.len());
    for (j, b) in basis.iter().enumerate() {
        let mut row = 0;
        for comp in b.components() {
            let sym = comp + comp.adjoint();
            let skew = (comp - comp.adjoint()) * num::complex::Complex::new(S::zero(), S::one());
            for col in 0..comp.ncols() {
                for r in 0..comp.nrows() {
                    m[(row, 2 * j)] = num::complex::Complex::new(sym[(r, col)].re, S::zero());
                    m[(row + total, 2 * j)] =
                        num::complex::Complex::new(sym[(r, col)].im, S::zero());
                    m[(row, 2 * j + 1)] = num::complex::Complex::new(skew[(r, col)].re, S::zero());
                    m[(row + total, 2 * j + 1)] =
                        num::complex::Complex::new(skew[(r, col)].im, S::zero());
                    row += 1;
                }
            }
        }
    }
    2 * basis.len() - linalg::rank(&m, None)
}

/// Options for the randomised isomorphism test.
#[derive(Debug, Clone)]
pub struct IsoOptions<S: Real = f64> {
    /// Random linear combinations of the hom basis to try.
    pub trials: usize,
    pub seed: u64,
    /// A combination counts as invertible when its smallest singular value,
    /// over all vertices, is at least this fraction of its largest.
    pub inv_tol: S,
}

impl<S: Real> Default for IsoOptions<S> {
    fn default() -> Self {
        IsoOptions {
            trials: 8,
            seed: 0x15eed,
            inv_tol: S::of(1e-3),
        }
    }
}

/// Outcome of an isomorphism test.
#[derive(Debug, Clone)]
pub struct IsoCheck<S: Real = f64> {
    pub isomorphic: bool,
    /// An invertible intertwiner, when one was found.
    pub witness: Option<Morphism<S>>,
    pub hom_dim: usize,
    /// Best ratio sigma_min / sigma_max seen over the trials.
    pub best_ratio: Option<S>,
}

/// Randomised isomorphism test: sample linear combinations of a hom basis
/// and accept the first whose components are uniformly invertible.
///
/// Two isomorphic representations admit invertible intertwiners on a dense
/// open set of the hom space, so a handful of Gaussian samples suffices;
/// conversely no combination of a hom basis between non-isomorphic
/// representations is invertible.  The `inv_tol` ratio keeps the test
/// honest near orbit-closure degenerations, where intertwiners exist but
/// flatten out.
pub fn is_isomorphic<S: Real>(
    m: &Representation<S>,
    n: &Representation<S>,
    opts: &IsoOptions<S>,
) -> IsoCheck<S> {
    if m.dims() != n.dims() {
        return IsoCheck {
            isomorphic: false,
            witness: None,
            hom_dim: 0,
            best_ratio: None,
        };
    }
    if m.rank() == 0 {
        return IsoCheck {
            isomorphic: true,
            witness: Some(Morphism::identity(m)),
            hom_dim: 0,
            best_ratio: None,
        };
    }
    let basis = hom_basis(m, n);
    if basis.is_empty() {
        return IsoCheck {
            isomorphic: false,
            witness: None,
            hom_dim: 0,
            best_ratio: None,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best_ratio = S::zero();
    let mut witness = None;
    for _ in 0..opts.trials {
        let coeffs: Vec<_> = (0..basis.len())
            .map(|_| linalg::standard_complex_gaussian(&mut rng))
            .collect();
        let f = Morphism::combine(&basis, &coeffs);
        let mut sigma_min = S::infinity();
        let mut sigma_max = S::zero();
        for (a, comp) in f.components().iter().enumerate() {
            if m.dims()[a] == 0 {
                continue;
            }
            let svals = comp.singular_values();
            sigma_max = <S as num_traits::Float>::max(sigma_max, svals.max());
            sigma_min = <S as num_traits::Float>::min(sigma_min, svals.min());
        }
        if sigma_max == S::zero() {
            continue;
        }
        let ratio = sigma_min / sigma_max;
        if ratio > best_ratio {
            best_ratio = ratio;
            if ratio >= opts.inv_tol {
                witness = Some(f);
                break;
            }
        }
    }
    IsoCheck {
        isomorphic: witness.is_some(),
        hom_dim: basis.len(),
        best_ratio: Some(best_ratio),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Quiver;
    use crate::rep::Distribution;
    use crate::scalar::{c, re};

    type R = Representation<f64>;

    #[test]
    fn schur_generic_kronecker_rank_one() {
        let rep = R::kronecker(c(0.3, 0.7), c(-1.1, 0.2));
        assert_eq!(endomorphism_basis(&rep).len(), 1);
    }

    #[test]
    fn no_maps_between_the_two_simples() {
        let s1 = R::kronecker(re(1.0), re(0.0));
        let s2 = R::kronecker(re(0.0), re(1.0));
        // Representations with swapped support at a vertex admit no nonzero
        // intertwiner in either direction here.
        let e1 = R::new(
            s1.quiver().clone(),
            vec![1, 0],
            vec![CMat::zeros(0, 1), CMat::zeros(0, 1)],
        )
        .unwrap();
        let e2 = R::new(
            s1.quiver().clone(),
            vec![0, 1],
            vec![CMat::zeros(1, 0), CMat::zeros(1, 0)],
        )
        .unwrap();
        assert_eq!(hom_basis(&e1, &e2).len(), 0);
        assert_eq!(hom_basis(&e2, &e1).len(), 0);
        assert_eq!(hom_basis(&s1, &s2).len(), 0);
        assert_eq!(hom_basis(&s2, &s1).len(), 0);
    }

    #[test]
    fn endomorphisms_of_jordan_blocks() {
        let q = Quiver::loop_quiver();
        // A single Jordan block of size 2: End = {a I + b J}, dimension 2.
        let j2 = R::new(
            q.clone(),
            vec![2],
            vec![CMat::from_row_slice(2, 2, &[
                re(0.0), re(1.0),
                re(0.0), re(0.0),
            ])],
        )
        .unwrap();
        assert_eq!(endomorphism_basis(&j2).len(), 2);
        // Distinct eigenvalues: End = diagonal matrices, dimension 2.
        let diag = R::new(
            q.clone(),
            vec![2],
            vec![CMat::from_row_slice(2, 2, &[
                re(1.0), re(0.0),
                re(0.0), re(2.0),
            ])],
        )
        .unwrap();
        assert_eq!(endomorphism_basis(&diag).len(), 2);
        // A scalar matrix commutes with everything: dimension 4.
        let central = R::new(
            q,
            vec![2],
            vec![CMat::identity(2, 2) * re::<f64>(3.0)],
        )
        .unwrap();
        assert_eq!(endomorphism_basis(&central).len(), 4);
    }

    #[test]
    fn direct_sum_of_isomorphic_summands_has_matrix_algebra_end() {
        let r = R::kronecker(re(1.0), re(2.0));
        let sum = R::direct_sum(r.quiver(), &[&r, &r]).unwrap();
        assert_eq!(endomorphism_basis(&sum).len(), 4);
        let r2 = R::kronecker(re(1.0), re(-2.0));
        let mixed = R::direct_sum(r.quiver(), &[&r, &r2]).unwrap();
        assert_eq!(endomorphism_basis(&mixed).len(), 2);
    }

    #[test]
    fn proportional_kronecker_points_are_isomorphic() {
        let m = R::kronecker(re(1.0), re(2.0));
        let n = R::kronecker(re(2.0), re(4.0));
        let check = is_isomorphic(&m, &n, &IsoOptions::default());
        assert!(check.isomorphic);
        let f = check.witness.unwrap();
        assert!(f.intertwining_residual(&m, &n) < 1e-10);
        let other = R::kronecker(re(2.0), re(1.0));
        assert!(!is_isomorphic(&m, &other, &IsoOptions::default()).isomorphic);
    }

    #[test]
    fn conjugated_representation_is_isomorphic() {
        let q = Quiver::kronecker();
        let m = R::random(q.clone(), vec![2, 3], 7, Distribution::ComplexGaussian);
        // Conjugate by a fixed invertible pair (g_1, g_2).
        let g1 = CMat::from_row_slice(2, 2, &[c(1.0, 0.5), re(0.3), re(0.0), c(2.0, -1.0)]);
        let g2 = CMat::from_row_slice(
            3,
            3,
            &[
                re(1.0), re(1.0), re(0.0),
                re(0.0), re(1.0), re(1.0),
                c(0.0, 1.0), re(0.0), re(1.0),
            ],
        );
        let g = [g1, g2];
        let mats = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(i, ar)| {
                let gt_inv = g[ar.dst].clone().try_inverse().unwrap();
                gt_inv * m.matrix(i) * &g[ar.src]
            })
            .collect();
        let n = R::new(q, vec![2, 3], mats).unwrap();
        assert!(is_isomorphic(&m, &n, &IsoOptions::default()).isomorphic);
    }

    #[test]
    fn kernel_and_image_of_a_nilpotent_endomorphism() {
        let q = Quiver::loop_quiver();
        let j2 = R::new(
            q,
            vec![2],
            vec![CMat::from_row_slice(2, 2, &[
                re(0.0), re(1.0),
                re(0.0), re(0.0),
            ])],
        )
        .unwrap();
        let basis = endomorphism_basis(&j2);
        // Pick the nilpotent direction: the basis element with zero trace.
        let nilp = basis
            .iter()
            .find(|f| f.component(0).trace().norm() < 1e-9)
            .expect("nilpotent endomorphism present");
        let ker = nilp.kernel(&j2);
        let im = nilp.image(&j2);
        assert_eq!(ker.subdims(), &[1]);
        assert_eq!(im.subdims(), &[1]);
        assert!(ker.residual() < 1e-10);
        assert!(im.residual() < 1e-10);
    }

    #[test]
    fn skew_endomorphism_dimensions() {
        // Schur object: only i R * identity survives.
        let stable = R::kronecker(re(1.0), re(2.0));
        assert_eq!(skew_endomorphism_dimension(&stable), 1);
        // Two non-isomorphic simple summands: i R^2 (diagonal pairs).
        let q = Quiver::kronecker();
        let sum = R::zero(q, vec![1, 1]);
        assert_eq!(skew_endomorphism_dimension(&sum), 2);
        // Jordan block on the loop: End is {aI + bJ} but only aI can be
        // skew, so the real dimension stays 1.
        let ql = Quiver::loop_quiver();
        let j2 = R::new(
            ql,
            vec![2],
            vec![CMat::from_row_slice(2, 2, &[
                re(0.0), re(1.0),
                re(0.0), re(0.0),
            ])],
        )
        .unwrap();
        assert_eq!(skew_endomorphism_dimension(&j2), 1);
    }

    #[test]
    fn zero_representations_are_isomorphic() {
        let q = Quiver::kronecker();
        let z1 = R::zero(q.clone(), vec![0, 0]);
        let z2 = R::zero(q, vec![0, 0]);
        assert!(is_isomorphic(&z1, &z2, &IsoOptions::default()).isomorphic);
    }

    #[test]
    fn hom_respects_rank_nullity_per_vertex() {
        let q = Quiver::kronecker();
        let m = R::random(q.clone(), vec![3, 3], 21, Distribution::ComplexGaussian);
        let basis = endomorphism_basis(&m);
        for f in &basis {
            let ker = f.kernel(&m);
            let im = f.image(&m);
            for a in 0..2 {
                assert_eq!(ker.subdims()[a] + im.subdims()[a], 3);
            }
        }
    }
}
