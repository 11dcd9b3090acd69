//! Dense complex linear algebra substrate.
//!
//! Thin layer over `nalgebra` providing the numerical-rank conventions used
//! everywhere else: SVD null spaces and column spaces with the
//! `max(m,n) * eps * sigma_max` threshold, orthonormal bases, subspace
//! comparison by principal angles, least-squares projection, and a
//! scaling-and-squaring Pade matrix exponential.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex;
use rand::Rng;

use crate::scalar::Real;

/// Dense complex matrix over the generic scalar.
pub type CMat<S> = DMatrix<Complex<S>>;
/// Dense complex column vector over the generic scalar.
pub type CVec<S> = DVector<Complex<S>>;

/// Default numerical-rank threshold: `max(m, n) * eps * sigma_max`.
pub fn rank_threshold<S: Real>(rows: usize, cols: usize, sigma_max: S) -> S {
    S::of(rows.max(cols) as f64) * <S as num_traits::Float>::epsilon() * sigma_max
}

fn svd_parts<S: Real>(m: &CMat<S>) -> (CMat<S>, DVector<S>, CMat<S>) {
    let svd = m.clone().svd(true, true);
    (
        svd.u.expect("svd with u"),
        svd.singular_values,
        svd.v_t.expect("svd with v_t"),
    )
}

/// Numerical rank.  `tol` is a cutoff relative to the largest singular
/// value; `None` uses the machine-precision threshold.
pub fn rank<S: Real>(m: &CMat<S>, tol: Option<S>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let (_, sigma, _) = svd_parts(m);
    let sigma_max = sigma.max();
    let tau = cutoff(m.nrows(), m.ncols(), sigma_max, tol);
    sigma.iter().filter(|&&s| s > tau).count()
}

fn cutoff<S: Real>(rows: usize, cols: usize, sigma_max: S, tol: Option<S>) -> S {
    match tol {
        Some(rel) => rel * sigma_max,
        None => rank_threshold(rows, cols, sigma_max),
    }
}

/// Orthonormal basis of the kernel, as matrix columns.  `tol` as in
/// [`rank`].
///
/// The zero-row and zero-column edge cases matter: a map out of the zero
/// space has zero kernel, a map with no rows has full kernel.
pub fn null_space<S: Real>(m: &CMat<S>, tol: Option<S>) -> CMat<S> {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMat::identity(n, n);
    }
    // Pad with zero rows so the thin SVD carries a full set of n right
    // singular vectors; padding does not change the kernel.
    let padded = if m.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let (_, sigma, v_t) = svd_parts(&padded);
    let sigma_max = sigma.max();
    let tau = cutoff(m.nrows(), n, sigma_max, tol);
    let kernel_rows: Vec<usize> = (0..n)
        .filter(|&i| i >= sigma.len() || sigma[i] <= tau)
        .collect();
    let mut basis = CMat::zeros(n, kernel_rows.len());
    for (k, &i) in kernel_rows.iter().enumerate() {
        for j in 0..n {
            basis[(j, k)] = v_t[(i, j)].conj();
        }
    }
    basis
}

/// Orthonormal basis of the column space, as matrix columns.
pub fn column_space<S: Real>(m: &CMat<S>, tol: Option<S>) -> CMat<S> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let (u, sigma, _) = svd_parts(m);
    let sigma_max = sigma.max();
    let tau = tol.unwrap_or_else(|| rank_threshold(m.nrows(), m.ncols(), sigma_max));
    let keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > tau).collect();
    let mut basis = CMat::zeros(m.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        basis.set_column(k, &u.column(i));
    }
    basis
}

/// Orthonormal basis of the span of the given columns (SVD-based, so safe on
/// nearly dependent input).
pub fn orthonormalize<S: Real>(m: &CMat<S>) -> CMat<S> {
    column_space(m, None)
}

/// Orthonormal basis of the orthogonal complement of a subspace given by
/// orthonormal columns.
pub fn orthocomplement<S: Real>(basis: &CMat<S>, ambient_dim: usize) -> CMat<S> {
    if basis.ncols() == 0 {
        return CMat::identity(ambient_dim, ambient_dim);
    }
    null_space(&basis.adjoint(), None)
}

/// Frobenius inner product `tr(a b^H)`.
pub fn frobenius_inner<S: Real>(a: &CMat<S>, b: &CMat<S>) -> Complex<S> {
    debug_assert_eq!(a.shape(), b.shape());
    let mut acc = Complex::new(S::zero(), S::zero());
    for (x, y) in a.iter().zip(b.iter()) {
        acc += *x * y.conj();
    }
    acc
}

/// Frobenius norm.
pub fn frobenius<S: Real>(a: &CMat<S>) -> S {
    a.norm()
}

/// Hermitian-symmetry defect `‖a - a^H‖`.
pub fn hermitian_defect<S: Real>(a: &CMat<S>) -> S {
    (a - a.adjoint()).norm()
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching orthonormal eigenvector columns.
pub fn hermitian_eigen<S: Real>(a: &CMat<S>) -> (Vec<S>, CMat<S>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn least_squares<S: Real>(a: &CMat<S>, b: &CVec<S>) -> CVec<S> {
    if a.ncols() == 0 {
        return CVec::zeros(0);
    }
    if a.nrows() == 0 {
        return CVec::zeros(a.ncols());
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let tau = rank_threshold(a.nrows(), a.ncols(), sigma_max);
    svd.solve(b, tau).expect("svd solve")
}

/// Largest principal angle (in terms of `sin`) between two subspaces given by
/// orthonormal columns, computed as the spectral norm of `(I - P P^H) Q` to
/// stay accurate near zero angle.  Returns `None` when the dimensions differ
/// — the subspaces cannot then coincide at all.
pub fn subspace_gap<S: Real>(p: &CMat<S>, q: &CMat<S>) -> Option<S> {
    if p.ncols() != q.ncols() {
        return None;
    }
    if p.ncols() == 0 {
        return Some(S::zero());
    }
    let residual = q - p * (p.adjoint() * q);
    let svd = residual.svd(false, false);
    Some(svd.singular_values.max())
}

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest-column-sum norm, the scaling criterion for the exponential.
fn one_norm<S: Real>(a: &CMat<S>) -> S {
    let mut best = S::zero();
    for col in a.column_iter() {
        let mut sum = S::zero();
        for z in col.iter() {
            sum += z.norm();
        }
        if sum > best {
            best = sum;
        }
    }
    best
}

/// Matrix exponential by scaling and squaring with the degree-13 Pade
/// approximant.  Accurate to around machine precision for the moderate-norm
/// Hermitian arguments produced by the gradient flow.
pub fn matrix_exp<S: Real>(a: &CMat<S>) -> CMat<S> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let theta_13 = S::of(5.371920351148152);
    let norm = one_norm(a);
    let squarings = if norm > theta_13 {
        let ratio = (norm / theta_13).to_f64();
        ratio.log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale = Complex::new(S::of(0.5f64.powi(squarings as i32)), S::zero());
    let a = a * scale;

    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let id = CMat::<S>::identity(n, n);
    let b = |k: usize| Complex::new(S::of(PADE_13[k]), S::zero());

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u_poly = u_inner + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * u_poly;
    let v_inner = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = v_inner + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut result = lhs
        .lu()
        .solve(&rhs)
        .expect("Pade denominator is invertible");
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Sample from the standard real normal distribution (Box-Muller on the
/// generator's uniforms, so the draw is deterministic per seed without an
/// extra distributions dependency).
pub fn standard_normal<S: Real>(rng: &mut impl Rng) -> S {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    S::of((-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos())
}

/// Sample from the standard complex normal distribution `CN(0, 1)`: real and
/// imaginary parts independent `N(0, 1/2)`.
pub fn standard_complex_gaussian<S: Real>(rng: &mut impl Rng) -> Complex<S> {
    let half = S::of(std::f64::consts::FRAC_1_SQRT_2);
    Complex::new(standard_normal::<S>(rng) * half, standard_normal::<S>(rng) * half)
}

/// Random matrix with i.i.d. `CN(0, 1)` entries.
pub fn gaussian_matrix<S: Real>(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat<S> {
    CMat::from_fn(rows, cols, |_, _| standard_complex_gaussian(rng))
}
