//! Kähler-quotient geometry on the stable locus: the orbit operator
//! `D_rho`, horizontal projection, the descended metric/form pair, and a
//! reference integration over the Kronecker moduli sphere.
//!
//! At an Einstein–Hermitian Schur point the moduli metric is evaluated
//! upstairs: lift a tangent vector of the quotient to the ambient space,
//! project it onto the Hermitian orthocomplement of the orbit directions
//! `Im D_rho`, and pair the projections with the flat ambient product.  The
//! value does not depend on the choice of lift, because two lifts differ by
//! an orbit direction that the projection kills.

use std::sync::Arc;

use num::complex::Complex;
use rand::Rng;

use crate::hom::hom_basis;
use crate::linalg::{self, gaussian_matrix, CMat};
use crate::moment::{ambient_inner, ambient_norm, moment_map, omega_form, GroupElement, LieElement};
use crate::quiver::Quiver;
use crate::rep::Representation;
use crate::scalar::{c, Real};
use crate::{Error, Result};

/// A tangent vector of the ambient representation space: one matrix per
/// arrow, with the same shapes as the base representation.
#[derive(Debug, Clone)]
pub struct TangentVector<S: Real = f64> {
    quiver: Arc<Quiver>,
    mats: Vec<CMat<S>>,
}

impl<S: Real> TangentVector<S> {
    pub fn new(rep: &Representation<S>, mats: Vec<CMat<S>>) -> Result<Self> {
        let arrows = rep.quiver().arrows();
        if mats.len() != arrows.len() {
            return Err(Error::Numeric(format!(
                "tangent vector has {} matrices for {} arrows",
                mats.len(),
                arrows.len(),
            )));
        }
        for (i, ar) in arrows.iter().enumerate() {
            let want = (rep.dims()[ar.dst], rep.dims()[ar.src]);
            let got = (mats[i].nrows(), mats[i].ncols());
            if got != want {
                return Err(Error::ShapeMismatch {
                    arrow: ar.id.clone(),
                    got_rows: got.0,
                    got_cols: got.1,
                    want_rows: want.0,
                    want_cols: want.1,
                });
            }
        }
        Ok(TangentVector {
            quiver: rep.quiver().clone(),
            mats,
        })
    }

    pub fn zero(rep: &Representation<S>) -> Self {
        let mats = rep
            .quiver()
            .arrows()
            .iter()
            .map(|ar| CMat::zeros(rep.dims()[ar.dst], rep.dims()[ar.src]))
            .collect();
        TangentVector {
            quiver: rep.quiver().clone(),
            mats,
        }
    }

    /// Standard complex Gaussian direction.
    pub fn random<R: Rng>(rep: &Representation<S>, rng: &mut R) -> Self {
        let mats = rep
            .quiver()
            .arrows()
            .iter()
            .map(|ar| gaussian_matrix(rng, rep.dims()[ar.dst], rep.dims()[ar.src]))
            .collect();
        TangentVector {
            quiver: rep.quiver().clone(),
            mats,
        }
    }

    pub fn mats(&self) -> &[CMat<S>] {
        &self.mats
    }

    pub fn norm(&self) -> S {
        ambient_norm(&self.mats)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| a + b)
            .collect();
        TangentVector {
            quiver: self.quiver.clone(),
            mats,
        }
    }

    pub fn scaled(&self, z: Complex<S>) -> Self {
        TangentVector {
            quiver: self.quiver.clone(),
            mats: self.mats.iter().map(|m| m * z).collect(),
        }
    }

    /// Transport along the group action, the same formula as on base
    /// points: `(delta . g)_alpha = g_dst^{-1} delta_alpha g_src`.
    pub fn transport(&self, g: &GroupElement<S>) -> Result<Self> {
        let inv = g.inverse()?;
        let mats = self
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(i, ar)| inv.get(ar.dst) * &self.mats[i] * g.get(ar.src))
            .collect();
        Ok(TangentVector {
            quiver: self.quiver.clone(),
            mats,
        })
    }

    /// Column-major stacking of the arrow matrices into one column vector.
    pub fn flatten(&self) -> CMat<S> {
        let total: usize = self.mats.iter().map(|m| m.len()).sum();
        let mut out = CMat::zeros(total, 1);
        let mut at = 0;
        for m in &self.mats {
            for &e in m.iter() {
                out[(at, 0)] = e;
                at += 1;
            }
        }
        out
    }
}

/// The infinitesimal action at a base point, materialized: a matrix from
/// the vectorised gauge Lie algebra to the vectorised ambient space.
#[derive(Debug, Clone)]
pub struct OrbitOperator<S: Real = f64> {
    quiver: Arc<Quiver>,
    matrix: CMat<S>,
    vertex_dims: Vec<usize>,
    arrow_shapes: Vec<(usize, usize)>,
}

/// Materialize `D_rho(xi)_alpha = rho_alpha xi_src - xi_dst rho_alpha` in
/// column-major vectorisation: the source block is `I (x) rho_alpha`, the
/// target block `-rho_alpha^T (x) I`.
pub fn orbit_operator<S: Real>(rep: &Representation<S>) -> OrbitOperator<S> {
    let dims = rep.dims();
    let arrows = rep.quiver().arrows();
    let col_sizes: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let col_offsets: Vec<usize> = col_sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let gdim: usize = col_sizes.iter().sum();
    let arrow_shapes: Vec<(usize, usize)> = arrows
        .iter()
        .map(|ar| (dims[ar.dst], dims[ar.src]))
        .collect();
    let adim: usize = arrow_shapes.iter().map(|&(r, k)| r * k).sum();

    let mut matrix = CMat::<S>::zeros(adim, gdim);
    let mut row = 0;
    for (i, ar) in arrows.iter().enumerate() {
        let rho = rep.matrix(i);
        let (dt, ds) = arrow_shapes[i];
        let block_rows = dt * ds;
        if block_rows > 0 {
            let src_block = CMat::<S>::identity(ds, ds).kronecker(rho);
            let mut view = matrix.view_mut((row, col_offsets[ar.src]), (block_rows, ds * ds));
            view += src_block;
            let dst_block = rho.transpose().kronecker(&CMat::<S>::identity(dt, dt));
            let mut view = matrix.view_mut((row, col_offsets[ar.dst]), (block_rows, dt * dt));
            view -= dst_block;
        }
        row += block_rows;
    }
    OrbitOperator {
        quiver: rep.quiver().clone(),
        matrix,
        vertex_dims: dims.to_vec(),
        arrow_shapes,
    }
}

impl<S: Real> OrbitOperator<S> {
    pub fn matrix(&self) -> &CMat<S> {
        &self.matrix
    }

    /// Complex dimension of the gauge Lie algebra.
    pub fn domain_dim(&self) -> usize {
        self.matrix.ncols()
    }

    /// Complex dimension of the ambient space.
    pub fn codomain_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.matrix, None)
    }

    /// `dim Ker D_rho`; equals `dim End` of the base representation.
    pub fn kernel_dim(&self) -> usize {
        self.domain_dim() - self.rank()
    }

    fn flatten_lie(&self, xi: &LieElement<S>) -> CMat<S> {
        let mut out = CMat::zeros(self.domain_dim(), 1);
        let mut at = 0;
        for m in xi.mats() {
            for &e in m.iter() {
                out[(at, 0)] = e;
                at += 1;
            }
        }
        out
    }

    fn unflatten_ambient(&self, v: &CMat<S>) -> TangentVector<S> {
        let mut mats = Vec::with_capacity(self.arrow_shapes.len());
        let mut at = 0;
        for &(r, k) in &self.arrow_shapes {
            let mut m = CMat::zeros(r, k);
            for e in m.iter_mut() {
                *e = v[(at, 0)];
                at += 1;
            }
            mats.push(m);
        }
        TangentVector {
            quiver: self.quiver.clone(),
            mats,
        }
    }

    fn unflatten_lie(&self, v: &CMat<S>) -> LieElement<S> {
        let mut mats = Vec::with_capacity(self.vertex_dims.len());
        let mut at = 0;
        for &d in &self.vertex_dims {
            let mut m = CMat::zeros(d, d);
            for e in m.iter_mut() {
                *e = v[(at, 0)];
                at += 1;
            }
            mats.push(m);
        }
        LieElement::new(mats)
    }

    pub fn apply(&self, xi: &LieElement<S>) -> TangentVector<S> {
        let y = &self.matrix * self.flatten_lie(xi);
        self.unflatten_ambient(&y)
    }

    /// `D_rho^*(delta)_a = sum_{src=a} rho^H delta - sum_{dst=a} delta rho^H`,
    /// evaluated through the materialized matrix.
    pub fn adjoint_apply(&self, delta: &TangentVector<S>) -> LieElement<S> {
        let x = self.matrix.adjoint() * delta.flatten();
        self.unflatten_lie(&x)
    }
}

/// Tolerances for the quotient-metric evaluations.
#[derive(Debug, Clone)]
pub struct ModuliOptions<S: Real = f64> {
    /// Acceptable moment-map norm at the base point.
    pub eh_tol: S,
    /// Bound on `‖D_rho^*(delta_h)‖ / (1 + ‖delta‖)` after projection.
    pub horizontal_tol: S,
}

impl<S: Real> Default for ModuliOptions<S> {
    fn default() -> Self {
        ModuliOptions {
            eh_tol: S::of(1e-6),
            horizontal_tol: S::of(1e-8),
        }
    }
}

/// Horizontal projection at a fixed Einstein–Hermitian Schur base point,
/// with the least-squares factorisation cached so that several tangent
/// vectors can be projected cheaply.
#[derive(Debug)]
pub struct HorizontalProjector<S: Real = f64> {
    op: OrbitOperator<S>,
    svd: nalgebra::SVD<Complex<S>, nalgebra::Dyn, nalgebra::Dyn>,
    solve_eps: S,
    guard_tol: S,
    degenerate: bool,
}

impl<S: Real> HorizontalProjector<S> {
    pub fn new(rep: &Representation<S>, theta: &[S], opts: &ModuliOptions<S>) -> Result<Self> {
        if theta.len() != rep.dims().len() {
            return Err(Error::DimensionMismatch);
        }
        let mm = moment_map(rep, theta)?;
        if mm.norm > opts.eh_tol {
            return Err(Error::NotEinsteinHermitian(mm.norm.to_f64()));
        }
        let end_dim = hom_basis(rep, rep).len();
        if end_dim != 1 {
            return Err(Error::NotSchur(end_dim));
        }
        let op = orbit_operator(rep);
        let degenerate = op.codomain_dim() == 0 || op.domain_dim() == 0;
        let svd = if degenerate {
            CMat::<S>::zeros(1, 1).svd(true, true)
        } else {
            op.matrix.clone().svd(true, true)
        };
        let sigma_max = svd.singular_values.max();
        let solve_eps = linalg::rank_threshold(op.codomain_dim(), op.domain_dim(), sigma_max);
        Ok(HorizontalProjector {
            op,
            svd,
            solve_eps,
            guard_tol: opts.horizontal_tol,
            degenerate,
        })
    }

    pub fn operator(&self) -> &OrbitOperator<S> {
        &self.op
    }

    fn orbit_rank(&self) -> usize {
        if self.degenerate {
            0
        } else {
            self.svd.rank(self.solve_eps)
        }
    }

    /// Complex dimension of the horizontal space, `dim A - rank D_rho`.
    pub fn horizontal_dimension(&self) -> usize {
        self.op.codomain_dim() - self.orbit_rank()
    }

    /// `delta - D_rho (D_rho)^+ delta`: the component of `delta` orthogonal
    /// to the orbit directions.
    pub fn project(&self, delta: &TangentVector<S>) -> Result<TangentVector<S>> {
        let b = delta.flatten();
        if b.nrows() != self.op.codomain_dim() {
            return Err(Error::DimensionMismatch);
        }
        if self.degenerate {
            return Ok(delta.clone());
        }
        let xi = self
            .svd
            .solve(&b, self.solve_eps)
            .map_err(|e| Error::Numeric(format!("least-squares solve failed: {e}")))?;
        let flat = b - &self.op.matrix * xi;
        let horizontal = self.op.unflatten_ambient(&flat);
        let drift = self.op.adjoint_apply(&horizontal).norm();
        if drift > self.guard_tol * (S::one() + delta.norm()) {
            return Err(Error::Numeric(format!(
                "projected vector is not orthogonal to the orbit: drift {:.3e}",
                drift.to_f64(),
            )));
        }
        Ok(horizontal)
    }
}

/// One-shot horizontal projection; see [`HorizontalProjector`] for the
/// cached form.
pub fn horizontal_project<S: Real>(
    rep: &Representation<S>,
    theta: &[S],
    delta: &TangentVector<S>,
    opts: &ModuliOptions<S>,
) -> Result<TangentVector<S>> {
    HorizontalProjector::new(rep, theta, opts)?.project(delta)
}

/// Complex dimension of the horizontal space at any base point (no
/// Einstein–Hermitian or Schur requirement: this is plain rank counting).
pub fn horizontal_dimension<S: Real>(rep: &Representation<S>) -> usize {
    let op = orbit_operator(rep);
    op.codomain_dim() - op.rank()
}

/// The descended pairing evaluated through horizontal lifts.
#[derive(Debug, Clone, Copy)]
pub struct ModuliPairing<S: Real = f64> {
    /// Hermitian metric value `<d1_h, d2_h>`.
    pub metric: Complex<S>,
    /// Kähler form value `Omega(d1_h, d2_h) = -2 Im <d1_h, d2_h>`.
    pub form: S,
}

/// Metric and Kähler form of the moduli space at an Einstein–Hermitian
/// Schur point, on (lifts of) two tangent vectors.
pub fn moduli_metric<S: Real>(
    rep: &Representation<S>,
    theta: &[S],
    d1: &TangentVector<S>,
    d2: &TangentVector<S>,
    opts: &ModuliOptions<S>,
) -> Result<ModuliPairing<S>> {
    let projector = HorizontalProjector::new(rep, theta, opts)?;
    let h1 = projector.project(d1)?;
    let h2 = projector.project(d2)?;
    Ok(ModuliPairing {
        metric: ambient_inner(h1.mats(), h2.mats()),
        form: omega_form(h1.mats(), h2.mats()),
    })
}

/// Quadrature summary for the Kronecker moduli sphere.
#[derive(Debug, Clone)]
pub struct KroneckerModuliReport<S: Real = f64> {
    pub n_grid: usize,
    pub r_max: S,
    /// Contribution of the polar grid on `|z| <= r_max`.
    pub interior: S,
    /// Analytic tail beyond `r_max`, using the `C / |z|^4` decay of the
    /// chart density with `C` fitted on the outermost ring.
    pub tail: S,
    /// Difference between tail estimates fitted on the two outermost rings;
    /// a coarseness signal.
    pub tail_error: S,
    pub total: S,
    pub density_at_origin: S,
    pub min_density: S,
    pub max_density: S,
    /// Ring radius and mean form density per ring.
    pub radial_profile: Vec<(S, S)>,
}

/// Density of the descended Kähler form on the Kronecker moduli chart,
/// against `du dv` at `z = u + iv`.
///
/// The chart `z -> sqrt(c) (1, z) / sqrt(1 + |z|^2)` consists of
/// Einstein–Hermitian points when the weight is `(c, -c)` with `c > 0`.
/// The density is `Theta_s(d/du, d/dv)` with both coordinate vectors lifted
/// along the chart and projected horizontally; the exact value is
/// `2 c / (1 + |z|^2)^2`.
pub fn kronecker_chart_form_density<S: Real>(u: S, v: S, theta: &[S]) -> Result<S> {
    if theta.len() != 2 {
        return Err(Error::DimensionMismatch);
    }
    let level = theta[0];
    let asym = <S as num_traits::Float>::abs(theta[0] + theta[1]);
    if level <= S::zero() || asym > S::of(1e-9) * (S::one() + <S as num_traits::Float>::abs(level))
    {
        return Err(Error::Numeric(format!(
            "no Einstein–Hermitian chart for weight ({}, {}): need the ray (c, -c) with c > 0",
            theta[0].to_f64(),
            theta[1].to_f64(),
        )));
    }
    let scale = <S as num_traits::Float>::sqrt(level);
    let opts = ModuliOptions::default();
    let s2 = S::one() + u * u + v * v;
    let s = <S as num_traits::Float>::sqrt(s2);
    let s3 = s2 * s;
    let z = Complex::new(u, v);
    let a = Complex::new(scale / s, S::zero());
    let b = z * Complex::new(scale / s, S::zero());
    let rep = Representation::kronecker(a, b);
    let projector = HorizontalProjector::new(&rep, theta, &opts)?;
    let lift = |first: Complex<S>, along: S| -> Result<TangentVector<S>> {
        // d/dt of sqrt(c) (1, z) / s with dz/dt = first, d(s)/dt = along / s.
        let du0 = Complex::new(-scale * along / s3, S::zero());
        let du1 = first * Complex::new(scale / s, S::zero())
            - z * Complex::new(scale * along / s3, S::zero());
        TangentVector::new(
            &rep,
            vec![CMat::from_element(1, 1, du0), CMat::from_element(1, 1, du1)],
        )
    };
    let del_u = projector.project(&lift(Complex::new(S::one(), S::zero()), u)?)?;
    let del_v = projector.project(&lift(Complex::new(S::zero(), S::one()), v)?)?;
    Ok(omega_form(del_u.mats(), del_v.mats()))
}

/// Integrate the descended Kähler form over the moduli of stable Kronecker
/// representations with dimension vector `(1, 1)`.
///
/// The weight must lie on the ray `(c, -c)`, `c > 0`: those are the weights
/// for which the chart `z -> sqrt(c) (1, z) / sqrt(1 + |z|^2)` consists of
/// Einstein–Hermitian points.  The moduli space is a sphere and the exact
/// total is `2 pi c`.
pub fn kronecker_moduli_report<S: Real>(
    n_grid: usize,
    theta: &[S],
) -> Result<KroneckerModuliReport<S>> {
    if theta.len() != 2 {
        return Err(Error::DimensionMismatch);
    }
    let level = theta[0];
    let asym = <S as num_traits::Float>::abs(theta[0] + theta[1]);
    if level <= S::zero() || asym > S::of(1e-9) * (S::one() + <S as num_traits::Float>::abs(level))
    {
        return Err(Error::Numeric(format!(
            "no Einstein–Hermitian chart for weight ({}, {}): need the ray (c, -c) with c > 0",
            theta[0].to_f64(),
            theta[1].to_f64(),
        )));
    }
    let density_at_origin = kronecker_chart_form_density(S::zero(), S::zero(), theta)?;
    let mut min_density = density_at_origin;
    let mut max_density = density_at_origin;
    let quad = polar_quadrature(n_grid, S::of(10.0), |u, v| {
        let density = kronecker_chart_form_density(u, v, theta)?;
        if density < min_density {
            min_density = density;
        }
        if density > max_density {
            max_density = density;
        }
        Ok(density)
    })?;

    Ok(KroneckerModuliReport {
        n_grid,
        r_max: quad.r_max,
        interior: quad.interior,
        tail: quad.tail,
        tail_error: quad.tail_error,
        total: quad.total,
        density_at_origin,
        min_density,
        max_density,
        radial_profile: quad.radial_profile,
    })
}

/// Outcome of a midpoint polar quadrature with an analytic `C / r^4` tail.
#[derive(Debug, Clone)]
pub(crate) struct PolarQuadrature<S: Real = f64> {
    pub r_max: S,
    pub interior: S,
    pub tail: S,
    pub tail_error: S,
    pub total: S,
    pub radial_profile: Vec<(S, S)>,
}

/// Integrate `density(u, v) du dv` over the plane: midpoint polar rule on the
/// disc of radius `r_max` plus a `pi C / r_max^2` tail with `C` fitted on the
/// outermost ring.  The shift between the two outermost ring fits bounds the
/// tail uncertainty; an uncertainty above five percent of the total is
/// reported as a too-coarse grid.
pub(crate) fn polar_quadrature<S: Real>(
    n_grid: usize,
    r_max: S,
    mut density_at: impl FnMut(S, S) -> Result<S>,
) -> Result<PolarQuadrature<S>> {
    if n_grid < 4 {
        return Err(Error::Numeric(format!(
            "grid size {n_grid} is too coarse for a tail estimate",
        )));
    }
    let dr = r_max / S::of(n_grid as f64);
    let dphi = S::of(std::f64::consts::TAU) / S::of(n_grid as f64);
    let half = S::of(0.5);

    let mut interior = S::zero();
    let mut radial_profile = Vec::with_capacity(n_grid);
    for i in 0..n_grid {
        let r = (S::of(i as f64) + half) * dr;
        let mut ring_sum = S::zero();
        for j in 0..n_grid {
            let phi = (S::of(j as f64) + half) * dphi;
            let u = r * <S as num_traits::Float>::cos(phi);
            let v = r * <S as num_traits::Float>::sin(phi);
            let density = density_at(u, v)?;
            ring_sum += density;
            interior += density * r * dr * dphi;
        }
        radial_profile.push((r, ring_sum / S::of(n_grid as f64)));
    }

    let ring_coefficient = |idx: usize| -> S {
        let (r, mean) = radial_profile[idx];
        mean * r * r * r * r
    };
    let c_outer = ring_coefficient(n_grid - 1);
    let c_inner = ring_coefficient(n_grid - 2);
    let pi = S::of(std::f64::consts::PI);
    let tail = pi * c_outer / (r_max * r_max);
    let tail_error = pi * <S as num_traits::Float>::abs(c_outer - c_inner) / (r_max * r_max);
    let total = interior + tail;
    if tail_error > S::of(0.05) * <S as num_traits::Float>::abs(total) {
        return Err(Error::Numeric(format!(
            "grid size {n_grid} is too coarse: tail estimate uncertain by {:.3e}",
            tail_error.to_f64(),
        )));
    }

    Ok(PolarQuadrature {
        r_max,
        interior,
        tail,
        tail_error,
        total,
        radial_profile,
    })
}

/// For a real subspace `W` of the Hermitian space `C^N` (given by an
/// arbitrary real spanning set), compute independently the symplectic
/// complement of `W` and the metric complement of `sqrt(-1) W`, and return
/// the Frobenius distance of their orthogonal projectors.  The two
/// complements coincide.
pub fn complement_identity_residual<S: Real>(
    ambient_dim: usize,
    span: &[Vec<Complex<S>>],
) -> Result<S> {
    let n = ambient_dim;
    for w in span {
        if w.len() != n {
            return Err(Error::DimensionMismatch);
        }
    }
    let two = S::one() + S::one();

    // Side one: null space of the functionals x -> Omega(w_k, x), written
    // in realified coordinates [Re x; Im x].
    let mut pairings = CMat::<S>::zeros(span.len(), 2 * n);
    for (k, w) in span.iter().enumerate() {
        for j in 0..n {
            pairings[(k, j)] = c::<S>((-two * w[j].im).to_f64(), 0.0);
            pairings[(k, n + j)] = c::<S>((two * w[j].re).to_f64(), 0.0);
        }
    }
    let side_omega = linalg::null_space(&pairings, None);

    // Side two: orthonormalize the realification of sqrt(-1) W and take the
    // metric orthocomplement (B is twice the real dot product, so the
    // factor drops out of the orthogonality conditions).
    let mut rotated = CMat::<S>::zeros(2 * n, span.len());
    for (k, w) in span.iter().enumerate() {
        for j in 0..n {
            rotated[(j, k)] = c::<S>((-w[j].im).to_f64(), 0.0);
            rotated[(n + j, k)] = c::<S>(w[j].re.to_f64(), 0.0);
        }
    }
    let q = linalg::orthonormalize(&rotated);
    let side_b = linalg::null_space(&q.adjoint(), None);

    let p1 = &side_omega * side_omega.adjoint();
    let p2 = &side_b * side_b.adjoint();
    Ok((p1 - p2).norm())
}
