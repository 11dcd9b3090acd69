//! The twisting character of a rational weight, the equivariant Hermitian
//! line bundle it defines on the space of representations, and the descent
//! of metric and curvature to the moduli of stable points.
//!
//! A weight `theta` determines the character `chi(g) = prod_a det(g_a)^{m_a}`
//! with exponents `m_a = n (mu - theta_a)`, where `n` is the least positive
//! integer clearing all denominators of the normalized weight.  The exponents
//! pair to zero with the dimension vector, so `chi` is trivial on the scalar
//! subgroup and the trivial bundle on the ambient space, twisted by `chi`,
//! descends along stable orbits.  It carries the invariant Hermitian metric
//! `h(x)(a, b) = exp(lambda ‖x‖^2) a conj(b)` with `lambda = -n`, whose Chern
//! curvature is the constant multiple `-(lambda / 2 pi) Omega` of the ambient
//! Kähler form.  Differentiating the twisted action produces the covariance
//! identity `nabla_{xi#} s = xi s - lambda sqrt(-1) Phi^xi s`, where `Phi` is
//! the weight moment map: the character supplies exactly the constant shift
//! that centres the moment map on the slope.
//!
//! On the Kronecker moduli sphere the descended metric is evaluated through
//! the quotient construction — transport the frame along the group to the
//! zero level and read off the invariant metric there — and its curvature
//! density reproduces `n / (2 pi)` times the descended Kähler form, so the
//! total curvature integral is the twist `n` itself.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::moment::{ambient_inner, omega_form, orbit_derivative, GroupElement, LieElement};
use crate::moduli::{kronecker_chart_form_density, polar_quadrature, TangentVector};
use crate::rep::Representation;
use crate::scalar::Real;
use crate::weight::slope;
use num::bigint::BigInt;
use num::complex::Complex;
use num::rational::BigRational;
use num::{Integer, One, ToPrimitive};

/// Central finite-difference step for chart curvature densities.
const CHART_STEP: f64 = 1e-3;

/// Central finite-difference step for the equivariant-derivative check.
const COVARIANCE_STEP: f64 = 3e-6;

/// The least positive `n` for which every `n (theta_a - mu)` is an integer.
pub fn minimal_n(theta: &[BigRational], dims: &[usize]) -> Result<u64> {
    if theta.len() != dims.len() {
        return Err(Error::DimensionMismatch);
    }
    let mu = slope(theta, dims)?.slope;
    let mut n = BigInt::one();
    for t in theta {
        let diff = t - &mu;
        n = n.lcm(diff.denom());
    }
    n.to_u64()
        .ok_or_else(|| Error::Numeric("character twist does not fit in 64 bits".into()))
}

/// Integer data of the twisting character: the twist `n` and the vertex
/// exponents `m_a = n (mu - theta_a)`, computed in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineBundleData {
    n: u64,
    exponents: Vec<i64>,
}

impl LineBundleData {
    /// Character data at the minimal twist of the weight.
    pub fn new(theta: &[BigRational], dims: &[usize]) -> Result<Self> {
        let n = minimal_n(theta, dims)?;
        Self::with_twist(theta, dims, n)
    }

    /// Character data at an explicit twist, which must clear all
    /// denominators of the normalized weight.
    pub fn with_twist(theta: &[BigRational], dims: &[usize], n: u64) -> Result<Self> {
        if theta.len() != dims.len() {
            return Err(Error::DimensionMismatch);
        }
        if n == 0 {
            return Err(Error::Numeric("the twist must be positive".into()));
        }
        let mu = slope(theta, dims)?.slope;
        let big_n = BigRational::from_integer(BigInt::from(n));
        let mut exponents = Vec::with_capacity(theta.len());
        for t in theta {
            let m = (&mu - t) * &big_n;
            if !m.is_integer() {
                return Err(Error::Numeric(format!(
                    "twist {n} does not clear the denominators of the normalized weight",
                )));
            }
            let m = m.to_integer().to_i64().ok_or_else(|| {
                Error::Numeric("character exponent does not fit in 64 bits".into())
            })?;
            exponents.push(m);
        }
        let pairing: i128 = exponents
            .iter()
            .zip(dims)
            .map(|(&m, &d)| i128::from(m) * d as i128)
            .sum();
        debug_assert_eq!(pairing, 0, "exponents must pair to zero with the dims");
        Ok(LineBundleData { n, exponents })
    }

    /// The twist `n`.
    pub fn twist(&self) -> u64 {
        self.n
    }

    /// The metric weight `lambda = -n`.
    pub fn lambda<S: Real>(&self) -> S {
        S::of(-(self.n as f64))
    }

    /// The vertex exponents `m_a` of the character.
    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    /// Derivative of the character at the identity,
    /// `T_e chi(xi) = sum_a m_a tr(xi_a)`.
    pub fn character_derivative<S: Real>(&self, xi: &LieElement<S>) -> Result<Complex<S>> {
        if xi.mats().len() != self.exponents.len() {
            return Err(Error::DimensionMismatch);
        }
        let mut acc = Complex::new(S::zero(), S::zero());
        for (mat, &m) in xi.mats().iter().zip(&self.exponents) {
            acc += mat.trace() * Complex::new(S::of(m as f64), S::zero());
        }
        Ok(acc)
    }

    /// The constant shift `alpha(xi) = -(sqrt(-1) / lambda) T_e chi(xi)`
    /// that the character contributes to the moment map.  For skew `xi` it
    /// equals the pairing of `xi` with the central element
    /// `sqrt(-1) (theta_a - mu) id`.
    pub fn moment_shift<S: Real>(&self, xi: &LieElement<S>) -> Result<Complex<S>> {
        let d = self.character_derivative(xi)?;
        let lambda: S = self.lambda();
        Ok(Complex::new(S::zero(), -S::one() / lambda) * d)
    }
}

/// Integer power of a complex number by binary exponentiation; negative
/// exponents go through the inverse.
fn cpow<S: Real>(z: Complex<S>, m: i64) -> Complex<S> {
    let mut base = if m < 0 { z.inv() } else { z };
    let mut e = m.unsigned_abs();
    let mut acc = Complex::new(S::one(), S::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Evaluate the twisting character `chi(g) = prod_a det(g_a)^{m_a}`.
pub fn character_chi<S: Real>(g: &GroupElement<S>, data: &LineBundleData) -> Result<Complex<S>> {
    if g.mats().len() != data.exponents.len() {
        return Err(Error::DimensionMismatch);
    }
    let mut chi = Complex::new(S::one(), S::zero());
    for (a, (mat, &m)) in g.mats().iter().zip(&data.exponents).enumerate() {
        let det = mat.determinant();
        let size = det.norm();
        if !num_traits::Float::is_finite(size) || size == S::zero() {
            return Err(Error::Numeric(format!(
                "group element has a singular block at vertex {a}",
            )));
        }
        chi *= cpow(det, m);
    }
    Ok(chi)
}

/// The invariant Hermitian metric on the twisted trivial bundle,
/// `h(x)(a, b) = exp(lambda ‖x‖^2) a conj(b)`.
pub fn ambient_line_metric<S: Real>(
    x: &Representation<S>,
    a: Complex<S>,
    b: Complex<S>,
    lambda: S,
) -> Complex<S> {
    let n2 = x.norm() * x.norm();
    let weight = <S as num_traits::Float>::exp(lambda * n2);
    Complex::new(weight, S::zero()) * a * b.conj()
}

fn check_tangent_shapes<S: Real>(x: &Representation<S>, t: &TangentVector<S>) -> Result<()> {
    if t.mats().len() != x.matrices().len() {
        return Err(Error::DimensionMismatch);
    }
    for (i, (tm, xm)) in t.mats().iter().zip(x.matrices()).enumerate() {
        if tm.shape() != xm.shape() {
            return Err(Error::ShapeMismatch {
                arrow: x.quiver().arrows()[i].id.clone(),
                got_rows: tm.nrows(),
                got_cols: tm.ncols(),
                want_rows: xm.nrows(),
                want_cols: xm.ncols(),
            });
        }
    }
    Ok(())
}

/// Curvature of the Chern connection of the ambient line metric, evaluated
/// on the pair `(v, w)` by central second differences of the potential
/// `lambda ‖x‖^2`.  The exact value is `-(lambda / 2 pi) Omega(v, w)`.
pub fn ambient_chern_fd<S: Real>(
    x: &Representation<S>,
    v: &TangentVector<S>,
    w: &TangentVector<S>,
    lambda: S,
    step: S,
) -> Result<S> {
    check_tangent_shapes(x, v)?;
    check_tangent_shapes(x, w)?;
    if !(step > S::zero()) {
        return Err(Error::Numeric(
            "finite-difference step must be positive".into(),
        ));
    }
    let i_unit = Complex::new(S::zero(), S::one());
    let potential = |dir: &[CMat<S>], t: S| -> S {
        let mut acc = S::zero();
        for (xm, dm) in x.matrices().iter().zip(dir) {
            let shifted = xm + dm * Complex::new(t, S::zero());
            let nn = shifted.norm();
            acc += nn * nn;
        }
        lambda * acc
    };
    // Real Hessian of the potential on a pair of directions, by the
    // four-point mixed central difference.
    let hessian = |p: &[CMat<S>], q: &[CMat<S>]| -> S {
        let sum: Vec<CMat<S>> = p.iter().zip(q).map(|(a, b)| a + b).collect();
        let diff: Vec<CMat<S>> = p.iter().zip(q).map(|(a, b)| a - b).collect();
        (potential(&sum, step) + potential(&sum, -step)
            - potential(&diff, step)
            - potential(&diff, -step))
            / (S::of(4.0) * step * step)
    };
    let iv: Vec<CMat<S>> = v.mats().iter().map(|m| m * i_unit).collect();
    let iw: Vec<CMat<S>> = w.mats().iter().map(|m| m * i_unit).collect();
    // The (1, 1) part of the Hessian is the curvature pairing:
    // sqrt(-1) dd-bar f (v, w) = (H(iv, w) - H(v, iw)) / 2.
    let pairing = S::of(0.5) * (hessian(&iv, w.mats()) - hessian(v.mats(), &iw));
    let two_pi = S::of(std::f64::consts::TAU);
    Ok(-pairing / two_pi)
}

/// A polynomial section of the twisted trivial bundle, written as a
/// coefficient function times the flat frame.
#[derive(Debug, Clone)]
pub enum Section<S: Real = f64> {
    /// Constant multiple of the frame.
    Constant(Complex<S>),
    /// Complex-linear coordinate functional of the base point: the sum over
    /// all arrows and entries of `coefficient * entry`, times the frame.
    Linear(TangentVector<S>),
}

impl<S: Real> Section<S> {
    fn evaluate_mats(&self, mats: &[CMat<S>]) -> Complex<S> {
        match self {
            Section::Constant(a) => *a,
            Section::Linear(coeffs) => coeffs
                .mats()
                .iter()
                .zip(mats)
                .map(|(cm, xm)| {
                    cm.iter()
                        .zip(xm.iter())
                        .map(|(p, q)| p * q)
                        .sum::<Complex<S>>()
                })
                .sum(),
        }
    }

    /// The coefficient of the section against the flat frame at `x`.
    pub fn evaluate(&self, x: &Representation<S>) -> Complex<S> {
        self.evaluate_mats(x.matrices())
    }
}

/// Residual of the covariance identity
/// `nabla_{xi#} s = xi s - lambda sqrt(-1) Phi^xi s` at the point `x`, for a
/// skew element `xi`.  The covariant derivative and the equivariant
/// derivative are both evaluated by central finite differences — the latter
/// through the group action and the character — while the moment-map side is
/// assembled from the symplectic pairing and the character shift.
pub fn connection_covariance_check<S: Real>(
    xi: &LieElement<S>,
    section: &Section<S>,
    x: &Representation<S>,
    data: &LineBundleData,
) -> Result<S> {
    let defect = xi.skew_defect();
    if defect > S::of(1e-8) * (S::one() + xi.norm()) {
        return Err(Error::NotSkewHermitian(defect.to_f64()));
    }
    if xi.mats().len() != x.dims().len() || data.exponents.len() != x.dims().len() {
        return Err(Error::DimensionMismatch);
    }
    for (m, &d) in xi.mats().iter().zip(x.dims()) {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch);
        }
    }
    if let Section::Linear(coeffs) = section {
        check_tangent_shapes(x, coeffs)?;
    }

    let lambda: S = data.lambda();
    let t = S::of(COVARIANCE_STEP);
    let two_t = Complex::new(t + t, S::zero());
    let f0 = section.evaluate(x);
    let pushed = orbit_derivative(x, xi);

    // Covariant side: nabla_{xi#}(f s0) = [df(xi#) + lambda <xi#, x> f] s0.
    let shifted = |sign: S| -> Vec<CMat<S>> {
        x.matrices()
            .iter()
            .zip(&pushed)
            .map(|(xm, pm)| xm + pm * Complex::new(sign * t, S::zero()))
            .collect()
    };
    let df = (self::Section::evaluate_mats(section, &shifted(S::one()))
        - section.evaluate_mats(&shifted(-S::one())))
        / two_t;
    let nabla = df + Complex::new(lambda, S::zero()) * ambient_inner(&pushed, x.matrices()) * f0;

    // Equivariant side: (xi s)(x) = d/dt chi(exp t xi) f(x exp(t xi)).
    let fiber_at = |sign: S| -> Result<Complex<S>> {
        let g = xi.scaled(Complex::new(sign * t, S::zero())).exp();
        let moved = g.act(x)?;
        Ok(character_chi(&g, data)? * section.evaluate(&moved))
    };
    let xi_s = (fiber_at(S::one())? - fiber_at(-S::one())?) / two_t;

    // Moment-map side: Phi^xi = (1/2) Omega(xi#, x) + alpha(xi).
    let half_omega = S::of(0.5) * omega_form(&pushed, x.matrices());
    let phi = Complex::new(half_omega, S::zero()) + data.moment_shift(xi)?;

    let rhs = xi_s - Complex::new(S::zero(), lambda) * phi * f0;
    Ok((nabla - rhs).norm())
}

fn kronecker_chart_data_check(data: &LineBundleData) -> Result<()> {
    let n = data.n as i64;
    if data.exponents.len() != 2 || data.exponents[0] != -n || data.exponents[1] != n {
        return Err(Error::Numeric(
            "the descended chart needs Kronecker character data on the weight ray (1, -1)".into(),
        ));
    }
    Ok(())
}

/// Descended metric in the Kronecker chart, through the quotient
/// construction: scale the holomorphic slice `(1, z)` onto the zero level of
/// the moment map with a group element `g`, carry the frame along with the
/// fiber weight `chi(g)^{-1}`, and evaluate the invariant ambient metric.
fn chart_metric<S: Real>(u: S, v: S, data: &LineBundleData) -> Result<S> {
    let s2 = S::one() + u * u + v * v;
    let scale = S::one() / <S as num_traits::Float>::sqrt(s2);
    let sigma = Representation::kronecker(
        Complex::new(S::one(), S::zero()),
        Complex::new(u, v),
    );
    let g = GroupElement::new(vec![
        CMat::from_element(1, 1, Complex::new(scale, S::zero())),
        CMat::<S>::identity(1, 1),
    ]);
    let level = g.act(&sigma)?;
    let frame = character_chi(&g, data)?.inv();
    Ok(ambient_line_metric(&level, frame, frame, data.lambda()).re)
}

/// Chart curvature density `-(1/2 pi) dd-bar log k` against `du dv`, by the
/// five-point Laplacian stencil with one step of Richardson extrapolation.
fn chart_chern_density<S: Real>(u: S, v: S, data: &LineBundleData) -> Result<S> {
    let laplacian = |h: S| -> Result<S> {
        let center = <S as num_traits::Float>::ln(chart_metric(u, v, data)?);
        let mut acc = -S::of(4.0) * center;
        for (du, dv) in [
            (h, S::zero()),
            (-h, S::zero()),
            (S::zero(), h),
            (S::zero(), -h),
        ] {
            acc += <S as num_traits::Float>::ln(chart_metric(u + du, v + dv, data)?);
        }
        Ok(acc / (h * h))
    };
    let h = S::of(CHART_STEP);
    let fine = laplacian(h)?;
    let coarse = laplacian(h + h)?;
    let lap_log = (S::of(4.0) * fine - coarse) / S::of(3.0);
    Ok(-lap_log / (S::of(4.0) * S::of(std::f64::consts::PI)))
}

/// Descended metric and curvature data at one chart point of the Kronecker
/// moduli sphere.
#[derive(Debug, Clone)]
pub struct ChartSample<S: Real = f64> {
    pub u: S,
    pub v: S,
    /// Metric weight `k(z)` of the descended frame.
    pub metric: S,
    /// Curvature density `-(1/2 pi) dd-bar log k` against `du dv`.
    pub chern_density: S,
    /// Density of the descended Kähler form against `du dv`.
    pub form_density: S,
    /// `chern_density / form_density`; the exact value is `n / (2 pi)`.
    pub ratio: S,
}

/// Evaluate the descended metric and its curvature at `z = u + iv` on the
/// Kronecker moduli sphere, together with the descended Kähler form density
/// computed independently through the horizontal projection.
pub fn descended_metric_chart<S: Real>(
    u: S,
    v: S,
    data: &LineBundleData,
) -> Result<ChartSample<S>> {
    kronecker_chart_data_check(data)?;
    let metric = chart_metric(u, v, data)?;
    let chern_density = chart_chern_density(u, v, data)?;
    let form_density = kronecker_chart_form_density(u, v, &[S::one(), -S::one()])?;
    let ratio = chern_density / form_density;
    Ok(ChartSample {
        u,
        v,
        metric,
        chern_density,
        form_density,
        ratio,
    })
}

/// Quadrature of the descended curvature over the Kronecker moduli sphere.
#[derive(Debug, Clone)]
pub struct ChernIntegralReport<S: Real = f64> {
    pub n_grid: usize,
    pub r_max: S,
    pub interior: S,
    pub tail: S,
    pub tail_error: S,
    /// Total curvature; the exact value is the twist `n`.
    pub total: S,
}

/// Integrate the descended curvature density over the chart; the exact total
/// is the twist `n` of the character.
pub fn descended_chern_integral<S: Real>(
    n_grid: usize,
    data: &LineBundleData,
) -> Result<ChernIntegralReport<S>> {
    kronecker_chart_data_check(data)?;
    let quad = polar_quadrature(n_grid, S::of(10.0), |u, v| chart_chern_density(u, v, data))?;
    Ok(ChernIntegralReport {
        n_grid,
        r_max: quad.r_max,
        interior: quad.interior,
        tail: quad.tail,
        tail_error: quad.tail_error,
        total: quad.total,
    })
}
