//! Hermitian metrics, the gauge group and its Lie algebra, the vertex-wise
//! curvature operator `K_theta`, and the moment map `L_theta` together with
//! its defining identity.
//!
//! Conventions: the group acts on the right by
//! `(rho . g)_alpha = g_dst^{-1} rho_alpha g_src`; the ambient space of
//! matrix tuples carries `<v, w> = sum_alpha tr(v_alpha w_alpha^H)`, the
//! symplectic form is `Omega = -2 Im<., .>` and the Riemannian one
//! `B = 2 Re<., .>`; the compact Lie algebra pairs by
//! `<xi, eta> = -sum_a tr(xi_a eta_a)`.

use num::complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::rep::Representation;
use crate::scalar::{c, Real};

/// A positive-definite Hermitian matrix per vertex.
#[derive(Debug, Clone)]
pub struct HermitianFamily<S: Real = f64> {
    mats: Vec<CMat<S>>,
}

impl<S: Real> HermitianFamily<S> {
    /// Validates Hermitian symmetry and positive-definiteness.
    pub fn new(mats: Vec<CMat<S>>) -> Result<Self> {
        for (a, h) in mats.iter().enumerate() {
            assert_eq!(h.nrows(), h.ncols(), "metrics are square");
            if h.nrows() == 0 {
                continue;
            }
            let defect = linalg::hermitian_defect(h);
            if defect > S::of(1e-10) * (S::one() + h.norm()) {
                return Err(Error::NotPositiveDefinite(a.to_string()));
            }
            let (eigs, _) = linalg::hermitian_eigen(h);
            if eigs.iter().any(|&l| l <= S::zero()) {
                return Err(Error::NotPositiveDefinite(a.to_string()));
            }
        }
        Ok(HermitianFamily { mats })
    }

    pub fn identity(dims: &[usize]) -> Self {
        HermitianFamily {
            mats: dims.iter().map(|&d| CMat::identity(d, d)).collect(),
        }
    }

    pub fn mats(&self) -> &[CMat<S>] {
        &self.mats
    }

    pub fn get(&self, vertex: usize) -> &CMat<S> {
        &self.mats[vertex]
    }

    fn inverses(&self) -> Vec<CMat<S>> {
        self.mats
            .iter()
            .map(|h| {
                if h.nrows() == 0 {
                    h.clone()
                } else {
                    h.clone().try_inverse().expect("positive definite metric")
                }
            })
            .collect()
    }
}

/// An invertible matrix per vertex: an element of the gauge group.
#[derive(Debug, Clone)]
pub struct GroupElement<S: Real = f64> {
    mats: Vec<CMat<S>>,
}

impl<S: Real> GroupElement<S> {
    pub fn new(mats: Vec<CMat<S>>) -> Self {
        GroupElement { mats }
    }

    pub fn identity(dims: &[usize]) -> Self {
        GroupElement {
            mats: dims.iter().map(|&d| CMat::identity(d, d)).collect(),
        }
    }

    /// Haar-ish random unitary family: QR of a Gaussian sample per vertex.
    pub fn random_unitary<R: Rng>(dims: &[usize], rng: &mut R) -> Self {
        let mats = dims
            .iter()
            .map(|&d| {
                if d == 0 {
                    CMat::zeros(0, 0)
                } else {
                    linalg::gaussian_matrix::<S>(rng, d, d).qr().q()
                }
            })
            .collect();
        GroupElement { mats }
    }

    pub fn mats(&self) -> &[CMat<S>] {
        &self.mats
    }

    pub fn get(&self, vertex: usize) -> &CMat<S> {
        &self.mats[vertex]
    }

    /// Vertex-wise product `(self * other)_a = self_a other_a`, matching
    /// composition of right actions: `(rho . g) . g' = rho . (g g')`.
    pub fn compose(&self, other: &GroupElement<S>) -> GroupElement<S> {
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| a * b)
            .collect();
        GroupElement { mats }
    }

    pub fn inverse(&self) -> Result<GroupElement<S>> {
        let mats = self
            .mats
            .iter()
            .enumerate()
            .map(|(a, g)| {
                if g.nrows() == 0 {
                    Ok(g.clone())
                } else {
                    g.clone()
                        .try_inverse()
                        .ok_or_else(|| Error::SingularGroupElement(a.to_string()))
                }
            })
            .collect::<Result<_>>()?;
        Ok(GroupElement { mats })
    }

    /// Apply on the right: `(rho . g)_alpha = g_dst^{-1} rho_alpha g_src`.
    pub fn act(&self, rep: &Representation<S>) -> Result<Representation<S>> {
        let inv = self.inverse()?;
        let mats = rep
            .quiver()
            .arrows()
            .iter()
            .enumerate()
            .map(|(i, ar)| &inv.mats[ar.dst] * rep.matrix(i) * &self.mats[ar.src])
            .collect();
        Representation::new(rep.quiver().clone(), rep.dims().to_vec(), mats)
    }

    /// `max_a ‖g_a^H g_a - I‖`, zero exactly for unitary families.
    pub fn unitary_defect(&self) -> S {
        let mut worst = S::zero();
        for g in &self.mats {
            let d = (g.adjoint() * g - CMat::<S>::identity(g.nrows(), g.ncols())).norm();
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

/// A matrix per vertex: an element of the gauge Lie algebra.
#[derive(Debug, Clone)]
pub struct LieElement<S: Real = f64> {
    mats: Vec<CMat<S>>,
}

impl<S: Real> LieElement<S> {
    pub fn new(mats: Vec<CMat<S>>) -> Self {
        LieElement { mats }
    }

    pub fn zero(dims: &[usize]) -> Self {
        LieElement {
            mats: dims.iter().map(|&d| CMat::zeros(d, d)).collect(),
        }
    }

    /// The identity family `e`, generator of the central torus.
    pub fn central(dims: &[usize]) -> Self {
        LieElement {
            mats: dims.iter().map(|&d| CMat::identity(d, d)).collect(),
        }
    }

    /// Gaussian sample of the full Lie algebra.
    pub fn random<R: Rng>(dims: &[usize], rng: &mut R) -> Self {
        LieElement {
            mats: dims
                .iter()
                .map(|&d| linalg::gaussian_matrix::<S>(rng, d, d))
                .collect(),
        }
    }

    /// Gaussian sample of the compact (skew-Hermitian) part.
    pub fn random_skew<R: Rng>(dims: &[usize], rng: &mut R) -> Self {
        LieElement {
            mats: dims
                .iter()
                .map(|&d| {
                    let a = linalg::gaussian_matrix::<S>(rng, d, d);
                    (&a - a.adjoint()) * c::<S>(0.5, 0.0)
                })
                .collect(),
        }
    }

    pub fn mats(&self) -> &[CMat<S>] {
        &self.mats
    }

    pub fn get(&self, vertex: usize) -> &CMat<S> {
        &self.mats[vertex]
    }

    pub fn scaled(&self, s: Complex<S>) -> LieElement<S> {
        LieElement {
            mats: self.mats.iter().map(|m| m * s).collect(),
        }
    }

    pub fn add(&self, other: &LieElement<S>) -> LieElement<S> {
        LieElement {
            mats: self
                .mats
                .iter()
                .zip(&other.mats)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `sum_a tr xi_a`.
    pub fn trace_sum(&self) -> Complex<S> {
        self.mats.iter().map(|m| m.trace()).sum()
    }

    /// The scalar part `c(xi) = tr xi / rk d` of the central/traceless split.
    pub fn scalar_part(&self) -> Complex<S> {
        let rank: usize = self.mats.iter().map(|m| m.nrows()).sum();
        self.trace_sum() / c::<S>(rank as f64, 0.0)
    }

    /// `xi - c(xi) e`, which has total trace zero.
    pub fn traceless_part(&self) -> LieElement<S> {
        let s = self.scalar_part();
        LieElement {
            mats: self
                .mats
                .iter()
                .map(|m| m - CMat::<S>::identity(m.nrows(), m.ncols()) * s)
                .collect(),
        }
    }

    /// Frobenius norm over all vertices.
    pub fn norm(&self) -> S {
        let mut acc = S::zero();
        for m in &self.mats {
            let n = m.norm();
            acc += n * n;
        }
        <S as num_traits::Float>::sqrt(acc)
    }

    /// `max_a ‖xi_a + xi_a^H‖`, zero exactly on the compact part.
    pub fn skew_defect(&self) -> S {
        let mut worst = S::zero();
        for m in &self.mats {
            let d = (m + m.adjoint()).norm();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// Vertex-wise matrix exponential.
    pub fn exp(&self) -> GroupElement<S> {
        GroupElement {
            mats: self.mats.iter().map(linalg::matrix_exp).collect(),
        }
    }
}

/// `<xi, eta> = -sum_a tr(xi_a eta_a)`; real and positive-definite on
/// skew-Hermitian pairs.
pub fn lie_inner<S: Real>(xi: &LieElement<S>, eta: &LieElement<S>) -> Complex<S> {
    let mut acc = Complex::new(S::zero(), S::zero());
    for (a, b) in xi.mats.iter().zip(&eta.mats) {
        acc += (a * b).trace();
    }
    -acc
}

/// Hermitian inner product on tuples of arrow matrices:
/// `sum_alpha tr(v_alpha w_alpha^H)`.
pub fn ambient_inner<S: Real>(v: &[CMat<S>], w: &[CMat<S>]) -> Complex<S> {
    v.iter()
        .zip(w)
        .map(|(a, b)| linalg::frobenius_inner(a, b))
        .sum()
}

pub fn ambient_norm<S: Real>(v: &[CMat<S>]) -> S {
    let ip = ambient_inner(v, v).re;
    <S as num_traits::Float>::sqrt(<S as num_traits::Float>::max(ip, S::zero()))
}

/// The symplectic form `Omega(v, w) = -2 Im<v, w>`.
pub fn omega_form<S: Real>(v: &[CMat<S>], w: &[CMat<S>]) -> S {
    -(S::one() + S::one()) * ambient_inner(v, w).im
}

/// The Riemannian form `B(v, w) = 2 Re<v, w>`.
pub fn b_form<S: Real>(v: &[CMat<S>], w: &[CMat<S>]) -> S {
    (S::one() + S::one()) * ambient_inner(v, w).re
}

/// Infinitesimal action at `rho`:
/// `D_rho(xi)_alpha = rho_alpha xi_src - xi_dst rho_alpha`.
pub fn orbit_derivative<S: Real>(rep: &Representation<S>, xi: &LieElement<S>) -> Vec<CMat<S>> {
    rep.quiver()
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, ar)| rep.matrix(i) * &xi.mats[ar.src] - &xi.mats[ar.dst] * rep.matrix(i))
        .collect()
}

/// The curvature operator
/// `K_theta(rho, h)_a = theta_a id + sum_{dst=a} rho rho^* - sum_{src=a} rho^* rho`
/// with adjoints `rho^* = h_src^{-1} rho^H h_dst`.
pub fn k_operator<S: Real>(
    rep: &Representation<S>,
    h: &HermitianFamily<S>,
    theta: &[S],
) -> Vec<CMat<S>> {
    assert_eq!(theta.len(), rep.dims().len());
    let h_inv = h.inverses();
    let mut k: Vec<CMat<S>> = rep
        .dims()
        .iter()
        .zip(theta)
        .map(|(&d, &t)| CMat::<S>::identity(d, d) * c::<S>(t.to_f64(), 0.0))
        .collect();
    for (i, ar) in rep.quiver().arrows().iter().enumerate() {
        let rho = rep.matrix(i);
        let rho_star = &h_inv[ar.src] * rho.adjoint() * h.get(ar.dst);
        k[ar.dst] += rho * &rho_star;
        k[ar.src] -= &rho_star * rho;
    }
    k
}

/// The moment map at the identity metric, packaged with its norm and the
/// slope constant it is centred on.
#[derive(Debug, Clone)]
pub struct MomentMap<S: Real = f64> {
    /// `L_theta(rho)_a = sqrt(-1) (K_theta(rho)_a - mu id)`: skew-Hermitian.
    pub l: LieElement<S>,
    /// `‖L_theta(rho)‖`, Frobenius over vertices.
    pub norm: S,
    /// `mu_theta(d)` as a float.
    pub mu: S,
}

/// Evaluate the moment map of `rho` at the identity metric family.
pub fn moment_map<S: Real>(rep: &Representation<S>, theta: &[S]) -> Result<MomentMap<S>> {
    let rank = rep.rank();
    if rank == 0 {
        return Err(Error::ZeroDimensionVector);
    }
    let mut deg = S::zero();
    for (&t, &d) in theta.iter().zip(rep.dims()) {
        deg += t * S::of(d as f64);
    }
    let mu = deg / S::of(rank as f64);
    let h = HermitianFamily::identity(rep.dims());
    let k = k_operator(rep, &h, theta);
    let i_unit = c::<S>(0.0, 1.0);
    let mats: Vec<CMat<S>> = k
        .into_iter()
        .map(|ka| {
            let d = ka.nrows();
            (ka - CMat::<S>::identity(d, d) * c::<S>(mu.to_f64(), 0.0)) * i_unit
        })
        .collect();
    let l = LieElement::new(mats);
    let norm = l.norm();
    Ok(MomentMap { l, norm, mu })
}

/// Einstein–Hermitian residual of `(rho, h)`: Frobenius distance of
/// `K_theta(rho, h)` from `mu id`, over all vertices.
pub fn eh_residual<S: Real>(
    rep: &Representation<S>,
    h: &HermitianFamily<S>,
    theta: &[S],
) -> Result<S> {
    let rank = rep.rank();
    if rank == 0 {
        return Err(Error::ZeroDimensionVector);
    }
    let mut deg = S::zero();
    for (&t, &d) in theta.iter().zip(rep.dims()) {
        deg += t * S::of(d as f64);
    }
    let mu = deg / S::of(rank as f64);
    let k = k_operator(rep, h, theta);
    let mut acc = S::zero();
    for ka in k {
        let d = ka.nrows();
        let n = (ka - CMat::<S>::identity(d, d) * c::<S>(mu.to_f64(), 0.0)).norm();
        acc += n * n;
    }
    Ok(<S as num_traits::Float>::sqrt(acc))
}

/// Residual of the defining identity of the moment map,
/// `Phi(rho)(xi) = (1/2) Omega(D_rho(xi), rho) + <xi, eta>` with
/// `eta_a = sqrt(-1)(theta_a - mu) id`; both sides are computed
/// independently and the absolute difference returned.
pub fn moment_identity_residual<S: Real>(
    rep: &Representation<S>,
    xi: &LieElement<S>,
    theta: &[S],
) -> Result<S> {
    let defect = xi.skew_defect();
    if defect > S::of(1e-8) * (S::one() + xi.norm()) {
        return Err(Error::NotSkewHermitian(defect.to_f64()));
    }
    let mm = moment_map(rep, theta)?;
    let lhs = lie_inner(xi, &mm.l).re;

    let pushed = orbit_derivative(rep, xi);
    let half_omega = -ambient_inner(&pushed, rep.matrices()).im;
    let eta = LieElement::new(
        rep.dims()
            .iter()
            .zip(theta)
            .map(|(&d, &t)| CMat::<S>::identity(d, d) * c::<S>(0.0, (t - mm.mu).to_f64()))
            .collect(),
    );
    let alpha = lie_inner(xi, &eta).re;
    let rhs = half_omega + alpha;
    Ok(<S as num_traits::Float>::abs(lhs - rhs))
}
