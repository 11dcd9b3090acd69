//! The wall-and-chamber structure on weight space for a fixed dimension
//! vector: the relevant subdimension vectors, the hyperplanes where slopes
//! tie, and facet signatures.
//!
//! Two weights with the same signature classify exactly the same
//! representations of dimension `d`, so signatures are the canonical facet
//! labels; no explicit face lattice is ever built.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, Signed, Zero};

use crate::error::Result;
use crate::weight::Weight;

/// Subdimension vectors `0 <= e <= d` that are not rational multiples of
/// `d`, in lexicographic order.  These are exactly the subobject dimensions
/// whose slope can differ from the slope of `d`.
pub fn enumerate_subdims(d: &[usize]) -> Vec<Vec<usize>> {
    assert!(d.iter().sum::<usize>() > 0, "dimension vector must be nonzero");
    let mut out = Vec::new();
    let mut e = vec![0usize; d.len()];
    loop {
        if !in_rational_span(&e, d) {
            out.push(e.clone());
        }
        // Lexicographic odometer over the box [0, d].
        let mut k = d.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if e[k] < d[k] {
                e[k] += 1;
                for ej in &mut e[k + 1..] {
                    *ej = 0;
                }
                break;
            }
        }
    }
}

/// Is `e` a rational multiple of `d`?  Decided by pairwise cross products,
/// exactly.  The zero vector is a multiple of everything.
pub fn in_rational_span(e: &[usize], d: &[usize]) -> bool {
    for a in 0..d.len() {
        for b in (a + 1)..d.len() {
            if (e[a] as u128) * (d[b] as u128) != (e[b] as u128) * (d[a] as u128) {
                return false;
            }
        }
    }
    true
}

/// One slope-tie hyperplane: the locus of weights where `mu(e) = mu(d)`,
/// cut out by the nonzero functional with coefficients
/// `d_a / rk(d) - e_a / rk(e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub e: Vec<usize>,
    pub coeffs: Vec<BigRational>,
}

impl Hyperplane {
    /// Exact value of the functional at a weight: `mu_theta(d) - mu_theta(e)`.
    pub fn evaluate(&self, theta: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .zip(theta)
            .map(|(c, t)| c * t)
            .sum()
    }
}

/// The full arrangement for one dimension vector.
#[derive(Debug, Clone)]
pub struct Arrangement {
    d: Vec<usize>,
    hyperplanes: Vec<Hyperplane>,
}

impl Arrangement {
    pub fn new(d: &[usize]) -> Result<Self> {
        let rank_d = BigInt::from(d.iter().sum::<usize>());
        let hyperplanes = enumerate_subdims(d)
            .into_iter()
            .map(|e| {
                let rank_e = BigInt::from(e.iter().sum::<usize>());
                let coeffs: Vec<BigRational> = d
                    .iter()
                    .zip(&e)
                    .map(|(&da, &ea)| {
                        BigRational::new(da.into(), rank_d.clone())
                            - BigRational::new(ea.into(), rank_e.clone())
                    })
                    .collect();
                debug_assert!(
                    coeffs.iter().any(|c| !c.is_zero()),
                    "e outside the span of d gives a nonzero functional"
                );
                Hyperplane { e, coeffs }
            })
            .collect();
        Ok(Arrangement {
            d: d.to_vec(),
            hyperplanes,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.d
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    /// Signs of every hyperplane functional at `theta`.
    pub fn signature(&self, theta: &[BigRational]) -> FacetSignature {
        assert_eq!(theta.len(), self.d.len());
        let entries = self
            .hyperplanes
            .iter()
            .map(|h| {
                let v = h.evaluate(theta);
                let sign = if v.is_zero() {
                    0
                } else if v.is_positive() {
                    1
                } else {
                    -1
                };
                (h.e.clone(), sign)
            })
            .collect();
        FacetSignature { entries }
    }
}

/// The facet label of a weight: the sign of `mu(d) - mu(e)` for every
/// relevant `e`.  Equal signatures mean the same facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetSignature {
    entries: Vec<(Vec<usize>, i8)>,
}

impl FacetSignature {
    pub fn entries(&self) -> &[(Vec<usize>, i8)] {
        &self.entries
    }

    pub fn sign_at(&self, e: &[usize]) -> Option<i8> {
        self.entries
            .iter()
            .find(|(v, _)| v == e)
            .map(|&(_, s)| s)
    }
}

pub fn facet_signature(theta: &Weight, d: &[usize]) -> Result<FacetSignature> {
    Ok(Arrangement::new(d)?.signature(theta))
}

/// Do two weights lie in the same facet for dimension vector `d`?
pub fn same_facet(theta: &Weight, omega: &Weight, d: &[usize]) -> Result<bool> {
    let arr = Arrangement::new(d)?;
    Ok(arr.signature(theta) == arr.signature(omega))
}

/// The primitive integral weight on the ray through `theta`: clear
/// denominators by their lcm, then divide by the gcd of the entries.
/// Positive rescaling fixes every functional's sign, so the result lies in
/// the same facet as `theta` for every dimension vector.
pub fn integral_weight_in_facet(theta: &Weight, d: &[usize]) -> Result<Weight> {
    let mut lcm = BigInt::from(1);
    for t in theta {
        lcm = lcm.lcm(t.denom());
    }
    let mut ints: Vec<BigInt> = theta
        .iter()
        .map(|t| (t * &lcm).to_integer())
        .collect();
    let mut gcd = BigInt::zero();
    for v in &ints {
        gcd = gcd.gcd(v);
    }
    if !gcd.is_zero() {
        for v in &mut ints {
            *v = &*v / &gcd;
        }
    }
    let omega: Weight = ints.into_iter().map(BigRational::from_integer).collect();
    debug_assert!(same_facet(theta, &omega, d)?);
    Ok(omega)
}
