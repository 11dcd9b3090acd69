//! Exact rational weights, degrees and slopes.
//!
//! All slope comparisons downstream of stability decisions happen here in
//! `BigRational` arithmetic; floating point never touches a sign test.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A weight is one rational number per vertex.
pub type Weight = Vec<BigRational>;

/// Parse a rational from `"p/q"`, an integer string, or a plain decimal
/// (`"0.25"` becomes 1/4).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        let frac: BigInt = frac_part.parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut numer = int.abs() * &scale + frac;
        if negative {
            numer = -numer;
        }
        return Some(BigRational::new(numer, scale));
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// Render as `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn weight_to_scalars<S: Real>(w: &[BigRational]) -> Vec<S> {
    w.iter().map(|r| S::of(rational_to_f64(r))).collect()
}

pub fn weight_from_integers(v: &[i64]) -> Weight {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

/// `deg_theta(e) = sum_a theta_a e_a`, exactly.
pub fn degree(theta: &[BigRational], e: &[usize]) -> BigRational {
    theta
        .iter()
        .zip(e)
        .map(|(t, &ea)| t * BigInt::from(ea))
        .sum()
}

/// Exact degree, rank and slope of a dimension vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeData {
    pub degree: BigRational,
    pub rank: usize,
    pub slope: BigRational,
}

/// `mu_theta(d) = deg_theta(d) / rk(d)` in exact arithmetic.
pub fn slope(theta: &[BigRational], d: &[usize]) -> Result<SlopeData> {
    assert_eq!(theta.len(), d.len(), "weight and dimension vector lengths");
    let rank: usize = d.iter().sum();
    if rank == 0 {
        return Err(Error::ZeroDimensionVector);
    }
    let degree = degree(theta, d);
    let slope = &degree / BigInt::from(rank);
    Ok(SlopeData {
        degree,
        rank,
        slope,
    })
}

/// The additive functional `lambda(e) = c (mu rk(e) - deg_theta(e))`, which
/// vanishes exactly on dimension vectors of slope `mu` and is negative
/// exactly on those of larger slope.
#[derive(Debug, Clone)]
pub struct KingFunctional {
    theta: Weight,
    mu: BigRational,
    c: BigRational,
}

impl KingFunctional {
    pub fn new(theta: Weight, mu: BigRational, c: BigRational) -> Self {
        assert!(c.is_positive(), "scaling constant must be positive");
        KingFunctional { theta, mu, c }
    }

    pub fn evaluate(&self, e: &[usize]) -> BigRational {
        let rank: usize = e.iter().sum();
        let val = &self.mu * BigInt::from(rank) - degree(&self.theta, e);
        &self.c * val
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn slopes_are_exact() {
        let s = slope(&weight_from_integers(&[3]), &[2]).unwrap();
        assert_eq!(s.degree, rat(6, 1));
        assert_eq!(s.rank, 2);
        assert_eq!(s.slope, rat(3, 1));

        let s = slope(&weight_from_integers(&[1, -1]), &[1, 1]).unwrap();
        assert_eq!(s.slope, rat(0, 1));

        let s = slope(&weight_from_integers(&[3, 0]), &[1, 2]).unwrap();
        assert_eq!(s.degree, rat(3, 1));
        assert_eq!(s.rank, 3);
        assert_eq!(s.slope, rat(1, 1));
    }

    #[test]
    fn zero_dimension_vector_has_no_slope() {
        assert!(matches!(
            slope(&weight_from_integers(&[1, -1]), &[0, 0]),
            Err(Error::ZeroDimensionVector)
        ));
    }

    #[test]
    fn king_functional_sign_tracks_slope() {
        let theta = weight_from_integers(&[1, -1]);
        let lam = KingFunctional::new(theta, rat(0, 1), rat(1, 1));
        assert_eq!(lam.evaluate(&[1, 1]), rat(0, 1));
        assert_eq!(lam.evaluate(&[2, 2]), rat(0, 1));
        // Slope 1 > 0 at (1,0): negative value flags the destabiliser.
        assert_eq!(lam.evaluate(&[1, 0]), rat(-1, 1));
        assert_eq!(lam.evaluate(&[0, 1]), rat(1, 1));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2"), Some(rat(1, 2)));
        assert_eq!(parse_rational(" -3/10 "), Some(rat(-3, 10)));
        assert_eq!(parse_rational("7"), Some(rat(7, 1)));
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("1/2/3"), None);
    }

    #[test]
    fn formatting_round_trips() {
        for s in ["1/2", "-3/10", "7", "0"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
            assert_eq!(parse_rational(&format_rational(&r)), Some(r));
        }
    }
}
