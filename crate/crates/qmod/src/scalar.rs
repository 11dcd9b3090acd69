//! Scalar abstraction for the floating-point layer.
//!
//! Everything numeric is generic over a real scalar `S` implementing
//! [`Real`]; complex data is stored as `Complex<S>` matrices.  Exact
//! quantities — weights, degrees, slopes, facet signs — never pass through
//! this trait: they are arbitrary-precision rationals throughout and live in
//! [`crate::weight`].

use nalgebra::RealField;
use num::complex::Complex;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.  The concrete aliases at the crate
/// root fix `f64`, which is what the CLI uses and what the default tolerances
/// are calibrated for.
pub trait Real: RealField + Float + FromPrimitive + Copy + Default + Send + Sync {
    /// Conversion from `f64`, for constants and tolerances.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 constant")
    }

    /// Lossy conversion to `f64`, for reporting.
    fn to_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("real scalar fits in f64")
    }
}

impl<S> Real for S where S: RealField + Float + FromPrimitive + Copy + Default + Send + Sync {}

/// Complex number over the generic scalar.
pub fn c<S: Real>(re: f64, im: f64) -> Complex<S> {
    Complex::new(S::of(re), S::of(im))
}

/// Purely real complex number over the generic scalar.
pub fn re<S: Real>(x: f64) -> Complex<S> {
    c(x, 0.0)
}

/// The imaginary unit.
pub fn i<S: Real>() -> Complex<S> {
    c(0.0, 1.0)
}
