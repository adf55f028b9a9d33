//! Scalar abstraction shared by every numeric module.
//!
//! All physics is written against [`Real`], which is satisfied by `f32` and
//! `f64`. The tolerances used throughout the crate assume `f64`.

use std::fmt;

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;

pub trait Real: RealField + Copy + fmt::Display + fmt::LowerExp + Send + Sync {}

impl<T> Real for T where T: RealField + Copy + fmt::Display + fmt::LowerExp + Send + Sync {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    lit(n as f64)
}

/// `e^{iθ}`
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

#[inline]
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    cis(z.im) * z.re.exp()
}

/// Principal square root.
#[inline]
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    <Complex<T> as ComplexField>::sqrt(z)
}

#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn cabs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn imag<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}

#[inline]
pub fn is_finite<T: Real>(x: T) -> bool {
    to_f64(x).is_finite()
}
