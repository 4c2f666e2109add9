//! Scalar abstractions.
//!
//! Group arithmetic is exact on exponent tuples, but the realizations as
//! matrices and the polynomial maps are generic. [`Scalar`] is the ring-level
//! bound (enough for polynomial evaluation and composition with integer
//! matrices, so `i64` and `Rational64` work), [`RealScalar`] adds the
//! transcendental functions needed for rotation blocks.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign};

pub trait Scalar:
    Num
    + NumAssign
    + Copy
    + Debug
    + Display
    + PartialEq
    + Neg<Output = Self>
    + Sum
    + Send
    + Sync
    + 'static
{
    fn from_int(v: i64) -> Self;
}

impl Scalar for f32 {
    fn from_int(v: i64) -> Self {
        v as f32
    }
}

impl Scalar for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for i64 {
    fn from_int(v: i64) -> Self {
        v
    }
}

impl Scalar for num_rational::Rational64 {
    fn from_int(v: i64) -> Self {
        num_rational::Rational64::from_integer(v)
    }
}

/// Floating point scalars (`f32`, `f64`).
pub trait RealScalar: Scalar + Float + FloatConst + FromPrimitive {
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite literal")
    }
}

impl RealScalar for f32 {}
impl RealScalar for f64 {}
