//! Numeric abstraction shared by the geometry modules.
//!
//! Interpolation only needs field arithmetic, so it runs over any [`Scalar`],
//! including exact rationals. The hexagonal projection needs `sqrt(3)` and is
//! therefore restricted to [`FloatScalar`].

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, Num, NumCast};

/// Field-like value usable as a design-space coordinate or an em-unit position.
pub trait Scalar: Copy + Num + PartialOrd + Debug + 'static {
    /// Converts from `f64`. Exact types may approximate.
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(self) -> f64;

    /// `NaN` is the only value for which this is false.
    fn is_number(self) -> bool {
        #[allow(clippy::eq_op)]
        let eq = self == self;
        eq
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Option<Self> {
        Some(v)
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    fn from_f64(v: f64) -> Option<Self> {
        NumCast::from(v)
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for Ratio<i64> {
    fn from_f64(v: f64) -> Option<Self> {
        Ratio::approximate_float(v)
    }
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Floating point scalar, needed wherever irrational constants appear.
pub trait FloatScalar: Scalar + Float {}

impl<T: Scalar + Float> FloatScalar for T {}

/// Converts a literal, panicking only for types that cannot hold small constants.
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("scalar type cannot represent a small constant")
}
