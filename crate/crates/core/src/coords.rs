//! Points of the unit design cube and its corners.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoordsError {
    #[error("coordinate {axis} is NaN")]
    NaN { axis: usize },
    #[error("corner bitmask {0} is outside 0..=7")]
    BadCorner(u8),
    #[error("axis index {0} is outside 0..=2")]
    BadAxis(usize),
}

/// Position in `[0, 1]^3`. Components are clamped on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[T; 3]", into = "[T; 3]")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct DesignCoords<T: Scalar> {
    c: [T; 3],
}

impl<T: Scalar> DesignCoords<T> {
    pub fn new(c: [T; 3]) -> Result<Self, CoordsError> {
        let mut out = c;
        for (axis, v) in out.iter_mut().enumerate() {
            if !v.is_number() {
                return Err(CoordsError::NaN { axis });
            }
            if *v < T::zero() {
                *v = T::zero();
            } else if *v > T::one() {
                *v = T::one();
            }
        }
        Ok(Self { c: out })
    }

    pub fn origin() -> Self {
        Self { c: [T::zero(); 3] }
    }

    pub fn get(&self, axis: usize) -> T {
        self.c[axis]
    }

    pub fn as_array(&self) -> [T; 3] {
        self.c
    }

    /// `(1,1,1) - c`.
    pub fn antipode(&self) -> Self {
        Self {
            c: self.c.map(|v| T::one() - v),
        }
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        let two = T::one() + T::one();
        Self {
            c: [0, 1, 2].map(|i| (self.c[i] + other.c[i]) / two),
        }
    }

    /// Copy with one component replaced (clamped).
    pub fn with_axis(&self, axis: usize, value: T) -> Result<Self, CoordsError> {
        if axis > 2 {
            return Err(CoordsError::BadAxis(axis));
        }
        let mut c = self.c;
        c[axis] = value;
        Self::new(c)
    }

    pub fn sum(&self) -> T {
        self.c[0] + self.c[1] + self.c[2]
    }
}

impl DesignCoords<f64> {
    pub fn linf(&self, other: &Self) -> f64 {
        (0..3)
            .map(|i| (self.c[i] - other.c[i]).abs())
            .fold(0.0, f64::max)
    }

    pub fn l2(&self, other: &Self) -> f64 {
        (0..3)
            .map(|i| (self.c[i] - other.c[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.linf(other) <= eps
    }

    /// Octant index of the 2x2x2 partition: bit `i` set when component `i >= 0.5`.
    pub fn octant(&self) -> u8 {
        (0..3).fold(0u8, |acc, i| acc | (u8::from(self.c[i] >= 0.5) << i))
    }
}

impl<T: Scalar> TryFrom<[T; 3]> for DesignCoords<T> {
    type Error = CoordsError;
    fn try_from(c: [T; 3]) -> Result<Self, Self::Error> {
        Self::new(c)
    }
}

impl<T: Scalar> From<DesignCoords<T>> for [T; 3] {
    fn from(c: DesignCoords<T>) -> Self {
        c.c
    }
}

impl fmt::Display for DesignCoords<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.c[0], self.c[1], self.c[2])
    }
}

/// A cube vertex, as a bitmask: bit `i` set means axis `i` at 1.0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Corner(u8);

impl Corner {
    pub const ALL: [Corner; 8] = [
        Corner(0),
        Corner(1),
        Corner(2),
        Corner(3),
        Corner(4),
        Corner(5),
        Corner(6),
        Corner(7),
    ];

    pub fn new(bits: u8) -> Result<Self, CoordsError> {
        if bits > 7 {
            Err(CoordsError::BadCorner(bits))
        } else {
            Ok(Corner(bits))
        }
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn is_set(self, axis: usize) -> bool {
        self.0 >> axis & 1 == 1
    }

    pub fn antipode(self) -> Self {
        Corner(self.0 ^ 7)
    }

    pub fn coords<T: Scalar>(self) -> DesignCoords<T> {
        DesignCoords {
            c: [0, 1, 2].map(|i| if self.is_set(i) { T::one() } else { T::zero() }),
        }
    }
}

impl TryFrom<u8> for Corner {
    type Error = CoordsError;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Corner::new(v)
    }
}

impl From<Corner> for u8 {
    fn from(c: Corner) -> u8 {
        c.0
    }
}
