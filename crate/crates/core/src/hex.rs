//! Isometric projection of the design cube onto the hexagonal display plane.
//!
//! The three axes map to unit vectors 120 degrees apart, so the cube
//! diagonal `(1,1,1)` is the kernel: both ends of it land on the origin and
//! the other six vertices form a regular hexagon of radius 1.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::coords::DesignCoords;
use crate::scalar::{lit, FloatScalar};

/// Point of the display plane. Unit length is the level-0 neighbor distance.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HexPoint<T> {
    pub u: T,
    pub v: T,
}

impl<T: FloatScalar> HexPoint<T> {
    pub fn new(u: T, v: T) -> Self {
        Self { u, v }
    }

    pub fn norm(self) -> T {
        self.u.hypot(self.v)
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn angle(self) -> T {
        self.v.atan2(self.u)
    }
}

impl<T: FloatScalar> Add for HexPoint<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.u + o.u, self.v + o.v)
    }
}

impl<T: FloatScalar> Sub for HexPoint<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.u - o.u, self.v - o.v)
    }
}

impl<T: FloatScalar> Mul<T> for HexPoint<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.u * k, self.v * k)
    }
}

/// Images of the three unit axes.
pub fn axis_vectors<T: FloatScalar>() -> [HexPoint<T>; 3] {
    let half = lit::<T>(0.5);
    let h = lit::<T>(3.0).sqrt() * half;
    [
        HexPoint::new(T::one(), T::zero()),
        HexPoint::new(-half, h),
        HexPoint::new(-half, -h),
    ]
}

pub fn project<T: FloatScalar>(coords: &DesignCoords<T>) -> HexPoint<T> {
    let a = axis_vectors::<T>();
    let c = coords.as_array();
    a[0] * c[0] + a[1] * c[1] + a[2] * c[2]
}

/// True when both coordinates land within `eps` of each other on screen.
pub fn collides<T: FloatScalar>(a: &DesignCoords<T>, b: &DesignCoords<T>, eps: T) -> bool {
    project(a).distance(project(b)) < eps
}

/// Position along the projection kernel.
pub fn depth<T: FloatScalar>(coords: &DesignCoords<T>) -> T {
    coords.sum()
}
