use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accepted deviation of an input vector's norm from 1 before it is rejected.
pub const NORM_INPUT_TOLERANCE: f64 = 1e-6;

/// Unit 3-vector giving the orientation of a Stern-Gerlach device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction {
    /// Normalizes `(x, y, z)`; inputs whose norm is off by more than
    /// [`NORM_INPUT_TOLERANCE`] are rejected.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_INPUT_TOLERANCE {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Normalizes any non-zero finite vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// `(cos θ, sin θ, 0)`.
    pub fn planar(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s, z: 0.0 }
    }

    /// Builds from components already known to be unit length (e.g. sphere
    /// samples). Not re-normalized.
    pub(crate) fn from_unit_components(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Angle between the two directions, in `[0, π]`.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    /// Some direction orthogonal to `self`.
    pub fn orthogonal(&self) -> Direction {
        // cross with the coordinate axis least aligned with self
        let [x, y, z] = self.components();
        let (ax, ay, az) = if x.abs() <= y.abs() && x.abs() <= z.abs() {
            (1.0, 0.0, 0.0)
        } else if y.abs() <= z.abs() {
            (0.0, 1.0, 0.0)
        } else {
            (0.0, 0.0, 1.0)
        };
        let cx = y * az - z * ay;
        let cy = z * ax - x * az;
        let cz = x * ay - y * ax;
        Direction::normalized(cx, cy, cz)
            .expect("cross product of unit vector with axis is non-zero")
    }
}

impl Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Binary spin outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    /// Canonical order: `+1` before `-1`.
    pub const ALL: [Spin; 2] = [Spin::Plus, Spin::Minus];

    pub fn value(self) -> f64 {
        match self {
            Spin::Plus => 1.0,
            Spin::Minus => -1.0,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Spin::Plus),
            -1 => Ok(Spin::Minus),
            other => Err(Error::InvalidSpin(other)),
        }
    }

    /// Position in the canonical `(+1, -1)` order.
    pub fn index(self) -> usize {
        match self {
            Spin::Plus => 0,
            Spin::Minus => 1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }

    /// Product of two spins.
    pub fn times(self, other: Spin) -> Spin {
        if self == other {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Plus => 'p',
            Spin::Minus => 'm',
        }
    }
}

impl Neg for Spin {
    type Output = Spin;

    fn neg(self) -> Spin {
        self.flip()
    }
}
