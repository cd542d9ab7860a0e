//! Real-number abstraction for the profile algebra.

use std::fmt;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Ordered field element used by [`crate::asymptotic`]: binary floats or exact
/// rationals.
pub trait Scalar: Num + Copy + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// Differences within this distance of zero count as ties.
    fn tie_tolerance() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn floor_i64(self) -> i64;

    fn from_usize(x: usize) -> Self {
        Self::from_f64(x as f64)
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn tie_tolerance() -> Self {
        1e-12
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn floor_i64(self) -> i64 {
        self.floor() as i64
    }
}

impl Scalar for f32 {
    fn tie_tolerance() -> Self {
        1e-6
    }
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn floor_i64(self) -> i64 {
        self.floor() as i64
    }
}

macro_rules! rational_scalar {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            fn tie_tolerance() -> Self {
                Ratio::from_integer(0)
            }
            /// Nearest simple fraction (continued-fraction approximation).
            fn from_f64(x: f64) -> Self {
                <Ratio<$int> as FromPrimitive>::from_f64(x).expect("finite value in range")
            }
            fn to_f64(self) -> f64 {
                self.numer().to_f64().unwrap() / self.denom().to_f64().unwrap()
            }
            fn floor_i64(self) -> i64 {
                self.floor().to_integer() as i64
            }
            fn from_usize(x: usize) -> Self {
                Ratio::from_integer(x as $int)
            }
        }
    };
}

rational_scalar!(i64);
rational_scalar!(i128);
