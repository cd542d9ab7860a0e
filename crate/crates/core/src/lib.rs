//! Irregular product codes: construction, systematic encoding, minimum
//! distance, asymptotic design and erasure-channel simulation.
//!
//! Each row of an `m × n` codeword lies in its own MDS code `[n, a_i]` and
//! each column in `[m, b_j]`. Field arithmetic is over `GF(2^w)` or `GF(p)`;
//! the asymptotic profile algebra is generic over [`Scalar`].

pub mod asymptotic;
pub mod config;
pub mod distance;
pub mod galois;
pub mod mds;
pub mod product;
pub mod scalar;
pub mod simulate;

pub use asymptotic::{DeTrajectory, DeVerdict, PiecewiseLinear};
pub use distance::{DistanceProfile, WitnessMatrix};
pub use galois::{Elem, Field, FieldConfig, Matrix};
pub use mds::{MdsCode, NestedRsFamily};
pub use product::{CodeSpec, ProductCode, SystematicEncoder};
pub use scalar::Scalar;
pub use simulate::{ErasureMask, SimConfig, SimResult};

/// Double-precision profile, used by the simulator and the file formats.
pub type Profile = asymptotic::PiecewiseLinear<f64>;
/// Single-precision profile.
pub type ProfileF32 = asymptotic::PiecewiseLinear<f32>;
/// Profile over exact rationals; ties in the density-evolution check are
/// decided exactly.
pub type ExactProfile = asymptotic::PiecewiseLinear<num_rational::Rational64>;
/// Exact rationals with 128-bit numerators and denominators.
pub type WideExactProfile = asymptotic::PiecewiseLinear<num_rational::Ratio<i128>>;
