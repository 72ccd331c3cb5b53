//! Scalar abstraction for the numeric parts of the crate.
//!
//! Everything that computes with probabilities, weights or vector components
//! is generic over [`Real`], so the same code runs in `f32` or `f64`.  The
//! crate root exports `f64` aliases (`ToxicityModel64`, `NgramLm64`, ...)
//! which are what the CLI and most callers want.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable throughout the crate.
///
/// A blanket impl covers `f32` and `f64`; custom scalars only need the listed
/// traits. `Display` must produce a representation that round-trips through
/// `f64` parsing, which is how persisted models are read back.
pub trait Real:
    Float + NumAssign + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Shorthand for converting an exact `f64` constant into `Self`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in every Real type")
    }

    /// Lossless-enough conversion of a usize count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in every Real type")
    }
}

impl<T> Real for T where
    T: Float
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}
