//! Scalar abstraction for the numeric core.
//!
//! All engine math (document weighting, logistic scoring, KL penalties,
//! the optimizer, and the utility metrics) is written against [`Scalar`]
//! so the same code runs in `f32` or `f64`. The crate root exports `f64`
//! aliases, which is what the harness and CLI use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the engine is generic over.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lift an `f64` constant into the scalar type.
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("constant representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
