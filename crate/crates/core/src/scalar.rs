//! Floating point scalar abstraction used by the quadrature code.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// A real floating point type the numerical routines can run over.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; panics only if the value cannot be represented at all.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 not representable")
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
