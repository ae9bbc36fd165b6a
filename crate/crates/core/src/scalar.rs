//! Floating-point abstraction for the numerical routines.
//!
//! The series evaluators, the root solver and the Perron oracle are written
//! against [`Real`] so they can run in `f32` for quick scans or `f64` for the
//! certified enclosures. Exact evaluation at `alpha = ln(base)` goes through
//! [`num_rational::BigRational`] instead, see [`crate::genfun::exact_partial_sum`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; every implementor can represent the
    /// rounded value.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 always converts to a float type")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize always converts to a float type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("float always converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
