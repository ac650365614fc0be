//! Scalar abstraction shared by every numerical kernel.

use std::fmt;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the library is generic over.
///
/// Implemented for `f32` and `f64` through the blanket impl below. The
/// tolerances quoted throughout the crate assume `f64`; `f32` works but
/// loosens every bound accordingly.
pub trait Real: Float + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + 'static {
    /// Embeds an `f64` literal into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    /// Converts an index or count into the scalar type.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    /// Lossy view as `f64`, used only for diagnostics and special functions.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + 'static {}
