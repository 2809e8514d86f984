//! Floating point scalar abstraction shared by every solver.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar usable by the linear algebra kernels and solvers (f32 or f64).
///
/// The associated constants are the default solver tolerances for the type.
/// They are expressed in `f64` and converted on use through [`Scalar::lit`].
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Primal feasibility tolerance.
    const FEAS_TOL: f64;
    /// Dual feasibility / duality-gap tolerance.
    const DUAL_TOL: f64;
    /// Relative threshold for support detection in weight vectors.
    const ZERO_TOL: f64;
    /// Allowed excess of the condition number over one when validating tightness.
    const TIGHT_TOL: f64;
    /// Relative pivot tolerance used by factorizations.
    const PIVOT_TOL: f64;

    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

macro_rules! impl_scalar {
    ($t:ty, $feas:expr, $dual:expr, $zero:expr, $tight:expr, $pivot:expr) => {
        impl Scalar for $t {
            const FEAS_TOL: f64 = $feas;
            const DUAL_TOL: f64 = $dual;
            const ZERO_TOL: f64 = $zero;
            const TIGHT_TOL: f64 = $tight;
            const PIVOT_TOL: f64 = $pivot;
        }
    };
}

impl_scalar!(f64, 1e-9, 1e-8, 1e-8, 1e-6, 1e-12);
impl_scalar!(f32, 1e-4, 1e-3, 1e-4, 1e-3, 1e-6);
