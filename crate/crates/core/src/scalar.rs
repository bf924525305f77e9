//! Real scalar abstraction. Every matrix in the crate has entries
//! `Complex<T>` with `T: Real`.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable as the real part of matrix entries.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Relative tolerance used for structural checks (symmetry, rank).
    fn structural_tol() -> Self;

    /// Convert an `f64` literal; panics only for values the type cannot hold.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {
    fn structural_tol() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn structural_tol() -> Self {
        1e-10
    }
}

/// Complex entry type.
pub type C<T> = Complex<T>;

/// Principal square root with the branch cut on the negative real axis,
/// so that `sqrt(-3) = i*sqrt(3)`.
pub fn csqrt<T: Real>(z: C<T>) -> C<T> {
    if z.im == T::zero() && z.re < T::zero() {
        return C::new(T::zero(), (-z.re).sqrt());
    }
    z.sqrt()
}

/// Sign selector for a square-root branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn apply<T: Real>(self, z: C<T>) -> C<T> {
        match self {
            Sign::Plus => z,
            Sign::Minus => -z,
        }
    }
}
