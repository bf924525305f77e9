//! Pentagon relations in a direct sum of three `n`-dimensional spaces and
//! in Grassmann algebras.
//!
//! The crate builds the five flip matrices `P, Q, R, S, T` from a family of
//! five matrices `zeta_i`, refines them to orthogonal and `J`-orthogonal
//! versions under a complex Euclidean metric, turns the latter into
//! Grassmann-Gaussian tetrahedron weights, and checks every identity along
//! the way numerically.
//!
//! Matrix code is generic over the real scalar (`f32` or `f64`); the
//! Grassmann engine is generic over its coefficient ring, so sign
//! conventions can be checked in exact rational arithmetic.

pub mod cells;
pub mod directsum;
pub mod error;
pub mod exotic;
pub mod grassmann;
pub mod matcore;
pub mod metric;
pub mod scalar;
pub mod weights;

pub use cells::{Flip, Triangle};
pub use directsum::{
    build_flips, check_pentagon, triangle_basis, FlipSet, TriangleBasis, ZetaFamily,
};
pub use error::{Error, Result};
pub use grassmann::GrassmannElement;
pub use matcore::{factor_sym, takagi, CMatrix, Takagi};
pub use scalar::{Real, Sign};
pub use weights::GaussWeight;

/// Complex scalar over `f64`.
pub type Complex64 = num_complex::Complex<f64>;
/// Double-precision matrix.
pub type CMatrix64 = CMatrix<f64>;
/// Single-precision matrix.
pub type CMatrix32 = CMatrix<f32>;
pub type ZetaFamily64 = ZetaFamily<f64>;
pub type FlipSet64 = FlipSet<f64>;
pub type GaussWeight64 = GaussWeight<f64>;
/// Grassmann element with double-precision complex coefficients.
pub type Grassmann64 = GrassmannElement<Complex64>;
