//! Conditionally free cumulant calculus on truncated non-commutative power
//! series.

pub mod cumulants;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod meixner;
pub mod partitions;
pub mod random;
pub mod scalar;
pub mod series;
pub mod transforms;

pub use cumulants::{CumulantKind, CumulantSeries, Functional};
pub use error::{Error, Result};
pub use scalar::{q, Rational, Scalar};
pub use series::{NcSeries, Word};

/// Series with exact rational coefficients.
pub type RationalSeries = NcSeries<Rational>;
/// Series with double-precision coefficients.
pub type FloatSeries = NcSeries<f64>;
