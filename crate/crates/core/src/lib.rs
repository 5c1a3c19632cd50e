//! Small-time asymptotics of the gBM time-integral: exact series for the
//! rate function `J_BS` and the Hartman-Watson functions `F`, `G`, their
//! large-order asymptotics, fast piecewise evaluators, and a leading-order
//! Asian option pricer.
//!
//! Numeric code is generic over [`scalar::Coeff`] (series coefficients) and
//! [`scalar::Real`] (floating evaluation); the aliases below fix the types
//! used by the command-line tool.

pub mod error;
pub mod scalar;
pub mod roots;
pub mod exact;
pub mod asymptotics;
pub mod approx;
pub mod quadrature;
pub mod bessel;
pub mod density;
pub mod pricing;
pub mod series;

use num_rational::BigRational;

pub use series::families::{CoefficientTables, Family, Variable};
pub use error::Error;
pub use series::{Offset, Series, SeriesError, MAX_ORDER};

/// Exact series over arbitrary-precision rationals.
pub type RationalSeries = Series<BigRational>;
/// Series with `f64` coefficients.
pub type FloatSeries = Series<f64>;
/// Exact coefficient tables for every family.
pub type RationalTables = CoefficientTables<BigRational>;
