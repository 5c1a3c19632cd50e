//! Crate-wide error, for callers that mix several modules.

use thiserror::Error;

use crate::approx::ApproxError;
use crate::density::DensityError;
use crate::exact::ExactError;
use crate::pricing::PricingError;
use crate::quadrature::{QuadError, UnknownScheme};
use crate::roots::RootError;
use crate::series::families::UnknownFamily;
use crate::series::text::ParseError;
use crate::series::SeriesError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    UnknownFamily(#[from] UnknownFamily),
    #[error(transparent)]
    UnknownScheme(#[from] UnknownScheme),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
