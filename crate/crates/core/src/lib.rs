//! Laplace's equation in the disk and ball with fractional and general
//! non-local-in-time dynamic boundary conditions, solved by a spectral
//! Mittag-Leffler series and by a time-changed Monte Carlo method.
//!
//! Every numerical type is generic over the scalar (`T: Real`); the aliases below fix
//! it to `f64`.

pub mod datum;
pub mod error;
pub mod geometry;
pub mod laplace;
pub mod montecarlo;
pub mod quad;
pub mod real;
pub mod spectral;
pub mod special;
pub mod stoch;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
pub use real::Real;

pub type DomainSpecF64 = geometry::DomainSpec<f64>;
pub type PointF64 = geometry::Point<f64>;
pub type BoundaryPointF64 = geometry::BoundaryPoint<f64>;
pub type BoundaryParamsF64 = spectral::BoundaryParams<f64>;
pub type SpectralFieldF64 = spectral::SpectralField<f64>;
pub type FractionalOrderF64 = symbols::FractionalOrder<f64>;
pub type MLParamsF64 = symbols::MLParams<f64>;
pub type BernsteinSymbolF64 = symbols::BernsteinSymbol<f64>;
pub type TimeModelF64 = symbols::TimeModel<f64>;
pub type NamedDatumF64 = datum::NamedDatum<f64>;
pub type SampledDatumF64 = datum::SampledDatum<f64>;
pub type MCConfigF64 = montecarlo::MCConfig<f64>;
pub type MCEstimateF64 = montecarlo::MCEstimate<f64>;
pub type ComparisonReportF64 = verify::ComparisonReport<f64>;
pub type ResidualReportF64 = verify::ResidualReport<f64>;
