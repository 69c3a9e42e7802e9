//! Symbol calculus and normal forms on the circle, magnetic Steklov eigenvalue asymptotics,
//! closed-form model spectra, inverse recovery and exact decisions for unions of
//! arithmetic progressions.

pub mod boundary_model;
pub mod dn_map;
pub mod error;
mod grid;
pub mod model_oracles;
pub mod progressions;
pub mod recovery;
pub mod scalar;
pub mod spectrum;
pub mod symbol_algebra;

pub use error::{Error, Result};
pub use scalar::Real;
pub use spectrum::{merge_spectra, SpecEntry, SpectrumSeq};

/// Double-precision instances of the generic types.
pub type PeriodicFn64 = boundary_model::PeriodicFn<f64>;
pub type BoundaryComponent64 = boundary_model::BoundaryComponent<f64>;
pub type SurfaceBoundary64 = boundary_model::SurfaceBoundary<f64>;
pub type GradedSymbol64 = symbol_algebra::GradedSymbol<f64>;
pub type ComponentCoeffs64 = dn_map::ComponentCoeffs<f64>;
pub type SpectrumSeq64 = SpectrumSeq<f64>;
pub type CylinderModel64 = model_oracles::CylinderModel<f64>;
pub type DiskFluxModel64 = model_oracles::DiskFluxModel<f64>;
