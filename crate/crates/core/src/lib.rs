//! Impedance-taper design between a cryogenic 50 Ω line and the 377 Ω
//! open-air line, and the entanglement that survives the trip.
//!
//! The pipeline runs `profiles` → `scattering` (unitary 2×2 S-matrix of
//! the taper) → `gaussian` (two-mode squeezed thermal state after one mode
//! crosses the taper into a hot environment). `optimizer` searches over
//! profiles; `experiments` drives figure-style sweeps and the CLI.

pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod optimizer;
pub mod profiles;
pub mod scattering;
pub mod special_fns;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
