use thiserror::Error;

use crate::special_fns::BesselDomainError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid impedance profile: {0}")]
    InvalidProfile(String),

    #[error("position {x} m lies outside the antenna [0, {d}] m")]
    OutOfDomain { x: f64, d: f64 },

    #[error("profile has no breakpoint table; discretize it first")]
    NotDiscretized,

    #[error(transparent)]
    Bessel(#[from] BesselDomainError),

    #[error("slice {slice} is uniform to {relative_step:e}; use the plane-wave branch")]
    DegenerateSlice { slice: usize, relative_step: f64 },

    #[error("transfer matrix pivot T22 vanished (perfect reflection)")]
    PivotSingular,

    #[error("|det S| = {modulus} is not unit modulus")]
    DeterminantModulus { modulus: f64 },

    #[error("unitarized scattering matrix violates unitarity by {residual:e}")]
    Unitarity { residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("covariance matrix is unphysical: {0}")]
    Unphysical(String),

    #[error("no entanglement-preserving reflection exists: (1/2 + N_eff)|r_R|^2 = {0} >= 1")]
    NoThreshold(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
