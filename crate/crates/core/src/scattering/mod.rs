//! Transfer-matrix scattering through a tapered transmission line.
//!
//! A feed line of impedance `Z_in` (phase velocity `v_in`) meets the taper
//! at `x = 0`; the taper ends at `x = d` on a free-space line `Z_out`
//! (velocity `v_out`). Left and right amplitudes are `(A, B)` and `(F, G)`
//! with `A`, `F` right-moving.

pub mod matrix;
pub mod slice;
pub mod smatrix;
pub mod transfer;

use serde::{Deserialize, Serialize};

pub use matrix::Mat2;
pub use slice::{slice_solution, BesselSlice, MatchingRule, SliceBasis, SliceSolution, UniformSlice, UNIFORM_SLICE_THRESHOLD};
pub use smatrix::{
    alpha4, beta4, scattering_from_transfer, transfer_from_scattering, unitarity_residual, unitarize, ScatteringResult,
};
pub use transfer::{
    global_transfer, global_transfer_via_interfaces, interface_matrix, junction_transfer, slice_bases, Interface,
};

use crate::error::Result;
use crate::profiles::ImpedanceProfile;
use crate::SPEED_OF_LIGHT;

/// Angular frequency, line velocities and matching rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveContext {
    /// rad/s
    pub omega: f64,
    /// Phase velocity on the feed line and inside the taper, m/s.
    pub v_in: f64,
    /// Phase velocity in free space, m/s.
    pub v_out: f64,
    #[serde(default)]
    pub rule: MatchingRule,
}

impl WaveContext {
    /// Feed-line velocity `c/3`, free-space velocity `c`, exact matching.
    pub fn new(omega: f64) -> Self {
        Self { omega, v_in: SPEED_OF_LIGHT / 3.0, v_out: SPEED_OF_LIGHT, rule: MatchingRule::Exact }
    }

    pub fn with_rule(mut self, rule: MatchingRule) -> Self {
        self.rule = rule;
        self
    }

    /// Wavenumber on the feed line and in the taper.
    pub fn k(&self) -> f64 {
        self.omega / self.v_in
    }

    /// Wavenumber in free space.
    pub fn q(&self) -> f64 {
        self.omega / self.v_out
    }
}

/// Scatters off an already discretized profile.
pub fn scatter(profile: &ImpedanceProfile, ctx: &WaveContext) -> Result<ScatteringResult> {
    let t = global_transfer(profile, ctx)?;
    let s = scattering_from_transfer(&t)?;
    unitarize(&s, profile.z_in(), profile.z_out(), 0.0)
}

/// Discretizes with `slices` slices and scatters.
pub fn scatter_with(profile: &ImpedanceProfile, ctx: &WaveContext, slices: usize) -> Result<ScatteringResult> {
    scatter(&profile.discretize(slices)?, ctx)
}

/// `|r_R|` for the profile discretized into `slices` slices.
pub fn reflection_magnitude(profile: &ImpedanceProfile, ctx: &WaveContext, slices: usize) -> Result<f64> {
    Ok(scatter_with(profile, ctx, slices)?.r_r().norm())
}

/// Scattering off a bare step `Z_in → Z_out`.
pub fn junction(z_in: f64, z_out: f64) -> Result<ScatteringResult> {
    let s = scattering_from_transfer(&junction_transfer(z_in, z_out))?;
    unitarize(&s, z_in, z_out, 0.0)
}

/// One sample of the short/long-taper sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitSample {
    pub kd: f64,
    pub transmittance: f64,
    pub reflectance: f64,
}

/// Computed extremes of a linear taper next to the closed-form limits
/// quoted for the original derivation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitsReport {
    pub sweep: Vec<LimitSample>,
    /// `((Z_out − Z_in)/(Z_out + Z_in))²`.
    pub junction_reflectance: f64,
    /// Reference value for `kd → 0`: total reflection.
    pub reference_short_reflectance: f64,
    /// Reference value for `kd → ∞`: `((v_in − v_out)/(v_in + v_out))²`.
    pub reference_long_reflectance: f64,
    /// `4 v_in v_out/(v_in + v_out)²`.
    pub reference_long_transmittance: f64,
}

/// Sweeps a linear taper over `kd ∈ [1e-6, 1e4]`.
pub fn asymptotic_limits(ctx: &WaveContext, z_in: f64, z_out: f64) -> Result<LimitsReport> {
    let mut sweep = Vec::new();
    for e in -6..=4 {
        let kd = 10f64.powi(e);
        let d = kd / ctx.k();
        let r = scatter_with(&ImpedanceProfile::linear(d, z_in, z_out)?, ctx, 1)?;
        sweep.push(LimitSample { kd, transmittance: r.t_l().norm_sqr(), reflectance: r.reflectance() });
    }
    let (a, b) = (ctx.v_in, ctx.v_out);
    Ok(LimitsReport {
        sweep,
        junction_reflectance: ((z_out - z_in) / (z_out + z_in)).powi(2),
        reference_short_reflectance: 1.0,
        reference_long_reflectance: ((a - b) / (a + b)).powi(2),
        reference_long_transmittance: 4.0 * a * b / (a + b).powi(2),
    })
}
