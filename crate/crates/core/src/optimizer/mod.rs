//! Reflection minimisation over stepwise and ansatz profiles, and the
//! fabrication-error Monte Carlo.

pub mod ansatz;
pub mod descent;
pub mod length;
pub mod sensitivity;

use serde::{Deserialize, Serialize};

pub use ansatz::{fit_ansatz, AnsatzFit, AnsatzInit};
pub use descent::{coordinate_descent, line_search};
pub use length::{optimize_length, LengthInner, LengthPoint, LengthScan, Spacing};
pub use sensitivity::{sensitivity_study, sensitivity_study_until, ExpFit, SensitivityConfig, SensitivityReport};

use crate::error::{Error, Result};
use crate::profiles::ImpedanceProfile;
use crate::scattering::{scatter, WaveContext};

/// Order in which interior breakpoints are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LeftToRight,
    /// From the free-space end towards the feed.
    #[default]
    RightToLeft,
}

/// Search interval for interior impedances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bounds {
    /// `[min(Z_in, Z_out), max(Z_in, Z_out)]`.
    #[default]
    Band,
    /// One decade beyond the band on each side.
    Unconstrained,
}

impl Bounds {
    pub fn interval(self, z_in: f64, z_out: f64) -> (f64, f64) {
        let (lo, hi) = (z_in.min(z_out), z_in.max(z_out));
        match self {
            Bounds::Band => (lo, hi),
            Bounds::Unconstrained => (lo / 10.0, hi * 10.0),
        }
    }
}

/// Bounded grid search with recursive refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSearch {
    pub grid_points: usize,
    /// Each level re-grids `±4` spacings around the incumbent, an 8× zoom.
    pub refinement_levels: usize,
}

impl Default for LineSearch {
    fn default() -> Self {
        Self { grid_points: 64, refinement_levels: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationConfig {
    pub slices: usize,
    pub d: f64,
    pub z_in: f64,
    pub z_out: f64,
    #[serde(default)]
    pub direction: Direction,
    /// Maximum number of full passes.
    pub sweeps: usize,
    /// Stop once a pass improves `|r_R|` by less than this.
    pub tol: f64,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub line_search: LineSearch,
}

impl OptimizationConfig {
    pub fn new(slices: usize, d: f64, z_in: f64, z_out: f64) -> Self {
        Self {
            slices,
            d,
            z_in,
            z_out,
            direction: Direction::default(),
            sweeps: 50,
            tol: 1e-10,
            bounds: Bounds::default(),
            line_search: LineSearch::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        if self.slices < 1 {
            return bad("slices must be >= 1".into());
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be > 0, got {}", self.tol));
        }
        if self.line_search.grid_points < 8 {
            return bad(format!("grid_points must be >= 8, got {}", self.line_search.grid_points));
        }
        if !(self.d > 0.0 && self.z_in > 0.0 && self.z_out > 0.0) {
            return bad("d, z_in and z_out must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub best_profile: ImpedanceProfile,
    pub best_r_mag: f64,
    /// `|r_R|` of the start profile, then after every completed pass.
    pub trace: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_opt: Option<f64>,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curve: Vec<LengthPoint>,
}

impl OptimizationReport {
    /// `x_m,z_ohm` rows of the best profile's breakpoints.
    pub fn profile_csv(&self) -> String {
        let mut out = String::from("x_m,z_ohm\n");
        for b in self.best_profile.breakpoints().unwrap_or_default() {
            out.push_str(&format!("{},{}\n", b.x, b.z));
        }
        out
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("pass,r_mag\n");
        for (i, r) in self.trace.iter().enumerate() {
            out.push_str(&format!("{i},{r}\n"));
        }
        out
    }

    pub fn curve_csv(&self) -> String {
        let mut out = String::from("d_m,r_mag\n");
        for p in &self.curve {
            out.push_str(&format!("{},{}\n", p.d_m, p.r_mag));
        }
        out
    }
}

/// `|r_R|` of a discretized profile; numerical failures count as `+∞`.
pub fn objective(profile: &ImpedanceProfile, ctx: &WaveContext) -> f64 {
    match scatter(profile, ctx) {
        Ok(r) => r.r_r().norm(),
        Err(_) => f64::INFINITY,
    }
}
