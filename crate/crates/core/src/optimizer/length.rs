use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ansatz::{ansatz_profile, fit_ansatz, AnsatzInit};
use super::{coordinate_descent, objective, OptimizationConfig, OptimizationReport};
use crate::error::{Error, Result};
use crate::profiles::ImpedanceProfile;
use crate::scattering::WaveContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthScan {
    pub d_min: f64,
    pub d_max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl LengthScan {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.d_min > 0.0 && self.d_max >= self.d_min) || self.points < 1 {
            return Err(Error::Precondition(format!(
                "length scan needs 0 < d_min <= d_max and points >= 1, got [{}, {}] x {}",
                self.d_min, self.d_max, self.points
            )));
        }
        if self.points == 1 {
            return Ok(vec![self.d_min]);
        }
        let m = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                let t = i as f64 / m;
                match self.spacing {
                    Spacing::Linear => self.d_min + t * (self.d_max - self.d_min),
                    Spacing::Log => self.d_min * (self.d_max / self.d_min).powf(t),
                }
            })
            .collect())
    }
}

/// What is evaluated at each length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LengthInner {
    Linear { slices: usize },
    Ansatz { slices: usize, alpha: f64, beta: f64 },
    FitAnsatz { slices: usize, init: AnsatzInit },
    /// `d` in the config is overridden by the scan.
    Descent { cfg: OptimizationConfig },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthPoint {
    pub d_m: f64,
    pub r_mag: f64,
}

fn evaluate(inner: &LengthInner, d: f64, z_in: f64, z_out: f64, ctx: &WaveContext) -> Result<ImpedanceProfile> {
    match *inner {
        LengthInner::Linear { slices } => ImpedanceProfile::linear(d, z_in, z_out)?.discretize(slices),
        LengthInner::Ansatz { slices, alpha, beta } => ansatz_profile(slices, d, z_in, z_out, alpha, beta),
        LengthInner::FitAnsatz { slices, init } => {
            let fit = fit_ansatz(slices, d, z_in, z_out, ctx, init)?;
            ansatz_profile(slices, d, z_in, z_out, fit.alpha, fit.beta)
        }
        LengthInner::Descent { cfg } => {
            let cfg = OptimizationConfig { d, z_in, z_out, ..cfg };
            Ok(coordinate_descent(&cfg, ctx)?.best_profile)
        }
    }
}

/// Outer grid scan over the antenna length.
pub fn optimize_length(
    scan: &LengthScan,
    inner: &LengthInner,
    z_in: f64,
    z_out: f64,
    ctx: &WaveContext,
) -> Result<OptimizationReport> {
    let ds = scan.grid()?;
    let profiles: Vec<ImpedanceProfile> =
        ds.par_iter().map(|&d| evaluate(inner, d, z_in, z_out, ctx)).collect::<Result<_>>()?;
    let curve: Vec<LengthPoint> =
        ds.iter().zip(&profiles).map(|(&d, p)| LengthPoint { d_m: d, r_mag: objective(p, ctx) }).collect();
    let mut best = 0;
    for (i, p) in curve.iter().enumerate() {
        if p.r_mag < curve[best].r_mag {
            best = i;
        }
    }
    Ok(OptimizationReport {
        best_profile: profiles[best].clone(),
        best_r_mag: curve[best].r_mag,
        trace: vec![curve[best].r_mag],
        d_opt: Some(curve[best].d_m),
        converged: true,
        curve,
    })
}
