use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective;
use crate::error::{Error, Result};
use crate::gaussian::{negativity, output_covariance, symplectic_nu, ChannelParams};
use crate::profiles::{ImpedanceProfile, VarianceReading};
use crate::scattering::WaveContext;

/// Bins whose mean ratio falls below this are left out of the log fit.
pub const FIT_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityConfig {
    /// Error fractions, e.g. `0.01` for 1 %.
    pub fractions: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub reading: VarianceReading,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self { fractions: (0..=12).map(|i| i as f64 * 0.0025).collect(), trials: 1000, seed: 2024, reading: VarianceReading::default() }
    }
}

/// Least-squares line through `ln(mean ratio)` against the error in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub slope: f64,
    pub intercept: f64,
    /// `−1/slope`, in percent.
    pub lifetime_percent: f64,
    pub bins_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub error_fractions: Vec<f64>,
    pub mean_negativity_ratio: Vec<f64>,
    pub std: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub exp_fit: Option<ExpFit>,
    /// Indices of bins left out of the fit.
    pub excluded_bins: Vec<usize>,
}

impl SensitivityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("error_percent,mean_negativity_ratio,std,in_fit\n");
        for (i, f) in self.error_fractions.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                f * 100.0,
                self.mean_negativity_ratio[i],
                self.std[i],
                !self.excluded_bins.contains(&i)
            ));
        }
        out
    }
}

/// Seed of trial `trial` in bin `bin`: ChaCha stream `bin·2³² + trial`
/// of the master seed, so draws do not depend on scheduling.
pub fn trial_seed(master: u64, bin: usize, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((bin as u64) << 32) | trial as u64);
    rng.next_u64()
}

fn ratio_for(r_mag: f64, channel: &ChannelParams, n_in: f64) -> Result<f64> {
    let r2 = (r_mag * r_mag).min(1.0);
    let nu = symplectic_nu(&output_covariance(1.0 - r2, r2, channel)?)?;
    Ok(negativity(nu) / n_in)
}

/// `N_out/N_in` under Gaussian fabrication errors on every interior node.
pub fn sensitivity_study(
    base: &ImpedanceProfile,
    cfg: &SensitivityConfig,
    channel: &ChannelParams,
    ctx: &WaveContext,
) -> Result<SensitivityReport> {
    sensitivity_study_until(base, cfg, channel, ctx, || false)
}

/// As [`sensitivity_study`], but checks `stop` between bins and returns
/// only the bins finished so far once it fires.
pub fn sensitivity_study_until(
    base: &ImpedanceProfile,
    cfg: &SensitivityConfig,
    channel: &ChannelParams,
    ctx: &WaveContext,
    stop: impl Fn() -> bool,
) -> Result<SensitivityReport> {
    if cfg.trials < 1 {
        return Err(Error::Precondition("trials must be >= 1".into()));
    }
    base.breakpoints().ok_or(Error::NotDiscretized)?;
    let n_in = negativity(channel.nu_in());
    if !(n_in > 0.0) {
        return Err(Error::Precondition(format!("input state is not entangled at r = {}", channel.r)));
    }
    let mut means = Vec::with_capacity(cfg.fractions.len());
    let mut stds = Vec::with_capacity(cfg.fractions.len());
    for (bin, &frac) in cfg.fractions.iter().enumerate() {
        if stop() {
            break;
        }
        let ratios: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let p = base.perturb(frac, trial_seed(cfg.seed, bin, t), cfg.reading)?;
                ratio_for(objective(&p, ctx), channel, n_in)
            })
            .collect::<Result<_>>()?;
        let m = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let var = ratios.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (ratios.len().max(2) - 1) as f64;
        means.push(m);
        stds.push(var.sqrt());
    }
    let done = &cfg.fractions[..means.len()];
    let (exp_fit, excluded_bins) = log_linear_fit(done, &means);
    Ok(SensitivityReport {
        error_fractions: done.to_vec(),
        mean_negativity_ratio: means,
        std: stds,
        trials: cfg.trials,
        seed: cfg.seed,
        exp_fit,
        excluded_bins,
    })
}

/// Fits `ln y = a + b·(100·x)` over bins with `y ≥ FIT_FLOOR`.
pub fn log_linear_fit(fractions: &[f64], means: &[f64]) -> (Option<ExpFit>, Vec<usize>) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = Vec::new();
    for (i, (&f, &m)) in fractions.iter().zip(means).enumerate() {
        if m >= FIT_FLOOR {
            xs.push(100.0 * f);
            ys.push(m.ln());
        } else {
            excluded.push(i);
        }
    }
    if xs.len() < 2 {
        return (None, excluded);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return (None, excluded);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    (Some(ExpFit { slope, intercept, lifetime_percent: -1.0 / slope, bins_used: xs.len() }), excluded)
}
