//! Figure reproductions. Each runner checks `stop` between units of work
//! and returns what it has, marked partial, once it is set.

use std::sync::atomic::AtomicBool;

use serde_json::json;

use super::{stopped, Csv, ProfileSpec, RunConfig, RunError, RunOutput};
use crate::gaussian::{entanglement_report, ChannelParams};
use crate::optimizer::ansatz::ansatz_profile;
use crate::optimizer::{coordinate_descent, fit_ansatz, objective, sensitivity_study_until, AnsatzInit, OptimizationConfig};
use crate::profiles::ImpedanceProfile;

pub fn run_figure(number: u8, cfg: &RunConfig, stop: &AtomicBool) -> Result<RunOutput, RunError> {
    match number {
        4 => fig4(cfg, stop),
        5 => fig5(cfg, stop),
        6 => fig6(cfg, stop),
        7 => fig7(cfg, stop),
        8 => fig8(cfg, stop),
        n => Err(super::ConfigError::Field { field: "fig".into(), message: format!("no figure {n}; expected 4 to 8") }.into()),
    }
}

/// `(α, β)` of an explicit ansatz, else the default starting point.
fn given_ansatz(cfg: &RunConfig) -> AnsatzInit {
    match cfg.antenna.profile {
        ProfileSpec::Ansatz { alpha, beta } => AnsatzInit { alpha, beta },
        ProfileSpec::FitAnsatz { alpha_init, beta_init } => AnsatzInit { alpha: alpha_init, beta: beta_init },
        _ => AnsatzInit::default(),
    }
}

/// Optimized stepwise profiles for each slice count.
pub fn fig4(cfg: &RunConfig, stop: &AtomicBool) -> Result<RunOutput, RunError> {
    let mut csv = Csv::new("slices,x_m,z_ohm");
    let mut runs = Vec::new();
    let mut partial = false;
    for &n in &cfg.figures.fig4_slices {
        if stopped(stop) {
            partial = true;
            break;
        }
        let oc = OptimizationConfig { slices: n, ..cfg.optimize };
        let rep = coordinate_descent(&oc, &cfg.wave)?;
        for b in rep.best_profile.breakpoints().unwrap_or_default() {
            csv.row(&[&n, &b.x, &b.z]);
        }
        runs.push(json!({
            "slices": n,
            "r_mag": rep.best_r_mag,
            "passes": rep.trace.len() - 1,
            "converged": rep.converged,
        }));
    }
    let mut out = RunOutput::new("fig4", json!({ "runs": runs })).table("fig4", csv.finish());
    out.partial = partial;
    Ok(out)
}

/// `|r_R|` against slice count, for the given `(α, β)` and refitted per count.
pub fn fig5(cfg: &RunConfig, stop: &AtomicBool) -> Result<RunOutput, RunError> {
    let a = &cfg.antenna;
    let given = given_ansatz(cfg);
    let mut csv = Csv::new("slices,alpha,beta,r_mag,alpha_fit,beta_fit,r_mag_fit");
    let mut rows = Vec::new();
    let mut partial = false;
    for &n in &cfg.figures.fig5_slices {
        if stopped(stop) {
            partial = true;
            break;
        }
        let p = ansatz_profile(n, a.d_m, a.z_in_ohm, a.z_out_ohm, given.alpha, given.beta)?;
        let r_given = objective(&p, &cfg.wave);
        let fit = fit_ansatz(n, a.d_m, a.z_in_ohm, a.z_out_ohm, &cfg.wave, given)?;
        csv.row(&[&n, &given.alpha, &given.beta, &r_given, &fit.alpha, &fit.beta, &fit.r_mag]);
        rows.push(json!({ "slices": n, "r_mag": r_given, "fit": fit }));
    }
    let summary = json!({ "alpha": given.alpha, "beta": given.beta, "rows": rows });
    let mut out = RunOutput::new("fig5", summary).table("fig5", csv.finish());
    out.partial = partial;
    Ok(out)
}

/// The fig 6 length grid with the configured antenna length spliced in.
pub fn fig6_grid(cfg: &RunConfig) -> Result<Vec<f64>, RunError> {
    let mut ds = cfg.figures.fig6.grid()?;
    ds.push(cfg.antenna.d_m);
    ds.sort_by(f64::total_cmp);
    ds.dedup();
    Ok(ds)
}

/// `|r_R|` against length for the straight taper and the fitted ansatz.
pub fn fig6(cfg: &RunConfig, stop: &AtomicBool) -> Result<RunOutput, RunError> {
    let a = &cfg.antenna;
    let init = given_ansatz(cfg);
    let mut csv = Csv::new("d_m,r_mag_linear,r_mag_ansatz,alpha_fit,beta_fit");
    let mut best_lin = (f64::NAN, f64::INFINITY);
    let mut best_fit = (f64::NAN, f64::INFINITY);
    let mut partial = false;
    for d in fig6_grid(cfg)? {
        if stopped(stop) {
            partial = true;
            break;
        }
        let lin = objective(&ImpedanceProfile::linear(d, a.z_in_ohm, a.z_out_ohm)?.discretize(a.slices)?, &cfg.wave);
        let fit = fit_ansatz(a.slices, d, a.z_in_ohm, a.z_out_ohm, &cfg.wave, init)?;
        csv.row(&[&d, &lin, &fit.r_mag, &fit.alpha, &fit.beta]);
        if lin < best_lin.1 {
            best_lin = (d, lin);
        }
        if fit.r_mag < best_fit.1 {
            best_fit = (d, fit.r_mag);
        }
    }
    let summary = json!({
        "linear_min": { "d_m": best_lin.0, "r_mag": best_lin.1 },
        "ansatz_min": { "d_m": best_fit.0, "r_mag": best_fit.1 },
    });
    let mut out = RunOutput::new("fig6", summary).table("fig6", csv.finish());
    out.partial = partial;
    Ok(out)
}

/// Output squeezing `r'/r` over squeezing and length, fitted ansatz.
pub fn fig7(cfg: &RunConfig, stop: &AtomicBool) -> Result<RunOutput, RunError> {
    let a = &cfg.antenna;
    let (n, n_eff) = cfg.thermal.occupations()?;
    let init = given_ansatz(cfg);
    let mut csv = Csv::new("d_m,r_mag,r,nu,r_out,ratio");
    let mut worst: Option<(f64, f64, f64)> = None;
    let mut partial = false;
    for &d in &cfg.figures.fig7_d_values_m {
        if stopped(stop) {
            partial = true;
            break;
        }
        let fit = fit_ansatz(a.slices, d, a.z_in_ohm, a.z_out_ohm, &cfg.wave, init)?;
        let r2 = fit.r_mag * fit.r_mag;
        for &r in &cfg.figures.fig7_r_values {
            let ch = ChannelParams::new(r, n, n_eff)?;
            let rep = entanglement_report(&ch, 1.0 - r2, r2)?;
            let ratio = rep.r_out / r;
            csv.row(&[&d, &fit.r_mag, &r, &rep.nu, &rep.r_out, &ratio]);
            if worst.is_none_or(|w| ratio < w.2) {
                worst = Some((d, r, ratio));
            }
        }
    }
    let summary = json!({
        "min_ratio": worst.map(|w| json!({ "d_m": w.0, "r": w.1, "ratio": w.2 })),
    });
    let mut out = RunOutput::new("fig7", summary).table("fig7", csv.finish());
    out.partial = partial;
    Ok(out)
}

/// The profile fig 8 perturbs: the configured one, except that a
/// straight taper is replaced by the fitted ansatz of the same length.
pub fn fig8_base(cfg: &RunConfig) -> Result<ImpedanceProfile, RunError> {
    let a = &cfg.antenna;
    if matches!(a.profile, ProfileSpec::Linear) {
        let fit = fit_ansatz(a.slices, a.d_m, a.z_in_ohm, a.z_out_ohm, &cfg.wave, AnsatzInit::default())?;
        return Ok(ansatz_profile(a.slices, a.d_m, a.z_in_ohm, a.z_out_ohm, fit.alpha, fit.beta)?);
    }
    Ok(cfg.discretized_profile()?)
}

/// Negativity ratio against fabrication error.
pub fn fig8(cfg: &RunConfig, stop: &AtomicBool) -> Result<RunOutput, RunError> {
    let base = fig8_base(cfg)?;
    let channel = cfg.channel()?;
    let sc = &cfg.figures.fig8;
    let rep = sensitivity_study_until(&base, sc, &channel, &cfg.wave, || stopped(stop))?;
    let partial = rep.error_fractions.len() < sc.fractions.len();
    let summary = json!({
        "base_r_mag": objective(&base, &cfg.wave),
        "report": rep,
    });
    let mut out = RunOutput::new("fig8", summary).table("fig8", rep.to_csv());
    out.partial = partial;
    Ok(out)
}
