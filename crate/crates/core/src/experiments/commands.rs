use serde_json::json;

use super::{Csv, RunError, RunOutput, RunConfig};
use crate::gaussian::{entanglement_report, exact_r_r_max, Thresholds};
use crate::optimizer::coordinate_descent;
use crate::scattering::{asymptotic_limits, scatter as scatter_profile};

/// Scattering coefficients of the configured antenna, plus the
/// short/long-taper diagnostic of a straight taper with the same ends.
pub fn scatter(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let profile = cfg.discretized_profile()?;
    let res = scatter_profile(&profile, &cfg.wave)?;
    let limits = asymptotic_limits(&cfg.wave, cfg.antenna.z_in_ohm, cfg.antenna.z_out_ohm)?;

    let mut coeffs = Csv::new("coefficient,re,im,abs");
    for (name, c) in [("t_l", res.t_l()), ("r_l", res.r_l()), ("t_r", res.t_r()), ("r_r", res.r_r())] {
        coeffs.row(&[&name, &c.re, &c.im, &c.norm()]);
    }
    let mut sweep = Csv::new("kd,transmittance,reflectance");
    for s in &limits.sweep {
        sweep.row(&[&s.kd, &s.transmittance, &s.reflectance]);
    }
    let summary = json!({
        "r_mag": res.r_r().norm(),
        "scattering": res,
        "profile": profile,
        "limits": limits,
    });
    Ok(RunOutput::new("scatter", summary).table("scatter", coeffs.finish()).table("limits", sweep.finish()))
}

/// Output entanglement for the configured antenna and squeezing.
pub fn entangle(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let channel = cfg.channel()?;
    let r_r = match cfg.antenna.r_r_override {
        Some(r) => r,
        None => scatter_profile(&cfg.discretized_profile()?, &cfg.wave)?.r_r().norm(),
    };
    let r2 = r_r * r_r;
    let report = entanglement_report(&channel, 1.0 - r2, r2)?;
    let th = Thresholds::new(&channel);

    let mut csv = Csv::new("r,r_r_mag,nu,negativity,r_out,entangled");
    csv.row(&[&channel.r, &r_r, &report.nu, &report.negativity, &report.r_out, &report.entangled]);
    let summary = json!({
        "n": channel.n,
        "n_eff": channel.n_eff,
        "r_r_mag": r_r,
        "report": report,
        "thresholds": {
            "r_min_input": th.r_min_input(),
            "r_min_channel": th.r_min_channel(r_r).ok(),
            "r_r_max_closed_form": th.r_r_max_at(channel.r),
            "r_r_max_exact": exact_r_r_max(&channel)?,
        },
    });
    Ok(RunOutput::new("entangle", summary).table("entangle", csv.finish()))
}

/// Coordinate descent on the stepwise profile.
pub fn optimize(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let rep = coordinate_descent(&cfg.optimize, &cfg.wave)?;
    let summary = serde_json::to_value(&rep).expect("report serializes");
    Ok(RunOutput::new("optimize", summary)
        .table("optimize_profile", rep.profile_csv())
        .table("optimize_trace", rep.trace_csv()))
}
