//! Run configuration: TOML in, normalized SI values out.
//!
//! Every section and key is optional; anything left out keeps the value of
//! the built-in paper preset. Keys with a unit suffix (`d_cm`, `t_cryo_mk`,
//! `freq_ghz`) are converted once here and never seen by the engines.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::gaussian::{thermal_occupation, ChannelParams};
use crate::optimizer::{
    AnsatzInit, Bounds, Direction, LineSearch, LengthScan, OptimizationConfig, SensitivityConfig, Spacing,
};
use crate::profiles::{Breakpoint, ImpedanceProfile, VarianceReading};
use crate::scattering::{MatchingRule, WaveContext};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

fn field_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Where the two occupation numbers come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Thermal {
    Temperatures { freq_hz: f64, t_cryo_k: f64, t_env_k: f64 },
    Occupations { n: f64, n_eff: f64 },
}

impl Thermal {
    /// `(n, N_eff)`.
    pub fn occupations(&self) -> crate::Result<(f64, f64)> {
        match *self {
            Thermal::Temperatures { freq_hz, t_cryo_k, t_env_k } => {
                Ok((thermal_occupation(freq_hz, t_cryo_k)?, thermal_occupation(freq_hz, t_env_k)?))
            }
            Thermal::Occupations { n, n_eff } => Ok((n, n_eff)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Linear,
    Ansatz { alpha: f64, beta: f64 },
    /// Ansatz with `(α, β)` fitted at the configured length and slice count.
    FitAnsatz { alpha_init: f64, beta_init: f64 },
    /// `[x_m, z_ohm]` nodes from `0` to `d`.
    Piecewise { breakpoints: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Antenna {
    pub z_in_ohm: f64,
    pub z_out_ohm: f64,
    pub d_m: f64,
    pub slices: usize,
    pub profile: ProfileSpec,
    /// Skip the wave engine and use this `|r_R|` directly.
    pub r_r_override: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figures {
    pub fig4_slices: Vec<usize>,
    pub fig5_slices: Vec<usize>,
    pub fig6: LengthScan,
    pub fig7_r_values: Vec<f64>,
    pub fig7_d_values_m: Vec<f64>,
    pub fig8: SensitivityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

/// Fully resolved configuration, SI units throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub wave: WaveContext,
    pub thermal: Thermal,
    pub antenna: Antenna,
    pub r: f64,
    /// `slices`, `d` and endpoint impedances are taken from here for `optimize`.
    pub optimize: OptimizationConfig,
    pub figures: Figures,
    pub output: Output,
}

impl RunConfig {
    /// Z_in = 50 Ω, Z_out = 377 Ω, v_in = c/3, v_out = c, ω = 5e9 rad/s,
    /// f = 5 GHz, T = 50 mK / 300 K, d = 0.2 m, r = 1.
    pub fn paper() -> Self {
        let (z_in, z_out, d) = (50.0, 377.0, 0.2);
        Self {
            wave: WaveContext::new(5e9),
            thermal: Thermal::Temperatures { freq_hz: 5e9, t_cryo_k: 0.05, t_env_k: 300.0 },
            antenna: Antenna {
                z_in_ohm: z_in,
                z_out_ohm: z_out,
                d_m: d,
                slices: 100,
                profile: ProfileSpec::Linear,
                r_r_override: None,
            },
            r: 1.0,
            optimize: OptimizationConfig::new(10, d, z_in, z_out),
            figures: Figures {
                fig4_slices: vec![2, 5, 10],
                fig5_slices: vec![2, 5, 10, 25, 50, 100],
                fig6: LengthScan { d_min: 0.01, d_max: 1.0, points: 50, spacing: Spacing::Linear },
                fig7_r_values: (0..7).map(|i| 0.5 + 0.25 * i as f64).collect(),
                fig7_d_values_m: (0..19).map(|i| 0.05 + 0.025 * i as f64).collect(),
                fig8: SensitivityConfig::default(),
            },
            output: Output { directory: PathBuf::from("out"), formats: vec![Format::Csv, Format::Json] },
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let cfg = raw.apply(Self::paper())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn channel(&self) -> crate::Result<ChannelParams> {
        let (n, n_eff) = self.thermal.occupations()?;
        ChannelParams::new(self.r, n, n_eff)
    }

    /// The configured profile before discretization (fits run here).
    pub fn profile(&self) -> crate::Result<ImpedanceProfile> {
        let a = &self.antenna;
        match &a.profile {
            ProfileSpec::Linear => ImpedanceProfile::linear(a.d_m, a.z_in_ohm, a.z_out_ohm),
            ProfileSpec::Ansatz { alpha, beta } => ImpedanceProfile::ansatz(a.d_m, a.z_in_ohm, a.z_out_ohm, *alpha, *beta),
            ProfileSpec::FitAnsatz { alpha_init, beta_init } => {
                let init = AnsatzInit { alpha: *alpha_init, beta: *beta_init };
                let fit = crate::optimizer::fit_ansatz(a.slices, a.d_m, a.z_in_ohm, a.z_out_ohm, &self.wave, init)?;
                ImpedanceProfile::ansatz(a.d_m, a.z_in_ohm, a.z_out_ohm, fit.alpha, fit.beta)
            }
            ProfileSpec::Piecewise { breakpoints } => {
                ImpedanceProfile::piecewise(a.d_m, breakpoints.iter().map(|&[x, z]| Breakpoint { x, z }).collect())
            }
        }
    }

    /// Profile ready for the wave engine: piecewise tables are used as
    /// given, smooth families are sampled at `antenna.slices`.
    pub fn discretized_profile(&self) -> crate::Result<ImpedanceProfile> {
        let p = self.profile()?;
        if p.breakpoints().is_some() {
            Ok(p)
        } else {
            p.discretize(self.antenna.slices)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let pos = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(field_err(field, format!("must be positive and finite, got {v}")))
            }
        };
        pos("wave.omega_rad_s", self.wave.omega)?;
        pos("wave.v_in_m_s", self.wave.v_in)?;
        pos("wave.v_out_m_s", self.wave.v_out)?;
        match self.thermal {
            Thermal::Temperatures { freq_hz, t_cryo_k, t_env_k } => {
                pos("thermal.freq_hz", freq_hz)?;
                pos("thermal.t_cryo_k", t_cryo_k)?;
                pos("thermal.t_env_k", t_env_k)?;
            }
            Thermal::Occupations { n, n_eff } => {
                for (f, v) in [("thermal.n", n), ("thermal.n_eff", n_eff)] {
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(field_err(f, format!("must be non-negative, got {v}")));
                    }
                }
            }
        }
        let a = &self.antenna;
        pos("antenna.z_in_ohm", a.z_in_ohm)?;
        pos("antenna.z_out_ohm", a.z_out_ohm)?;
        pos("antenna.d_m", a.d_m)?;
        if a.slices < 1 {
            return Err(field_err("antenna.slices", "must be at least 1"));
        }
        match &a.profile {
            ProfileSpec::Ansatz { alpha, beta } => {
                pos("antenna.alpha", *alpha)?;
                pos("antenna.beta", *beta)?;
            }
            ProfileSpec::FitAnsatz { alpha_init, beta_init } => {
                pos("antenna.alpha", *alpha_init)?;
                pos("antenna.beta", *beta_init)?;
            }
            _ => {}
        }
        self.profile().map_err(|e| field_err("antenna", e.to_string()))?;
        if let Some(r) = a.r_r_override {
            if !(0.0..=1.0).contains(&r) {
                return Err(field_err("antenna.r_r_override", format!("must lie in [0, 1], got {r}")));
            }
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(field_err("channel.r", format!("must be non-negative, got {}", self.r)));
        }
        let o = &self.optimize;
        if o.slices < 1 {
            return Err(field_err("optimize.slices", "must be at least 1"));
        }
        pos("optimize.tol", o.tol)?;
        if o.line_search.grid_points < 8 {
            return Err(field_err("optimize.grid_points", "must be at least 8"));
        }
        let f = &self.figures;
        f.fig6.grid().map_err(|e| field_err("fig6", e.to_string()))?;
        for &d in &f.fig7_d_values_m {
            pos("fig7.d_values_m", d)?;
        }
        if f.fig8.trials < 1 {
            return Err(field_err("fig8.trials", "must be at least 1"));
        }
        for &x in &f.fig8.fractions {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(field_err("fig8.error_fractions", format!("must be non-negative, got {x}")));
            }
        }
        if self.output.formats.is_empty() {
            return Err(field_err("output.formats", "at least one format is required"));
        }
        Ok(())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    wave: Option<RawWave>,
    thermal: Option<RawThermal>,
    antenna: Option<RawAntenna>,
    channel: Option<RawChannel>,
    optimize: Option<RawOptimize>,
    fig4: Option<RawSlices>,
    fig5: Option<RawSlices>,
    fig6: Option<RawFig6>,
    fig7: Option<RawFig7>,
    fig8: Option<RawFig8>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWave {
    omega_rad_s: Option<f64>,
    v_in_m_s: Option<f64>,
    v_out_m_s: Option<f64>,
    /// Velocities as fractions of `c`.
    v_in_c: Option<f64>,
    v_out_c: Option<f64>,
    rule: Option<MatchingRule>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThermal {
    freq_hz: Option<f64>,
    freq_ghz: Option<f64>,
    t_cryo_k: Option<f64>,
    t_cryo_mk: Option<f64>,
    t_env_k: Option<f64>,
    n: Option<f64>,
    n_eff: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAntenna {
    z_in_ohm: Option<f64>,
    z_out_ohm: Option<f64>,
    d_m: Option<f64>,
    d_cm: Option<f64>,
    slices: Option<usize>,
    profile: Option<String>,
    alpha: Option<f64>,
    beta: Option<f64>,
    breakpoints: Option<Vec<[f64; 2]>>,
    r_r_override: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    r: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptimize {
    slices: Option<usize>,
    direction: Option<Direction>,
    sweeps: Option<usize>,
    tol: Option<f64>,
    bounds: Option<Bounds>,
    grid_points: Option<usize>,
    refinement_levels: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSlices {
    slices: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFig6 {
    d_min_m: Option<f64>,
    d_max_m: Option<f64>,
    points: Option<usize>,
    spacing: Option<Spacing>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFig7 {
    r_values: Option<Vec<f64>>,
    d_values_m: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFig8 {
    error_fractions: Option<Vec<f64>>,
    trials: Option<usize>,
    seed: Option<u64>,
    variance_reading: Option<VarianceReading>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<PathBuf>,
    formats: Option<Vec<Format>>,
}

/// At most one of two spellings, the second scaled into SI.
fn one_of(a_name: &str, a: Option<f64>, b_name: &str, b: Option<f64>, b_scale: f64) -> Result<Option<f64>, ConfigError> {
    match (a, b) {
        (Some(_), Some(_)) => Err(field_err(a_name, format!("give either {a_name} or {b_name}, not both"))),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(v)) => Ok(Some(v * b_scale)),
        (None, None) => Ok(None),
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl RawConfig {
    fn apply(self, mut cfg: RunConfig) -> Result<RunConfig, ConfigError> {
        if let Some(w) = self.wave {
            set(&mut cfg.wave.omega, w.omega_rad_s);
            set(&mut cfg.wave.v_in, one_of("wave.v_in_m_s", w.v_in_m_s, "wave.v_in_c", w.v_in_c, SPEED_OF_LIGHT)?);
            set(&mut cfg.wave.v_out, one_of("wave.v_out_m_s", w.v_out_m_s, "wave.v_out_c", w.v_out_c, SPEED_OF_LIGHT)?);
            set(&mut cfg.wave.rule, w.rule);
        }
        if let Some(t) = self.thermal {
            let freq = one_of("thermal.freq_hz", t.freq_hz, "thermal.freq_ghz", t.freq_ghz, 1e9)?;
            let cryo = one_of("thermal.t_cryo_k", t.t_cryo_k, "thermal.t_cryo_mk", t.t_cryo_mk, 1e-3)?;
            let temps = freq.is_some() || cryo.is_some() || t.t_env_k.is_some();
            let occs = t.n.is_some() || t.n_eff.is_some();
            cfg.thermal = match (temps, occs) {
                (true, true) => {
                    return Err(field_err("thermal", "give either temperatures (freq, t_cryo, t_env) or occupations (n, n_eff), not both"))
                }
                (false, true) => Thermal::Occupations {
                    n: t.n.ok_or_else(|| field_err("thermal.n", "required together with thermal.n_eff"))?,
                    n_eff: t.n_eff.ok_or_else(|| field_err("thermal.n_eff", "required together with thermal.n"))?,
                },
                (true, false) => {
                    let Thermal::Temperatures { freq_hz, t_cryo_k, t_env_k } = RunConfig::paper().thermal else {
                        unreachable!("preset uses temperatures")
                    };
                    Thermal::Temperatures {
                        freq_hz: freq.unwrap_or(freq_hz),
                        t_cryo_k: cryo.unwrap_or(t_cryo_k),
                        t_env_k: t.t_env_k.unwrap_or(t_env_k),
                    }
                }
                (false, false) => cfg.thermal,
            };
        }
        if let Some(a) = self.antenna {
            let ant = &mut cfg.antenna;
            set(&mut ant.z_in_ohm, a.z_in_ohm);
            set(&mut ant.z_out_ohm, a.z_out_ohm);
            set(&mut ant.d_m, one_of("antenna.d_m", a.d_m, "antenna.d_cm", a.d_cm, 1e-2)?);
            set(&mut ant.slices, a.slices);
            ant.r_r_override = a.r_r_override.or(ant.r_r_override);
            let need = |v: Option<f64>, f: &str| v.ok_or_else(|| field_err(f, "required for this profile"));
            ant.profile = match a.profile.as_deref() {
                None => ant.profile.clone(),
                Some("linear") => ProfileSpec::Linear,
                Some("ansatz") => ProfileSpec::Ansatz { alpha: need(a.alpha, "antenna.alpha")?, beta: need(a.beta, "antenna.beta")? },
                Some("fit_ansatz") => {
                    let init = AnsatzInit::default();
                    ProfileSpec::FitAnsatz { alpha_init: a.alpha.unwrap_or(init.alpha), beta_init: a.beta.unwrap_or(init.beta) }
                }
                Some("piecewise") => ProfileSpec::Piecewise {
                    breakpoints: a.breakpoints.ok_or_else(|| field_err("antenna.breakpoints", "required for a piecewise profile"))?,
                },
                Some(other) => {
                    return Err(field_err(
                        "antenna.profile",
                        format!("unknown profile {other:?}; expected linear, ansatz, fit_ansatz or piecewise"),
                    ))
                }
            };
        }
        cfg.optimize.d = cfg.antenna.d_m;
        cfg.optimize.z_in = cfg.antenna.z_in_ohm;
        cfg.optimize.z_out = cfg.antenna.z_out_ohm;
        if let Some(c) = self.channel {
            set(&mut cfg.r, c.r);
        }
        if let Some(o) = self.optimize {
            set(&mut cfg.optimize.slices, o.slices);
            set(&mut cfg.optimize.direction, o.direction);
            set(&mut cfg.optimize.sweeps, o.sweeps);
            set(&mut cfg.optimize.tol, o.tol);
            set(&mut cfg.optimize.bounds, o.bounds);
            let ls = LineSearch {
                grid_points: o.grid_points.unwrap_or(cfg.optimize.line_search.grid_points),
                refinement_levels: o.refinement_levels.unwrap_or(cfg.optimize.line_search.refinement_levels),
            };
            cfg.optimize.line_search = ls;
        }
        let fig = &mut cfg.figures;
        if let Some(f) = self.fig4 {
            set(&mut fig.fig4_slices, f.slices);
        }
        if let Some(f) = self.fig5 {
            set(&mut fig.fig5_slices, f.slices);
        }
        if let Some(f) = self.fig6 {
            set(&mut fig.fig6.d_min, f.d_min_m);
            set(&mut fig.fig6.d_max, f.d_max_m);
            set(&mut fig.fig6.points, f.points);
            set(&mut fig.fig6.spacing, f.spacing);
        }
        if let Some(f) = self.fig7 {
            set(&mut fig.fig7_r_values, f.r_values);
            set(&mut fig.fig7_d_values_m, f.d_values_m);
        }
        if let Some(f) = self.fig8 {
            set(&mut fig.fig8.fractions, f.error_fractions);
            set(&mut fig.fig8.trials, f.trials);
            set(&mut fig.fig8.seed, f.seed);
            set(&mut fig.fig8.reading, f.variance_reading);
        }
        if let Some(o) = self.output {
            set(&mut cfg.output.directory, o.directory);
            set(&mut cfg.output.formats, o.formats);
        }
        Ok(cfg)
    }
}
