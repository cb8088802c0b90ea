//! Two-mode squeezed thermal states sent through the antenna.
//!
//! Covariance matrices use quadrature ordering `(x₁, p₁, x₂, p₂, …)` and
//! the vacuum has unit variance. Mode 1 passes through the antenna, where
//! it is mixed with a thermal environment mode by the scattering matrix;
//! mode 2 stays in the cryostat.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{BOLTZMANN, PLANCK};

/// Squeezing and thermal occupations of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub r: f64,
    /// Occupation of the cryostat modes.
    pub n: f64,
    /// Occupation of the environment mode.
    pub n_eff: f64,
}

impl ChannelParams {
    pub fn new(r: f64, n: f64, n_eff: f64) -> Result<Self> {
        let p = Self { r, n, n_eff };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("r", self.r), ("n", self.n), ("n_eff", self.n_eff)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Precondition(format!("{name} = {v} must be finite and non-negative")));
            }
        }
        Ok(())
    }

    /// `η = (1 + 2N_eff)/(1 + 2n)`.
    pub fn eta(&self) -> f64 {
        (1.0 + 2.0 * self.n_eff) / (1.0 + 2.0 * self.n)
    }

    pub fn purity(&self) -> f64 {
        (1.0 + 2.0 * self.n).powi(-2)
    }

    /// `ν_in = (1 + 2n)·e^{−2r}`.
    pub fn nu_in(&self) -> f64 {
        (1.0 + 2.0 * self.n) * (-2.0 * self.r).exp()
    }
}

/// Real symmetric covariance matrix of `D/2` modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMat<const D: usize>(pub [[f64; D]; D]);

pub type CovMat2 = CovMat<2>;
pub type CovMat4 = CovMat<4>;
pub type CovMat6 = CovMat<6>;

impl<const D: usize> CovMat<D> {
    pub fn identity() -> Self {
        let mut m = [[0.0; D]; D];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        CovMat(m)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..D).all(|i| (0..i).all(|j| (self.0[i][j] - self.0[j][i]).abs() <= tol))
    }

    /// Determinant by partial-pivot elimination.
    pub fn det(&self) -> f64 {
        let mut a = self.0;
        let mut det = 1.0;
        for c in 0..D {
            let p = (c..D).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap_or(c);
            if a[p][c] == 0.0 {
                return 0.0;
            }
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= a[c][c];
            for r in c + 1..D {
                let f = a[r][c] / a[c][c];
                for k in c..D {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
        det
    }

    /// `2×2` block `(i, j)`.
    pub fn block(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        let m = &self.0;
        [[m[2 * i][2 * j], m[2 * i][2 * j + 1]], [m[2 * i + 1][2 * j], m[2 * i + 1][2 * j + 1]]]
    }
}

fn det2(b: [[f64; 2]; 2]) -> f64 {
    b[0][0] * b[1][1] - b[0][1] * b[1][0]
}

impl CovMat2 {
    /// Thermal state with occupation `n`.
    pub fn thermal(n: f64) -> Self {
        let v = 1.0 + 2.0 * n;
        CovMat([[v, 0.0], [0.0, v]])
    }

    pub fn is_physical(&self) -> bool {
        self.is_symmetric(1e-12) && self.0[0][0] > 0.0 && self.det() >= 1.0 - 1e-9
    }
}

impl CovMat4 {
    /// Symplectic eigenvalues `(ν₋, ν₊)` of the state itself.
    pub fn symplectic_spectrum(&self) -> Result<(f64, f64)> {
        let delta = det2(self.block(0, 0)) + det2(self.block(1, 1)) + 2.0 * det2(self.block(0, 1));
        spectrum_from(delta, self.det())
    }

    /// `σ + iΩ ≥ 0`, checked through the symplectic spectrum.
    pub fn is_physical(&self) -> bool {
        self.is_symmetric(1e-9)
            && self.0[0][0] > 0.0
            && self.0[2][2] > 0.0
            && matches!(self.symplectic_spectrum(), Ok((lo, _)) if lo >= 1.0 - 1e-9)
    }
}

fn spectrum_from(delta: f64, det: f64) -> Result<(f64, f64)> {
    let disc = delta * delta - 4.0 * det;
    if disc < -1e-10 * delta * delta.max(1.0) || !disc.is_finite() || det < 0.0 {
        return Err(Error::Unphysical(format!("Δ = {delta}, det = {det}")));
    }
    let root = disc.max(0.0).sqrt();
    let hi2 = (delta + root) / 2.0;
    // (Δ − √·)(Δ + √·) = 4 det avoids cancellation in the small eigenvalue
    let lo2 = if hi2 > 0.0 { det / hi2 } else { 0.0 };
    Ok((lo2.sqrt(), hi2.sqrt()))
}

/// Bose–Einstein occupation at frequency `f` (Hz) and temperature `t` (K).
pub fn thermal_occupation(frequency: f64, temperature: f64) -> Result<f64> {
    if !(frequency > 0.0) || !(temperature > 0.0) {
        return Err(Error::Precondition(format!(
            "thermal occupation needs f > 0 and T > 0, got f = {frequency}, T = {temperature}"
        )));
    }
    let x = PLANCK * frequency / (BOLTZMANN * temperature);
    if x > 700.0 {
        return Ok(0.0);
    }
    Ok(1.0 / x.exp_m1())
}

/// Input two-mode squeezed thermal state.
pub fn tmsth_covariance(params: &ChannelParams) -> CovMat4 {
    let v = 1.0 + 2.0 * params.n;
    let (c, s) = (v * (2.0 * params.r).cosh(), v * (2.0 * params.r).sinh());
    CovMat([[c, 0.0, s, 0.0], [0.0, c, 0.0, -s], [s, 0.0, c, 0.0], [0.0, -s, 0.0, c]])
}

/// Environment mode followed by the input state.
pub fn env_in_covariance(params: &ChannelParams) -> CovMat6 {
    let mut m = [[0.0; 6]; 6];
    let env = 1.0 + 2.0 * params.n_eff;
    m[0][0] = env;
    m[1][1] = env;
    let s = tmsth_covariance(params);
    for i in 0..4 {
        for j in 0..4 {
            m[i + 2][j + 2] = s.0[i][j];
        }
    }
    CovMat(m)
}

fn check_unitary(t_mag2: f64, r_mag2: f64) -> Result<()> {
    if !(t_mag2 >= 0.0 && r_mag2 >= 0.0 && (t_mag2 + r_mag2 - 1.0).abs() <= 1e-8) {
        return Err(Error::Precondition(format!("|t|² + |r|² = {} ≠ 1", t_mag2 + r_mag2)));
    }
    Ok(())
}

/// Kept-mode pair after the antenna, with the `t_L` phase dropped.
pub fn output_covariance(t_mag2: f64, r_mag2: f64, params: &ChannelParams) -> Result<CovMat4> {
    check_unitary(t_mag2, r_mag2)?;
    let v = 1.0 + 2.0 * params.n;
    let (ch, sh) = ((2.0 * params.r).cosh(), (2.0 * params.r).sinh());
    let a = v * (params.eta() * r_mag2 + t_mag2 * ch);
    let g = v * t_mag2.sqrt() * sh;
    let b = v * ch;
    Ok(CovMat([[a, 0.0, g, 0.0], [0.0, a, 0.0, -g], [g, 0.0, b, 0.0], [0.0, -g, 0.0, b]]))
}

/// Smallest symplectic eigenvalue of the partial transpose.
pub fn symplectic_nu(sigma: &CovMat4) -> Result<f64> {
    let delta = det2(sigma.block(0, 0)) + det2(sigma.block(1, 1)) - 2.0 * det2(sigma.block(0, 1));
    Ok(spectrum_from(delta, sigma.det())?.0)
}

/// `Δ(σ_out)` and `√(Δ² − 4 det σ_out)` written out in channel parameters.
pub fn explicit_delta(t_mag2: f64, r_mag2: f64, params: &ChannelParams) -> (f64, f64) {
    let v2 = (1.0 + 2.0 * params.n).powi(2);
    let (ch, sh) = ((2.0 * params.r).cosh(), (2.0 * params.r).sinh());
    let eta = params.eta();
    let a = eta * r_mag2 + t_mag2 * ch;
    let delta = v2 * (a * a + ch * ch + 2.0 * t_mag2 * sh * sh);
    let root = v2
        * (eta * r_mag2 + (1.0 + t_mag2) * ch)
        * ((eta - ch).powi(2) * r_mag2 * r_mag2 + 4.0 * t_mag2 * sh * sh).sqrt();
    (delta, root)
}

pub fn negativity(nu: f64) -> f64 {
    ((1.0 - nu) / (2.0 * nu)).max(0.0)
}

/// `r' = −½·ln(ν_out/(1 + 2n))`; negative when nothing is left.
pub fn output_squeezing(nu_out: f64, n: f64) -> f64 {
    -0.5 * (nu_out / (1.0 + 2.0 * n)).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `η|r_R|² ≫ 1`.
    HighReflection,
    /// `η|r_R|² ≪ 1`, near-total transmission.
    LowReflection,
}

/// An approximate `ν_out` and whether its regime applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeEstimate {
    pub nu: f64,
    /// `η|r_R|²`.
    pub eta_r2: f64,
    pub valid: bool,
}

/// Factor by which `η|r_R|²` must clear 1 for a regime to count as valid.
pub const REGIME_MARGIN: f64 = 10.0;

pub fn regime_nu(regime: Regime, params: &ChannelParams, t_mag2: f64, r_mag2: f64) -> RegimeEstimate {
    let eta_r2 = params.eta() * r_mag2;
    let (ch, sh) = ((2.0 * params.r).cosh(), (2.0 * params.r).sinh());
    let nu_in = params.nu_in();
    let (nu, valid) = match regime {
        Regime::HighReflection => {
            let corr = t_mag2 * (1.0 + t_mag2) * sh * sh / (2.0 * eta_r2 * ch);
            (nu_in + (1.0 + 2.0 * params.n) * sh * (1.0 - corr), eta_r2 >= REGIME_MARGIN)
        }
        Regime::LowReflection => (nu_in + (0.5 + params.n_eff) * r_mag2, eta_r2 <= 1.0 / REGIME_MARGIN),
    };
    RegimeEstimate { nu, eta_r2, valid }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeValidity {
    pub eta_r2: f64,
    pub high_reflection: bool,
    pub low_reflection: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub nu: f64,
    pub negativity: f64,
    pub r_out: f64,
    pub entangled: bool,
    pub regime_validity: RegimeValidity,
}

/// Full pipeline from antenna magnitudes to output entanglement.
pub fn entanglement_report(params: &ChannelParams, t_mag2: f64, r_mag2: f64) -> Result<EntanglementReport> {
    params.validate()?;
    let sigma = output_covariance(t_mag2, r_mag2, params)?;
    let nu = symplectic_nu(&sigma)?;
    let eta_r2 = params.eta() * r_mag2;
    Ok(EntanglementReport {
        nu,
        negativity: negativity(nu),
        r_out: output_squeezing(nu, params.n),
        entangled: nu < 1.0,
        regime_validity: RegimeValidity {
            eta_r2,
            high_reflection: eta_r2 >= REGIME_MARGIN,
            low_reflection: eta_r2 <= 1.0 / REGIME_MARGIN,
        },
    })
}

/// Entanglement thresholds in the low-reflection regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    n: f64,
    n_eff: f64,
}

impl Thresholds {
    pub fn new(params: &ChannelParams) -> Self {
        Self { n: params.n, n_eff: params.n_eff }
    }

    /// `½·ln(1 + 2n)`: squeezing needed for the input to be entangled.
    pub fn r_min_input(&self) -> f64 {
        0.5 * (2.0 * self.n).ln_1p()
    }

    /// Squeezing needed after the channel at reflection `|r_R|`.
    pub fn r_min_channel(&self, r_r: f64) -> Result<f64> {
        let load = (0.5 + self.n_eff) * r_r * r_r;
        if load >= 1.0 {
            return Err(Error::NoThreshold(load));
        }
        Ok(self.r_min_input() - 0.5 * (-load).ln_1p())
    }

    /// Largest `|r_R|` that keeps the output entangled at squeezing `r`.
    pub fn r_r_max_at(&self, r: f64) -> Option<f64> {
        let room = 1.0 - (1.0 + 2.0 * self.n) * (-2.0 * r).exp();
        (room > 0.0).then(|| (room / (0.5 + self.n_eff)).sqrt())
    }
}

/// `|r_R|` at which the exact `ν_out` reaches 1, by bisection.
pub fn exact_r_r_max(params: &ChannelParams) -> Result<Option<f64>> {
    let nu_at = |r_r: f64| -> Result<f64> {
        let r2 = r_r * r_r;
        symplectic_nu(&output_covariance(1.0 - r2, r2, params)?)
    };
    if nu_at(0.0)? >= 1.0 {
        return Ok(None);
    }
    if nu_at(1.0)? < 1.0 {
        return Ok(Some(1.0));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if nu_at(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
