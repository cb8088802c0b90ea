//! Impedance profiles `Z(x)` on the antenna `[0, d]`.
//!
//! All families pin `Z(0) = Z_in` and `Z(d) = Z_out` exactly. Positions are
//! in meters and impedances in ohms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `(position, impedance)` node of a piecewise-linear profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub x: f64,
    pub z: f64,
}

/// How "variance is a fraction of the value" is read when perturbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceReading {
    /// `Var[ε] = fraction · Z` (units Ω²).
    #[default]
    VarianceFraction,
    /// `Std[ε] = fraction · Z`.
    StdFraction,
}

impl VarianceReading {
    pub fn std_dev(self, fraction: f64, z: f64) -> f64 {
        match self {
            VarianceReading::VarianceFraction => (fraction * z).sqrt(),
            VarianceReading::StdFraction => fraction * z,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Linear,
    PiecewiseLinear(Vec<Breakpoint>),
    /// `Z_in + α[exp((x/d)^β · ln(1 + (Z_out − Z_in)/α)) − 1]`
    Ansatz { alpha: f64, beta: f64 },
    Perturbed {
        base: Box<ImpedanceProfile>,
        error_fraction: f64,
        seed: u64,
        reading: VarianceReading,
        table: Vec<Breakpoint>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct ImpedanceProfile {
    d: f64,
    z_in: f64,
    z_out: f64,
    shape: Shape,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidProfile(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_table(d: f64, z_in: f64, z_out: f64, table: &[Breakpoint]) -> Result<()> {
    if table.len() < 2 {
        return Err(Error::InvalidProfile("need at least two breakpoints".into()));
    }
    let first = table[0];
    let last = table[table.len() - 1];
    if first.x != 0.0 || last.x != d {
        return Err(Error::InvalidProfile(format!(
            "breakpoints must start at 0 and end at d = {d}, got {} .. {}",
            first.x, last.x
        )));
    }
    if first.z != z_in || last.z != z_out {
        return Err(Error::InvalidProfile("end breakpoints must equal Z_in and Z_out".into()));
    }
    for w in table.windows(2) {
        if !(w[1].x > w[0].x) {
            return Err(Error::InvalidProfile(format!(
                "breakpoint positions must strictly increase ({} then {})",
                w[0].x, w[1].x
            )));
        }
    }
    for b in table {
        positive("breakpoint impedance", b.z)?;
    }
    Ok(())
}

fn interpolate(table: &[Breakpoint], x: f64) -> f64 {
    let i = table.partition_point(|b| b.x <= x);
    if i == 0 {
        return table[0].z;
    }
    if i >= table.len() {
        return table[table.len() - 1].z;
    }
    let (a, b) = (table[i - 1], table[i]);
    a.z + (x - a.x) / (b.x - a.x) * (b.z - a.z)
}

/// Node positions `x_n = n·d/N`, with the last pinned to `d`.
pub fn grid(d: f64, slices: usize) -> impl Iterator<Item = f64> {
    (0..=slices).map(move |n| if n == slices { d } else { n as f64 * d / slices as f64 })
}

impl ImpedanceProfile {
    pub fn linear(d: f64, z_in: f64, z_out: f64) -> Result<Self> {
        positive("d", d)?;
        positive("Z_in", z_in)?;
        positive("Z_out", z_out)?;
        Ok(Self { d, z_in, z_out, shape: Shape::Linear })
    }

    pub fn piecewise(d: f64, breakpoints: Vec<Breakpoint>) -> Result<Self> {
        positive("d", d)?;
        let (z_in, z_out) = match (breakpoints.first(), breakpoints.last()) {
            (Some(a), Some(b)) => (a.z, b.z),
            _ => return Err(Error::InvalidProfile("empty breakpoint table".into())),
        };
        check_table(d, z_in, z_out, &breakpoints)?;
        Ok(Self { d, z_in, z_out, shape: Shape::PiecewiseLinear(breakpoints) })
    }

    /// Uniformly spaced slices from a list of `N + 1` node impedances.
    pub fn from_node_impedances(d: f64, z: &[f64]) -> Result<Self> {
        if z.len() < 2 {
            return Err(Error::InvalidProfile("need at least two node impedances".into()));
        }
        let n = z.len() - 1;
        let table = grid(d, n).zip(z).map(|(x, &z)| Breakpoint { x, z }).collect();
        Self::piecewise(d, table)
    }

    pub fn ansatz(d: f64, z_in: f64, z_out: f64, alpha: f64, beta: f64) -> Result<Self> {
        positive("d", d)?;
        positive("Z_in", z_in)?;
        positive("Z_out", z_out)?;
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        if !(1.0 + (z_out - z_in) / alpha > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "alpha = {alpha} too small for a decreasing profile {z_in} -> {z_out}"
            )));
        }
        Ok(Self { d, z_in, z_out, shape: Shape::Ansatz { alpha, beta } })
    }

    pub fn length(&self) -> f64 {
        self.d
    }

    pub fn z_in(&self) -> f64 {
        self.z_in
    }

    pub fn z_out(&self) -> f64 {
        self.z_out
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Breakpoint table, when the profile carries one.
    pub fn breakpoints(&self) -> Option<&[Breakpoint]> {
        match &self.shape {
            Shape::PiecewiseLinear(t) => Some(t),
            Shape::Perturbed { table, .. } => Some(table),
            _ => None,
        }
    }

    pub fn z_at(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.d).contains(&x) {
            return Err(Error::OutOfDomain { x, d: self.d });
        }
        if x == 0.0 {
            return Ok(self.z_in);
        }
        if x == self.d {
            return Ok(self.z_out);
        }
        let t = x / self.d;
        Ok(match &self.shape {
            Shape::Linear => (1.0 - t) * self.z_in + t * self.z_out,
            Shape::Ansatz { alpha, beta } => {
                let log_span = ((self.z_out - self.z_in) / alpha).ln_1p();
                self.z_in + alpha * (t.powf(*beta) * log_span).exp_m1()
            }
            Shape::PiecewiseLinear(table) | Shape::Perturbed { table, .. } => interpolate(table, x),
        })
    }

    /// `N + 1` nodes at `x_n = n·d/N` carrying `z_at(x_n)`.
    pub fn discretize(&self, slices: usize) -> Result<ImpedanceProfile> {
        if slices == 0 {
            return Err(Error::Precondition("slice count must be at least 1".into()));
        }
        let table = grid(self.d, slices)
            .map(|x| self.z_at(x).map(|z| Breakpoint { x, z }))
            .collect::<Result<Vec<_>>>()?;
        check_table(self.d, self.z_in, self.z_out, &table)?;
        Ok(Self { d: self.d, z_in: self.z_in, z_out: self.z_out, shape: Shape::PiecewiseLinear(table) })
    }

    /// Gaussian fabrication error on every interior breakpoint.
    ///
    /// Draws that land at or below zero are redrawn; endpoints never move.
    pub fn perturb(&self, error_fraction: f64, seed: u64, reading: VarianceReading) -> Result<ImpedanceProfile> {
        if !(error_fraction >= 0.0) || !error_fraction.is_finite() {
            return Err(Error::Precondition(format!("error fraction must be >= 0, got {error_fraction}")));
        }
        let base_table = self.breakpoints().ok_or(Error::NotDiscretized)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = base_table.to_vec();
        if error_fraction > 0.0 {
            let last = table.len() - 1;
            for node in &mut table[1..last] {
                let sd = reading.std_dev(error_fraction, node.z);
                let normal = Normal::new(0.0, sd)
                    .map_err(|e| Error::Precondition(format!("bad perturbation width: {e}")))?;
                let mut z = node.z + normal.sample(&mut rng);
                while z <= 0.0 {
                    z = node.z + normal.sample(&mut rng);
                }
                node.z = z;
            }
        }
        Ok(Self {
            d: self.d,
            z_in: self.z_in,
            z_out: self.z_out,
            shape: Shape::Perturbed {
                base: Box::new(self.clone()),
                error_fraction,
                seed,
                reading,
                table,
            },
        })
    }

    /// Mirror image `x → d − x`, swapping the two lines.
    pub fn reversed(&self, slices: usize) -> Result<ImpedanceProfile> {
        let fwd = self.discretize(slices)?;
        let table = fwd.breakpoints().expect("discretized");
        let z: Vec<f64> = table.iter().rev().map(|b| b.z).collect();
        Self::from_node_impedances(self.d, &z)
    }

    pub fn densities(&self, velocity: f64) -> Result<MaterialDensities<'_>> {
        positive("velocity", velocity)?;
        Ok(MaterialDensities { profile: self, velocity })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Inductance and capacitance per unit length implied by a profile.
#[derive(Debug, Clone, Copy)]
pub struct MaterialDensities<'a> {
    profile: &'a ImpedanceProfile,
    velocity: f64,
}

impl MaterialDensities<'_> {
    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    /// `l(x) = Z(x)/v` in H/m.
    pub fn inductance(&self, x: f64) -> Result<f64> {
        Ok(self.profile.z_at(x)? / self.velocity)
    }

    /// `c(x) = 1/(Z(x)·v)` in F/m.
    pub fn capacitance(&self, x: f64) -> Result<f64> {
        Ok(1.0 / (self.profile.z_at(x)? * self.velocity))
    }

    /// Closed-form densities written directly in terms of the line
    /// inductances and capacitances, for ansatz profiles only.
    pub fn ansatz_closed_form(&self, x: f64) -> Option<(f64, f64)> {
        let Shape::Ansatz { alpha, beta } = self.profile.shape else {
            return None;
        };
        let v = self.velocity;
        let p = &self.profile;
        let t = (x / p.d).powf(beta);
        let (l_in, l_out) = (p.z_in / v, p.z_out / v);
        let (c_in, c_out) = (1.0 / (p.z_in * v), 1.0 / (p.z_out * v));
        let a_l = alpha / v;
        let l = l_in + a_l * ((t * (1.0 + (l_out - l_in) / a_l).ln()).exp() - 1.0);
        let a_c = alpha * v;
        let base = 1.0 + (1.0 / c_out - 1.0 / c_in) / a_c;
        let c = 1.0 / (1.0 / c_in + a_c * (base.powf(t) - 1.0));
        Some((l, c))
    }
}

// ---- serialization ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ProfileRepr {
    Linear {
        d_m: f64,
        z_in_ohm: f64,
        z_out_ohm: f64,
    },
    PiecewiseLinear {
        d_m: f64,
        z_in_ohm: f64,
        z_out_ohm: f64,
        breakpoints: Vec<[f64; 2]>,
    },
    Ansatz {
        d_m: f64,
        z_in_ohm: f64,
        z_out_ohm: f64,
        alpha: f64,
        beta: f64,
    },
    Perturbed {
        d_m: f64,
        z_in_ohm: f64,
        z_out_ohm: f64,
        base: Box<ImpedanceProfile>,
        error_fraction: f64,
        seed: u64,
        #[serde(default)]
        variance_reading: VarianceReading,
    },
}

impl TryFrom<ProfileRepr> for ImpedanceProfile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        let check_ends = |p: &ImpedanceProfile, d: f64, zi: f64, zo: f64| {
            if p.d != d || p.z_in != zi || p.z_out != zo {
                Err(Error::InvalidProfile("d_m / z_in_ohm / z_out_ohm disagree with the profile data".into()))
            } else {
                Ok(())
            }
        };
        match r {
            ProfileRepr::Linear { d_m, z_in_ohm, z_out_ohm } => Self::linear(d_m, z_in_ohm, z_out_ohm),
            ProfileRepr::PiecewiseLinear { d_m, z_in_ohm, z_out_ohm, breakpoints } => {
                let table = breakpoints.into_iter().map(|[x, z]| Breakpoint { x, z }).collect();
                let p = Self::piecewise(d_m, table)?;
                check_ends(&p, d_m, z_in_ohm, z_out_ohm)?;
                Ok(p)
            }
            ProfileRepr::Ansatz { d_m, z_in_ohm, z_out_ohm, alpha, beta } => {
                Self::ansatz(d_m, z_in_ohm, z_out_ohm, alpha, beta)
            }
            ProfileRepr::Perturbed { d_m, z_in_ohm, z_out_ohm, base, error_fraction, seed, variance_reading } => {
                check_ends(&base, d_m, z_in_ohm, z_out_ohm)?;
                base.perturb(error_fraction, seed, variance_reading)
            }
        }
    }
}

impl From<ImpedanceProfile> for ProfileRepr {
    fn from(p: ImpedanceProfile) -> Self {
        let (d_m, z_in_ohm, z_out_ohm) = (p.d, p.z_in, p.z_out);
        match p.shape {
            Shape::Linear => ProfileRepr::Linear { d_m, z_in_ohm, z_out_ohm },
            Shape::PiecewiseLinear(t) => ProfileRepr::PiecewiseLinear {
                d_m,
                z_in_ohm,
                z_out_ohm,
                breakpoints: t.into_iter().map(|b| [b.x, b.z]).collect(),
            },
            Shape::Ansatz { alpha, beta } => ProfileRepr::Ansatz { d_m, z_in_ohm, z_out_ohm, alpha, beta },
            Shape::Perturbed { base, error_fraction, seed, reading, .. } => ProfileRepr::Perturbed {
                d_m,
                z_in_ohm,
                z_out_ohm,
                base,
                error_fraction,
                seed,
                variance_reading: reading,
            },
        }
    }
}
