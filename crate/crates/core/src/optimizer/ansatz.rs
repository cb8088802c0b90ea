use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective;
use crate::error::Result;
use crate::profiles::ImpedanceProfile;
use crate::scattering::WaveContext;

pub const ALPHA_MAX: f64 = 1e4;
pub const BETA_MAX: f64 = 20.0;
const ALPHA_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzInit {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for AnsatzInit {
    fn default() -> Self {
        Self { alpha: 30.1, beta: 4.86 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzFit {
    pub alpha: f64,
    pub beta: f64,
    pub r_mag: f64,
}

/// The ansatz taper for `(α, β)`, discretized.
pub fn ansatz_profile(slices: usize, d: f64, z_in: f64, z_out: f64, alpha: f64, beta: f64) -> Result<ImpedanceProfile> {
    ImpedanceProfile::ansatz(d, z_in, z_out, alpha, beta)?.discretize(slices)
}

struct Problem<'a> {
    slices: usize,
    d: f64,
    z_in: f64,
    z_out: f64,
    ctx: &'a WaveContext,
}

impl Problem<'_> {
    fn r_mag(&self, alpha: f64, beta: f64) -> f64 {
        match ansatz_profile(self.slices, self.d, self.z_in, self.z_out, alpha, beta) {
            Ok(p) => objective(&p, self.ctx),
            Err(_) => f64::INFINITY,
        }
    }

    /// `ln|r_R|` over `(ln α, β)`, infinite outside the box.
    fn cost(&self, p: [f64; 2]) -> f64 {
        let (alpha, beta) = (p[0].exp(), p[1]);
        if !(ALPHA_MIN..=ALPHA_MAX).contains(&alpha) || !(beta > 0.0 && beta <= BETA_MAX) {
            return f64::INFINITY;
        }
        self.r_mag(alpha, beta).max(1e-300).ln()
    }
}

/// Maximum number of grid basins polished by the simplex.
const MAX_STARTS: usize = 24;

/// Coarse `(ln α, β)` grid, then simplex polishing from `init` and from
/// the best local minima of the grid.
pub fn fit_ansatz(
    slices: usize,
    d: f64,
    z_in: f64,
    z_out: f64,
    ctx: &WaveContext,
    init: AnsatzInit,
) -> Result<AnsatzFit> {
    let prob = Problem { slices: slices.max(1), d, z_in, z_out, ctx };
    let (na, nb) = (56, 56);
    let (la0, la1) = (ALPHA_MIN.ln() + 1.0, ALPHA_MAX.ln());
    let at = |i: usize, j: usize| [la0 + (la1 - la0) * i as f64 / (na - 1) as f64, BETA_MAX * (j + 1) as f64 / nb as f64];
    let cells: Vec<(usize, usize)> = (0..na).flat_map(|i| (0..nb).map(move |j| (i, j))).collect();
    let costs: Vec<f64> = cells.par_iter().map(|&(i, j)| prob.cost(at(i, j))).collect();
    let cost = |i: usize, j: usize| costs[i * nb + j];
    let mut basins: Vec<(f64, [f64; 2])> = cells
        .iter()
        .filter(|&&(i, j)| {
            let c = cost(i, j);
            c.is_finite()
                && (i.saturating_sub(1)..=(i + 1).min(na - 1))
                    .all(|a| (j.saturating_sub(1)..=(j + 1).min(nb - 1)).all(|b| (a, b) == (i, j) || cost(a, b) >= c))
        })
        .map(|&(i, j)| (cost(i, j), at(i, j)))
        .collect();
    basins.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut starts = vec![[init.alpha.clamp(ALPHA_MIN, ALPHA_MAX).ln(), init.beta.clamp(1e-3, BETA_MAX)]];
    starts.extend(basins.iter().take(MAX_STARTS).map(|b| b.1));
    let step = [(la1 - la0) / (na - 1) as f64, BETA_MAX / nb as f64];
    let polished: Vec<([f64; 2], f64)> = starts
        .par_iter()
        .map(|&s| {
            let (p, _) = nelder_mead(|p| prob.cost(p), s, step, 400);
            nelder_mead(|p| prob.cost(p), p, [step[0] / 20.0, step[1] / 20.0], 400)
        })
        .collect();
    let mut best = polished[0];
    for cand in &polished[1..] {
        if cand.1 < best.1 {
            best = *cand;
        }
    }
    let (alpha, beta) = (best.0[0].exp(), best.0[1]);
    Ok(AnsatzFit { alpha, beta, r_mag: prob.r_mag(alpha, beta) })
}

/// Deterministic Nelder–Mead in two dimensions.
pub fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, start: [f64; 2], step: [f64; 2], max_iter: usize) -> ([f64; 2], f64) {
    let mut s = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut v = s.map(&f);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..max_iter {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        s = idx.map(|i| s[i]);
        v = idx.map(|i| v[i]);
        let spread = (v[2] - v[0]).abs();
        let size = (s[2][0] - s[0][0]).abs().max((s[2][1] - s[0][1]).abs()).max((s[1][0] - s[0][0]).abs());
        if (spread < 1e-12 && v[0].is_finite()) || size < 1e-12 {
            break;
        }
        let centroid = lerp(s[0], s[1], 0.5);
        let xr = lerp(centroid, s[2], -1.0);
        let fr = f(xr);
        if fr < v[0] {
            let xe = lerp(centroid, s[2], -2.0);
            let fe = f(xe);
            if fe < fr {
                (s[2], v[2]) = (xe, fe);
            } else {
                (s[2], v[2]) = (xr, fr);
            }
        } else if fr < v[1] {
            (s[2], v[2]) = (xr, fr);
        } else {
            let (xc, fc) = if fr < v[2] {
                let xc = lerp(centroid, xr, 0.5);
                (xc, f(xc))
            } else {
                let xc = lerp(centroid, s[2], 0.5);
                (xc, f(xc))
            };
            if fc < v[2].min(fr) {
                (s[2], v[2]) = (xc, fc);
            } else {
                for k in 1..3 {
                    s[k] = lerp(s[0], s[k], 0.5);
                    v[k] = f(s[k]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| v[a].total_cmp(&v[b])).expect("three vertices");
    (s[best], v[best])
}
