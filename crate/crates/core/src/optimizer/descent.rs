use rayon::prelude::*;

use super::{objective, Direction, LineSearch, OptimizationConfig, OptimizationReport};
use crate::error::Result;
use crate::profiles::ImpedanceProfile;
use crate::scattering::WaveContext;

/// Minimises `f` on `[lo, hi]`, never returning worse than `current`.
///
/// Grid values are gathered by index, so the result does not depend on
/// evaluation order.
pub fn line_search<F>(f: F, lo: f64, hi: f64, current: f64, ls: &LineSearch) -> (f64, f64)
where
    F: Fn(f64) -> f64 + Sync,
{
    let mut best = (current, f(current));
    let (mut a, mut b) = (lo, hi);
    let m = ls.grid_points.max(2);
    for _ in 0..=ls.refinement_levels {
        let h = (b - a) / (m - 1) as f64;
        if !(h > 0.0) {
            break;
        }
        let pts: Vec<f64> = (0..m).map(|i| if i + 1 == m { b } else { a + i as f64 * h }).collect();
        let vals: Vec<f64> = pts.par_iter().map(|&z| f(z)).collect();
        for (&z, &v) in pts.iter().zip(&vals) {
            if v < best.1 {
                best = (z, v);
            }
        }
        a = (best.0 - 4.0 * h).max(lo);
        b = (best.0 + 4.0 * h).min(hi);
    }
    best
}

/// Per-breakpoint descent from the straight taper.
pub fn coordinate_descent(cfg: &OptimizationConfig, ctx: &WaveContext) -> Result<OptimizationReport> {
    cfg.validate()?;
    let start = ImpedanceProfile::linear(cfg.d, cfg.z_in, cfg.z_out)?.discretize(cfg.slices)?;
    let mut z: Vec<f64> = start.breakpoints().expect("discretized").iter().map(|b| b.z).collect();
    let eval = |z: &[f64]| match ImpedanceProfile::from_node_impedances(cfg.d, z) {
        Ok(p) => objective(&p, ctx),
        Err(_) => f64::INFINITY,
    };
    let (lo, hi) = cfg.bounds.interval(cfg.z_in, cfg.z_out);
    let mut order: Vec<usize> = (1..cfg.slices).collect();
    if cfg.direction == Direction::RightToLeft {
        order.reverse();
    }

    let mut trace = vec![eval(&z)];
    let mut converged = order.is_empty();
    for _ in 0..cfg.sweeps {
        if order.is_empty() {
            break;
        }
        for &i in &order {
            let base = z.clone();
            let (zi, _) = line_search(
                |v| {
                    let mut trial = base.clone();
                    trial[i] = v;
                    eval(&trial)
                },
                lo,
                hi,
                z[i],
                &cfg.line_search,
            );
            z[i] = zi;
        }
        let value = eval(&z);
        let prev = *trace.last().expect("nonempty");
        trace.push(value);
        if prev - value < cfg.tol {
            converged = true;
            break;
        }
    }
    let best_profile = ImpedanceProfile::from_node_impedances(cfg.d, &z)?;
    let best_r_mag = objective(&best_profile, ctx);
    Ok(OptimizationReport { best_profile, best_r_mag, trace, d_opt: None, converged, curve: Vec::new() })
}
