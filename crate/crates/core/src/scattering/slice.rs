//! Field solutions inside one linearly graded slice.
//!
//! On a slice where `Z` runs linearly from `Z_a` to `Z_b` over length `ε`,
//! the line equation `u'' − (Z'/Z)u' + k²u = 0` is solved by
//! `u = εZ(y)·C1(s(y))` with `s(y) = kεZ(y)/|Z_b − Z_a|` and `C ∈ {J, Y}`.
//! Fields are carried as the pair `(V, I) = (u, u'/(ikZ))`, which is
//! continuous across every junction.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::Mat2;
use crate::error::{Error, Result};
use crate::special_fns::{cross_product, BesselEval, BesselOrder};

/// Relative impedance step below which a slice is treated as uniform.
pub const UNIFORM_SLICE_THRESHOLD: f64 = 1e-8;

/// Which derivative enters the current-continuity condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingRule {
    /// `u'/(ikZ)` of the exact solution, i.e. `−iσε·C0(s)`.
    #[default]
    Exact,
    /// `C1'(s)` in place of `C0(s)`, dropping the `Z'`·C1 term of `u'`.
    PaperDerivative,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A graded slice with a non-negligible impedance step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselSlice {
    pub z_a: f64,
    pub z_b: f64,
    pub eps: f64,
    pub k: f64,
    /// Sign of `Z_b − Z_a`; `s` decreases along the slice when negative.
    sigma: f64,
    /// `s` at the slice start.
    s_a: f64,
    /// `s` at the slice end.
    s_b: f64,
    rule: MatchingRule,
}

impl BesselSlice {
    pub fn new(z_a: f64, z_b: f64, eps: f64, k: f64, rule: MatchingRule) -> Result<Self> {
        let dz = z_b - z_a;
        let rel = dz.abs() / z_a;
        if !(rel >= UNIFORM_SLICE_THRESHOLD) {
            return Err(Error::DegenerateSlice { slice: 0, relative_step: rel });
        }
        let scale = k * eps / dz.abs();
        Ok(Self { z_a, z_b, eps, k, sigma: dz.signum(), s_a: scale * z_a, s_b: scale * z_b, rule })
    }

    pub fn z(&self, y: f64) -> f64 {
        self.z_a + y / self.eps * (self.z_b - self.z_a)
    }

    /// Bessel argument at local position `y ∈ [0, ε]`.
    pub fn argument(&self, y: f64) -> f64 {
        self.s_a + self.sigma * self.k * y
    }

    /// Columns are the `J` and `Y` basis solutions; rows are `V` and `I`.
    pub fn basis(&self, y: f64) -> Result<Mat2> {
        let s = self.argument(y);
        let b = BesselEval::at(s)?;
        let ez = self.eps * self.z(y);
        let (dj, dy) = match self.rule {
            MatchingRule::Exact => (b.j0, b.y0),
            MatchingRule::PaperDerivative => (b.j1_prime(), b.y1_prime()),
        };
        let cur = -I * self.sigma * self.eps;
        Ok(Mat2::new(re(ez * b.j1), re(ez * b.y1), cur * dj, cur * dy))
    }

    /// Propagator `(V, I)(0) → (V, I)(ε)` written with Bessel cross
    /// products, so near-uniform slices (huge, nearly equal arguments)
    /// keep full precision. Exact rule only.
    pub fn propagator(&self) -> Mat2 {
        debug_assert_eq!(self.rule, MatchingRule::Exact);
        use BesselOrder::{One, Zero};
        let (a, b) = (self.s_a, self.s_b);
        let gap = self.sigma * self.k * self.eps;
        let p11 = FRAC_PI_2 * b * cross_product(One, Zero, b, a, -gap);
        let p22 = FRAC_PI_2 * a * cross_product(One, Zero, a, b, gap);
        let p12 = I * self.sigma * self.z_a * FRAC_PI_2 * b * cross_product(One, One, a, b, gap);
        let p21 = I * self.sigma * FRAC_PI_2 * (a / self.z_a) * cross_product(Zero, Zero, a, b, gap);
        Mat2::new(re(p11), p12, p21, re(p22))
    }
}

/// A slice whose impedance is constant to within [`UNIFORM_SLICE_THRESHOLD`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformSlice {
    pub z: f64,
    pub eps: f64,
    pub k: f64,
}

impl UniformSlice {
    /// Columns are `e^{+iky}` and `e^{−iky}`.
    pub fn basis(&self, y: f64) -> Mat2 {
        let e = Complex64::from_polar(1.0, self.k * y);
        let ei = e.conj();
        Mat2::new(e, ei, e / self.z, -ei / self.z)
    }

    pub fn propagator(&self) -> Mat2 {
        let (s, c) = (self.k * self.eps).sin_cos();
        Mat2::new(re(c), I * self.z * s, I * s / self.z, re(c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SliceBasis {
    Bessel(BesselSlice),
    Uniform(UniformSlice),
}

impl SliceBasis {
    /// Picks the plane-wave branch for near-uniform slices.
    pub fn for_slice(z_a: f64, z_b: f64, eps: f64, k: f64, rule: MatchingRule) -> Result<Self> {
        match BesselSlice::new(z_a, z_b, eps, k, rule) {
            Ok(b) => Ok(SliceBasis::Bessel(b)),
            Err(Error::DegenerateSlice { .. }) => Ok(SliceBasis::Uniform(UniformSlice { z: 0.5 * (z_a + z_b), eps, k })),
            Err(e) => Err(e),
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            SliceBasis::Bessel(b) => b.eps,
            SliceBasis::Uniform(u) => u.eps,
        }
    }

    pub fn basis(&self, y: f64) -> Result<Mat2> {
        match self {
            SliceBasis::Bessel(b) => b.basis(y),
            SliceBasis::Uniform(u) => Ok(u.basis(y)),
        }
    }

    pub fn propagator(&self) -> Result<Mat2> {
        match self {
            SliceBasis::Bessel(b) if b.rule == MatchingRule::Exact => Ok(b.propagator()),
            SliceBasis::Bessel(b) => {
                let start = b.basis(0.0)?;
                let end = b.basis(b.eps)?;
                Ok(end * start.inverse().expect("Bessel basis Wronskian is nonzero"))
            }
            SliceBasis::Uniform(u) => Ok(u.propagator()),
        }
    }
}

/// Field of one slice for basis coefficients `(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSolution {
    /// `u(x)`, the voltage amplitude.
    pub u: Complex64,
    /// `u'(x)/(ikZ(x))`, the matched current amplitude.
    pub current: Complex64,
}

/// Evaluates the slice-`n` field at absolute position `x ∈ [nε, (n+1)ε]`.
///
/// Returns a degenerate-slice error when the impedance step is too small
/// for the Bessel form; callers switch to [`UniformSlice`] there.
#[allow(clippy::too_many_arguments)]
pub fn slice_solution(
    z_n: f64,
    z_n1: f64,
    eps: f64,
    n: usize,
    k: f64,
    x: f64,
    coeffs: (Complex64, Complex64),
    rule: MatchingRule,
) -> Result<SliceSolution> {
    let slice = BesselSlice::new(z_n, z_n1, eps, k, rule).map_err(|e| match e {
        Error::DegenerateSlice { relative_step, .. } => Error::DegenerateSlice { slice: n, relative_step },
        e => e,
    })?;
    let y = x - n as f64 * eps;
    if !(-1e-12 * eps..=eps * (1.0 + 1e-12)).contains(&y) {
        return Err(Error::OutOfDomain { x, d: (n + 1) as f64 * eps });
    }
    let phi = slice.basis(y.clamp(0.0, eps))?;
    let (alpha, beta) = coeffs;
    Ok(SliceSolution {
        u: phi.get(0, 0) * alpha + phi.get(0, 1) * beta,
        current: phi.get(1, 0) * alpha + phi.get(1, 1) * beta,
    })
}
