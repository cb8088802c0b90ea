//! Assembly of the global transfer matrix `(A, B) → (F, G)`.

use num_complex::Complex64;

use super::matrix::Mat2;
use super::slice::{MatchingRule, SliceBasis};
use super::WaveContext;
use crate::error::{Error, Result};
use crate::profiles::ImpedanceProfile;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(A, B) → (V, I)` just left of `x = 0`.
pub fn left_line_fields(z_in: f64) -> Mat2 {
    Mat2::new(re(1.0), re(1.0), re(1.0 / z_in), re(-1.0 / z_in))
}

/// `(F, G) → (V, I)` just right of `x = d`.
pub fn right_line_fields(z_out: f64, q: f64, d: f64) -> Mat2 {
    let e = Complex64::from_polar(1.0, q * d);
    let ei = e.conj();
    Mat2::new(e, ei, e / z_out, -ei / z_out)
}

/// Inverse of [`right_line_fields`], written out.
pub fn right_line_coefficients(z_out: f64, q: f64, d: f64) -> Mat2 {
    let e = Complex64::from_polar(0.5, q * d);
    let ei = e.conj();
    Mat2::new(ei, ei * z_out, e, -e * z_out)
}

/// One junction of the antenna in coefficient space.
#[derive(Debug, Clone, Copy)]
pub enum Interface<'a> {
    /// `(A, B) → (α_0, β_0)`.
    LeftLine { z_in: f64, first: &'a SliceBasis },
    /// `(α_{n−1}, β_{n−1}) → (α_n, β_n)`.
    SliceBoundary { prev: &'a SliceBasis, next: &'a SliceBasis },
    /// `(α_{N−1}, β_{N−1}) → (F, G)`.
    RightLine { last: &'a SliceBasis, z_out: f64, q: f64, d: f64 },
}

fn basis_inverse(b: &SliceBasis, y: f64) -> Result<Mat2> {
    b.basis(y)?.inverse().ok_or(Error::PivotSingular)
}

/// Matching matrix for one interface: continuity of `(V, I)`.
pub fn interface_matrix(iface: Interface<'_>) -> Result<Mat2> {
    match iface {
        Interface::LeftLine { z_in, first } => Ok(basis_inverse(first, 0.0)? * left_line_fields(z_in)),
        Interface::SliceBoundary { prev, next } => Ok(basis_inverse(next, 0.0)? * prev.basis(prev.length())?),
        Interface::RightLine { last, z_out, q, d } => {
            Ok(right_line_coefficients(z_out, q, d) * last.basis(last.length())?)
        }
    }
}

/// Slice bases for a discretized profile.
pub fn slice_bases(profile: &ImpedanceProfile, ctx: &WaveContext) -> Result<Vec<SliceBasis>> {
    let pts = profile.breakpoints().ok_or(Error::NotDiscretized)?;
    let k = ctx.k();
    pts.windows(2)
        .map(|w| SliceBasis::for_slice(w[0].z, w[1].z, w[1].x - w[0].x, k, ctx.rule))
        .collect()
}

/// Global transfer matrix `T` with `(F, G)ᵀ = T·(A, B)ᵀ`.
///
/// With the exact matching rule the slices are chained as `(V, I)`
/// propagators, which stay well conditioned for any slice count. The
/// paper-derivative rule has no such closed form and goes through
/// [`global_transfer_via_interfaces`].
pub fn global_transfer(profile: &ImpedanceProfile, ctx: &WaveContext) -> Result<Mat2> {
    if ctx.rule == MatchingRule::PaperDerivative {
        return global_transfer_via_interfaces(profile, ctx);
    }
    let slices = slice_bases(profile, ctx)?;
    let mut acc = left_line_fields(profile.z_in());
    for s in &slices {
        acc = s.propagator()? * acc;
    }
    let t = right_line_coefficients(profile.z_out(), ctx.q(), profile.length()) * acc;
    if !t.is_finite() {
        return Err(Error::PivotSingular);
    }
    debug_assert!(
        slices.len() > 1000 || impedance_contrast(profile) > MODERATE_CONTRAST || t.condition_number() < 1e6,
        "transfer matrix condition number {}",
        t.condition_number()
    );
    Ok(t)
}

/// Above this `max Z / min Z` the conditioning check is skipped; the
/// unitarity test on `S̄` still guards the result.
const MODERATE_CONTRAST: f64 = 100.0;

fn impedance_contrast(profile: &ImpedanceProfile) -> f64 {
    let zs = profile.breakpoints().unwrap_or_default().iter().map(|b| b.z);
    let (lo, hi) = zs.fold((f64::INFINITY, 0.0f64), |(lo, hi), z| (lo.min(z), hi.max(z)));
    hi / lo
}

/// `T = T_N·…·T_1·T_0` from per-interface matching in the Bessel
/// coefficient basis.
pub fn global_transfer_via_interfaces(profile: &ImpedanceProfile, ctx: &WaveContext) -> Result<Mat2> {
    let slices = slice_bases(profile, ctx)?;
    let first = slices.first().ok_or(Error::NotDiscretized)?;
    let last = slices.last().ok_or(Error::NotDiscretized)?;
    let mut t = interface_matrix(Interface::LeftLine { z_in: profile.z_in(), first })?;
    for w in slices.windows(2) {
        t = interface_matrix(Interface::SliceBoundary { prev: &w[0], next: &w[1] })? * t;
    }
    t = interface_matrix(Interface::RightLine { last, z_out: profile.z_out(), q: ctx.q(), d: profile.length() })? * t;
    if !t.is_finite() {
        return Err(Error::PivotSingular);
    }
    Ok(t)
}

/// Transfer matrix of an abrupt step from `z_in` to `z_out` at `x = 0`.
pub fn junction_transfer(z_in: f64, z_out: f64) -> Mat2 {
    right_line_coefficients(z_out, 0.0, 0.0) * left_line_fields(z_in)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_line_inverse_is_exact() {
        let m = right_line_fields(377.0, 104.7, 0.3) * right_line_coefficients(377.0, 104.7, 0.3);
        assert!(m.sub(&Mat2::identity()).frobenius() < 1e-14);
    }

    #[test]
    fn junction_matches_step_formula() {
        // F = A·(1 + Zo/Zi)/2 + B·(1 − Zo/Zi)/2 at a bare step
        let t = junction_transfer(50.0, 377.0);
        assert!((t.get(0, 0).re - 0.5 * (1.0 + 377.0 / 50.0)).abs() < 1e-14);
        assert!((t.get(0, 1).re - 0.5 * (1.0 - 377.0 / 50.0)).abs() < 1e-14);
    }

    #[test]
    fn undiscretized_profile_is_rejected() {
        let p = ImpedanceProfile::linear(0.1, 50.0, 377.0).unwrap();
        let ctx = WaveContext::new(5e9);
        assert!(matches!(global_transfer(&p, &ctx), Err(Error::NotDiscretized)));
    }
}
