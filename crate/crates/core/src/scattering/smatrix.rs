use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::matrix::Mat2;
use crate::error::{Error, Result};

/// Tolerance on `|det S| = 1` before unitarization.
pub const DET_MODULUS_TOL: f64 = 1e-6;
/// Tolerance on `‖S̄S̄† − 1‖` after unitarization.
pub const UNITARITY_TOL: f64 = 1e-8;

/// Raw scattering matrix from a transfer matrix; maps `(A, G) → (F, B)`.
pub fn scattering_from_transfer(t: &Mat2) -> Result<Mat2> {
    let [[t11, t12], [t21, t22]] = t.0;
    if t22.norm() == 0.0 || !t22.is_finite() {
        return Err(Error::PivotSingular);
    }
    let s = Mat2::new(t11 - t12 * t21 / t22, t12 / t22, -t21 / t22, t22.inv());
    if !s.is_finite() {
        return Err(Error::PivotSingular);
    }
    Ok(s)
}

/// Inverse of [`scattering_from_transfer`].
pub fn transfer_from_scattering(s: &Mat2) -> Result<Mat2> {
    let [[s11, s12], [s21, s22]] = s.0;
    if s22.norm() == 0.0 {
        return Err(Error::PivotSingular);
    }
    Ok(Mat2::new(s11 - s12 * s21 / s22, s12 / s22, -s21 / s22, s22.inv()))
}

/// Unitarized scattering matrix `S̄ = [[t_L, r_R], [r_L, t_R]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub raw: Mat2,
    pub s_bar: Mat2,
    pub unitarity_residual: f64,
}

impl ScatteringResult {
    pub fn t_l(&self) -> Complex64 {
        self.s_bar.get(0, 0)
    }

    pub fn r_r(&self) -> Complex64 {
        self.s_bar.get(0, 1)
    }

    pub fn r_l(&self) -> Complex64 {
        self.s_bar.get(1, 0)
    }

    pub fn t_r(&self) -> Complex64 {
        self.s_bar.get(1, 1)
    }

    /// Power reflection seen from the free-space side, `|r_R|²`.
    pub fn reflectance(&self) -> f64 {
        self.r_r().norm_sqr()
    }
}

struct C(Complex64);

impl Serialize for C {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Complex", 2)?;
        st.serialize_field("re", &self.0.re)?;
        st.serialize_field("im", &self.0.im)?;
        st.end()
    }
}

impl Serialize for ScatteringResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ScatteringResult", 7)?;
        st.serialize_field("t_l", &C(self.t_l()))?;
        st.serialize_field("r_l", &C(self.r_l()))?;
        st.serialize_field("t_r", &C(self.t_r()))?;
        st.serialize_field("r_r", &C(self.r_r()))?;
        st.serialize_field("abs_r_r", &self.r_r().norm())?;
        st.serialize_field("abs_t_l", &self.t_l().norm())?;
        st.serialize_field("unitarity_residual", &self.unitarity_residual)?;
        st.end()
    }
}

/// `‖M·M† − 1‖₂`.
pub fn unitarity_residual(m: &Mat2) -> f64 {
    (*m * m.adjoint()).sub(&Mat2::identity()).operator_norm()
}

/// Maps the raw `S` to a unitary, unit-determinant `S̄`.
///
/// Diagonal entries are rescaled by the impedance ratio so that all four
/// amplitudes are power normalised, the diagonal signs are flipped and the
/// whole matrix is divided by `√det S` (times an optional phase `e^{iγ/2}`).
pub fn unitarize(s: &Mat2, z_in: f64, z_out: f64, gamma: f64) -> Result<ScatteringResult> {
    let det = s.det();
    let modulus = det.norm();
    if !((modulus - 1.0).abs() <= DET_MODULUS_TOL) {
        return Err(Error::DeterminantModulus { modulus });
    }
    let scale = Complex64::from_polar(1.0, gamma / 2.0) / det.sqrt();
    let ratio = (z_in / z_out).sqrt();
    let [[s11, s12], [s21, s22]] = s.0;
    let s_bar = Mat2::new(-ratio * s11 * scale, s12 * scale, s21 * scale, -s22 / ratio * scale);
    let residual = unitarity_residual(&s_bar);
    if !(residual <= UNITARITY_TOL) {
        return Err(Error::Unitarity { residual });
    }
    Ok(ScatteringResult { raw: *s, s_bar, unitarity_residual: residual })
}

/// `α⁴ = (Z_in/Z_out)·e^{iγ}/det S`.
pub fn alpha4(s: &Mat2, z_in: f64, z_out: f64, gamma: f64) -> Complex64 {
    z_in / z_out * Complex64::from_polar(1.0, gamma) / s.det()
}

/// `β⁴ = (Z_out/Z_in)·e^{iγ}/det S`.
pub fn beta4(s: &Mat2, z_in: f64, z_out: f64, gamma: f64) -> Complex64 {
    z_out / z_in * Complex64::from_polar(1.0, gamma) / s.det()
}
