use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mat2::new(o, z, z, o)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Mat2::new(a, z, z, d)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        Some(Mat2::new(d / det, -b / det, -c / det, a / det))
    }

    pub fn adjoint(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a.conj(), c.conj(), b.conj(), d.conj())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut m = *self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        let (smax, _) = self.singular_values();
        smax
    }

    /// `(σ_max, σ_min)` from `σ_max·σ_min = |det|` and `σ_max² + σ_min² = ‖M‖_F²`.
    pub fn singular_values(&self) -> (f64, f64) {
        let f2 = self.frobenius().powi(2);
        let d = self.det().norm();
        let disc = (f2 * f2 - 4.0 * d * d).max(0.0).sqrt();
        let smax = ((f2 + disc) / 2.0).sqrt();
        let smin = if smax > 0.0 { d / smax } else { 0.0 };
        (smax, smin)
    }

    pub fn condition_number(&self) -> f64 {
        let (smax, smin) = self.singular_values();
        smax / smin
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_and_norms() {
        let m = Mat2::new(c(1.0, 2.0), c(-0.5, 0.1), c(3.0, 0.0), c(0.2, -1.0));
        let p = m * m.inverse().unwrap();
        assert!(p.sub(&Mat2::identity()).frobenius() < 1e-15);
        let u = Mat2::new(c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0));
        assert!((u.operator_norm() - 1.0).abs() < 1e-7);
        assert!((Mat2::diag(c(3.0, 0.0), c(0.5, 0.0)).condition_number() - 6.0).abs() < 1e-12);
    }
}
