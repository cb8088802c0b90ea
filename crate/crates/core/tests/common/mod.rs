//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use taperline::gaussian::{env_in_covariance, ChannelParams};

type M6 = SMatrix<f64, 6, 6>;

/// Complex amplitude `c` as a real block on `(x, p)`.
pub fn phase_block(c: Complex64) -> [[f64; 2]; 2] {
    [[c.re, -c.im], [c.im, c.re]]
}

/// Beamsplitter `[[r_R, t_L], [t_R, r_L]]` on (environment, mode 1), then trace out
/// the second output.
pub fn six_by_six_oracle(params: &ChannelParams, b: [[Complex64; 2]; 2]) -> Matrix4<f64> {
    let env_in = env_in_covariance(params);
    let s = M6::from_fn(|i, j| env_in.0[i][j]);
    let mut t = M6::identity();
    for (bi, row) in b.iter().enumerate() {
        for (bj, c) in row.iter().enumerate() {
            let blk = phase_block(*c);
            for i in 0..2 {
                for j in 0..2 {
                    t[(2 * bi + i, 2 * bj + j)] = blk[i][j];
                }
            }
        }
    }
    let out = t * s * t.transpose();
    let keep = [0, 1, 4, 5];
    Matrix4::from_fn(|i, j| out[(keep[i], keep[j])])
}

/// General `U(2)` with `t_L = |t|` real.
pub fn beamsplitter(r_mag: f64, theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let t_mag = (1.0 - r_mag * r_mag).sqrt();
    let g = Complex64::from_polar(1.0, phi);
    let a = Complex64::from_polar(r_mag, theta);
    let bb = Complex64::from_polar(t_mag, -phi);
    [[g * a, g * bb], [-g * bb.conj(), g * a.conj()]]
}

pub fn random_params(rng: &mut ChaCha8Rng) -> (ChannelParams, f64) {
    let r = rng.random_range(0.0..2.5);
    let n = rng.random_range(0.0..2.0);
    let n_eff = n + rng.random_range(0.0..1500.0);
    let r_mag = rng.random_range(0.0..1.0f64);
    (ChannelParams::new(r, n, n_eff).unwrap(), r_mag)
}

/// Smallest `|λ|` of `iΩσ̃` with `σ̃` the partial transpose on mode 2.
///
/// `Ωσ̃` is similar to `K = σ̃^½·Ω·σ̃^½`, which is antisymmetric, so the
/// moduli are its singular values. (Unshifted Schur on `Ωσ̃` itself can
/// stall on these purely imaginary spectra.)
pub fn spectral_nu(sigma: &Matrix4<f64>) -> f64 {
    let flip = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    let pt = flip * sigma * flip;
    let mut omega = Matrix4::zeros();
    for m in 0..2 {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    let e = pt.symmetric_eigen();
    let root = e.eigenvectors * Matrix4::from_diagonal(&e.eigenvalues.map(f64::sqrt)) * e.eigenvectors.transpose();
    let k = root * omega * root;
    k.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn random_symplectic(rng: &mut ChaCha8Rng) -> Matrix4<f64> {
    let rot = |a: f64, b: f64| {
        let mut m = Matrix4::zeros();
        for (k, th) in [(0usize, a), (2, b)] {
            let (s, c) = f64::sin_cos(th);
            m[(k, k)] = c;
            m[(k, k + 1)] = s;
            m[(k + 1, k)] = -s;
            m[(k + 1, k + 1)] = c;
        }
        m
    };
    let squeeze = |a: f64, b: f64| Matrix4::from_diagonal(&nalgebra::Vector4::new(a.exp(), (-a).exp(), b.exp(), (-b).exp()));
    let splitter = |th: f64| {
        let (s, c) = th.sin_cos();
        let mut m = Matrix4::zeros();
        for k in 0..2 {
            m[(k, k)] = c;
            m[(k, k + 2)] = s;
            m[(k + 2, k)] = -s;
            m[(k + 2, k + 2)] = c;
        }
        m
    };
    let mut s = Matrix4::identity();
    for _ in 0..2 {
        s = rot(rng.random_range(0.0..6.3), rng.random_range(0.0..6.3)) * s;
        s = squeeze(rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2)) * s;
        s = splitter(rng.random_range(0.0..6.3)) * s;
    }
    s
}
