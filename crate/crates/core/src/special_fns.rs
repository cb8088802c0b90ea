//! Cylindrical Bessel functions of orders 0 and 1.
//!
//! Point values come from `libm` (FreeBSD msun ports). For the slice
//! propagators we also need cross-products such as
//! `J1(a)·Y1(b) − Y1(a)·J1(b)` where `a` and `b` can be huge and nearly
//! equal; evaluated naively those cancel catastrophically. Above
//! [`ASYMPTOTIC_MIN`] the functions are written in modulus–phase form
//! `J = M cos θ`, `Y = M sin θ` from the Hankel expansion, so the cross
//! products become `M(a)·M(b)·sin(θ(b) − θ(a))` with the gap `b − a`
//! supplied exactly by the caller.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use thiserror::Error;

/// Smallest argument handled by the modulus–phase expansion.
pub const ASYMPTOTIC_MIN: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    /// First kind, `J`.
    J,
    /// Second kind, `Y`.
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    fn nu(self) -> f64 {
        match self {
            BesselOrder::Zero => 0.0,
            BesselOrder::One => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BesselDomainError {
    #[error("Bessel {kind:?} evaluated at x = {x}, outside its domain")]
    Argument { kind: BesselKind, x: f64 },
}

/// `C_order(x)` for `C ∈ {J, Y}`.
pub fn cyl_bessel(kind: BesselKind, order: BesselOrder, x: f64) -> Result<f64, BesselDomainError> {
    let bad = match kind {
        BesselKind::J => !(x >= 0.0),
        BesselKind::Y => !(x > 0.0),
    };
    if bad {
        return Err(BesselDomainError::Argument { kind, x });
    }
    Ok(match (kind, order) {
        (BesselKind::J, BesselOrder::Zero) => libm::j0(x),
        (BesselKind::J, BesselOrder::One) => libm::j1(x),
        (BesselKind::Y, BesselOrder::Zero) => libm::y0(x),
        (BesselKind::Y, BesselOrder::One) => libm::y1(x),
    })
}

/// Derivative of the order-one function, `C1'(x) = C0(x) − C1(x)/x`.
pub fn cyl_bessel_prime1(kind: BesselKind, x: f64) -> Result<f64, BesselDomainError> {
    if !(x > 0.0) {
        return Err(BesselDomainError::Argument { kind, x });
    }
    let c0 = cyl_bessel(kind, BesselOrder::Zero, x)?;
    let c1 = cyl_bessel(kind, BesselOrder::One, x)?;
    Ok(c0 - c1 / x)
}

/// All four functions at one positive argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub x: f64,
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl BesselEval {
    pub fn at(x: f64) -> Result<Self, BesselDomainError> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(BesselDomainError::Argument { kind: BesselKind::Y, x });
        }
        Ok(Self {
            x,
            j0: libm::j0(x),
            j1: libm::j1(x),
            y0: libm::y0(x),
            y1: libm::y1(x),
        })
    }

    /// `J1·Y0 − J0·Y1`, which equals `2/(πx)`.
    pub fn wronskian(&self) -> f64 {
        self.j1 * self.y0 - self.j0 * self.y1
    }

    pub fn j1_prime(&self) -> f64 {
        self.j0 - self.j1 / self.x
    }

    pub fn y1_prime(&self) -> f64 {
        self.y0 - self.y1 / self.x
    }
}

/// Modulus–phase representation `C_ν(x) = M(x)·{cos, sin}(x − (ν/2 + 1/4)π + ψ(x))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusPhase {
    pub modulus: f64,
    /// Phase correction `ψ(x)`, of order `1/x`.
    pub psi: f64,
}

/// Hankel asymptotic expansion; valid for `x >= ASYMPTOTIC_MIN`.
pub fn modulus_phase(order: BesselOrder, x: f64) -> ModulusPhase {
    debug_assert!(x >= ASYMPTOTIC_MIN);
    let mu = 4.0 * order.nu() * order.nu();
    let inv8x = 1.0 / (8.0 * x);
    // term_k = a_k(ν) / x^k; even k feed P, odd k feed Q, with alternating signs.
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..64 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) * inv8x / k as f64;
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // k = 1 → Q (+), k = 2 → P (−), k = 3 → Q (−), k = 4 → P (+), ...
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if mag < 1e-18 {
            break;
        }
    }
    ModulusPhase {
        modulus: (2.0 / (PI * x)).sqrt() * p.hypot(q),
        psi: q.atan2(p),
    }
}

fn chi_offset(order: BesselOrder) -> f64 {
    order.nu() * FRAC_PI_2 + FRAC_PI_4
}

fn pair(order: BesselOrder, x: f64) -> (f64, f64) {
    match order {
        BesselOrder::Zero => (libm::j0(x), libm::y0(x)),
        BesselOrder::One => (libm::j1(x), libm::y1(x)),
    }
}

/// Cross product `J_μ(a)·Y_ν(b) − Y_μ(a)·J_ν(b)` for `a, b > 0`.
///
/// `gap` must equal `b − a`; it is taken from the caller rather than
/// recomputed so that nearly equal large arguments keep full relative
/// precision in the phase difference.
pub fn cross_product(mu: BesselOrder, nu: BesselOrder, a: f64, b: f64, gap: f64) -> f64 {
    if a >= ASYMPTOTIC_MIN && b >= ASYMPTOTIC_MIN {
        let ma = modulus_phase(mu, a);
        let mb = modulus_phase(nu, b);
        // θ_ν(b) − θ_μ(a) = (b − a) + (χ_μ − χ_ν) + ψ_ν(b) − ψ_μ(a)
        let dphase = gap + (chi_offset(mu) - chi_offset(nu)) + (mb.psi - ma.psi);
        ma.modulus * mb.modulus * dphase.sin()
    } else {
        let (ja, ya) = pair(mu, a);
        let (jb, yb) = pair(nu, b);
        ja * yb - ya * jb
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert_eq!(cyl_bessel(BesselKind::J, BesselOrder::Zero, 0.0).unwrap(), 1.0);
        assert_eq!(cyl_bessel(BesselKind::J, BesselOrder::One, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn y_rejects_nonpositive() {
        assert!(cyl_bessel(BesselKind::Y, BesselOrder::Zero, 0.0).is_err());
        assert!(cyl_bessel(BesselKind::Y, BesselOrder::One, -1.0).is_err());
        assert!(cyl_bessel_prime1(BesselKind::J, 0.0).is_err());
        assert!(cyl_bessel_prime1(BesselKind::Y, -2.0).is_err());
        assert!(BesselEval::at(0.0).is_err());
    }

    #[test]
    fn wronskian_at_two_and_a_half() {
        let e = BesselEval::at(2.5).unwrap();
        let expected = 2.0 / (PI * 2.5);
        assert!((e.wronskian() - expected).abs() < 1e-15);
        assert!((expected - 0.254648).abs() < 1e-6);
    }

    #[test]
    fn prime_near_origin_is_half() {
        let v = cyl_bessel_prime1(BesselKind::J, 1e-9).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn prime_at_first_zero_of_j1() {
        // first positive zero of J1
        let z = 3.831_705_970_207_512_3;
        let v = cyl_bessel_prime1(BesselKind::J, z).unwrap();
        assert!((v - libm::j0(z)).abs() < 1e-14);
        assert!((v + 0.402_759_395_702_553).abs() < 1e-10);
    }

    #[test]
    fn prime_matches_central_difference_at_one() {
        let h = 1e-5;
        let fd = (libm::j1(1.0 + h) - libm::j1(1.0 - h)) / (2.0 * h);
        assert!((cyl_bessel_prime1(BesselKind::J, 1.0).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn modulus_phase_reproduces_point_values() {
        for &x in &[30.0, 31.7, 55.5, 200.0, 1234.5, 9.9e4] {
            for order in [BesselOrder::Zero, BesselOrder::One] {
                let mp = modulus_phase(order, x);
                let theta = x - chi_offset(order) + mp.psi;
                let (j, y) = pair(order, x);
                let scale = (2.0 / (PI * x)).sqrt();
                assert!((mp.modulus * theta.cos() - j).abs() < 1e-14 * scale * x.max(1.0), "J x={x}");
                assert!((mp.modulus * theta.sin() - y).abs() < 1e-14 * scale * x.max(1.0), "Y x={x}");
            }
        }
    }

    #[test]
    fn cross_product_agrees_with_direct_when_well_separated() {
        let (a, b) = (40.0, 47.5);
        for mu in [BesselOrder::Zero, BesselOrder::One] {
            for nu in [BesselOrder::Zero, BesselOrder::One] {
                let (ja, ya) = pair(mu, a);
                let (jb, yb) = pair(nu, b);
                let direct = ja * yb - ya * jb;
                let asym = cross_product(mu, nu, a, b, b - a);
                assert!((direct - asym).abs() < 1e-14, "{mu:?}{nu:?}");
            }
        }
    }

    #[test]
    fn cross_product_keeps_precision_for_close_huge_arguments() {
        // J1(a)Y1(b) − Y1(a)J1(b) ≈ (2/π)/√(ab) · sin(b − a) for huge a.
        let a = 1.0e9;
        let gap = 1.0e-3;
        let b = a + gap;
        let v = cross_product(BesselOrder::One, BesselOrder::One, a, b, gap);
        let approx = 2.0 / (PI * (a * b).sqrt()) * gap.sin();
        assert!(((v - approx) / approx).abs() < 1e-8);
    }
}
