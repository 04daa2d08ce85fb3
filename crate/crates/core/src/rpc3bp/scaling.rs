//! Singular scaling `L = 1 + delta^2 Lambda`, `eta = delta x`,
//! `xi = delta y` with `delta = mu^(1/4)`.
//!
//! Additive constants are dropped: `h_scaled` equals
//! `delta^-4 (H0 + 3/2) + H1` in the scaled variables.

use super::delaunay::{h1_poincare_complex, polar_from_poincare, poincare_from_polar};
use super::equilibrium::locate_l3;
use super::{h1_from_rc, MassRatio, PoincareState};
use crate::{Complex64, Error, Result};

/// `-1/(2(1+z)^2) - (1+z) + 3/2 + (3/2) z^2`, written as
/// `z^3 (4 + 3z) / (2 (1+z)^2)` to avoid cancellation.
pub fn f_pend(z: f64) -> f64 {
    z * z * z * (4.0 + 3.0 * z) / (2.0 * (1.0 + z) * (1.0 + z))
}

fn f_pend_c(z: Complex64) -> Complex64 {
    z * z * z * (4.0 + 3.0 * z) / (2.0 * (1.0 + z) * (1.0 + z))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 0.35) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside (0, 0.35]")));
    }
    Ok(())
}

/// Scaled Hamiltonian on the real slice (`y = conj(x)`).
pub fn h_scaled(lambda: f64, big_lambda: f64, x: Complex64, y: Complex64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let d2 = delta * delta;
    let mu = d2 * d2;
    let s = PoincareState::new(lambda, 1.0 + d2 * big_lambda, delta * x, delta * y);
    let p = polar_from_poincare(&s)?;
    let h1 = h1_from_rc(p.r * p.r, p.r * p.theta.cos(), mu)?;
    Ok(-1.5 * big_lambda * big_lambda + f_pend(d2 * big_lambda) / mu + (x * y).re / d2 + h1)
}

/// Analytic continuation of [`h_scaled`] to complex arguments. See
/// [`h1_poincare_complex`] for the meaning of `p_branch`.
pub fn h_scaled_complex(
    lambda: Complex64,
    big_lambda: Complex64,
    x: Complex64,
    y: Complex64,
    delta: f64,
    p_branch: Complex64,
) -> Result<Complex64> {
    check_delta(delta)?;
    let d2 = delta * delta;
    let mu = d2 * d2;
    let l = 1.0 + d2 * big_lambda;
    let h1 = h1_poincare_complex(lambda, l, delta * x, delta * y, mu, p_branch)?;
    Ok(-1.5 * big_lambda * big_lambda + f_pend_c(d2 * big_lambda) / mu + x * y / d2 + h1)
}

/// L3 in scaled variables, written as `(0, delta^2 Lambda_hat,
/// delta^3 x_hat, delta^3 y_hat)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledL3 {
    pub lambda: f64,
    pub big_lambda_hat: f64,
    pub x_hat: Complex64,
    pub y_hat: Complex64,
}

pub fn l3_scaled(delta: f64) -> Result<ScaledL3> {
    check_delta(delta)?;
    let m = MassRatio::from_delta(delta)?;
    let eq = locate_l3(m.mu)?;
    let s = poincare_from_polar(&eq.polar)?;
    let d4 = m.mu;
    Ok(ScaledL3 {
        lambda: s.lambda,
        big_lambda_hat: (s.l - 1.0) / d4,
        x_hat: s.eta / d4,
        y_hat: s.xi / d4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn v(l: f64) -> f64 {
        1.0 - l.cos() - 1.0 / (2.0 + 2.0 * l.cos()).sqrt()
    }

    #[test]
    fn pendulum_remainder_is_cubic() {
        let direct = |z: f64| -0.5 / (1.0 + z).powi(2) - (1.0 + z) + 1.5 + 1.5 * z * z;
        assert_eq!(f_pend(0.0), 0.0);
        for z in [1e-1, 1e-2, 1e-3] {
            assert!((f_pend(z) - direct(z)).abs() < 1e-13);
        }
        // The cubic coefficient is +2.
        assert!((f_pend(1e-6) / 1e-18 - 2.0).abs() < 1e-5);
    }

    #[test]
    fn pendulum_part_on_the_circle() {
        let delta = 0.1;
        let zero = Complex64::new(0.0, 0.0);
        let h_a = h_scaled(1.0, 0.0, zero, zero, delta).unwrap();
        let h_b = h_scaled(2.0, 0.0, zero, zero, delta).unwrap();
        // Only differences are meaningful; mu corrections are O(delta^4).
        assert!(((h_a - h_b) - (v(1.0) - v(2.0))).abs() < 1e-3);
    }

    #[test]
    fn reversibility() {
        let delta = 0.2;
        for (l, bl, x) in [(0.7, 0.3, Complex64::new(0.2, 0.1)), (-2.0, -0.4, Complex64::new(-0.3, 0.5))] {
            let a = h_scaled(l, bl, x, x.conj(), delta).unwrap();
            let b = h_scaled(-l, bl, x.conj(), x, delta).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn complex_version_agrees_on_real_slice() {
        let delta = 0.15;
        let (l, bl, x) = (2.5, 0.2, Complex64::new(0.1, -0.3));
        let a = h_scaled(l, bl, x, x.conj(), delta).unwrap();
        let b = h_scaled_complex(
            Complex64::new(l, 0.0),
            Complex64::new(bl, 0.0),
            x,
            x.conj(),
            delta,
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        assert!((b.re - a).abs() < 1e-9 && b.im.abs() < 1e-9, "{a} {b}");
        let _ = PI;
    }

    #[test]
    fn scaled_l3_is_bounded() {
        for delta in [0.1, 0.2, 0.3] {
            let s = l3_scaled(delta).unwrap();
            assert!(s.lambda.abs() < 1e-12);
            assert!(s.big_lambda_hat.abs() <= 5.0);
            assert!(s.x_hat.norm() <= 5.0 && s.y_hat.norm() <= 5.0);
        }
    }
}
