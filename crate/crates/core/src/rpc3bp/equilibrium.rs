//! The collinear equilibrium L3 and its linearisation.

use super::{CartesianState, PolarState};
use crate::numerics::find_root_newton;
use crate::{Complex64, Error, Result};
use nalgebra::Matrix4;

/// L3 with its spectrum. Eigenvalues are ordered `[a, -a, ib, -ib]` with
/// `a, b > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub mu: f64,
    pub d_mu: f64,
    pub polar: PolarState,
    pub eigenvalues: [Complex64; 4],
    /// Unit eigenvectors of `a` and `-a` in Cartesian coordinates.
    pub unstable_vector: [f64; 4],
    pub stable_vector: [f64; 4],
}

impl Equilibrium {
    pub fn hyperbolic_rate(&self) -> f64 {
        self.eigenvalues[0].re
    }

    pub fn elliptic_frequency(&self) -> f64 {
        self.eigenvalues[2].im
    }

    pub fn cartesian(&self) -> CartesianState {
        CartesianState::new(self.d_mu, 0.0, 0.0, self.d_mu)
    }
}

/// Radial balance on the ray `theta = 0` beyond the large primary.
pub fn l3_balance(d: f64, mu: f64) -> f64 {
    d - (1.0 - mu) / (d - mu).powi(2) - mu / (d + 1.0 - mu).powi(2)
}

fn l3_balance_derivative(d: f64, mu: f64) -> f64 {
    1.0 + 2.0 * (1.0 - mu) / (d - mu).powi(3) + 2.0 * mu / (d + 1.0 - mu).powi(3)
}

/// Hamiltonian vector field in Cartesian coordinates.
pub fn cart_vector_field(s: &CartesianState, mu: f64) -> [f64; 4] {
    let (ux, uy) = potential_gradient(s.q1, s.q2, mu);
    [s.p1 + s.q2, s.p2 - s.q1, s.p2 + ux, -s.p1 + uy]
}

// Gradient of (1-mu)/r1 + mu/r2.
fn potential_gradient(q1: f64, q2: f64, mu: f64) -> (f64, f64) {
    let (x1, x2) = (q1 - mu, q1 - mu + 1.0);
    let r1 = x1.hypot(q2);
    let r2 = x2.hypot(q2);
    let a = (1.0 - mu) / (r1 * r1 * r1);
    let b = mu / (r2 * r2 * r2);
    (-a * x1 - b * x2, -(a + b) * q2)
}

/// Analytic Jacobian of [`cart_vector_field`].
pub fn cart_jacobian(s: &CartesianState, mu: f64) -> Matrix4<f64> {
    let mut uxx = 0.0;
    let mut uxy = 0.0;
    let mut uyy = 0.0;
    for (m, c) in [(1.0 - mu, mu), (mu, mu - 1.0)] {
        let dx = s.q1 - c;
        let dy = s.q2;
        let r2 = dx * dx + dy * dy;
        let r5 = r2 * r2 * r2.sqrt();
        uxx += m * (3.0 * dx * dx - r2) / r5;
        uxy += m * 3.0 * dx * dy / r5;
        uyy += m * (3.0 * dy * dy - r2) / r5;
    }
    Matrix4::new(
        0.0, 1.0, 1.0, 0.0, //
        -1.0, 0.0, 0.0, 1.0, //
        uxx, uxy, 0.0, 1.0, //
        uxy, uyy, -1.0, 0.0,
    )
}

/// Locates L3 for `mu` in `(0, 0.05]`.
pub fn locate_l3(mu: f64) -> Result<Equilibrium> {
    if !(mu > 0.0 && mu <= 0.05) {
        return Err(Error::InvalidArgument(format!("mu = {mu} outside (0, 0.05]")));
    }
    let d = find_root_newton(
        |d| (l3_balance(d, mu), l3_balance_derivative(d, mu)),
        1.0,
        1.0 + mu,
        1e-15,
    )
    .map_err(|_| Error::NoConvergence { err: f64::NAN, tol: 1e-15 })?;
    let state = CartesianState::new(d, 0.0, 0.0, d);
    let jac = cart_jacobian(&state, mu);
    let mut ev: Vec<Complex64> = jac.complex_eigenvalues().iter().copied().collect();
    // Real pair first (largest real part first), then the imaginary pair.
    ev.sort_by(|a, b| {
        let ka = (a.re.abs() < a.im.abs(), -a.re, -a.im);
        let kb = (b.re.abs() < b.im.abs(), -b.re, -b.im);
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = [ev[0], ev[1], ev[2], ev[3]];
    let unstable_vector = null_vector(&jac, eigenvalues[0].re);
    let stable_vector = null_vector(&jac, eigenvalues[1].re);
    Ok(Equilibrium {
        mu,
        d_mu: d,
        polar: PolarState::new(d, 0.0, 0.0, d * d),
        eigenvalues,
        unstable_vector,
        stable_vector,
    })
}

fn null_vector(jac: &Matrix4<f64>, lambda: f64) -> [f64; 4] {
    let m = jac - Matrix4::identity() * lambda;
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(3);
    let row = v_t.row(k);
    let n = row.norm();
    [row[0] / n, row[1] / n, row[2] / n, row[3] / n]
}
