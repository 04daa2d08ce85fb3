//! The restricted planar circular three-body problem in rotating
//! coordinates.
//!
//! The primaries sit at `(mu, 0)` (mass `1 - mu`) and `(mu - 1, 0)` (mass
//! `mu`). Besides the Cartesian Hamiltonian the module provides the polar
//! and Poincare representations, the singular scaling around the unperturbed
//! circle `r = 1` and the collinear equilibrium L3.

mod delaunay;
mod equilibrium;
mod scaling;

pub use delaunay::{
    d_complex, d_exact, d_series, h0_poincare, h1_poincare_complex, h_poincare, kepler_u,
    poincare_from_polar, polar_from_poincare,
};
pub use equilibrium::{
    cart_jacobian, cart_vector_field, l3_balance, locate_l3, Equilibrium,
};
pub use scaling::{f_pend, h_scaled, h_scaled_complex, l3_scaled, ScaledL3};

use crate::{Error, Result};

const COLLISION: f64 = 1e-12;

/// Mass parameter together with the scaling parameter `delta = mu^(1/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassRatio {
    pub mu: f64,
    pub delta: f64,
}

impl MassRatio {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 0.5) {
            return Err(Error::InvalidArgument(format!("mass ratio {mu} outside (0, 1/2]")));
        }
        Ok(MassRatio { mu, delta: mu.sqrt().sqrt() })
    }

    pub fn from_delta(delta: f64) -> Result<Self> {
        let mu = delta.powi(4);
        let mut m = Self::new(mu)?;
        m.delta = delta;
        Ok(m)
    }
}

/// Rotating-frame position and momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianState {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl CartesianState {
    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> Self {
        CartesianState { q1, q2, p1, p2 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.q1, self.q2, self.p1, self.p2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        CartesianState { q1: a[0], q2: a[1], p1: a[2], p2: a[3] }
    }

    /// The time-reversing symmetry `(q1, -q2, -p1, p2)`.
    pub fn reflect(self) -> Self {
        CartesianState { q1: self.q1, q2: -self.q2, p1: -self.p1, p2: self.p2 }
    }
}

/// Polar coordinates `(r, theta)` with radial momentum `R` and angular
/// momentum `G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    pub r: f64,
    pub theta: f64,
    pub big_r: f64,
    pub g: f64,
}

impl PolarState {
    pub fn new(r: f64, theta: f64, big_r: f64, g: f64) -> Self {
        PolarState { r, theta, big_r, g }
    }
}

/// Poincare variables `(lambda, L, eta, xi)`. On the real phase space
/// `xi = conj(eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareState {
    pub lambda: f64,
    pub l: f64,
    pub eta: crate::Complex64,
    pub xi: crate::Complex64,
}

impl PoincareState {
    pub fn new(lambda: f64, l: f64, eta: crate::Complex64, xi: crate::Complex64) -> Self {
        PoincareState { lambda, l, eta, xi }
    }

    /// State on the real slice with `xi = conj(eta)`.
    pub fn real(lambda: f64, l: f64, eta: crate::Complex64) -> Self {
        PoincareState { lambda, l, eta, xi: eta.conj() }
    }
}

/// Cartesian Hamiltonian
/// `|p|^2/2 - (q1 p2 - q2 p1) - (1-mu)/|q-(mu,0)| - mu/|q-(mu-1,0)|`.
pub fn h_cart(s: &CartesianState, mu: f64) -> Result<f64> {
    let r1 = (s.q1 - mu).hypot(s.q2);
    let r2 = (s.q1 - mu + 1.0).hypot(s.q2);
    if r1 < COLLISION {
        return Err(Error::Collision(r1));
    }
    if r2 < COLLISION {
        return Err(Error::Collision(r2));
    }
    Ok(0.5 * (s.p1 * s.p1 + s.p2 * s.p2) - (s.q1 * s.p2 - s.q2 * s.p1)
        - (1.0 - mu) / r1
        - mu / r2)
}

pub fn polar_from_cart(s: &CartesianState) -> Result<PolarState> {
    let r = s.q1.hypot(s.q2);
    if r <= COLLISION {
        return Err(Error::OriginSingular(r));
    }
    Ok(PolarState {
        r,
        theta: s.q2.atan2(s.q1),
        big_r: (s.q1 * s.p1 + s.q2 * s.p2) / r,
        g: s.q1 * s.p2 - s.q2 * s.p1,
    })
}

pub fn cart_from_polar(s: &PolarState) -> Result<CartesianState> {
    if s.r <= COLLISION {
        return Err(Error::OriginSingular(s.r));
    }
    let (sn, cs) = s.theta.sin_cos();
    let vt = s.g / s.r;
    Ok(CartesianState {
        q1: s.r * cs,
        q2: s.r * sn,
        p1: s.big_r * cs - vt * sn,
        p2: s.big_r * sn + vt * cs,
    })
}

/// Polar Hamiltonian split as `(H0, H1)` with total `H0 + mu H1`.
///
/// `H1` is evaluated in a form that stays finite as `mu -> 0`, where it
/// tends to `1/r - cos(theta)/r^2 - 1/sqrt(r^2 + 2 r cos(theta) + 1)`.
pub fn h_polar(s: &PolarState, mu: f64) -> Result<(f64, f64)> {
    if s.r <= COLLISION {
        return Err(Error::OriginSingular(s.r));
    }
    let h0 = 0.5 * (s.big_r * s.big_r + s.g * s.g / (s.r * s.r)) - 1.0 / s.r - s.g;
    let rc = s.r * s.theta.cos();
    Ok((h0, h1_from_rc(s.r * s.r, rc, mu)?))
}

// H1 in terms of r^2 and r cos(theta), with the O(mu) cancellation of the
// first two terms resolved algebraically.
pub(crate) fn h1_from_rc(r2: f64, rc: f64, mu: f64) -> Result<f64> {
    let ds = r2 - 2.0 * mu * rc + mu * mu;
    let dp = r2 + 2.0 * (1.0 - mu) * rc + (1.0 - mu) * (1.0 - mu);
    if !(ds > COLLISION * COLLISION) {
        return Err(Error::Collision(ds.max(0.0).sqrt()));
    }
    if !(dp > COLLISION * COLLISION) {
        return Err(Error::Collision(dp.max(0.0).sqrt()));
    }
    let r = r2.sqrt();
    let sds = ds.sqrt();
    let s_term = (mu - 2.0 * rc) / (r * sds * (sds + r)) + 1.0 / sds;
    Ok(s_term - 1.0 / dp.sqrt())
}
