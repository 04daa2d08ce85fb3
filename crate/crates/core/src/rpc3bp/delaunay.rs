//! Kepler's equation, the Poincare variables and the distance function
//! `D[zeta] = r^2 - 2 zeta r cos(theta) + zeta^2`.

use super::{h1_from_rc, PoincareState, PolarState, COLLISION};
use crate::numerics::find_root_newton;
use crate::{Complex64, Error, Result};

const KEPLER_TOL: f64 = 1e-15;
const REAL_SLICE_TOL: f64 = 1e-12;

/// Eccentric anomaly `u` solving `u - e sin(u) = l`.
pub fn kepler_u(l: f64, e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::HyperbolicInput(e));
    }
    if e == 0.0 {
        return Ok(l);
    }
    // Solve for the offset u - l, which lies in [-e, e].
    let offset = find_root_newton(
        |x| {
            let (s, c) = (l + x).sin_cos();
            (x - e * s, 1.0 - e * c)
        },
        -e,
        e,
        KEPLER_TOL,
    )?;
    Ok(l + offset)
}

struct Orbit {
    /// e cos(u), e sin(u)
    ecu: f64,
    esu: f64,
    theta: f64,
}

fn orbit_of(s: &PoincareState) -> Result<Orbit> {
    let (l, eta, xi) = (s.l, s.eta, s.xi);
    if (xi - eta.conj()).norm() > REAL_SLICE_TOL * (1.0 + eta.norm()) {
        return Err(Error::InvalidArgument("state is not on the real slice".into()));
    }
    if !(l > 0.0) {
        return Err(Error::InvalidArgument(format!("L = {l} must be positive")));
    }
    let ex = Complex64::from_polar(1.0, -s.lambda);
    let et = (2.0 * l - (eta * xi).re).sqrt() / (2.0 * l);
    let ecl = (et * (ex * eta + ex.conj() * xi)).re;
    let esl = (Complex64::i() * et * (ex * eta - ex.conj() * xi)).re;
    let e2 = ecl * ecl + esl * esl;
    let e = e2.sqrt();
    if e >= 1.0 {
        return Err(Error::HyperbolicInput(e));
    }
    let mean = if e == 0.0 { 0.0 } else { esl.atan2(ecl) };
    let u = kepler_u(mean, e)?;
    let ecu = e * u.cos();
    let esu = e * u.sin();
    // e^2 exp(i(f - u)) = (e cos f + i e sin f)(e cos u - i e sin u)
    let ecf = (ecu - e2) / (1.0 - ecu);
    let esf = (1.0 - e2).sqrt() * esu / (1.0 - ecu);
    let rot = Complex64::new(ecf, esf) * Complex64::new(ecu, -esu);
    let f_minus_u = if e2 == 0.0 { 0.0 } else { rot.im.atan2(rot.re) };
    // theta = f + g = lambda + (u - l) + (f - u), with u - l = e sin u.
    let theta = s.lambda + esu + f_minus_u;
    Ok(Orbit { ecu, esu, theta })
}

/// Polar state of the osculating ellipse described by a real Poincare state.
pub fn polar_from_poincare(s: &PoincareState) -> Result<PolarState> {
    let o = orbit_of(s)?;
    let l = s.l;
    let r = l * l * (1.0 - o.ecu);
    Ok(PolarState {
        r,
        theta: o.theta,
        // Equivalent to the energy identity with sign(R) = sign(sin u).
        big_r: l * o.esu / r,
        g: l - (s.eta * s.xi).re,
    })
}

/// Inverse of [`polar_from_poincare`] for bounded Kepler motion.
pub fn poincare_from_polar(s: &PolarState) -> Result<PoincareState> {
    if s.r <= COLLISION {
        return Err(Error::OriginSingular(s.r));
    }
    let energy = 0.5 * (s.big_r * s.big_r + s.g * s.g / (s.r * s.r)) - 1.0 / s.r;
    if energy >= 0.0 {
        return Err(Error::HyperbolicInput(1.0));
    }
    let l = 1.0 / (-2.0 * energy).sqrt();
    if s.g > l * (1.0 + 1e-12) || s.g <= 0.0 {
        return Err(Error::InvalidArgument(format!("G = {} outside (0, L = {l}]", s.g)));
    }
    let g = s.g.min(l);
    let ecu = 1.0 - s.r / (l * l);
    let esu = s.r * s.big_r / l;
    let e2 = (l - g) * (l + g) / (l * l);
    let ecf = (ecu - e2) / (1.0 - ecu);
    let esf = (1.0 - e2).sqrt() * esu / (1.0 - ecu);
    let rot = Complex64::new(ecu, esu) * Complex64::new(ecf, -esf);
    let u_minus_f = if e2 == 0.0 { 0.0 } else { rot.im.atan2(rot.re) };
    let lambda = s.theta + u_minus_f - esu;
    let eta = Complex64::from_polar(l / (l + g).sqrt(), s.theta) * Complex64::new(ecf, -esf);
    Ok(PoincareState { lambda, l, eta, xi: eta.conj() })
}

/// `D[zeta]` through the polar representation (real slice only).
pub fn d_exact(zeta: f64, s: &PoincareState) -> Result<Complex64> {
    let p = polar_from_poincare(s)?;
    let d = p.r * p.r - 2.0 * zeta * p.r * p.theta.cos() + zeta * zeta;
    Ok(Complex64::new(d, 0.0))
}

/// `(r^2, r cos(theta))` as analytic functions of complex Poincare
/// variables. Kepler's equation is solved for `E = u - l` in the form
/// `E = (e sin l) cos E + (e cos l) sin E`, whose coefficients are
/// polynomial in `eta`, `xi`.
fn rc_complex(
    lambda: Complex64,
    l: Complex64,
    eta: Complex64,
    xi: Complex64,
) -> Result<(Complex64, Complex64)> {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let ex = (-i * lambda).exp();
    let ex_inv = (i * lambda).exp();
    let et = (2.0 * l - eta * xi).sqrt() / (2.0 * l);
    let a = et * (ex * eta + ex_inv * xi);
    let b = i * et * (ex * eta - ex_inv * xi);
    let mut e_anom = b;
    let mut converged = false;
    for _ in 0..100 {
        let (s, c) = (e_anom.sin(), e_anom.cos());
        let f = e_anom - b * c - a * s;
        let df = one + b * s - a * c;
        let step = f / df;
        e_anom -= step;
        if step.norm() <= 1e-16 * (1.0 + e_anom.norm()) {
            converged = true;
            break;
        }
    }
    if !converged || !e_anom.is_finite() {
        return Err(Error::HyperbolicInput((a * a + b * b).sqrt().norm()));
    }
    let ecu = a * e_anom.cos() - b * e_anom.sin();
    let l2 = l * l;
    let r = l2 * (one - ecu);
    let e2 = 4.0 * et * et * eta * xi;
    let esg = -i * et * (eta - xi);
    let ecg = et * (eta + xi);
    let rc = l2 * ((lambda + e_anom).cos() - ecg + esg * e_anom / (one + (one - e2).sqrt()));
    Ok((r * r, rc))
}

/// `D[zeta]` for complex `(lambda, L, eta, xi)`; agrees with [`d_exact`]
/// on the real slice.
pub fn d_complex(
    zeta: f64,
    lambda: Complex64,
    l: Complex64,
    eta: Complex64,
    xi: Complex64,
) -> Result<Complex64> {
    let (r2, rc) = rc_complex(lambda, l, eta, xi)?;
    Ok(r2 - 2.0 * zeta * rc + zeta * zeta)
}

/// Terms of order 0, 1 and 2 in `(eta, xi)` of `D[zeta]`.
pub fn d_series(zeta: f64, s: &PoincareState) -> (Complex64, Complex64, Complex64) {
    let l = s.l;
    let (eta, xi) = (s.eta, s.xi);
    let em = Complex64::from_polar(1.0, -s.lambda);
    let ep = em.conj();
    let l2 = l * l;
    let d0 = Complex64::new(l2 * l2 - 2.0 * zeta * l2 * s.lambda.cos() + zeta * zeta, 0.0);
    let k1 = (2.0 * l * l2).sqrt() / 2.0;
    let d1 = eta * k1 * (3.0 * zeta - 2.0 * l2 * em - zeta * em * em)
        + xi * k1 * (3.0 * zeta - 2.0 * l2 * ep - zeta * ep * ep);
    let d2 = -eta * eta * (l * em / 4.0) * (zeta + 2.0 * l2 * em + 3.0 * zeta * em * em)
        - xi * xi * (l * ep / 4.0) * (zeta + 2.0 * l2 * ep + 3.0 * zeta * ep * ep)
        + eta * xi * l * (3.0 * l2 + 2.0 * zeta * s.lambda.cos());
    (d0, d1, d2)
}

/// Keplerian part `-1/(2L^2) - L + eta xi`.
pub fn h0_poincare(s: &PoincareState) -> f64 {
    -0.5 / (s.l * s.l) - s.l + (s.eta * s.xi).re
}

/// Total Poincare Hamiltonian `H0 + mu H1` on the real slice.
pub fn h_poincare(s: &PoincareState, mu: f64) -> Result<f64> {
    let p = polar_from_poincare(s)?;
    let h1 = h1_from_rc(p.r * p.r, p.r * p.theta.cos(), mu)?;
    Ok(h0_poincare(s) + mu * h1)
}

/// `H1 = (mu H1)/mu` for complex arguments, continued analytically.
///
/// The square root of `D[mu - 1]` (collision with the small primary) is
/// taken on the branch closest to `p_branch`; the square roots of `D[0]`
/// and `D[mu]` are principal.
pub fn h1_poincare_complex(
    lambda: Complex64,
    l: Complex64,
    eta: Complex64,
    xi: Complex64,
    mu: f64,
    p_branch: Complex64,
) -> Result<Complex64> {
    let (r2, rc) = rc_complex(lambda, l, eta, xi)?;
    let ds = r2 - 2.0 * mu * rc + mu * mu;
    let dp = r2 + 2.0 * (1.0 - mu) * rc + (1.0 - mu) * (1.0 - mu);
    if ds.norm() < COLLISION || dp.norm() < COLLISION * COLLISION {
        return Err(Error::Collision(dp.norm().sqrt()));
    }
    let r = r2.sqrt();
    let sds = ds.sqrt();
    let mut sdp = dp.sqrt();
    if (sdp * p_branch.conj()).re < 0.0 {
        sdp = -sdp;
    }
    let s_term = (mu - 2.0 * rc) / (r * sds * (sds + r)) + 1.0 / sds;
    Ok(s_term - 1.0 / sdp)
}
