//! Splitting of the one-dimensional invariant manifolds of L3.
//!
//! The branches leaving L3 towards `q2 > 0` are followed in the full
//! Cartesian flow until they first meet the section `theta = pi/2, r > 1`.
//! Their distance there, measured in `(r, R, G)`, is compared with
//! `4^(1/3) mu^(1/3) e^(-A/sqrt(mu)) Theta`.

use crate::numerics::{find_root, single_step, solve_param, OdeOptions};
use crate::rpc3bp::{cart_vector_field, h_cart, locate_l3, polar_from_cart, CartesianState};
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;
use std::ops::ControlFlow;

/// Time limit for reaching the section.
pub const T_MAX: f64 = 500.0;
const RTOL: f64 = 1e-13;
const ATOL: f64 = 1e-15;

/// `4^(1/3) mu^(1/3) e^(-A/sqrt(mu)) theta_abs`.
pub fn asymptotic_distance(mu: f64, a: f64, theta_abs: f64) -> Result<f64> {
    if !(mu > 0.0 && mu <= 0.05) {
        return Err(Error::InvalidArgument(format!("mu = {mu} outside (0, 0.05]")));
    }
    Ok(4f64.cbrt() * mu.cbrt() * (-a / mu.sqrt()).exp() * theta_abs)
}

/// A branch of the stable or unstable manifold of L3. `Plus` branches leave
/// with `q2` increasing and meet `theta = pi/2`; `Minus` branches are their
/// mirror images and meet `theta = -pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldBranch {
    UnstablePlus,
    UnstableMinus,
    StablePlus,
    StableMinus,
}

impl ManifoldBranch {
    fn is_unstable(self) -> bool {
        matches!(self, ManifoldBranch::UnstablePlus | ManifoldBranch::UnstableMinus)
    }

    fn side(self) -> f64 {
        match self {
            ManifoldBranch::UnstablePlus | ManifoldBranch::StablePlus => 1.0,
            _ => -1.0,
        }
    }
}

/// First intersection of a manifold branch with its section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPoint {
    pub r: f64,
    pub theta: f64,
    pub big_r: f64,
    pub g: f64,
    pub t_hit: f64,
    /// `|H(section) - H(seed)|`.
    pub energy_drift: f64,
}

/// Follows `branch` from `L3 + seed_eps v` to its first crossing of
/// `theta = +-pi/2` with `r > 1`.
pub fn manifold_section_point(mu: f64, branch: ManifoldBranch, seed_eps: f64) -> Result<SectionPoint> {
    follow(mu, branch, seed_eps, false).map(|r| r.0)
}

/// As [`manifold_section_point`], also returning the accepted integration
/// steps `(t, state)` from the seed up to the section.
pub fn manifold_orbit(
    mu: f64,
    branch: ManifoldBranch,
    seed_eps: f64,
) -> Result<(SectionPoint, Vec<(f64, CartesianState)>)> {
    follow(mu, branch, seed_eps, true)
}

fn follow(
    mu: f64,
    branch: ManifoldBranch,
    seed_eps: f64,
    record: bool,
) -> Result<(SectionPoint, Vec<(f64, CartesianState)>)> {
    if !(3e-4..=1e-2).contains(&mu) {
        return Err(Error::InvalidArgument(format!("mu = {mu} outside [3e-4, 1e-2]")));
    }
    if !(seed_eps > 0.0 && seed_eps < 1e-3) {
        return Err(Error::InvalidArgument(format!("seed_eps = {seed_eps}")));
    }
    let eq = locate_l3(mu)?;
    let mut v = if branch.is_unstable() { eq.unstable_vector } else { eq.stable_vector };
    if v[1] * branch.side() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let l3 = eq.cartesian().to_array();
    let seed: Vec<Complex64> = (0..4).map(|i| Complex64::new(l3[i] + seed_eps * v[i], 0.0)).collect();
    let h_seed = h_cart(&to_state(&seed), mu)?;
    let t_end = if branch.is_unstable() { T_MAX } else { -T_MAX };
    let side = branch.side();

    let rhs = move |_t: f64, y: &[Complex64], dy: &mut [Complex64]| -> Result<()> {
        let f = cart_vector_field(&to_state(y), mu);
        for i in 0..4 {
            dy[i] = Complex64::new(f[i], 0.0);
        }
        Ok(())
    };
    let mut bracket: Option<(f64, Vec<Complex64>, f64)> = None;
    let mut orbit = Vec::new();
    if record {
        orbit.push((0.0, to_state(&seed)));
    }
    solve_param(rhs, 0.0, t_end, &seed, OdeOptions::new(RTOL, ATOL), |info| {
        let (a, b) = (info.y_prev[0].re, info.y[0].re);
        let s = to_state(info.y);
        let crossed = a.signum() != b.signum() && s.q2 * side > 0.0 && s.q1.hypot(s.q2) > 1.0;
        if crossed {
            bracket = Some((info.tau_prev, info.y_prev.to_vec(), info.tau - info.tau_prev));
            ControlFlow::Break(())
        } else {
            if record {
                orbit.push((info.tau, s));
            }
            ControlFlow::Continue(())
        }
    })?;
    let (t0, y0, step) = bracket.ok_or(Error::NoCrossing(T_MAX))?;

    let advance = |h: f64| -> Result<Vec<Complex64>> {
        let mut f = rhs;
        single_step(&mut f, t0, &y0, h)
    };
    let q1_at = |h: f64| advance(h).map(|y| y[0].re).unwrap_or(f64::NAN);
    let h = find_root(q1_at, 0.0, step, 1e-14)?;
    let hit = to_state(&advance(h)?);
    let q1_dot = cart_vector_field(&hit, mu)[0];
    if q1_dot.abs() < 1e-12 {
        return Err(Error::EventDegenerate(q1_dot));
    }
    let p = polar_from_cart(&hit)?;
    if (p.theta - side * FRAC_PI_2).abs() > 1e-10 {
        return Err(Error::NoConvergence { err: (p.theta - side * FRAC_PI_2).abs(), tol: 1e-10 });
    }
    if record {
        orbit.push((t0 + h, hit));
    }
    let point = SectionPoint {
        r: p.r,
        theta: p.theta,
        big_r: p.big_r,
        g: p.g,
        t_hit: t0 + h,
        energy_drift: (h_cart(&hit, mu)? - h_seed).abs(),
    };
    Ok((point, orbit))
}

fn to_state(y: &[Complex64]) -> CartesianState {
    CartesianState::new(y[0].re, y[1].re, y[2].re, y[3].re)
}

/// Measured and predicted splitting at one mass ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingSample {
    pub mu: f64,
    pub unstable: SectionPoint,
    pub stable: SectionPoint,
    /// Gaps `unstable - stable` in `r`, `R` and `G`.
    pub gaps: [f64; 3],
    pub dist_measured: f64,
    pub dist_asymptotic: f64,
}

/// Measures the splitting of the `Plus` branches at `mu`.
pub fn splitting_sample(mu: f64, a: f64, theta_abs: f64) -> Result<SplittingSample> {
    let (u, s) = rayon::join(
        || manifold_section_point(mu, ManifoldBranch::UnstablePlus, 1e-7),
        || manifold_section_point(mu, ManifoldBranch::StablePlus, 1e-7),
    );
    let (u, s) = (u?, s?);
    let gaps = [u.r - s.r, u.big_r - s.big_r, u.g - s.g];
    Ok(SplittingSample {
        mu,
        unstable: u,
        stable: s,
        gaps,
        dist_measured: gaps.iter().map(|x| x * x).sum::<f64>().sqrt(),
        dist_asymptotic: asymptotic_distance(mu, a, theta_abs)?,
    })
}

/// Linear fit of `log(dist mu^(-1/3))` against `1/sqrt(mu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingFit {
    pub slope: f64,
    pub intercept: f64,
    /// `e^intercept / 4^(1/3)`.
    pub theta_eff: f64,
    pub samples: Vec<SplittingSample>,
}

pub fn fit_splitting_exponent(mu_grid: &[f64], a: f64, theta_abs: f64) -> Result<SplittingFit> {
    if mu_grid.len() < 4 {
        return Err(Error::InvalidArgument("at least four mass ratios are needed".into()));
    }
    if mu_grid.iter().any(|m| !(1e-3..=1e-2).contains(m)) {
        return Err(Error::InvalidArgument("mass ratios must lie in [1e-3, 1e-2]".into()));
    }
    let samples = mu_grid
        .par_iter()
        .map(|&mu| splitting_sample(mu, a, theta_abs))
        .collect::<Result<Vec<_>>>()?;
    if let Some(s) = samples.iter().find(|s| !(s.dist_measured > 0.0)) {
        return Err(Error::FitRejected(format!("manifolds coincide at mu = {}", s.mu)));
    }
    let x: Vec<f64> = samples.iter().map(|s| 1.0 / s.mu.sqrt()).collect();
    let y: Vec<f64> = samples.iter().map(|s| (s.dist_measured / s.mu.cbrt()).ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(SplittingFit { slope, intercept, theta_eff: intercept.exp() / 4f64.cbrt(), samples })
}
