//! The inner equation near the separatrix singularity `u = iA`.
//!
//! In the blow-up variable `U = (u - iA)/delta^2` the limit Hamiltonian is
//! `W + XY + K(U, W, X, Y)` with
//! `K = -(3/4) U^(2/3) W^2 - (1/(3 U^(2/3))) (1/sqrt(1 + J) - 1)`.
//! Solutions are written as graphs `Z(U) = (W, X, Y)(U)` and computed by
//! shooting from the truncated asymptotic series at `Re U = -+1000`. The
//! difference `Y^u - Y^s` at `U = -i rho` gives the Stokes estimate
//! `Theta_rho = |Delta Y| e^rho`.
//!
//! All fractional powers of `U` share one branch: `arg U` in
//! `[-3 pi/2, pi/2)`, so the cut lies on the positive imaginary axis.

use crate::numerics::{solve_param, ComplexPath, OdeOptions};
use crate::rpc3bp::{h_scaled_complex, l3_scaled};
use crate::separatrix::{compute_a, sigma};
use crate::{Complex64, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::ControlFlow;

const CUT_GUARD: f64 = 1e-6;
const SERIES_MIN: f64 = 30.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point `(W, X, Y)` of the inner phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerState {
    pub w: Complex64,
    pub x: Complex64,
    pub y: Complex64,
}

impl InnerState {
    pub fn new(w: Complex64, x: Complex64, y: Complex64) -> Self {
        InnerState { w, x, y }
    }

    pub fn zero() -> Self {
        Self::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
    }

    pub fn to_array(self) -> [Complex64; 3] {
        [self.w, self.x, self.y]
    }

    pub fn from_array(a: [Complex64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn norm(&self) -> f64 {
        (self.w.norm_sqr() + self.x.norm_sqr() + self.y.norm_sqr()).sqrt()
    }
}

/// Fractional powers of `U` on the inner branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerBranch {
    pub u: Complex64,
    pub u13: Complex64,
    pub u23: Complex64,
    pub u43: Complex64,
}

impl InnerBranch {
    /// The branch argument of `U`, in `[-3 pi/2, pi/2)`.
    pub fn arg(u: Complex64) -> f64 {
        let a = u.arg();
        if a >= FRAC_PI_2 {
            a - 2.0 * PI
        } else {
            a
        }
    }

    pub fn new(u: Complex64) -> Result<Self> {
        if u.norm() == 0.0 || !u.is_finite() {
            return Err(Error::InvalidArgument(format!("U = {u}")));
        }
        let a = Self::arg(u);
        if (a - FRAC_PI_2).abs().min((a + 1.5 * PI).abs()) < CUT_GUARD {
            return Err(Error::NearBranchCut(format!("U = {u}")));
        }
        let u13 = Complex64::from_polar(u.norm().cbrt(), a / 3.0);
        let u23 = u13 * u13;
        Ok(InnerBranch { u, u13, u23, u43: u23 * u23 })
    }

    /// `U^(k/3)` for any integer `k`, built from `U^(1/3)`.
    pub fn pow_third(&self, k: i32) -> Complex64 {
        self.u13.powi(k)
    }
}

/// `K` together with its four partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KGradient {
    pub k: Complex64,
    pub du: Complex64,
    pub dw: Complex64,
    pub dx: Complex64,
    pub dy: Complex64,
}

struct JParts {
    j: Complex64,
    ju: Complex64,
    jw: Complex64,
    jx: Complex64,
    jy: Complex64,
}

fn j_parts(b: &InnerBranch, z: &InnerState) -> JParts {
    let (u, u23, u43) = (b.u, b.u23, b.u43);
    let (w, x, y) = (z.w, z.x, z.y);
    let u53 = u43 * b.u13;
    let u73 = u53 * u23;
    let cw = w - 2.0 / (3.0 * u23);
    let j = 4.0 * w * w / (9.0 * u23) - 16.0 * w / (27.0 * u43)
        + 16.0 / (81.0 * u * u)
        + 4.0 * (x + y) / (9.0 * u) * cw
        - 4.0 * I * (x - y) / (3.0 * u23)
        - (x * x + y * y) / (3.0 * u43)
        + 10.0 * x * y / (9.0 * u43);
    let jw = 8.0 * w / (9.0 * u23) - 16.0 / (27.0 * u43) + 4.0 * (x + y) / (9.0 * u);
    let jx = 4.0 / (9.0 * u) * cw - 4.0 * I / (3.0 * u23) - 2.0 * x / (3.0 * u43)
        + 10.0 * y / (9.0 * u43);
    let jy = 4.0 / (9.0 * u) * cw + 4.0 * I / (3.0 * u23) - 2.0 * y / (3.0 * u43)
        + 10.0 * x / (9.0 * u43);
    let ju = -8.0 * w * w / (27.0 * u53) + 64.0 * w / (81.0 * u73)
        - 32.0 / (81.0 * u * u * u)
        - 4.0 * (x + y) / (9.0 * u * u) * cw
        + 16.0 * (x + y) / (81.0 * u * u53)
        + 8.0 * I * (x - y) / (9.0 * u53)
        + 4.0 * (x * x + y * y) / (9.0 * u73)
        - 40.0 * x * y / (27.0 * u73);
    JParts { j, ju, jw, jx, jy }
}

fn sqrt_one_plus(j: Complex64) -> Result<Complex64> {
    let s = 1.0 + j;
    if s.norm() <= 0.1 {
        return Err(Error::SqrtDomain(s.norm()));
    }
    Ok(s.sqrt())
}

/// The function `J(U, W, X, Y)`.
pub fn j_fn(u: Complex64, z: &InnerState) -> Result<Complex64> {
    let b = InnerBranch::new(u)?;
    Ok(j_parts(&b, z).j)
}

/// The Hamiltonian correction `K(U, W, X, Y)`.
pub fn k_fn(u: Complex64, z: &InnerState) -> Result<Complex64> {
    Ok(grad_k(u, z)?.k)
}

/// `K` and its partials in closed form.
pub fn grad_k(u: Complex64, z: &InnerState) -> Result<KGradient> {
    let b = InnerBranch::new(u)?;
    let jp = j_parts(&b, z);
    let sq = sqrt_one_plus(jp.j)?;
    // 1/sqrt(1+J) - 1 without cancellation.
    let sm1 = -jp.j / (sq * (1.0 + sq));
    let p32 = 1.0 / (sq * (1.0 + jp.j));
    let (u13, u23) = (b.u13, b.u23);
    let u53 = b.u43 * u13;
    let w = z.w;
    Ok(KGradient {
        k: -0.75 * u23 * w * w - sm1 / (3.0 * u23),
        du: -w * w / (2.0 * u13) + 2.0 / (9.0 * u53) * sm1 + p32 * jp.ju / (6.0 * u23),
        dw: -1.5 * u23 * w + p32 * jp.jw / (6.0 * u23),
        dx: p32 * jp.jx / (6.0 * u23),
        dy: p32 * jp.jy / (6.0 * u23),
    })
}

/// `K` with the opposite sign of its collision part,
/// `-(3/4) U^(2/3) W^2 + (1/(3 U^(2/3))) (1/sqrt(1+J) - 1)`: the limit that
/// the scaled three-body Hamiltonian actually attains under the coordinate
/// changes of [`verify_inner_limit`].
pub fn k_limit(u: Complex64, z: &InnerState) -> Result<Complex64> {
    let b = InnerBranch::new(u)?;
    let first = -0.75 * b.u23 * z.w * z.w;
    Ok(first - (k_fn(u, z)? - first))
}

/// The graph-form vector field `dZ/dU = (A Z + f) / (1 + g)` with
/// `A = diag(0, i, -i)`, `f = (-K_U, i K_Y, -i K_X)` and `g = K_W`.
pub fn graph_rhs(u: Complex64, z: &InnerState) -> Result<InnerState> {
    let gk = grad_k(u, z)?;
    let den = 1.0 + gk.dw;
    if den.norm() < 0.5 {
        return Err(Error::TimeReparamSingular(den.norm()));
    }
    Ok(InnerState::new(
        -gk.du / den,
        (I * z.x + I * gk.dy) / den,
        (-I * z.y - I * gk.dx) / den,
    ))
}

/// Truncated asymptotic series of the invariant graphs, valid for `|U| >= 30`.
pub fn series_z(u: Complex64) -> Result<InnerState> {
    if u.norm() < SERIES_MIN {
        return Err(Error::TooClose(u.norm()));
    }
    let b = InnerBranch::new(u)?;
    let p = |k: i32| b.pow_third(-k);
    let w = 4.0 / 243.0 * p(8) - 172.0 / 2187.0 * p(14);
    let x = -2.0 * I / 9.0 * p(4) + 28.0 / 81.0 * p(7) + 20.0 * I / 27.0 * p(10)
        - 16424.0 / 6561.0 * p(13);
    let y = 2.0 * I / 9.0 * p(4) + 28.0 / 81.0 * p(7) - 20.0 * I / 27.0 * p(10)
        - 16424.0 / 6561.0 * p(13);
    Ok(InnerState::new(w, x, y))
}

/// Term-by-term derivative of [`series_z`].
pub fn series_z_derivative(u: Complex64) -> Result<InnerState> {
    if u.norm() < SERIES_MIN {
        return Err(Error::TooClose(u.norm()));
    }
    let b = InnerBranch::new(u)?;
    // d/dU U^(-k/3) = -(k/3) U^(-k/3 - 1).
    let d = |k: i32| -(k as f64) / 3.0 * b.pow_third(-k - 3);
    let w = 4.0 / 243.0 * d(8) - 172.0 / 2187.0 * d(14);
    let x = -2.0 * I / 9.0 * d(4) + 28.0 / 81.0 * d(7) + 20.0 * I / 27.0 * d(10)
        - 16424.0 / 6561.0 * d(13);
    let y = 2.0 * I / 9.0 * d(4) + 28.0 / 81.0 * d(7) - 20.0 * I / 27.0 * d(10)
        - 16424.0 / 6561.0 * d(13);
    Ok(InnerState::new(w, x, y))
}

/// Norm of the invariance-equation residual of the series at `U`.
pub fn series_residual(u: Complex64) -> Result<f64> {
    let z = series_z(u)?;
    let lhs = series_z_derivative(u)?;
    let rhs = graph_rhs(u, &z)?;
    Ok(InnerState::new(lhs.w - rhs.w, lhs.x - rhs.x, lhs.y - rhs.y).norm())
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Decay order of the series residual along `U = s e^{-i pi/4}`,
/// `s` geometric in `[100, 1000]`.
pub fn series_residual_order() -> Result<f64> {
    let dir = Complex64::from_polar(1.0, -PI / 4.0);
    let s: Vec<f64> = (0..9).map(|k| 100.0 * 10f64.powf(k as f64 / 8.0)).collect();
    let r = s.iter().map(|&m| series_residual(dir * m)).collect::<Result<Vec<_>>>()?;
    Ok(-log_log_slope(&s, &r))
}

/// Largest relative deviation of [`grad_k`] from central differences over
/// `n` random points with `Im U <= -5`, `|U| <= 60` and `|Z| <= 0.1`.
pub fn gradient_gate(n: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let u = c(rng.random_range(-40.0..40.0), -rng.random_range(5.0..40.0));
        let mut comp = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 0.057;
        let z = InnerState::new(comp(), comp(), comp());
        let g = grad_k(u, &z)?;
        let h = 1e-6;
        let k_at = |du: Complex64, dz: [Complex64; 3]| {
            let a = z.to_array();
            k_fn(u + du, &InnerState::new(a[0] + dz[0], a[1] + dz[1], a[2] + dz[2]))
        };
        let zero = c(0.0, 0.0);
        let step = c(h, 0.0);
        let fd = [
            (k_at(step, [zero; 3])? - k_at(-step, [zero; 3])?) / (2.0 * h),
            (k_at(zero, [step, zero, zero])? - k_at(zero, [-step, zero, zero])?) / (2.0 * h),
            (k_at(zero, [zero, step, zero])? - k_at(zero, [zero, -step, zero])?) / (2.0 * h),
            (k_at(zero, [zero, zero, step])? - k_at(zero, [zero, zero, -step])?) / (2.0 * h),
        ];
        for (exact, approx) in [g.du, g.dw, g.dx, g.dy].iter().zip(fd) {
            worst = worst.max((exact - approx).norm() / exact.norm());
        }
    }
    Ok(worst)
}

/// Which invariant graph to shoot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShootBranch {
    /// Seeded at `Re U = -re_start`.
    Unstable,
    /// Seeded at `Re U = +re_start`.
    Stable,
}

/// Options of the shooting integrations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    pub re_start: f64,
    pub rtol: f64,
    pub max_step: Option<f64>,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions { re_start: 1000.0, rtol: 1e-12, max_step: None }
    }
}

/// Endpoint of a shooting integration with the growth diagnostic
/// `max |U^(4/3) X|` along the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootResult {
    pub z: InnerState,
    pub max_scaled_x: f64,
    pub steps: usize,
}

/// Integrates `branch` along the horizontal line from `-+re_start + i Im(target)`
/// to `target`.
pub fn shoot_to(branch: ShootBranch, target: Complex64, opts: &ShootOptions) -> Result<ShootResult> {
    if !(target.im < 0.0) {
        return Err(Error::InvalidArgument(format!("target {target} not below the real axis")));
    }
    let sign = match branch {
        ShootBranch::Unstable => -1.0,
        ShootBranch::Stable => 1.0,
    };
    let u0 = c(sign * opts.re_start, target.im);
    if sign * (u0.re - target.re) <= 0.0 {
        return Err(Error::InvalidArgument("target lies beyond the seeding point".into()));
    }
    let span = target - u0;
    let z0 = series_z(u0)?.to_array();
    let mut ode_opts = OdeOptions::new(opts.rtol, 1e-16);
    if let Some(h) = opts.max_step {
        ode_opts = ode_opts.with_max_step(h / span.norm());
    }
    let mut max_scaled_x = 0.0f64;
    let res = solve_param(
        |tau, y, dy| {
            let u = u0 + span * tau;
            let d = graph_rhs(u, &InnerState::new(y[0], y[1], y[2]))?;
            dy[0] = d.w * span;
            dy[1] = d.x * span;
            dy[2] = d.y * span;
            Ok(())
        },
        0.0,
        1.0,
        &z0,
        ode_opts,
        |info| {
            let u = u0 + span * info.tau;
            if let Ok(b) = InnerBranch::new(u) {
                max_scaled_x = max_scaled_x.max((b.u43 * info.y[1]).norm());
            }
            ControlFlow::Continue(())
        },
    )?;
    let y = &res.y_end;
    Ok(ShootResult { z: InnerState::new(y[0], y[1], y[2]), max_scaled_x, steps: res.steps })
}

/// Shoots `branch` to `U = -i rho`.
pub fn shoot(branch: ShootBranch, rho: f64, opts: &ShootOptions) -> Result<ShootResult> {
    check_rho(rho)?;
    shoot_to(branch, c(0.0, -rho), opts)
}

fn check_rho(rho: f64) -> Result<()> {
    if !(8.0..=30.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho = {rho} outside [8, 30]")));
    }
    Ok(())
}

/// One row of the Stokes table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesRecord {
    pub rho: f64,
    pub y_unstable: Complex64,
    pub y_stable: Complex64,
    pub delta_y: Complex64,
    pub theta: f64,
    /// `log10(|Y^u| / |Delta Y|)`: digits cancelled by the subtraction.
    pub digits_lost: f64,
}

impl StokesRecord {
    /// Significant digits left in `Delta Y` at relative tolerance `rtol`.
    pub fn digits_remaining(&self, rtol: f64) -> f64 {
        -rtol.log10() - self.digits_lost
    }
}

/// Stokes record at `rho` without the precision check.
pub fn theta_unchecked(rho: f64, opts: &ShootOptions) -> Result<StokesRecord> {
    check_rho(rho)?;
    let (u, s) = rayon::join(
        || shoot(ShootBranch::Unstable, rho, opts),
        || shoot(ShootBranch::Stable, rho, opts),
    );
    let (yu, ys) = (u?.z.y, s?.z.y);
    let delta_y = yu - ys;
    Ok(StokesRecord {
        rho,
        y_unstable: yu,
        y_stable: ys,
        delta_y,
        theta: delta_y.norm() * rho.exp(),
        digits_lost: (yu.norm() / delta_y.norm()).log10(),
    })
}

/// `Theta_rho = |Y^u(-i rho) - Y^s(-i rho)| e^rho`; refuses the value when
/// fewer than three significant digits survive the subtraction.
pub fn theta(rho: f64, opts: &ShootOptions) -> Result<StokesRecord> {
    let rec = theta_unchecked(rho, opts)?;
    let remaining = rec.digits_remaining(opts.rtol);
    if remaining < 3.0 {
        return Err(Error::PrecisionLoss { rho, remaining });
    }
    Ok(rec)
}

/// [`theta_unchecked`] over a list of `rho`, in input order. Rows are
/// computed in parallel.
pub fn theta_table(rhos: &[f64], opts: &ShootOptions) -> Result<Vec<StokesRecord>> {
    rhos.par_iter().map(|&r| theta_unchecked(r, opts)).collect()
}

/// Shape of `Delta Z = Z^u - Z^s` along `Im U = -rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffStructure {
    pub rho: f64,
    pub samples: Vec<f64>,
    /// `e^{iU} Delta Y` at each sample.
    pub scaled_dy: Vec<Complex64>,
    /// Largest `|v - mean| / |mean|` over the scaled `Delta Y`.
    pub relative_spread: f64,
    /// Spread of `arg(e^{iU} Delta Y)` in radians.
    pub arg_spread: f64,
    /// Largest `|Delta X| / |Delta Y|`.
    pub x_ratio: f64,
    /// Largest `|U^2 e^{iU} Delta X|`.
    pub x_bound: f64,
    /// Largest `|U^(7/3) e^{iU} Delta W|`.
    pub w_bound: f64,
}

pub fn diff_structure(rho: f64, x_samples: &[f64], opts: &ShootOptions) -> Result<DiffStructure> {
    check_rho(rho)?;
    if x_samples.is_empty() || x_samples.iter().any(|x| x.abs() > 5.0) {
        return Err(Error::InvalidArgument("samples must be non-empty and within [-5, 5]".into()));
    }
    let rows = x_samples
        .par_iter()
        .map(|&x| {
            let u = c(x, -rho);
            let zu = shoot_to(ShootBranch::Unstable, u, opts)?.z;
            let zs = shoot_to(ShootBranch::Stable, u, opts)?.z;
            let e = (I * u).exp();
            let b = InnerBranch::new(u)?;
            Ok((
                e * (zu.y - zs.y),
                (zu.x - zs.x).norm() / (zu.y - zs.y).norm(),
                (u * u * e * (zu.x - zs.x)).norm(),
                (b.u43 * b.u, e * (zu.w - zs.w)),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let scaled_dy: Vec<Complex64> = rows.iter().map(|r| r.0).collect();
    let mean = scaled_dy.iter().sum::<Complex64>() / scaled_dy.len() as f64;
    let relative_spread =
        scaled_dy.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max) / mean.norm();
    let args: Vec<f64> = scaled_dy.iter().map(|v| (v / mean).arg()).collect();
    let arg_spread = args.iter().cloned().fold(f64::MIN, f64::max)
        - args.iter().cloned().fold(f64::MAX, f64::min);
    Ok(DiffStructure {
        rho,
        samples: x_samples.to_vec(),
        scaled_dy,
        relative_spread,
        arg_spread,
        x_ratio: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        x_bound: rows.iter().map(|r| r.2).fold(0.0, f64::max),
        w_bound: rows.iter().map(|r| (r.3 .0 * r.3 .1).norm()).fold(0.0, f64::max),
    })
}

/// A sample point `(U, Z)` of the inner domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSample {
    pub u: Complex64,
    pub z: InnerState,
}

/// Deterministic samples with `1/3 <= |U| <= 3`, `arg U` in
/// `[-1.4 pi, 0.4 pi]` and `|Z| <= 0.3`.
pub fn inner_samples(n: usize, seed: u64) -> Vec<InnerSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.random_range((1.0f64 / 3.0).ln()..3f64.ln()).exp();
            let u = Complex64::from_polar(r, rng.random_range(-1.4 * PI..0.4 * PI));
            let mut comp = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let z = InnerState::new(comp(), comp(), comp());
            let scale = rng.random_range(0.0..0.3) / z.norm();
            InnerSample { u, z: InnerState::new(z.w * scale, z.x * scale, z.y * scale) }
        })
        .collect()
}

/// Residuals of the inner limit as `delta -> 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerLimitFit {
    pub deltas: Vec<f64>,
    /// Residuals against [`k_limit`].
    pub residuals: Vec<f64>,
    pub exponent: f64,
    /// Residuals against [`k_fn`], kept as a diagnostic.
    pub residuals_k: Vec<f64>,
    pub exponent_k: f64,
}

/// `alpha+ = 2^(-1/3) e^{-2 pi i/3}`, a cube root of `1/2`.
pub fn alpha_plus() -> Complex64 {
    Complex64::from_polar(2f64.powf(-1.0 / 3.0), -2.0 * PI / 3.0)
}

/// The scaled three-body Hamiltonian composed with the L3 shift, the outer
/// change around the separatrix and the inner blow-up, normalised by
/// `delta^(4/3) / (2 alpha^2)`.
pub fn h_inner(sample: &InnerSample, delta: f64, a: f64) -> Result<Complex64> {
    let alpha = alpha_plus();
    let l3 = l3_scaled(delta)?;
    let d2 = delta * delta;
    let r = d2 * sample.u.norm();
    let phi = InnerBranch::arg(sample.u);
    let ia = c(0.0, a);
    let path = ComplexPath::line(c(0.0, 0.0), c(0.0, a - r))?.arc_by(ia, phi + FRAC_PI_2);
    let sep = sigma(&path)?;
    let d13 = delta.cbrt();
    let z = sample.z;
    let w = 2.0 * alpha * alpha * z.w / (d13 * delta);
    let x = d13 * 2f64.sqrt() * alpha * z.x;
    let y = d13 * 2f64.sqrt() * alpha * z.y;
    let lam = sep.lambda;
    let big = sep.big_lambda - w / (3.0 * sep.big_lambda) + d2 * l3.big_lambda_hat;
    let d3 = d2 * delta;
    let h = h_scaled_complex(
        lam,
        big,
        x + d3 * l3.x_hat,
        y + d3 * l3.y_hat,
        delta,
        2.0 * (lam / 2.0).cos(),
    )?;
    Ok(d13 * delta / (2.0 * alpha * alpha) * h)
}

/// Residual `max_k |(H^Inn - W - XY - K)_k - (...)_0|` for each `delta`,
/// and the fitted order in `delta`.
pub fn verify_inner_limit(deltas: &[f64], samples: &[InnerSample]) -> Result<InnerLimitFit> {
    if deltas.len() < 2 || samples.len() < 2 {
        return Err(Error::InvalidArgument("need two deltas and two samples".into()));
    }
    let a = compute_a(1e-13)?;
    let rows = deltas
        .par_iter()
        .map(|&d| {
            let mut lim = Vec::with_capacity(samples.len());
            let mut printed = Vec::with_capacity(samples.len());
            for s in samples {
                let hi = h_inner(s, d, a)?;
                let base = s.z.w + s.z.x * s.z.y;
                lim.push(hi - base - k_limit(s.u, &s.z)?);
                printed.push(hi - base - k_fn(s.u, &s.z)?);
            }
            let spread = |v: &[Complex64]| v.iter().map(|x| (x - v[0]).norm()).fold(0.0, f64::max);
            Ok((spread(&lim), spread(&printed)))
        })
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let residuals_k: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(InnerLimitFit {
        deltas: deltas.to_vec(),
        exponent: log_log_slope(deltas, &residuals),
        exponent_k: log_log_slope(deltas, &residuals_k),
        residuals,
        residuals_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_powers() {
        let b = InnerBranch::new(c(8.0, 0.0)).unwrap();
        assert!((b.u13 - 2.0).norm() < 1e-15);
        let b = InnerBranch::new(c(-8.0, 0.0)).unwrap();
        // arg -pi on this branch.
        assert!((b.u13 - Complex64::from_polar(2.0, -PI / 3.0)).norm() < 1e-14);
        assert!(matches!(InnerBranch::new(c(0.0, 3.0)), Err(Error::NearBranchCut(_))));
        let b = InnerBranch::new(c(-2.0, -5.0)).unwrap();
        assert_eq!(b.u23 * b.u23, b.u43);
        assert_eq!(b.u13 * b.u13, b.u23);
    }

    #[test]
    fn j_and_k_at_zero() {
        let u = c(0.0, -10.0);
        let z = InnerState::zero();
        assert!((j_fn(u, &z).unwrap() - 16.0 / (81.0 * u * u)).norm() < 1e-16);
        // Direct evaluation through principal powers, valid for arg U = -pi/2.
        let u23 = (u.ln() * (2.0 / 3.0)).exp();
        let direct = -(1.0 / (3.0 * u23)) * (1.0 / (1.0 + 16.0 / (81.0 * u * u)).sqrt() - 1.0);
        assert!((k_fn(u, &z).unwrap() - direct).norm() < 1e-14);
    }

    #[test]
    fn j_conjugation_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u = c(rng.random_range(0.5..20.0), -rng.random_range(0.5..20.0));
            let mut comp = || c(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
            let z = InnerState::new(comp(), comp(), comp());
            let a = j_fn(u, &z).unwrap().conj();
            let b = j_fn(u.conj(), &InnerState::new(z.w.conj(), z.y.conj(), z.x.conj())).unwrap();
            assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        assert!(gradient_gate(50, 1).unwrap() <= 1e-6);
        let g = grad_k(c(0.0, -5.0), &InnerState::zero()).unwrap();
        assert!(g.dx.norm() > 0.0 && g.dy.norm() > 0.0);
    }

    #[test]
    fn vector_field_checks() {
        assert!(matches!(series_z(c(10.0, -10.0)), Err(Error::TooClose(_))));
        // At Z = 0 the X-component is the forcing R2[0] = O(U^(-4/3)).
        let mut r = Vec::new();
        let s = [50.0, 100.0, 200.0, 400.0];
        for m in s {
            let d = graph_rhs(c(0.0, -m), &InnerState::zero()).unwrap();
            r.push(d.x.norm());
        }
        assert!((log_log_slope(&s, &r) + 4.0 / 3.0).abs() < 0.05);
    }

    #[test]
    fn series_residual_decays() {
        let order = series_residual_order().unwrap();
        assert!((order - 16.0 / 3.0).abs() < 0.25, "{order}");
    }

    #[test]
    fn sample_generator_is_in_domain() {
        for s in inner_samples(20, 5) {
            assert!(s.u.norm() >= 1.0 / 3.0 - 1e-12 && s.u.norm() <= 3.0 + 1e-12);
            assert!(s.z.norm() <= 0.3);
        }
        assert_eq!(inner_samples(4, 9), inner_samples(4, 9));
    }
}
