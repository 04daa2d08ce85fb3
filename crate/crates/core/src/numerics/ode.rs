//! Adaptive Dormand-Prince 8(5,3) integration of complex-valued systems.
//!
//! The stepper works in a real parameter `tau`. Along a [`ComplexPath`] each
//! segment is integrated in its own `tau` in `[0, 1]` through the chain rule
//! `dy/dtau = t'(tau) f(t(tau), y)`; real-time problems call [`solve_param`]
//! directly.

use super::path::ComplexPath;
use super::tableau::{A, B, C, E3, E5, STAGES};
use crate::{Complex64, Error, Result};
use std::ops::ControlFlow;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const UNDERFLOW: f64 = 1e-14;

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step, measured in the independent variable of the
    /// problem (path length for [`integrate_ode_with`]).
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn new(rtol: f64, atol: f64) -> Self {
        OdeOptions { rtol, atol, max_step: None, max_steps: 2_000_000 }
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = Some(h);
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = |x: f64| (1e-16..=1e-2).contains(&x);
        if !ok(self.rtol) || !(self.atol > 0.0 && self.atol <= 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "tolerances rtol={} atol={} outside the supported range",
                self.rtol, self.atol
            )));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(Error::InvalidArgument(format!("max_step {h}")));
            }
        }
        Ok(())
    }
}

/// Final state and diagnostics of an integration.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeResult {
    pub y_end: Vec<Complex64>,
    pub steps: usize,
    pub rejected: usize,
    /// Largest normalised local error estimate over accepted steps; values
    /// above 1 never occur because such steps are rejected.
    pub max_err_est: f64,
}

/// An accepted step, handed to the observer of [`solve_param`].
#[derive(Debug)]
pub struct StepInfo<'a> {
    pub tau_prev: f64,
    pub y_prev: &'a [Complex64],
    pub tau: f64,
    pub y: &'a [Complex64],
}

/// Integrates `field` along `path` starting from `y0`.
pub fn integrate_ode<F>(
    field: F,
    path: &ComplexPath,
    y0: &[Complex64],
    rtol: f64,
    atol: f64,
) -> Result<OdeResult>
where
    F: FnMut(Complex64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    integrate_ode_with(field, path, y0, OdeOptions::new(rtol, atol))
}

/// As [`integrate_ode`] with full control over the options.
pub fn integrate_ode_with<F>(
    mut field: F,
    path: &ComplexPath,
    y0: &[Complex64],
    opts: OdeOptions,
) -> Result<OdeResult>
where
    F: FnMut(Complex64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    opts.validate()?;
    let mut y = y0.to_vec();
    let mut total = OdeResult { y_end: Vec::new(), steps: 0, rejected: 0, max_err_est: 0.0 };
    for (k, seg) in path.segments().iter().enumerate() {
        let len = seg.length();
        if len == 0.0 {
            continue;
        }
        let mut seg_opts = opts;
        seg_opts.max_step = opts.max_step.map(|h| h / len);
        let rhs = |tau: f64, y: &[Complex64], dy: &mut [Complex64]| -> Result<()> {
            field(seg.point(tau), y, dy)?;
            let dt = seg.tangent(tau);
            dy.iter_mut().for_each(|d| *d *= dt);
            Ok(())
        };
        let res = solve_param(rhs, 0.0, 1.0, &y, seg_opts, |_| ControlFlow::Continue(()))
            .map_err(|e| match e {
                Error::StepUnderflow { tau, .. } => Error::StepUnderflow { segment: k, tau },
                Error::NonFinite { tau, .. } => Error::NonFinite { segment: k, tau },
                other => other,
            })?;
        y = res.y_end;
        total.steps += res.steps;
        total.rejected += res.rejected;
        total.max_err_est = total.max_err_est.max(res.max_err_est);
    }
    total.y_end = y;
    Ok(total)
}

/// Integrates `dy/dtau = rhs(tau, y)` from `tau0` to `tau1`.
///
/// The observer sees every accepted step and may stop the integration early
/// by returning `ControlFlow::Break`; the result then holds the state at the
/// last accepted step.
pub fn solve_param<F, O>(
    mut rhs: F,
    tau0: f64,
    tau1: f64,
    y0: &[Complex64],
    opts: OdeOptions,
    mut observer: O,
) -> Result<OdeResult>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
    O: FnMut(StepInfo<'_>) -> ControlFlow<()>,
{
    opts.validate()?;
    let n = y0.len();
    let span = tau1 - tau0;
    let dir = span.signum();
    let mut out = OdeResult { y_end: y0.to_vec(), steps: 0, rejected: 0, max_err_est: 0.0 };
    if span == 0.0 || n == 0 {
        return Ok(out);
    }
    let h_max = opts.max_step.unwrap_or(f64::INFINITY).min(span.abs());
    let h_min = UNDERFLOW * span.abs();

    let mut work = Work::new(n);
    let mut y = y0.to_vec();
    let mut comp = vec![Complex64::new(0.0, 0.0); n];
    let mut tau = tau0;
    let mut tau_comp = 0.0;
    let mut f0 = vec![Complex64::new(0.0, 0.0); n];
    eval(&mut rhs, tau, &y, &mut f0)?;
    let mut h = initial_step(&mut rhs, tau, &y, &f0, dir, h_max, &opts, &mut work)?;
    let mut y_prev = y.clone();

    loop {
        if out.steps + out.rejected >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let remaining = tau1 - tau;
        let last = h >= remaining.abs();
        let step = if last { remaining } else { dir * h };
        let err = attempt(&mut rhs, tau, &y, &f0, step, &opts, &mut work)?;
        if err > 1.0 {
            out.rejected += 1;
            let fac = (SAFETY * err.powf(-1.0 / 8.0)).max(MIN_FACTOR);
            h = step.abs() * fac;
            if h < h_min {
                return Err(Error::StepUnderflow { segment: 0, tau });
            }
            continue;
        }
        out.steps += 1;
        out.max_err_est = out.max_err_est.max(err);
        y_prev.copy_from_slice(&y);
        let tau_prev = tau;
        for i in 0..n {
            let t = work.incr[i] - comp[i];
            let s = y[i] + t;
            comp[i] = (s - y[i]) - t;
            y[i] = s;
        }
        if last {
            tau = tau1;
        } else {
            let t = step - tau_comp;
            let s = tau + t;
            tau_comp = (s - tau) - t;
            tau = s;
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { segment: 0, tau });
        }
        let flow = observer(StepInfo { tau_prev, y_prev: &y_prev, tau, y: &y });
        if last || flow.is_break() {
            out.y_end = y;
            return Ok(out);
        }
        eval(&mut rhs, tau, &y, &mut f0)?;
        let fac = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * err.powf(-1.0 / 8.0)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        h = (step.abs() * fac).min(h_max);
        if h < h_min {
            return Err(Error::StepUnderflow { segment: 0, tau });
        }
    }
}

/// One Dormand-Prince step of size `h` without error control. Used for
/// event location inside an accepted step, whose size already satisfies the
/// tolerance.
pub(crate) fn single_step<F>(
    rhs: &mut F,
    tau: f64,
    y: &[Complex64],
    h: f64,
) -> Result<Vec<Complex64>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    let n = y.len();
    let mut work = Work::new(n);
    let mut f0 = vec![Complex64::new(0.0, 0.0); n];
    eval(rhs, tau, y, &mut f0)?;
    let opts = OdeOptions::new(1e-2, 1e-2);
    attempt(rhs, tau, y, &f0, h, &opts, &mut work)?;
    Ok(y.iter().zip(&work.incr).map(|(a, b)| a + b).collect())
}

struct Work {
    k: Vec<Vec<Complex64>>,
    tmp: Vec<Complex64>,
    incr: Vec<Complex64>,
}

impl Work {
    fn new(n: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Work { k: vec![vec![z; n]; STAGES], tmp: vec![z; n], incr: vec![z; n] }
    }
}

fn eval<F>(rhs: &mut F, tau: f64, y: &[Complex64], dy: &mut [Complex64]) -> Result<()>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    rhs(tau, y, dy)?;
    if dy.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { segment: 0, tau });
    }
    Ok(())
}

// Computes the stages of one step into `work`, leaves the increment in
// `work.incr` and returns the normalised error estimate.
fn attempt<F>(
    rhs: &mut F,
    tau: f64,
    y: &[Complex64],
    f0: &[Complex64],
    h: f64,
    opts: &OdeOptions,
    work: &mut Work,
) -> Result<f64>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    let n = y.len();
    work.k[0].copy_from_slice(f0);
    for s in 1..STAGES {
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..s {
                acc += work.k[j][i] * A[s][j];
            }
            work.tmp[i] = y[i] + acc * h;
        }
        match eval(rhs, tau + C[s] * h, &work.tmp, &mut work.k[s]) {
            Ok(()) => {}
            // A non-finite stage inside a trial step is treated as a huge
            // error so the step is retried smaller.
            Err(Error::NonFinite { .. }) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    let mut e5 = 0.0;
    let mut e3 = 0.0;
    for i in 0..n {
        let mut inc = Complex64::new(0.0, 0.0);
        let mut er5 = Complex64::new(0.0, 0.0);
        let mut er3 = Complex64::new(0.0, 0.0);
        for s in 0..STAGES {
            let k = work.k[s][i];
            inc += k * B[s];
            er5 += k * E5[s];
            er3 += k * E3[s];
        }
        work.incr[i] = inc * h;
        let y_new = y[i] + work.incr[i];
        let scale = opts.atol + opts.rtol * y[i].norm().max(y_new.norm());
        e5 += (er5 / scale).norm_sqr();
        e3 += (er3 / scale).norm_sqr();
    }
    if !(e5.is_finite() && e3.is_finite()) {
        return Ok(f64::INFINITY);
    }
    if e5 == 0.0 && e3 == 0.0 {
        return Ok(0.0);
    }
    let denom = e5 + 0.01 * e3;
    Ok(h.abs() * e5 / (denom * n as f64).sqrt())
}

#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    rhs: &mut F,
    tau: f64,
    y: &[Complex64],
    f0: &[Complex64],
    dir: f64,
    h_max: f64,
    opts: &OdeOptions,
    work: &mut Work,
) -> Result<f64>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    let n = y.len() as f64;
    let scale: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.norm()).collect();
    let rms = |v: &[Complex64]| -> f64 {
        (v.iter().zip(&scale).map(|(a, s)| (a / s).norm_sqr()).sum::<f64>() / n).sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(h_max);
    for i in 0..y.len() {
        work.tmp[i] = y[i] + f0[i] * (dir * h0);
    }
    let mut f1 = vec![Complex64::new(0.0, 0.0); y.len()];
    let tmp = work.tmp.clone();
    if eval(rhs, tau + dir * h0, &tmp, &mut f1).is_err() {
        return Ok(h0 * 1e-3);
    }
    let diff: Vec<Complex64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
        (1e-6f64).max(h0 * 1e-3)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 8.0)
    };
    Ok((100.0 * h0).min(h1).min(h_max))
}
