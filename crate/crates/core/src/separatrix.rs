//! The reduced pendulum `H_pend(lambda, Lambda) = -(3/2) Lambda^2 + V(lambda)`,
//! its homoclinic loop at energy `-1/2`, and the singularities of the loop's
//! analytic continuation in complex time.
//!
//! In the variable `q = cos(lambda/2)` the loop solves
//! `dt/dq = f(q) = sqrt(F(q)) / (q - 1)` with
//! `F(q) = q / (3 (q+1) (q-a+) (q-a-))` and `a+- = (-1 +- sqrt 2)/2`.
//! Integrals of `f` are taken on its Riemann surface by carrying the
//! continuous arguments of the four linear factors along the path.

use crate::numerics::{integrate_ode, quad_path_nodes, ComplexPath, Node, QuadResult, Segment};
use crate::{Complex64, Error, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2};

/// `a+ = (sqrt 2 - 1) / 2`, the turning value `q(0)`.
pub const A_PLUS: f64 = (SQRT_2 - 1.0) / 2.0;
/// `a- = -(1 + sqrt 2) / 2`.
pub const A_MINUS: f64 = -(1.0 + SQRT_2) / 2.0;
/// Truncation radius of integrals to infinity.
pub const R_MAX: f64 = 1e4;
/// Radius of the half-circle detours around branch points and the pole.
pub const DETOUR: f64 = 1e-3;

const CENTERS: [f64; 4] = [0.0, -1.0, A_PLUS, A_MINUS];
const COLLISION: f64 = 1e-8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A point of the (complexified) pendulum phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumState {
    pub lambda: Complex64,
    pub big_lambda: Complex64,
}

impl PendulumState {
    pub fn energy(&self) -> Result<Complex64> {
        h_pend(self.lambda, self.big_lambda)
    }
}

/// `V(lambda) = 1 - cos(lambda) - 1/sqrt(2 + 2 cos(lambda))` for real angles.
pub fn potential_v(lambda: f64) -> Result<f64> {
    let s = 2.0 + 2.0 * lambda.cos();
    if s < COLLISION * COLLISION {
        return Err(Error::CollisionSingularity(format!("lambda = {lambda}")));
    }
    Ok(1.0 - lambda.cos() - 1.0 / s.sqrt())
}

// 2 cos(lambda/2): the continuation of sqrt(2 + 2 cos) from the strip
// |Re lambda| < pi, analytic away from lambda = pi (mod 2 pi).
fn root_term(lambda: Complex64) -> Result<Complex64> {
    let r = 2.0 * (lambda / 2.0).cos();
    if r.norm() < COLLISION {
        return Err(Error::CollisionSingularity(format!("lambda = {lambda}")));
    }
    Ok(r)
}

/// Analytic continuation of [`potential_v`].
pub fn potential_v_complex(lambda: Complex64) -> Result<Complex64> {
    Ok(1.0 - lambda.cos() - 1.0 / root_term(lambda)?)
}

pub fn h_pend(lambda: Complex64, big_lambda: Complex64) -> Result<Complex64> {
    Ok(-1.5 * big_lambda * big_lambda + potential_v_complex(lambda)?)
}

/// `(d lambda/dt, d Lambda/dt) = (-3 Lambda, -V'(lambda))`.
pub fn pend_rhs(lambda: Complex64, big_lambda: Complex64) -> Result<(Complex64, Complex64)> {
    let r = root_term(lambda)?;
    Ok((-3.0 * big_lambda, -lambda.sin() * (1.0 - 1.0 / (r * r * r))))
}

/// `lambda_0 = 2 arccos(a+)`, the turning point of the loop.
pub fn lambda0() -> f64 {
    2.0 * A_PLUS.acos()
}

/// The half-width `A` of the analyticity strip, with quadrature diagnostics.
pub fn compute_a_detailed(tol: f64) -> Result<QuadResult> {
    if !(tol >= 1e-13) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} below 1e-13")));
    }
    let path = ComplexPath::line(c(0.0, 0.0), c(A_PLUS, 0.0))?;
    let r = quad_path_nodes(
        |n: &Node| {
            let x = n.t.re;
            let gap = -n.from_end.re;
            let v = x / (3.0 * (x + 1.0) * gap * (x - A_MINUS));
            c(v.sqrt() / (1.0 - x), 0.0)
        },
        &path,
        tol,
    )?;
    Ok(r)
}

pub fn compute_a(tol: f64) -> Result<f64> {
    Ok(compute_a_detailed(tol)?.value.re)
}

/// `A` through the rescaled integrand `2/(1-x) sqrt(x/(3(x+1)(1-4x-4x^2)))`.
pub fn compute_a_alternate(tol: f64) -> Result<f64> {
    let path = ComplexPath::line(c(0.0, 0.0), c(A_PLUS, 0.0))?;
    let r = quad_path_nodes(
        |n: &Node| {
            let x = n.t.re;
            let d = n.from_end.re;
            // 1 - 4x - 4x^2 factored about its root a+.
            let quad = -4.0 * d * (SQRT_2 + d);
            c(2.0 / (1.0 - x) * (x / (3.0 * (x + 1.0) * quad)).sqrt(), 0.0)
        },
        &path,
        tol,
    )?;
    Ok(r.value.re)
}

/// Residue of `f` at its pole `q = 1` on the principal sheet, `sqrt(2/21)`.
pub fn residue_pole() -> f64 {
    (1.0 / (6.0 * (1.0 - A_PLUS) * (1.0 - A_MINUS))).sqrt()
}

/// `(1/2 pi i)` times the integral of `f` around the circle `|q - 1| = radius`.
pub fn residue_pole_numeric(radius: f64) -> Result<Complex64> {
    if !(radius > 1e-6 && radius < 0.2) {
        return Err(Error::InvalidArgument(format!("radius {radius} outside (1e-6, 0.2)")));
    }
    let path = ComplexPath::arc(c(1.0, 0.0), radius, -PI, PI)?;
    let start = BranchedPoint { q: path.start(), accumulated_args: [0.0; 4] };
    let (r, _) = integrate_f_hat(start, &path, 1e-13)?;
    Ok(r.value / c(0.0, 2.0 * PI))
}

/// A point of the Riemann surface of `f`: the value `q` with the continuous
/// arguments of `q`, `q + 1`, `q - a+` and `q - a-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedPoint {
    pub q: Complex64,
    pub accumulated_args: [f64; 4],
}

impl BranchedPoint {
    /// `f(q)` on the sheet selected by the accumulated arguments.
    pub fn f_hat(&self) -> Complex64 {
        let d: [Complex64; 4] = std::array::from_fn(|j| self.q - CENTERS[j]);
        f_from_factors(&d, &self.accumulated_args, self.q - 1.0)
    }
}

fn f_from_factors(d: &[Complex64; 4], args: &[f64; 4], q_minus_one: Complex64) -> Complex64 {
    let modulus = d[0].norm() / (3.0 * d[1].norm() * d[2].norm() * d[3].norm());
    let phase = 0.5 * (args[0] - args[1] - args[2] - args[3]);
    Complex64::from_polar(modulus.sqrt(), phase) / q_minus_one
}

// Offset of a quadrature node from `center`, accurate near segment ends.
fn node_offset(seg: &Segment, n: &Node, center: Complex64) -> Complex64 {
    let (p0, p1) = (seg.start(), seg.end());
    if p0 == center {
        n.from_start
    } else if p1 == center {
        n.from_end
    } else if n.from_start.norm() <= n.from_end.norm() {
        (p0 - center) + n.from_start
    } else {
        (p1 - center) + n.from_end
    }
}

// Change of arg(q - center) over a whole segment.
fn segment_winding(seg: &Segment, center: Complex64) -> f64 {
    match *seg {
        Segment::Arc { center: k, phi_start, phi_end, .. } if k == center => phi_end - phi_start,
        _ => ((seg.end() - center) / (seg.start() - center)).arg(),
    }
}

/// Integrates `f` along `path` from `start`, whose `q` must be the path's
/// start. Factors that vanish at the start take their argument from the
/// direction of the first segment. Returns the integral and the branched
/// endpoint.
pub fn integrate_f_hat(
    start: BranchedPoint,
    path: &ComplexPath,
    tol: f64,
) -> Result<(QuadResult, BranchedPoint)> {
    if (start.q - path.start()).norm() > 1e-14 {
        return Err(Error::InvalidPath("start point does not match the path".into()));
    }
    let segs = path.segments();
    let mut args = start.accumulated_args;
    let mut seg_args = Vec::with_capacity(segs.len());
    for (k, seg) in segs.iter().enumerate() {
        let mut a = args;
        for j in 0..4 {
            let cj = c(CENTERS[j], 0.0);
            if seg.start() == cj {
                if k > 0 {
                    return Err(Error::InvalidPath(format!("path passes through branch point {cj}")));
                }
                let dir = seg.point(1e-3) - cj;
                a[j] = dir.arg();
            }
        }
        seg_args.push(a);
        for j in 0..4 {
            let cj = c(CENTERS[j], 0.0);
            if seg.end() == cj {
                if k + 1 < segs.len() {
                    return Err(Error::InvalidPath(format!("path passes through branch point {cj}")));
                }
                continue;
            }
            if seg.start() == cj {
                args[j] = (seg.end() - cj).arg();
            } else {
                args[j] = a[j] + segment_winding(seg, cj);
            }
        }
    }

    let integrand = |n: &Node| {
        let seg = &segs[n.segment];
        let base = seg_args[n.segment];
        let mut d = [c(0.0, 0.0); 4];
        let mut a = [0.0; 4];
        for j in 0..4 {
            let cj = c(CENTERS[j], 0.0);
            d[j] = node_offset(seg, n, cj);
            a[j] = if seg.start() == cj {
                base[j] + (d[j] / (seg.point(1e-3) - cj)).arg()
            } else if seg.end() == cj || n.from_start.norm() <= n.from_end.norm() {
                base[j] + (d[j] / (seg.start() - cj)).arg()
            } else {
                base[j] + segment_winding(seg, cj) + (d[j] / (seg.end() - cj)).arg()
            };
        }
        f_from_factors(&d, &a, node_offset(seg, n, c(1.0, 0.0)))
    };
    let r = quad_path_nodes(integrand, path, tol)?;
    Ok((r, BranchedPoint { q: path.end(), accumulated_args: args }))
}

/// Homotopy classes of paths from `a+` to the singular values `q = 0` and
/// `q = infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    ToZeroUpper,
    ToZeroLower,
    ToInfinityUpper,
    ToInfinityLower,
}

/// The integration path in the `q`-plane for `kind`.
pub fn t_star_path(kind: PathKind) -> Result<ComplexPath> {
    let ap = c(A_PLUS, 0.0);
    let one = c(1.0, 0.0);
    let path = match kind {
        PathKind::ToZeroUpper | PathKind::ToZeroLower => {
            let sweep = if kind == PathKind::ToZeroUpper { PI } else { -PI };
            ComplexPath::line(ap, ap + DETOUR)?.arc_by(ap, sweep).line_to(c(0.0, 0.0))
        }
        PathKind::ToInfinityUpper | PathKind::ToInfinityLower => {
            let sweep = if kind == PathKind::ToInfinityUpper { -PI } else { PI };
            ComplexPath::line(ap, one - DETOUR)?
                .arc_by(one, sweep)
                .line_to(c(1.1, 0.0))
                .line_to(c(10.0, 0.0))
                .line_to(c(R_MAX, 0.0))
        }
    };
    ComplexPath::new(path.segments().to_vec())
}

/// The singular time `t* = integral of f` along the path of `kind`, at
/// quadrature tolerance `tol`. Paths to infinity add the analytic tail
/// `1/(sqrt(3) R_MAX)` beyond the truncation radius.
pub fn t_star_with(kind: PathKind, tol: f64) -> Result<Complex64> {
    let path = t_star_path(kind)?;
    let start = BranchedPoint { q: c(A_PLUS, 0.0), accumulated_args: [0.0; 4] };
    let (r, _) = integrate_f_hat(start, &path, tol)?;
    Ok(match kind {
        PathKind::ToInfinityUpper | PathKind::ToInfinityLower => {
            r.value + 1.0 / (3f64.sqrt() * R_MAX)
        }
        _ => r.value,
    })
}

pub fn t_star(kind: PathKind) -> Result<Complex64> {
    t_star_with(kind, 1e-12)
}

/// The loop `(lambda_h, Lambda_h)` continued along `path` (from `t = 0`).
pub fn sigma_with(path: &ComplexPath, rtol: f64) -> Result<PendulumState> {
    if path.start().norm() > 1e-14 {
        return Err(Error::InvalidPath("separatrix paths start at t = 0".into()));
    }
    let y0 = [c(lambda0(), 0.0), c(0.0, 0.0)];
    let res = integrate_ode(
        |_t, y, dy| {
            let (a, b) = pend_rhs(y[0], y[1])?;
            dy[0] = a;
            dy[1] = b;
            Ok(())
        },
        path,
        &y0,
        rtol,
        1e-15,
    )?;
    Ok(PendulumState { lambda: res.y_end[0], big_lambda: res.y_end[1] })
}

pub fn sigma(path: &ComplexPath) -> Result<PendulumState> {
    sigma_with(path, 1e-13)
}

/// The loop at `t`, continued along the straight segment from 0.
pub fn sigma_at(t: Complex64) -> Result<PendulumState> {
    if t.norm() == 0.0 {
        return Ok(PendulumState { lambda: c(lambda0(), 0.0), big_lambda: c(0.0, 0.0) });
    }
    sigma(&ComplexPath::line(c(0.0, 0.0), t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    Branch23,
    Pole,
}

/// Local behaviour `c (t - t*)^p` fitted near a singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityReport {
    pub t_star: Complex64,
    pub kind: SingularityKind,
    pub fitted_exponent: f64,
    pub fitted_coefficient: Complex64,
}

/// Fit of both components of the loop near `t = iA`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchFit {
    /// `lambda_h - pi ~ c (t - iA)^p`.
    pub lambda: SingularityReport,
    /// `Lambda_h ~ c (t - iA)^p`.
    pub big_lambda: SingularityReport,
    /// Root-mean-square residual of the worse of the two regressions.
    pub residual: f64,
}

/// Default sample offsets: nine geometric points in `[1e-4, 1e-2]`.
pub fn default_offsets() -> Vec<f64> {
    (0..9).map(|k| 1e-4 * 10f64.powf(k as f64 / 4.0)).collect()
}

/// Fits the local expansion of the loop along `t = i(A - s)`.
///
/// Each regression is `log|y| = p log s + log|c| + k s^(2/3)`; the last term
/// absorbs the next order of the Puiseux expansion, which is not negligible
/// at `s = 1e-2`. Arguments are measured with `arg(t - iA) = -pi/2`.
pub fn fit_branch(t_offsets: &[f64]) -> Result<BranchFit> {
    if t_offsets.len() < 4 {
        return Err(Error::InvalidArgument("at least four offsets are needed".into()));
    }
    if t_offsets.iter().any(|s| !(*s > 0.0 && *s < 0.1)) {
        return Err(Error::InvalidArgument("offsets must lie in (0, 0.1)".into()));
    }
    let a = compute_a(1e-13)?;
    let t_star = c(0.0, a);
    let states = t_offsets
        .iter()
        .map(|&s| sigma_at(c(0.0, a - s)))
        .collect::<Result<Vec<_>>>()?;
    let design = DMatrix::from_fn(t_offsets.len(), 3, |i, j| match j {
        0 => t_offsets[i].ln(),
        1 => 1.0,
        _ => t_offsets[i].powf(2.0 / 3.0),
    });
    let fit = |values: Vec<Complex64>| -> Result<(f64, Complex64, f64)> {
        let rhs = DVector::from_iterator(values.len(), values.iter().map(|v| v.norm().ln()));
        let sol = design
            .clone()
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::FitRejected(e.to_string()))?;
        let resid = &design * &sol - &rhs;
        let rms = (resid.norm_squared() / values.len() as f64).sqrt();
        let p = sol[0];
        // Phase from the sample closest to the singularity.
        let (i0, _) = t_offsets
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty");
        let phase = values[i0].arg() + p * PI / 2.0;
        Ok((p, Complex64::from_polar(sol[1].exp(), phase), rms))
    };
    let (p1, c1, r1) = fit(states.iter().map(|s| s.lambda - PI).collect())?;
    let (p2, c2, r2) = fit(states.iter().map(|s| s.big_lambda).collect())?;
    let residual = r1.max(r2);
    if residual > 1e-2 {
        return Err(Error::FitRejected(format!("regression residual {residual:.3e}")));
    }
    if !(0.6..=0.74).contains(&p1) {
        return Err(Error::FitRejected(format!("exponent {p1} is not a 2/3 branch")));
    }
    let report = |p, coef| SingularityReport {
        t_star,
        kind: SingularityKind::Branch23,
        fitted_exponent: p,
        fitted_coefficient: coef,
    };
    Ok(BranchFit { lambda: report(p1, c1), big_lambda: report(p2, c2), residual })
}

/// Result of scanning `|Lambda_h|` over a grid of the strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroScan {
    pub min_abs: f64,
    pub at: Complex64,
    pub points: usize,
}

/// Minimum of `|Lambda_h|` over the grid `Re t in [-re_max, re_max]`,
/// `|Im t| <= A` with the given spacing, excluding disks of radius `0.05`
/// around `0` and `+-iA`.
pub fn check_zero_of_lambda(spacing: f64, re_max: f64) -> Result<ZeroScan> {
    if !(spacing > 0.0 && spacing <= 0.02) {
        return Err(Error::InvalidArgument(format!("grid spacing {spacing} above 0.02")));
    }
    if !(re_max > 0.0) {
        return Err(Error::InvalidArgument(format!("re_max {re_max}")));
    }
    let a = compute_a(1e-13)?;
    let nx = (2.0 * re_max / spacing).ceil() as usize;
    let ny = (2.0 * a / spacing).ceil() as usize;
    let mut grid = Vec::new();
    for i in 0..=nx {
        for j in 0..=ny {
            let t = c(-re_max + 2.0 * re_max * i as f64 / nx as f64, -a + 2.0 * a * j as f64 / ny as f64);
            let excluded = [c(0.0, 0.0), c(0.0, a), c(0.0, -a)]
                .iter()
                .any(|z| (t - z).norm() < 0.05);
            if !excluded {
                grid.push(t);
            }
        }
    }
    let values = grid
        .par_iter()
        .map(|&t| sigma_at(t).map(|s| s.big_lambda.norm()))
        .collect::<Result<Vec<_>>>()?;
    let (k, &min_abs) = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .ok_or_else(|| Error::InvalidArgument("empty grid".into()))?;
    Ok(ZeroScan { min_abs, at: grid[k], points: grid.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn energy_residual(s: &PendulumState) -> f64 {
        (s.energy().unwrap() + 0.5).norm()
    }

    #[test]
    fn potential_values() {
        assert!((potential_v(0.0).unwrap() + 0.5).abs() < 1e-15);
        assert!((potential_v(2.0 * PI / 3.0).unwrap() - 0.5).abs() < 1e-14);
        let (_, dl) = pend_rhs(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(dl, c(0.0, 0.0));
        assert!(matches!(potential_v(PI), Err(Error::CollisionSingularity(_))));
        let z = c(0.7, 0.2);
        let v = potential_v_complex(z).unwrap();
        let direct = 1.0 - z.cos() - 1.0 / (2.0 + 2.0 * z.cos()).sqrt();
        assert!((v - direct).norm() < 1e-14);
    }

    #[test]
    fn turning_point() {
        // Bisection oracle for V = -1/2 on (2 pi/3, pi).
        let (mut lo, mut hi) = (2.0 * PI / 3.0, PI - 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if potential_v(mid).unwrap() + 0.5 > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lambda0() - lo).abs() < 1e-12);
        assert!(((lambda0() / 2.0).cos() - A_PLUS).abs() < 1e-14);
        assert!((potential_v(lambda0()).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn constant_a() {
        let a = compute_a(1e-12).unwrap();
        assert!((a - 0.177744).abs() < 1e-5, "{a}");
        assert!((0.06..=0.3).contains(&a));
        assert!((compute_a_alternate(1e-12).unwrap() - a).abs() < 1e-9);
    }

    #[test]
    fn pole_residue() {
        assert!((residue_pole() - (2.0f64 / 21.0).sqrt()).abs() < 1e-15);
        let r = residue_pole_numeric(1e-3).unwrap();
        assert!((r - residue_pole()).norm() < 1e-8, "{r}");
    }

    #[test]
    fn sign_flip_on_second_sheet() {
        let p = BranchedPoint { q: c(0.3, 0.2), accumulated_args: [0.1, 0.05, 1.0, 0.02] };
        for j in 0..4 {
            let mut other = p;
            other.accumulated_args[j] += 2.0 * PI;
            assert!((p.f_hat() + other.f_hat()).norm() < 1e-13);
        }
    }

    #[test]
    fn singular_times() {
        let a = compute_a(1e-13).unwrap();
        let up = t_star(PathKind::ToZeroUpper).unwrap();
        assert!(up.re.abs() < 1e-6 && (up.im + a).abs() < 1e-6, "{up}");
        let down = t_star(PathKind::ToZeroLower).unwrap();
        assert!((down - up.conj()).norm() < 1e-10);
        let inf = t_star(PathKind::ToInfinityUpper).unwrap();
        assert!((inf - c(-0.086697, -0.969516)).norm() < 1e-4, "{inf}");
        let inf_low = t_star(PathKind::ToInfinityLower).unwrap();
        assert!((inf_low - inf.conj()).norm() < 1e-10);
        assert!((inf.im.abs() - PI * residue_pole()).abs() < 1e-6);
    }

    #[test]
    fn homotopy_invariance() {
        let ap = c(A_PLUS, 0.0);
        let start = BranchedPoint { q: ap, accumulated_args: [0.0; 4] };
        let tol = 1e-11;
        let wide = ComplexPath::line(ap, ap + 0.05).unwrap().arc_by(ap, PI).line_to(c(0.0, 0.0));
        let high = ComplexPath::line(ap, ap + c(0.0, 0.1))
            .unwrap()
            .line_to(c(0.02, 0.1))
            .line_to(c(0.0, 0.0));
        let (a, _) = integrate_f_hat(start, &wide, tol).unwrap();
        let (b, _) = integrate_f_hat(start, &high, tol).unwrap();
        let reference = t_star_with(PathKind::ToZeroUpper, tol).unwrap();
        assert!((a.value - reference).norm() < 10.0 * tol, "{} {}", a.value, reference);
        assert!((b.value - reference).norm() < 10.0 * tol, "{} {}", b.value, reference);
    }

    #[test]
    fn real_loop_properties() {
        for t in [0.5, 2.0, 6.0, 10.0] {
            let plus = sigma_at(c(t, 0.0)).unwrap();
            let minus = sigma_at(c(-t, 0.0)).unwrap();
            assert!((plus.big_lambda + minus.big_lambda).norm() < 1e-9);
            assert!(energy_residual(&plus) < 1e-9);
            let q = (plus.lambda.re / 2.0).cos();
            assert!((A_PLUS..1.0).contains(&q));
            let bl = plus.big_lambda.re;
            let identity = 4.0 / (3.0 * q) * (1.0 - q) * (q - A_PLUS) * (q - A_MINUS);
            assert!((bl * bl - identity).abs() < 1e-9);
            // dq/dt = (3/2) sin(lambda/2) Lambda.
            let qdot = 1.5 * (plus.lambda.re / 2.0).sin() * bl;
            let rhs = 3.0 / q * (q - 1.0).powi(2) * (q + 1.0) * (q - A_MINUS) * (q - A_PLUS);
            assert!((qdot * qdot - rhs).abs() < 1e-8);
        }
        let origin = sigma_at(c(0.0, 0.0)).unwrap();
        assert!(origin.big_lambda.norm() < 1e-10);
    }

    #[test]
    fn complex_time_conserves_energy() {
        // 0.5i lies beyond iA; reach it by passing to the right of the singularity.
        let around = ComplexPath::line(c(0.0, 0.0), c(0.3, 0.0))
            .unwrap()
            .line_to(c(0.3, 0.5))
            .line_to(c(0.0, 0.5));
        let s = sigma(&around).unwrap();
        assert!(s.lambda.im.abs() > 0.0 || s.big_lambda.im.abs() > 0.0);
        assert!(energy_residual(&s) < 1e-9);
        let bent = ComplexPath::line(c(0.0, 0.0), c(0.4, 0.1)).unwrap().line_to(c(-0.2, 0.15));
        assert!(energy_residual(&sigma(&bent).unwrap()) < 1e-9);
    }

    #[test]
    fn branch_fit() {
        let f = fit_branch(&default_offsets()).unwrap();
        assert!((f.lambda.fitted_exponent - 2.0 / 3.0).abs() < 0.02);
        let modulus = 3.0 * 2f64.powf(-1.0 / 3.0);
        assert!((f.lambda.fitted_coefficient.norm() / modulus - 1.0).abs() < 0.02);
        assert!((f.big_lambda.fitted_exponent + 1.0 / 3.0).abs() < 0.02);
    }
}
