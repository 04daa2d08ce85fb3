//! Bracketed scalar root finding.

use crate::{Error, Result};

const MAX_ITER: usize = 200;

/// Finds a root of `g` in `[lo, hi]` by secant-Newton steps safeguarded
/// with bisection. Stops once `|g(x)| <= tol` or the bracket is narrower
/// than `tol`.
pub fn find_root<G>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let mut prev: Option<(f64, f64)> = None;
    solve(
        |x| {
            let gx = g(x);
            let slope = match prev {
                Some((xp, gp)) if xp != x => (gx - gp) / (x - xp),
                _ => f64::NAN,
            };
            prev = Some((x, gx));
            (gx, slope)
        },
        lo,
        hi,
        tol,
    )
}

/// Safeguarded Newton iteration; `g` returns the value and the derivative.
pub fn find_root_newton<G>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> (f64, f64),
{
    solve(g, lo, hi, tol)
}

fn solve<G>(mut g: G, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (ga, _) = g(a);
    let (gb, _) = g(b);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if ga.signum() == gb.signum() || ga.is_nan() || gb.is_nan() {
        return Err(Error::NoBracket { glo: ga, ghi: gb });
    }
    let sa = ga.signum();
    let mut x = 0.5 * (a + b);
    let mut width_before = b - a;
    for _ in 0..MAX_ITER {
        let (gx, dg) = g(x);
        if gx.abs() <= tol || gx == 0.0 {
            return Ok(x);
        }
        if gx.signum() == sa {
            a = x;
        } else {
            b = x;
        }
        if b - a <= tol {
            return Ok(0.5 * (a + b));
        }
        let newton = x - gx / dg;
        let shrinking = b - a <= 0.5 * width_before;
        x = if newton.is_finite() && newton > a && newton < b && shrinking {
            newton
        } else {
            width_before = b - a;
            0.5 * (a + b)
        };
        if !shrinking {
            width_before = b - a;
        }
    }
    Ok(x)
}
