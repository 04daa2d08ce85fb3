//! The acceptance checks behind `l3lab verify`.
//!
//! Every check returns a deterministic one-line summary; timings are
//! collected separately. Reproducibility of the whole run is checked by
//! comparing two invocations of the binary.

use l3lab_core::inner::{
    diff_structure, gradient_gate, inner_samples, series_residual_order, theta_table,
    verify_inner_limit, ShootOptions,
};
use l3lab_core::rpc3bp::{d_exact, d_series, locate_l3, PoincareState};
use l3lab_core::separatrix::{
    compute_a, compute_a_alternate, default_offsets, fit_branch, residue_pole,
    residue_pole_numeric, t_star, PathKind,
};
use l3lab_core::splitting::fit_splitting_exponent;
use l3lab_core::{Complex64, Result};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

/// Reference value of the strip half-width.
pub const A_REF: f64 = 0.177744;
/// Reference Stokes estimates for rho = 13..=20.
pub const THETA_TABLE: [(f64, f64); 8] = [
    (13.0, 1.6373),
    (14.0, 1.6361),
    (15.0, 1.6351),
    (16.0, 1.6341),
    (17.0, 1.6333),
    (18.0, 1.6326),
    (19.0, 1.6320),
    (20.0, 1.6315),
];
/// Reference value of the singular time reached through infinity.
pub const T_STAR_INFINITY: (f64, f64) = (-0.086697, -0.969516);
/// Mass ratios of the splitting fit.
pub const SPLITTING_GRID: [f64; 5] = [1e-3, 1.25e-3, 1.5e-3, 1.75e-3, 2e-3];

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

fn check(id: u32, name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Criterion {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Criterion { id, name, pass, detail, elapsed: start.elapsed() }
}

pub fn a_constant() -> Criterion {
    check(1, "A-constant", || {
        let start = Instant::now();
        let a = compute_a(1e-12)?;
        let fast = start.elapsed() < Duration::from_secs(1);
        let pass = (a - A_REF).abs() <= 1e-5 && (0.06..=0.3).contains(&a) && fast;
        Ok((pass, format!("A = {a:.12}, |A - {A_REF}| = {:.2e}, under 1 s: {fast}", (a - A_REF).abs())))
    })
}

pub fn a_forms() -> Criterion {
    check(2, "A printed forms", || {
        let d = (compute_a(1e-12)? - compute_a_alternate(1e-12)?).abs();
        Ok((d <= 1e-9, format!("difference {d:.2e}")))
    })
}

pub fn pole_residue() -> Criterion {
    check(3, "pole residue", || {
        let r = residue_pole_numeric(1e-3)?;
        let exact = (2.0f64 / 21.0).sqrt();
        let e1 = (r - exact).norm();
        let e2 = (PI * r.re - 0.969516).abs();
        Ok((
            e1 <= 1e-8 && e2 <= 1e-6 && (residue_pole() - exact).abs() < 1e-15,
            format!("residue {:.12} (err {e1:.2e}), pi*residue {:.9} (err {e2:.2e})", r.re, PI * r.re),
        ))
    })
}

pub fn visible_singularities() -> Criterion {
    check(4, "visible singularities", || {
        let a = compute_a(1e-13)?;
        let t1 = t_star(PathKind::ToZeroUpper)?;
        let t2 = t_star(PathKind::ToInfinityUpper)?;
        let ok1 = t1.re.abs() <= 1e-6 && (t1.im + a).abs() <= 1e-6;
        let r2 = Complex64::new(T_STAR_INFINITY.0, T_STAR_INFINITY.1);
        let ok2 = (t2.re - r2.re).abs() <= 1e-4 && (t2.im - r2.im).abs() <= 1e-4;
        Ok((
            ok1 && ok2,
            format!("t1 = {:.9}{:+.9}i, t2 = {:.6}{:+.6}i", t1.re, t1.im, t2.re, t2.im),
        ))
    })
}

pub fn branch_structure() -> Criterion {
    check(5, "branch structure", || {
        let f = fit_branch(&default_offsets())?;
        let p = f.lambda.fitted_exponent;
        let m = f.lambda.fitted_coefficient.norm();
        let q = f.big_lambda.fitted_exponent;
        let target = 3.0 * 2f64.powf(-1.0 / 3.0);
        let pass = (p - 2.0 / 3.0).abs() <= 0.02
            && (m / target - 1.0).abs() <= 0.02
            && (q + 1.0 / 3.0).abs() <= 0.02;
        Ok((pass, format!("exponent {p:.4}, |coefficient| {m:.4}, Lambda exponent {q:.4}")))
    })
}

pub fn l3_expansion() -> Criterion {
    check(6, "L3 expansion", || {
        let e = locate_l3(1e-6)?;
        let ratio = (e.d_mu - 1.0) / 1e-6;
        let mu = 1e-4;
        let e = locate_l3(mu)?;
        let rho = e.hyperbolic_rate() / mu.sqrt();
        let omega = e.elliptic_frequency();
        let e_rho = (rho - (21.0f64 / 8.0).sqrt()).abs();
        let e_omega = (omega - (1.0 + 7.0 * mu / 8.0)).abs();
        let pass = (ratio - 5.0 / 12.0).abs() <= 1e-3 && e_rho <= 2e-3 && e_omega <= 2e-3;
        Ok((pass, format!("(d-1)/mu = {ratio:.6}, rho err {e_rho:.2e}, omega err {e_omega:.2e}")))
    })
}

pub fn d_expansion() -> Criterion {
    check(7, "D-expansion", || {
        let rem = |eps: f64| -> Result<f64> {
            let s = PoincareState::new(1.0, 1.0, Complex64::new(eps, 0.0), Complex64::new(eps, 0.0));
            let (d0, d1, d2) = d_series(0.4, &s);
            Ok((d_exact(0.4, &s)? - d0 - d1 - d2).norm())
        };
        let ratio = rem(1e-2)? / rem(5e-3)?;
        Ok((ratio >= 7.0, format!("remainder ratio {ratio:.3}")))
    })
}

pub fn gradient() -> Criterion {
    check(8, "gradient gate", || {
        let e = gradient_gate(50, 1)?;
        Ok((e <= 1e-6, format!("max relative error {e:.2e}")))
    })
}

pub fn series_residual() -> Criterion {
    check(9, "series residual", || {
        let p = series_residual_order()?;
        Ok(((p - 16.0 / 3.0).abs() <= 0.25, format!("fitted order {p:.4}")))
    })
}

pub fn stokes_table() -> Criterion {
    check(10, "Stokes table", || {
        let start = Instant::now();
        let rhos: Vec<f64> = THETA_TABLE.iter().map(|r| r.0).collect();
        let rows = theta_table(&rhos, &ShootOptions::default())?;
        let fast = start.elapsed() < Duration::from_secs(300);
        let worst = rows
            .iter()
            .zip(THETA_TABLE)
            .map(|(r, (_, t))| (r.theta - t).abs())
            .fold(0.0, f64::max);
        let values: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.theta)).collect();
        Ok((worst <= 5e-3 && fast, format!("theta [{}], worst {worst:.2e}", values.join(", "))))
    })
}

pub fn difference_structure() -> Criterion {
    check(11, "difference structure", || {
        let xs: Vec<f64> = (0..11).map(|k| -5.0 + k as f64).collect();
        let d = diff_structure(15.0, &xs, &ShootOptions::default())?;
        let pass = d.relative_spread <= 0.2 && d.x_ratio <= 0.1 && d.arg_spread <= 0.3;
        Ok((
            pass,
            format!(
                "spread {:.3e}, arg spread {:.3e}, |dX|/|dY| {:.3e}",
                d.relative_spread, d.arg_spread, d.x_ratio
            ),
        ))
    })
}

pub fn inner_limit() -> Criterion {
    check(12, "inner-limit order", || {
        let f = verify_inner_limit(&[0.05, 0.08, 0.12, 0.2], &inner_samples(8, 1))?;
        Ok((
            f.exponent >= 1.2,
            format!("exponent {:.3} (printed K: {:.3})", f.exponent, f.exponent_k),
        ))
    })
}

pub fn splitting() -> Criterion {
    check(13, "splitting cross-validation", || {
        let a = compute_a(1e-13)?;
        let f = fit_splitting_exponent(&SPLITTING_GRID, a, 1.63)?;
        let positive = f.samples.iter().all(|s| s.dist_measured > 0.0);
        let rel = (f.slope / -a - 1.0).abs();
        Ok((
            rel <= 0.1 && positive,
            format!("slope {:.4} vs -A {:.4} ({:.1}%), Theta_eff {:.3}", f.slope, -a, 100.0 * rel, f.theta_eff),
        ))
    })
}

/// Criteria 1 to 13, in order.
pub fn numeric_criteria() -> Vec<Criterion> {
    vec![
        a_constant(),
        a_forms(),
        pole_residue(),
        visible_singularities(),
        branch_structure(),
        l3_expansion(),
        d_expansion(),
        gradient(),
        series_residual(),
        stokes_table(),
        difference_structure(),
        inner_limit(),
        splitting(),
    ]
}

/// The deterministic part of a verification run: one line per criterion.
pub fn payload(criteria: &[Criterion]) -> String {
    criteria
        .iter()
        .map(|c| format!("{:>2} {} {}: {}\n", c.id, if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect()
}
