//! Acceptance criteria 1 to 14, checked directly against the library with
//! tolerances pinned here. Each test prints one PASS/FAIL line.

use l3lab_core::inner::{
    diff_structure, gradient_gate, inner_samples, series_residual_order, theta_table,
    verify_inner_limit, ShootOptions,
};
use l3lab_core::rpc3bp::{d_exact, d_series, locate_l3, PoincareState};
use l3lab_core::separatrix::{
    compute_a, compute_a_alternate, default_offsets, fit_branch, residue_pole_numeric, t_star,
    PathKind,
};
use l3lab_core::splitting::fit_splitting_exponent;
use l3lab_core::Complex64;
use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

const A_REFERENCE: f64 = 0.177744;
const TOL_A: f64 = 1e-5;
const TOL_A_FORMS: f64 = 1e-9;
const TOL_RESIDUE: f64 = 1e-8;
const TOL_PI_RESIDUE: f64 = 1e-6;
const TOL_T1: f64 = 1e-6;
const TOL_T2: f64 = 1e-4;
const TOL_EXPONENT: f64 = 0.02;
const TOL_COEFFICIENT_REL: f64 = 0.02;
const TOL_D_RATIO: f64 = 1e-3;
const TOL_SPECTRUM: f64 = 2e-3;
const MIN_REMAINDER_RATIO: f64 = 7.0;
const TOL_GRADIENT: f64 = 1e-6;
const TOL_SERIES_ORDER: f64 = 0.25;
const TOL_THETA: f64 = 5e-3;
const MAX_SPREAD: f64 = 0.2;
const MAX_X_RATIO: f64 = 0.1;
const MIN_INNER_ORDER: f64 = 1.2;
const TOL_SLOPE_REL: f64 = 0.1;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_a_constant() {
    let start = Instant::now();
    let a = compute_a(1e-12).unwrap();
    let elapsed = start.elapsed();
    let pass = (a - A_REFERENCE).abs() <= TOL_A
        && (3.0 / 50.0..=3.0 / 10.0).contains(&a)
        && elapsed < Duration::from_secs(1);
    report(1, "A-constant", pass, format!("A = {a:.9} in {:.3} s", elapsed.as_secs_f64()));
}

#[test]
fn criterion_02_a_forms() {
    let d = (compute_a(1e-12).unwrap() - compute_a_alternate(1e-12).unwrap()).abs();
    report(2, "both forms of A", d <= TOL_A_FORMS, format!("difference {d:.2e}"));
}

#[test]
fn criterion_03_pole_residue() {
    let r = residue_pole_numeric(1e-3).unwrap();
    let e1 = (r - (2.0f64 / 21.0).sqrt()).norm();
    let e2 = (PI * r.re - 0.969516).abs();
    report(
        3,
        "pole residue",
        e1 <= TOL_RESIDUE && e2 <= TOL_PI_RESIDUE,
        format!("residue error {e1:.2e}, pi*residue error {e2:.2e}"),
    );
}

#[test]
fn criterion_04_visible_singularities() {
    let a = compute_a(1e-13).unwrap();
    let t1 = t_star(PathKind::ToZeroUpper).unwrap();
    let t2 = t_star(PathKind::ToInfinityUpper).unwrap();
    let ok1 = t1.re.abs() <= TOL_T1 && (t1.im + a).abs() <= TOL_T1;
    let ok2 = (t2.re + 0.086697).abs() <= TOL_T2 && (t2.im + 0.969516).abs() <= TOL_T2;
    report(4, "visible singularities", ok1 && ok2, format!("t1 = {t1:.9}, t2 = {t2:.6}"));
}

#[test]
fn criterion_05_branch_structure() {
    let f = fit_branch(&default_offsets()).unwrap();
    let p = f.lambda.fitted_exponent;
    let m = f.lambda.fitted_coefficient.norm();
    let q = f.big_lambda.fitted_exponent;
    let target = 3.0 * 2f64.powf(-1.0 / 3.0);
    let pass = (p - 2.0 / 3.0).abs() <= TOL_EXPONENT
        && (m / target - 1.0).abs() <= TOL_COEFFICIENT_REL
        && (q + 1.0 / 3.0).abs() <= TOL_EXPONENT;
    report(5, "branch structure", pass, format!("p = {p:.4}, |c| = {m:.4}, Lambda exponent {q:.4}"));
}

#[test]
fn criterion_06_l3_expansion() {
    let ratio = (locate_l3(1e-6).unwrap().d_mu - 1.0) / 1e-6;
    let mu = 1e-4;
    let e = locate_l3(mu).unwrap();
    let e_rate = (e.hyperbolic_rate() / mu.sqrt() - (21.0f64 / 8.0).sqrt()).abs();
    let e_omega = (e.elliptic_frequency() - 1.0 - 7.0 * mu / 8.0).abs();
    let pass = (ratio - 5.0 / 12.0).abs() <= TOL_D_RATIO && e_rate <= TOL_SPECTRUM && e_omega <= TOL_SPECTRUM;
    report(
        6,
        "L3 expansion",
        pass,
        format!("(d-1)/mu = {ratio:.6}, rate error {e_rate:.2e}, frequency error {e_omega:.2e}"),
    );
}

#[test]
fn criterion_07_d_expansion() {
    let rem = |eps: f64| {
        let s = PoincareState::new(1.0, 1.0, Complex64::new(eps, 0.0), Complex64::new(eps, 0.0));
        let (d0, d1, d2) = d_series(0.4, &s);
        (d_exact(0.4, &s).unwrap() - d0 - d1 - d2).norm()
    };
    let ratio = rem(1e-2) / rem(5e-3);
    report(7, "D-expansion", ratio >= MIN_REMAINDER_RATIO, format!("remainder ratio {ratio:.3}"));
}

#[test]
fn criterion_08_gradient_gate() {
    let e = gradient_gate(50, 2024).unwrap();
    report(8, "gradient gate", e <= TOL_GRADIENT, format!("max relative error {e:.2e}"));
}

#[test]
fn criterion_09_series_residual() {
    let p = series_residual_order().unwrap();
    report(9, "series residual", (p - 16.0 / 3.0).abs() <= TOL_SERIES_ORDER, format!("order {p:.4}"));
}

#[test]
fn criterion_10_stokes_table() {
    let targets = [1.6373, 1.6361, 1.6351, 1.6341, 1.6333, 1.6326, 1.6320, 1.6315];
    let rhos: Vec<f64> = (13..=20).map(f64::from).collect();
    let start = Instant::now();
    let rows = theta_table(&rhos, &ShootOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let worst = rows.iter().zip(targets).map(|(r, t)| (r.theta - t).abs()).fold(0.0, f64::max);
    report(
        10,
        "Stokes table",
        worst <= TOL_THETA && elapsed < Duration::from_secs(300),
        format!("worst row error {worst:.2e} in {:.1} s", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_11_difference_structure() {
    let xs: Vec<f64> = (-5..=5).map(f64::from).collect();
    let d = diff_structure(15.0, &xs, &ShootOptions::default()).unwrap();
    report(
        11,
        "difference structure",
        d.relative_spread <= MAX_SPREAD && d.x_ratio <= MAX_X_RATIO,
        format!("spread {:.2e}, |dX|/|dY| {:.2e}", d.relative_spread, d.x_ratio),
    );
}

#[test]
fn criterion_12_inner_limit() {
    let f = verify_inner_limit(&[0.05, 0.08, 0.12, 0.2], &inner_samples(8, 1)).unwrap();
    report(
        12,
        "inner-limit order",
        f.exponent >= MIN_INNER_ORDER,
        format!("exponent {:.3} (with the printed K: {:.3})", f.exponent, f.exponent_k),
    );
}

#[test]
fn criterion_13_splitting() {
    let a = compute_a(1e-13).unwrap();
    let f = fit_splitting_exponent(&[1e-3, 1.25e-3, 1.5e-3, 1.75e-3, 2e-3], a, 1.63).unwrap();
    let positive = f.samples.iter().all(|s| s.dist_measured > 0.0);
    let rel = (f.slope / -a - 1.0).abs();
    report(
        13,
        "splitting cross-validation",
        rel <= TOL_SLOPE_REL && positive,
        format!("slope {:.4} vs -A {:.4}, Theta_eff {:.3}", f.slope, -a, f.theta_eff),
    );
}

#[test]
fn criterion_14_determinism() {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_l3lab")).arg("verify").output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        out.stdout
    };
    let (first, second) = (run(), run());
    report(
        14,
        "determinism",
        first == second && !first.is_empty(),
        format!("{} bytes, identical: {}", first.len(), first == second),
    );
}
