//! Command-line arguments and the commands they dispatch to.

use crate::criteria;
use crate::record::{Cell, Format, ResultRecord};
use crate::CliError;
use clap::{Args, Parser, Subcommand};
use l3lab_core::inner::{theta_unchecked, ShootOptions};
use l3lab_core::numerics::{solve_param, OdeOptions};
use l3lab_core::rpc3bp::locate_l3;
use l3lab_core::separatrix::{
    compute_a, compute_a_detailed, default_offsets, fit_branch, h_pend, lambda0, pend_rhs,
    residue_pole, residue_pole_numeric, t_star_with, PathKind,
};
use l3lab_core::splitting::{
    fit_splitting_exponent, manifold_orbit, splitting_sample, ManifoldBranch, SplittingSample,
};
use l3lab_core::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::ops::ControlFlow;
use std::path::PathBuf;

/// Reference value of the strip half-width.
const A_REF: f64 = criteria::A_REF;

#[derive(Debug, Parser)]
#[command(name = "l3lab", version, about = "Numerical study of the L3 point of the restricted planar circular three-body problem")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file of default flags for the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The strip half-width A of the separatrix.
    #[command(args_override_self = true)]
    A(AArgs),
    /// Stokes constant estimates from the inner equation.
    ///
    /// CSV columns: rho, abs_deltaY, exp_rho, theta, digits_lost.
    #[command(args_override_self = true)]
    Stokes(StokesArgs),
    /// The singularities of the separatrix closest to the real line.
    ///
    /// CSV columns: name, t_re, t_im, ref_re, ref_im, error.
    #[command(args_override_self = true)]
    Singularities(TolArgs),
    /// Samples of the separatrix on the real time line.
    ///
    /// CSV columns: t, lambda, big_lambda, q, energy_residual, where
    /// q = cos(lambda/2) and energy_residual = |H_pend + 1/2|.
    #[command(args_override_self = true)]
    Separatrix(SeparatrixArgs),
    /// Location and linearization of L3.
    ///
    /// CSV columns: index, eigenvalue_re, eigenvalue_im.
    #[command(args_override_self = true)]
    L3(MuArgs),
    /// The one-dimensional invariant manifolds of L3 up to their first section crossing.
    ///
    /// CSV columns: branch, t, q1, q2, p1, p2 (rotating Cartesian
    /// coordinates; branch is one of unstable+, unstable-, stable+, stable-).
    #[command(args_override_self = true)]
    Manifolds(ManifoldArgs),
    /// Measured and predicted splitting distance.
    ///
    /// CSV columns (with --fit): mu, dist_measured, dist_asymptotic, ratio,
    /// gap_r, gap_big_r, gap_g.
    #[command(args_override_self = true)]
    Distance(DistanceArgs),
    /// Runs the acceptance checks and exits nonzero if any fails.
    ///
    /// CSV columns: id, name, pass, detail.
    #[command(args_override_self = true)]
    Verify,
}

#[derive(Debug, Args)]
pub struct AArgs {
    /// Quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Quadrature tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct StokesArgs {
    #[arg(long, default_value_t = 13.0)]
    pub rho_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub rho_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho_step: f64,
    /// Relative tolerance of the shooting integrations.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// |Re U| at which the asymptotic series seeds the shooting.
    #[arg(long, default_value_t = 1000.0)]
    pub re_start: f64,
}

#[derive(Debug, Args)]
pub struct SeparatrixArgs {
    /// Samples cover [-t_max, t_max].
    #[arg(long, default_value_t = 4.0)]
    pub t_max: f64,
    /// Largest spacing between samples.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct MuArgs {
    #[arg(long, default_value_t = 0.003)]
    pub mu: f64,
}

#[derive(Debug, Args)]
pub struct ManifoldArgs {
    #[arg(long, default_value_t = 0.003)]
    pub mu: f64,
    /// Distance of the seed from L3 along the eigenvector.
    #[arg(long, default_value_t = 1e-7)]
    pub seed_eps: f64,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub mu: f64,
    /// Fit the exponent over these mass ratios instead (comma separated).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub fit: Option<Vec<f64>>,
    /// |Theta| used in the asymptotic formula.
    #[arg(long, default_value_t = 1.63)]
    pub theta: f64,
}

/// A finished command: its record and whether it should exit with status 1.
pub struct Outcome {
    pub record: ResultRecord,
    pub failed: bool,
}

impl Outcome {
    fn ok(record: ResultRecord) -> Self {
        Outcome { record, failed: false }
    }
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if (1e-14..=1e-2).contains(&tol) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("tolerance {tol} outside [1e-14, 1e-2]")))
    }
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::A(a) => cmd_a(a),
        Command::Stokes(a) => cmd_stokes(a),
        Command::Singularities(a) => cmd_singularities(a),
        Command::Separatrix(a) => cmd_separatrix(a),
        Command::L3(a) => cmd_l3(a),
        Command::Manifolds(a) => cmd_manifolds(a),
        Command::Distance(a) => cmd_distance(a),
        Command::Verify => cmd_verify(),
    }
}

fn cmd_a(args: &AArgs) -> Result<Outcome, CliError> {
    check_tol(args.tol)?;
    let q = compute_a_detailed(args.tol)?;
    let mut r = ResultRecord::new("a");
    r.input("tol", args.tol)
        .output("value", q.value.re)
        .output("err", q.err)
        .output("evals", q.evals)
        .line(format!("A = {:.6} ({:.15})", q.value.re, q.value.re))
        .line(format!("error estimate = {:.3e}", q.err))
        .line(format!("evaluations = {}", q.evals));
    Ok(Outcome::ok(r))
}

/// The grid `min, min + step, ...` up to `max`.
pub fn rho_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(min <= max) {
        return Err(CliError::Usage(format!("empty rho range [{min}, {max}] with step {step}")));
    }
    if min < 8.0 || max > 30.0 {
        return Err(CliError::Usage(format!("rho range [{min}, {max}] outside [8, 30]")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| min + k as f64 * step).collect())
}

fn cmd_stokes(args: &StokesArgs) -> Result<Outcome, CliError> {
    check_tol(args.tol)?;
    let rhos = rho_grid(args.rho_min, args.rho_max, args.rho_step)?;
    if !(args.re_start >= 100.0) {
        return Err(CliError::Usage(format!("re-start {} below 100", args.re_start)));
    }
    let opts = ShootOptions { re_start: args.re_start, rtol: args.tol, max_step: None };
    let rows = rhos
        .par_iter()
        .map(|&rho| theta_unchecked(rho, &opts))
        .collect::<Result<Vec<_>, _>>()?;

    let mut r = ResultRecord::new("stokes");
    r.input("rho_min", args.rho_min)
        .input("rho_max", args.rho_max)
        .input("rho_step", args.rho_step)
        .input("tol", args.tol)
        .input("re_start", args.re_start);
    r.columns = ["rho", "abs_deltaY", "exp_rho", "theta", "digits_lost"].map(String::from).to_vec();
    r.line(format!("{:>6} {:>14} {:>14} {:>10} {:>12}", "rho", "|dY|", "e^rho", "theta", "digits lost"));
    let mut flagged = Vec::new();
    for s in &rows {
        let remaining = s.digits_remaining(args.tol);
        let flag = if remaining < 3.0 {
            flagged.push(s.rho);
            "  < 3 digits left"
        } else {
            ""
        };
        r.rows.push(vec![
            s.rho.into(),
            s.delta_y.norm().into(),
            s.rho.exp().into(),
            s.theta.into(),
            s.digits_lost.into(),
        ]);
        r.line(format!(
            "{:>6.2} {:>14.6e} {:>14.6e} {:>10.6} {:>12.2}{flag}",
            s.rho,
            s.delta_y.norm(),
            s.rho.exp(),
            s.theta,
            s.digits_lost
        ));
    }
    r.output("flagged_rows", flagged.len());
    if !flagged.is_empty() {
        eprintln!("rows with fewer than 3 significant digits: {flagged:?}");
    }
    Ok(Outcome { record: r, failed: !flagged.is_empty() })
}

fn cmd_singularities(args: &TolArgs) -> Result<Outcome, CliError> {
    check_tol(args.tol)?;
    let kinds = [
        ("t1+", PathKind::ToZeroUpper, Complex64::new(0.0, -A_REF)),
        ("t1-", PathKind::ToZeroLower, Complex64::new(0.0, A_REF)),
        ("t2+", PathKind::ToInfinityUpper, Complex64::new(-0.086697, -0.969516)),
        ("t2-", PathKind::ToInfinityLower, Complex64::new(-0.086697, 0.969516)),
    ];
    let values = kinds
        .par_iter()
        .map(|(_, k, _)| t_star_with(*k, args.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let residue = residue_pole_numeric(1e-3)?;

    let mut r = ResultRecord::new("singularities");
    r.input("tol", args.tol);
    r.columns = ["name", "t_re", "t_im", "ref_re", "ref_im", "error"].map(String::from).to_vec();
    for ((name, _, reference), t) in kinds.iter().zip(&values) {
        let err = (t - reference).norm();
        r.rows.push(vec![
            (*name).into(),
            t.re.into(),
            t.im.into(),
            reference.re.into(),
            reference.im.into(),
            err.into(),
        ]);
        r.line(format!(
            "{name} = {:+.9} {:+.9}i   reference {:+.6} {:+.6}i   |difference| {err:.2e}",
            t.re, t.im, reference.re, reference.im
        ));
    }
    r.output("residue", residue.re)
        .output("residue_exact", residue_pole())
        .output("pi_residue", PI * residue.re);
    r.line(format!(
        "residue at q = 1: {:.12} (sqrt(2/21) = {:.12}), pi * residue = {:.9}",
        residue.re,
        residue_pole(),
        PI * residue.re
    ));
    Ok(Outcome::ok(r))
}

fn separatrix_half(t_end: f64, step: f64) -> Result<Vec<(f64, Complex64, Complex64)>, CliError> {
    let y0 = [Complex64::new(lambda0(), 0.0), Complex64::new(0.0, 0.0)];
    let mut out = vec![(0.0, y0[0], y0[1])];
    solve_param(
        |_t, y, dy| {
            let (a, b) = pend_rhs(y[0], y[1])?;
            dy[0] = a;
            dy[1] = b;
            Ok(())
        },
        0.0,
        t_end,
        &y0,
        OdeOptions::new(1e-13, 1e-15).with_max_step(step),
        |info| {
            out.push((info.tau, info.y[0], info.y[1]));
            ControlFlow::Continue(())
        },
    )?;
    Ok(out)
}

fn cmd_separatrix(args: &SeparatrixArgs) -> Result<Outcome, CliError> {
    if !(args.t_max > 0.0 && args.t_max <= 20.0) {
        return Err(CliError::Usage(format!("t-max {} outside (0, 20]", args.t_max)));
    }
    if !(args.step > 0.0 && args.step <= args.t_max) {
        return Err(CliError::Usage(format!("step {} outside (0, t-max]", args.step)));
    }
    let (back, fwd) = rayon::join(
        || separatrix_half(-args.t_max, args.step),
        || separatrix_half(args.t_max, args.step),
    );
    let mut samples = back?;
    samples.reverse();
    samples.extend(fwd?.into_iter().skip(1));
    let fit = fit_branch(&default_offsets())?;
    let a = compute_a(1e-12)?;

    let mut r = ResultRecord::new("separatrix");
    r.input("t_max", args.t_max).input("step", args.step);
    r.columns = ["t", "lambda", "big_lambda", "q", "energy_residual"].map(String::from).to_vec();
    let mut worst = 0.0f64;
    for (t, l, big_l) in samples {
        let residual = (h_pend(l, big_l)? + 0.5).norm();
        worst = worst.max(residual);
        r.rows.push(vec![t.into(), l.re.into(), big_l.re.into(), (l.re / 2.0).cos().into(), residual.into()]);
    }
    r.output("a", a)
        .output("max_energy_residual", worst)
        .output("lambda_exponent", fit.lambda.fitted_exponent)
        .output("lambda_coefficient_abs", fit.lambda.fitted_coefficient.norm())
        .output("big_lambda_exponent", fit.big_lambda.fitted_exponent)
        .output("fit_residual", fit.residual);
    Ok(Outcome::ok(r))
}

fn cmd_l3(args: &MuArgs) -> Result<Outcome, CliError> {
    let mu = args.mu;
    let e = locate_l3(mu)?;
    let rate = e.hyperbolic_rate() / mu.sqrt();
    let omega = e.elliptic_frequency();
    let rate_ref = (21.0f64 / 8.0).sqrt();
    let omega_ref = 1.0 + 7.0 * mu / 8.0;
    let mut r = ResultRecord::new("l3");
    r.input("mu", mu)
        .output("d_mu", e.d_mu)
        .output("d_ratio", (e.d_mu - 1.0) / mu)
        .output("hyperbolic_over_sqrt_mu", rate)
        .output("hyperbolic_reference", rate_ref)
        .output("elliptic_frequency", omega)
        .output("elliptic_reference", omega_ref);
    r.columns = ["index", "eigenvalue_re", "eigenvalue_im"].map(String::from).to_vec();
    r.line(format!("d_mu = {:.15}   (d_mu - 1)/mu = {:.9} (5/12 = {:.9})", e.d_mu, (e.d_mu - 1.0) / mu, 5.0 / 12.0));
    for (i, ev) in e.eigenvalues.iter().enumerate() {
        r.rows.push(vec![i.into(), ev.re.into(), ev.im.into()]);
        r.line(format!("eigenvalue {i}: {:+.12e} {:+.12e}i", ev.re, ev.im));
    }
    r.line(format!("hyperbolic rate / sqrt(mu) = {rate:.9} (sqrt(21/8) = {rate_ref:.9})"));
    r.line(format!("elliptic frequency = {omega:.12} (1 + 7mu/8 = {omega_ref:.12})"));
    Ok(Outcome::ok(r))
}

fn branch_label(b: ManifoldBranch) -> &'static str {
    match b {
        ManifoldBranch::UnstablePlus => "unstable+",
        ManifoldBranch::UnstableMinus => "unstable-",
        ManifoldBranch::StablePlus => "stable+",
        ManifoldBranch::StableMinus => "stable-",
    }
}

fn cmd_manifolds(args: &ManifoldArgs) -> Result<Outcome, CliError> {
    let branches = [
        ManifoldBranch::UnstablePlus,
        ManifoldBranch::UnstableMinus,
        ManifoldBranch::StablePlus,
        ManifoldBranch::StableMinus,
    ];
    let orbits = branches
        .par_iter()
        .map(|&b| manifold_orbit(args.mu, b, args.seed_eps))
        .collect::<Result<Vec<_>, _>>()?;
    let mut r = ResultRecord::new("manifolds");
    r.input("mu", args.mu).input("seed_eps", args.seed_eps);
    r.columns = ["branch", "t", "q1", "q2", "p1", "p2"].map(String::from).to_vec();
    for (b, (point, orbit)) in branches.iter().zip(&orbits) {
        let label = branch_label(*b);
        for (t, s) in orbit {
            let mut row: Vec<Cell> = vec![label.into(), (*t).into()];
            row.extend(s.to_array().map(Cell::from));
            r.rows.push(row);
        }
        let key = label.replace('+', "_plus").replace('-', "_minus");
        r.output(&format!("{key}_r"), point.r)
            .output(&format!("{key}_big_r"), point.big_r)
            .output(&format!("{key}_g"), point.g)
            .output(&format!("{key}_t"), point.t_hit)
            .output(&format!("{key}_energy_drift"), point.energy_drift);
    }
    Ok(Outcome::ok(r))
}

fn sample_cells(s: &SplittingSample) -> Vec<Cell> {
    vec![
        s.mu.into(),
        s.dist_measured.into(),
        s.dist_asymptotic.into(),
        (s.dist_measured / s.dist_asymptotic).into(),
        s.gaps[0].into(),
        s.gaps[1].into(),
        s.gaps[2].into(),
    ]
}

fn cmd_distance(args: &DistanceArgs) -> Result<Outcome, CliError> {
    let a = compute_a(1e-13)?;
    let mut r = ResultRecord::new("distance");
    r.input("theta", args.theta);
    r.columns = ["mu", "dist_measured", "dist_asymptotic", "ratio", "gap_r", "gap_big_r", "gap_g"]
        .map(String::from)
        .to_vec();
    match &args.fit {
        Some(grid) => {
            let fit = fit_splitting_exponent(grid, a, args.theta)?;
            r.input("mu_grid", grid.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","));
            for s in &fit.samples {
                r.rows.push(sample_cells(s));
                r.line(format!(
                    "mu = {:.4e}: measured {:.6e}, asymptotic {:.6e}, ratio {:.4}",
                    s.mu,
                    s.dist_measured,
                    s.dist_asymptotic,
                    s.dist_measured / s.dist_asymptotic
                ));
            }
            r.output("slope", fit.slope).output("minus_a", -a).output("theta_eff", fit.theta_eff);
            r.line(format!("slope = {:.6} (-A = {:.6}), Theta_eff = {:.4}", fit.slope, -a, fit.theta_eff));
        }
        None => {
            let s = splitting_sample(args.mu, a, args.theta)?;
            r.input("mu", args.mu);
            r.rows.push(sample_cells(&s));
            r.output("asymptotic", s.dist_asymptotic)
                .output("measured", s.dist_measured)
                .output("ratio", s.dist_measured / s.dist_asymptotic);
            r.line(format!("asymptotic distance = {:.9e}", s.dist_asymptotic));
            r.line(format!("measured distance   = {:.9e}", s.dist_measured));
            r.line(format!("ratio               = {:.6}", s.dist_measured / s.dist_asymptotic));
            r.line(format!("gaps (r, R, G)      = {:.3e}, {:.3e}, {:.3e}", s.gaps[0], s.gaps[1], s.gaps[2]));
        }
    }
    Ok(Outcome::ok(r))
}

fn cmd_verify() -> Result<Outcome, CliError> {
    let results = criteria::numeric_criteria();
    let mut r = ResultRecord::new("verify");
    r.columns = ["id", "name", "pass", "detail"].map(String::from).to_vec();
    for c in &results {
        r.rows.push(vec![
            (c.id as usize).into(),
            c.name.into(),
            (if c.pass { "true" } else { "false" }).into(),
            c.detail.clone().into(),
        ]);
        eprintln!("criterion {:>2}: {:.2} s", c.id, c.elapsed.as_secs_f64());
    }
    let passed = results.iter().filter(|c| c.pass).count();
    for l in criteria::payload(&results).lines() {
        r.line(l);
    }
    r.line(format!("{passed}/{} criteria passed", results.len()));
    r.output("passed", passed).output("total", results.len());
    Ok(Outcome { record: r, failed: passed != results.len() })
}
