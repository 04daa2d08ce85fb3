use l3lab_core::inner::{
    diff_structure, inner_samples, shoot, theta, theta_table, verify_inner_limit, ShootBranch,
    ShootOptions,
};

const TABLE: [(f64, f64); 8] = [
    (13.0, 1.6373),
    (14.0, 1.6361),
    (15.0, 1.6351),
    (16.0, 1.6341),
    (17.0, 1.6333),
    (18.0, 1.6326),
    (19.0, 1.6320),
    (20.0, 1.6315),
];

#[test]
fn stokes_table_rows() {
    let rhos: Vec<f64> = TABLE.iter().map(|r| r.0).collect();
    let rows = theta_table(&rhos, &ShootOptions::default()).unwrap();
    for (rec, (_, want)) in rows.iter().zip(TABLE) {
        eprintln!("{} {:.6} {:.2}", rec.rho, rec.theta, rec.digits_lost);
        assert!((rec.theta - want).abs() < 5e-3, "rho {}: {}", rec.rho, rec.theta);
    }
    assert!((rows[2].theta - rows[6].theta).abs() <= 6e-3);
}

#[test]
fn stokes_estimate_is_numerically_stable() {
    let base = ShootOptions::default();
    let t0 = theta(15.0, &base).unwrap().theta;
    let far = theta(15.0, &ShootOptions { re_start: 2000.0, ..base }).unwrap().theta;
    let tight = theta(15.0, &ShootOptions { rtol: 1e-13, ..base }).unwrap().theta;
    let short = theta(15.0, &ShootOptions { max_step: Some(0.5), ..base }).unwrap().theta;
    eprintln!("{t0} {far} {tight} {short}");
    for t in [far, tight, short] {
        assert!((t - t0).abs() < 5e-3);
    }
}

#[test]
fn shooting_diagnostics() {
    let opts = ShootOptions::default();
    let u = shoot(ShootBranch::Unstable, 13.0, &opts).unwrap();
    let s = shoot(ShootBranch::Stable, 13.0, &opts).unwrap();
    eprintln!("bound {} {}", u.max_scaled_x, s.max_scaled_x);
    assert!(u.max_scaled_x <= 1.0);
    // |Delta Y| / |Y| is about e^-13 13^(4/3) 1.64 / (2/9), so three digits cancel.
    let agree = (u.z.y - s.z.y).norm() / u.z.y.norm();
    assert!(agree < 1e-3);
    assert!((u.z.w - s.z.w).norm() < 1e-5 * u.z.w.norm().max(1e-3));
    let far = shoot(ShootBranch::Unstable, 13.0, &ShootOptions { re_start: 2000.0, ..opts }).unwrap();
    eprintln!("tail {}", (far.z.y - u.z.y).norm());
    assert!((far.z.y - u.z.y).norm() < 1e-13);
}

#[test]
fn difference_structure() {
    let xs: Vec<f64> = (0..11).map(|k| -5.0 + k as f64).collect();
    let d = diff_structure(15.0, &xs, &ShootOptions::default()).unwrap();
    eprintln!("{} {} {} {} {}", d.relative_spread, d.arg_spread, d.x_ratio, d.x_bound, d.w_bound);
    assert!(d.relative_spread <= 0.2);
    assert!(d.arg_spread <= 0.3);
    assert!(d.x_ratio <= 0.1);
}

#[test]
fn inner_limit_order() {
    let samples = inner_samples(8, 1);
    let f = verify_inner_limit(&[0.05, 0.08, 0.12, 0.2], &samples).unwrap();
    eprintln!("{:?}", f);
    assert!(f.exponent >= 1.2);
}
