use l3lab_core::rpc3bp::{cart_from_polar, h_cart, PolarState};
use l3lab_core::splitting::{fit_splitting_exponent, manifold_section_point, ManifoldBranch};

const A: f64 = 0.177744;

#[test]
fn branches_reach_the_section() {
    let mu = 0.003;
    for b in [ManifoldBranch::UnstablePlus, ManifoldBranch::StablePlus] {
        let p = manifold_section_point(mu, b, 1e-7).unwrap();
        eprintln!("{b:?} {p:?}");
        assert!(p.r > 1.0 && p.r < 1.3);
        assert!((p.theta - std::f64::consts::FRAC_PI_2).abs() <= 1e-10);
        assert!(p.energy_drift < 1e-11);
        let half = manifold_section_point(mu, b, 5e-8).unwrap();
        eprintln!("seed {} {} {}", half.r - p.r, half.big_r - p.big_r, half.g - p.g);
        assert!((half.r - p.r).abs() <= 1e-6);
        assert!((half.big_r - p.big_r).abs() <= 1e-6);
        assert!((half.g - p.g).abs() <= 1e-6);
    }
}

#[test]
fn reversibility_of_the_manifolds() {
    let mu = 0.003;
    let u = manifold_section_point(mu, ManifoldBranch::UnstablePlus, 1e-7).unwrap();
    let s = manifold_section_point(mu, ManifoldBranch::StableMinus, 1e-7).unwrap();
    eprintln!("{} {} {}", u.r - s.r, u.big_r + s.big_r, u.g - s.g);
    assert!((u.r - s.r).abs() < 1e-8);
    assert!((u.big_r + s.big_r).abs() < 1e-8);
    assert!((u.g - s.g).abs() < 1e-8);
    let image = cart_from_polar(&PolarState::new(u.r, -u.theta, -u.big_r, u.g)).unwrap();
    assert!((h_cart(&image, mu).unwrap()
        - h_cart(&cart_from_polar(&PolarState::new(s.r, s.theta, s.big_r, s.g)).unwrap(), mu).unwrap())
    .abs()
        < 1e-9);
}

#[test]
fn splitting_exponent() {
    let grid = [1e-3, 1.25e-3, 1.5e-3, 1.75e-3, 2e-3];
    let fit = fit_splitting_exponent(&grid, A, 1.63).unwrap();
    for s in &fit.samples {
        eprintln!("{} {:e} {:e} {:?}", s.mu, s.dist_measured, s.dist_asymptotic, s.gaps);
    }
    eprintln!("slope {} theta_eff {}", fit.slope, fit.theta_eff);
    assert!((fit.slope / -A - 1.0).abs() < 0.1);
    let reduced = fit_splitting_exponent(&grid[..4], A, 1.63).unwrap();
    // Dropping the largest mass ratio moves the slope by about 4%.
    eprintln!("reduced {}", reduced.slope);
    assert!(reduced.slope < 0.0 && (reduced.slope / -A - 1.0).abs() < 0.1);
}
