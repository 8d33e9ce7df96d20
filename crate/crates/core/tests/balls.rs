use hyperlab::balls::{
    covering_time, covering_time_exact, in_dynamical_ball, in_nonuniform_ball, pull_back_preball, verify_preball,
    verify_preball_along, BallSpec, QProfile,
};
use hyperlab::hyperbolic::exact_hyperbolic_times;
use hyperlab::{BallError, DynamicalMap, OrbitRecord, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LN2: f64 = std::f64::consts::LN_2;

/// Direct two-point iteration with the circle metric.
fn max_gap(map: &DynamicalMap, x: f64, y: f64, n: usize) -> Vec<f64> {
    let (mut a, mut b) = (x, y);
    let mut out = Vec::new();
    for _ in 0..=n {
        let d = (a - b).abs();
        out.push(d.min(1.0 - d));
        a = map.evaluate(&Point::Circle(a)).coord(0);
        b = map.evaluate(&Point::Circle(b)).coord(0);
    }
    out
}

#[test]
fn doubling_membership_by_direct_iteration() {
    let m = DynamicalMap::doubling();
    assert!(max_gap(&m, 0.3, 0.31, 3).iter().all(|&d| d < 0.1));
    assert!(max_gap(&m, 0.3, 0.32, 3).iter().any(|&d| d >= 0.1));
    let b = BallSpec::uniform(Point::Circle(0.3), 3, 0.1);
    assert!(in_dynamical_ball(&m, &b, &Point::Circle(0.31)));
    assert!(!in_dynamical_ball(&m, &b, &Point::Circle(0.32)));
}

#[test]
fn unit_profile_matches_uniform_ball() {
    let m = DynamicalMap::doubling();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let x = Point::Circle(rng.random());
        let y = Point::Circle(rng.random());
        let n = rng.random_range(0..12);
        let eps = rng.random_range(0.001..0.3);
        let u = BallSpec::uniform(x, n, eps);
        let q = BallSpec::nonuniform(x, n, eps, QProfile::constant(1.0));
        assert_eq!(in_dynamical_ball(&m, &u, &y), in_nonuniform_ball(&m, &q, &y));
    }
}

#[test]
fn chebyshev_preball_at_detected_time() {
    let m = DynamicalMap::chebyshev();
    let rec = OrbitRecord::compute(&m, Point::Circle(0.1234), 400).unwrap();
    let times = exact_hyperbolic_times(rec.log_inv_norms(), 0.1);
    let n = *times.iter().find(|&&t| (8..20).contains(&t)).expect("a hyperbolic time");
    assert!(verify_preball_along(&m, rec.points(), n, 0.1, 0.05, 64).unwrap());
    // oracle: pull back, then iterate the two endpoints directly
    let pre = pull_back_preball(&m, rec.points(), n, 0.05).unwrap();
    let x = rec.x0().coord(0);
    let (lo, hi) = pre.offsets[0][0];
    let g1 = max_gap(&m, x + lo, x + hi, n);
    for k in 0..=n {
        assert!(g1[k] <= (-0.2 * (n - k) as f64).exp() * g1[n] * (1.0 + 1e-6), "k = {k}");
    }
}

#[test]
fn preball_diameter_at_hyperbolic_times() {
    let m = DynamicalMap::doubling();
    let x = Point::Circle(0.7);
    for n in 1..30 {
        let c = LN2 / 2.0;
        assert!(verify_preball(&m, &x, n, c, 0.1, 16).unwrap());
        let orbit: Vec<Point> = (0..=n).map(|k| m.iterate(&x, k)).collect();
        let d = pull_back_preball(&m, &orbit, n, 0.1).unwrap().diameter();
        assert!(d <= (-2.0 * c * n as f64).exp() * 0.2 * (1.0 + 1e-6));
    }
}

#[test]
fn critical_pull_back_is_ambiguous() {
    let m = DynamicalMap::chebyshev();
    let orbit = vec![Point::Circle(0.5), Point::Circle(0.0)];
    assert_eq!(
        pull_back_preball(&m, &orbit, 1, 0.1).unwrap_err(),
        BallError::BranchAmbiguity { step: 0 }
    );
}

#[test]
fn grid_covering_matches_exact_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for map in [DynamicalMap::doubling(), DynamicalMap::tripling()] {
        for _ in 0..50 {
            let c = Point::Circle(rng.random());
            let r = rng.random_range(0.002..0.2);
            let grid = covering_time(&map, &c, r, r / 20.0).unwrap();
            let exact = covering_time_exact(&map, &c, r, 64).unwrap();
            assert!(grid.abs_diff(exact) <= 1, "{} r={r}: {grid} vs {exact}", map.id());
        }
    }
    let t = DynamicalMap::diag23();
    let c = Point::Torus([0.41, 0.83]);
    assert_eq!(covering_time(&t, &c, 0.1, 0.01).unwrap(), covering_time_exact(&t, &c, 0.1, 64).unwrap());
}

#[test]
fn covering_time_on_smooth_maps() {
    for map in [DynamicalMap::chebyshev(), DynamicalMap::manneville_pomeau(0.5).unwrap()] {
        let n = covering_time(&map, &Point::Circle(0.3), 0.01, 0.001).unwrap();
        assert!(n >= 1 && n < 64, "{}: {n}", map.id());
    }
}

proptest! {
    #[test]
    fn balls_nest(x in 0.0f64..1.0, y in 0.0f64..1.0, n in 0usize..15, eps in 0.001f64..0.4, de in 0.0f64..0.1) {
        let m = DynamicalMap::doubling();
        let cx = Point::Circle(x);
        let py = Point::Circle(y);
        if in_dynamical_ball(&m, &BallSpec::uniform(cx, n + 1, eps), &py) {
            prop_assert!(in_dynamical_ball(&m, &BallSpec::uniform(cx, n, eps), &py));
        }
        if in_dynamical_ball(&m, &BallSpec::uniform(cx, n, eps), &py) {
            prop_assert!(in_dynamical_ball(&m, &BallSpec::uniform(cx, n, eps + de), &py));
        }
    }

    #[test]
    fn nonuniform_inside_uniform(x in 0.0f64..1.0, y in 0.0f64..1.0, n in 0usize..12, eps in 0.001f64..0.3, eta in 0.0f64..1.0) {
        let m = DynamicalMap::tripling();
        let q = QProfile::exponential(eta);
        let cx = Point::Circle(x);
        let py = Point::Circle(y);
        if in_nonuniform_ball(&m, &BallSpec::nonuniform(cx, n, eps, q), &py) {
            prop_assert!(in_dynamical_ball(&m, &BallSpec::uniform(cx, n, eps), &py));
        }
    }

    #[test]
    fn covering_time_decreases_with_radius(x in 0.0f64..1.0, r in 0.005f64..0.2, k in 1.0f64..3.0) {
        let m = DynamicalMap::doubling();
        let c = Point::Circle(x);
        let small = covering_time_exact(&m, &c, r, 64).unwrap();
        let large = covering_time_exact(&m, &c, r * k, 64).unwrap();
        prop_assert!(large <= small);
    }

    #[test]
    fn truncated_distance_monotone(x in 0.0f64..1.0, d1 in 0.001f64..0.5, d2 in 0.001f64..0.5) {
        let m = DynamicalMap::chebyshev();
        let (small, big) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let p = Point::Circle(x);
        prop_assert!(m.truncated_critical_distance(&p, small) >= m.truncated_critical_distance(&p, big));
    }
}
