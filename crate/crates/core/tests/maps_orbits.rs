use hyperlab::digits::{minimal_period, offset_block, DigitStream};
use hyperlab::maps::finite_difference;
use hyperlab::orbit::{lyapunov_from_record, lyapunov_spectrum};
use hyperlab::{DynamicalMap, OrbitRecord, Point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn circle_maps() -> Vec<DynamicalMap> {
    DynamicalMap::catalog().into_iter().filter(|m| m.dim() == 1).collect()
}

#[test]
fn catalog_round_trips_through_ids() {
    for m in DynamicalMap::catalog() {
        assert_eq!(DynamicalMap::from_id(&m.id(), None).unwrap(), m);
    }
}

#[test]
fn chebyshev_exponent_from_conjugacy() {
    // conjugate to the tent map, whose exponent is log 2 everywhere
    let est = lyapunov_spectrum(&DynamicalMap::chebyshev(), Point::Circle(0.123), 200_000).unwrap();
    assert!((est.exponents[0] - std::f64::consts::LN_2).abs() < 1e-2);
}

#[test]
fn torus_spectrum_is_ascending() {
    let m = DynamicalMap::diag23();
    let rec = OrbitRecord::typical(&m, 500, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    let e = lyapunov_from_record(&rec, 7).unwrap().exponents;
    assert!(e[0] <= e[1]);
    assert!((e[0] - 2f64.ln()).abs() < 1e-10 && (e[1] - 3f64.ln()).abs() < 1e-10);
}

proptest! {
    #[test]
    fn images_stay_in_fundamental_domain(x in 0.0f64..1.0, y in 0.0f64..1.0) {
        for m in DynamicalMap::catalog() {
            let p = Point::from_coords(m.space(), &[x, y][..m.dim()]);
            prop_assert!(m.evaluate(&p).in_fundamental_domain());
        }
    }

    #[test]
    fn derivative_matches_finite_difference(x in 0.01f64..0.99) {
        for m in circle_maps() {
            let p = Point::Circle(x);
            let analytic = m.jacobian(&p).operator_norm();
            let numeric = finite_difference(&m, &p, 1e-7).operator_norm();
            prop_assert!((analytic - numeric).abs() <= 1e-4 * analytic.max(1.0), "{} at {x}", m.id());
        }
    }

    #[test]
    fn digit_orbit_agrees_with_direct_evaluation(seed in 0u64..1000) {
        let m = DynamicalMap::tripling();
        let rec = OrbitRecord::typical(&m, 20, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        // f64 error grows by 3 per step; 20 steps stay far below 1e-3
        let mut p = rec.x0();
        for q in rec.points() {
            prop_assert!(p.dist(q) < 1e-3);
            p = m.evaluate(&p);
        }
    }

    #[test]
    fn periodic_digits_give_periodic_points(block in prop::collection::vec(0u8..2, 1..20)) {
        let s = DigitStream::periodic(2, block.clone());
        let m = minimal_period(&block);
        prop_assert!((s.value_at(0) - s.value_at(m)).abs() < 1e-15);
        // all-ones is the fixed point 0 written the other way
        let expect = if block.iter().all(|&d| d == 1) { vec![0; block.len()] } else { block.clone() };
        prop_assert_eq!(offset_block(&block, 2, 0), expect);
    }
}
