use hyperlab::balls::{BallSpec, QProfile};
use hyperlab::closing::{
    bisection_search, closing_record, covering_offset, find_periodic_in_ball, find_periodic_nonuniform,
    orbit_discrepancy, periodic_measure_discrepancy, specification_sweep, target_rule, Observable, TrialOutcome,
};
use hyperlab::hyperbolic::Calibration;
use hyperlab::{ClosingError, DynamicalMap, OrbitRecord, Point};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circle(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// Period-m points of x ↦ bx on one axis as exact residues k·bʲ mod (bᵐ − 1).
fn rational_orbit(b: u64, m: u32, k: u64, steps: usize) -> Vec<f64> {
    let modulus = b.pow(m) - 1;
    let mut r = k % modulus;
    let mut out = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        out.push(r as f64 / modulus as f64);
        r = r * b % modulus;
    }
    out
}

fn f64_orbit(b: f64, x: f64, steps: usize) -> Vec<f64> {
    let mut v = x;
    let mut out = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        out.push(v);
        v = (b * v).fract();
    }
    out
}

/// Smallest block length m ≥ n with a period-m rational in B_n(x, ε), and
/// among those the point closest to x.
fn doubling_oracle(x: f64, n: usize, eps: f64, m_max: u32) -> Option<(f64, u32)> {
    let xs = f64_orbit(2.0, x, n);
    for m in (n as u32).max(1)..=m_max {
        let modulus = (1u64 << m) - 1;
        let mut best: Option<(f64, f64)> = None;
        for k in 0..modulus {
            let ps = rational_orbit(2, m, k, n);
            if ps.iter().zip(&xs).all(|(p, q)| circle(*p, *q) < eps) {
                let d = circle(ps[0], x);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((ps[0], d));
                }
            }
        }
        if let Some((p, _)) = best {
            return Some((p, m));
        }
    }
    None
}

#[test]
fn doubling_point_three_oracle() {
    let (p, m) = doubling_oracle(0.3, 3, 0.1, 8).unwrap();
    assert_eq!(m, 5);
    assert!((p - 9.0 / 31.0).abs() < 1e-15);
    let r = find_periodic_in_ball(&closing_record(&DynamicalMap::doubling(), Point::Circle(0.3), 64).unwrap(), 3, 0.1, 8)
        .unwrap();
    assert!((r.periodic_point.coord(0) - p).abs() < 1e-15);
    assert_eq!((r.period, r.overshoot), (5, 2));
}

#[test]
fn enumeration_matches_rational_oracle() {
    let m = DynamicalMap::doubling();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let x: f64 = rng.random();
        let n = rng.random_range(1..7);
        let eps = rng.random_range(0.02..0.24);
        let rec = closing_record(&m, Point::Circle(x), 64).unwrap();
        match (doubling_oracle(x, n, eps, 12), find_periodic_in_ball(&rec, n, eps, 12)) {
            (Some((p, block)), Ok(r)) => {
                assert!((r.periodic_point.coord(0) - p).abs() < 1e-12, "x={x} n={n} eps={eps}");
                assert_eq!(block as usize % r.period, 0);
                // independent re-verification
                let ps = f64_orbit(2.0, r.periodic_point.coord(0), n);
                let xs = f64_orbit(2.0, x, n);
                assert!(ps.iter().zip(&xs).all(|(a, b)| circle(*a, *b) < eps + 1e-12));
            }
            (None, Err(ClosingError::NotFound(12))) => {}
            (o, r) => panic!("x={x} n={n} eps={eps}: oracle {o:?} vs {r:?}"),
        }
    }
}

#[test]
fn bisection_returns_rational_points() {
    let m = DynamicalMap::doubling();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut found = 0;
    for _ in 0..1000 {
        let x: f64 = rng.random();
        let n = rng.random_range(1..6);
        let eps = rng.random_range(0.05..0.24);
        let rec = OrbitRecord::compute(&m, Point::Circle(x), 40).unwrap();
        let ball = BallSpec::uniform(Point::Circle(x), n, eps);
        if let Ok(r) = bisection_search(&rec, &ball, n, 12) {
            found += 1;
            let modulus = ((1u64 << r.period) - 1) as f64;
            let k = r.periodic_point.coord(0) * modulus;
            assert!((k - k.round()).abs() < 1e-6, "not a period-{} rational: {k}", r.period);
            let xs = f64_orbit(2.0, x, n);
            let ps = rational_orbit(2, r.period as u32, k.round() as u64, n);
            assert!(ps.iter().zip(&xs).all(|(a, b)| circle(*a, *b) < eps));
        }
    }
    assert!(found > 900);
}

#[test]
fn torus_witness_matches_lattice_oracle() {
    let map = DynamicalMap::diag23();
    let x = [0.3, 0.7];
    let rec = closing_record(&map, Point::Torus(x), 64).unwrap();
    let r = find_periodic_in_ball(&rec, 2, 0.1, 8).unwrap();
    let bound = 2 + covering_offset(&map, &Point::Torus(x), 0.1).unwrap();
    assert!(r.period <= bound);
    // oracle: the lattice (2ᵐ−1)⁻¹ℤ × (3ᵐ−1)⁻¹ℤ for ascending m
    let xs = f64_orbit(2.0, x[0], 2);
    let ys = f64_orbit(3.0, x[1], 2);
    let mut oracle = None;
    'outer: for m in 2..=6u32 {
        let mut best: Option<(f64, [f64; 2])> = None;
        for i in 0..(1u64 << m) - 1 {
            let a = rational_orbit(2, m, i, 2);
            if !a.iter().zip(&xs).all(|(p, q)| circle(*p, *q) < 0.1) {
                continue;
            }
            for j in 0..3u64.pow(m) - 1 {
                let b = rational_orbit(3, m, j, 2);
                if b.iter().zip(&ys).all(|(p, q)| circle(*p, *q) < 0.1) {
                    let d = circle(a[0], x[0]).max(circle(b[0], x[1]));
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, [a[0], b[0]]));
                    }
                }
            }
        }
        if let Some((_, p)) = best {
            oracle = Some(p);
            break 'outer;
        }
    }
    let p = oracle.unwrap();
    let got = r.periodic_point;
    assert!(circle(got.coord(0), p[0]) < 1e-12 && circle(got.coord(1), p[1]) < 1e-12);
}

fn doubling_calibration() -> Calibration {
    Calibration {
        c: 0.2,
        delta: 0.1,
        ell: 1,
        frequency: 1.0,
    }
}

#[test]
fn unit_profile_agrees_with_uniform_search() {
    let m = DynamicalMap::doubling();
    let cal = doubling_calibration();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for _ in 0..100 {
        let rec = OrbitRecord::typical(&m, 400, &mut rng).unwrap();
        let n = rng.random_range(2..40);
        let q = QProfile::constant(1.0);
        let a = find_periodic_nonuniform(&rec, n, 0.01, &q, 0.1, &cal).unwrap();
        let target = a.target_rule.unwrap().target;
        let b = find_periodic_in_ball(&rec, n, 0.01, target).unwrap();
        assert_eq!(a.periodic_point, b.periodic_point);
        assert_eq!(a.period, b.period);
    }
}

#[test]
fn smaller_eta_never_increases_k_or_target() {
    let m = DynamicalMap::doubling();
    let cal = doubling_calibration();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..40 {
        let rec = OrbitRecord::typical(&m, 600, &mut rng).unwrap();
        let n = rng.random_range(4..100);
        for eta in [0.4, 0.2, 0.1] {
            let big = find_periodic_nonuniform(&rec, n, 1e-3, &QProfile::exponential(eta), eta, &cal).unwrap();
            let half = eta / 2.0;
            let small = find_periodic_nonuniform(&rec, n, 1e-3, &QProfile::exponential(half), half, &cal).unwrap();
            assert!(small.overshoot <= big.overshoot);
            assert!(small.target_rule.unwrap().target <= big.target_rule.unwrap().target);
        }
    }
}

#[test]
fn overshoot_bound_for_doubling() {
    let m = DynamicalMap::doubling();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        let rec = OrbitRecord::typical(&m, 300, &mut rng).unwrap();
        let n = rng.random_range(1..120);
        let eps = rng.random_range(1e-3..0.1);
        let r = find_periodic_in_ball(&rec, n, eps, n + 64).unwrap();
        // every time is hyperbolic at c = 0.2, so consecutive times differ by one
        let cover = covering_offset(&m, &rec.x0(), eps).unwrap();
        assert!(r.overshoot <= cover as i64 + 1, "K = {} > N(ε) + 1 = {}", r.overshoot, cover + 1);
    }
}

#[test]
fn results_reverify_by_direct_iteration() {
    let m = DynamicalMap::doubling();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let recs: Vec<OrbitRecord> = (0..4).map(|_| OrbitRecord::typical(&m, 600, &mut rng).unwrap()).collect();
    let v = specification_sweep(&recs, &[8, 16, 32, 64, 128], &[0.2, 0.1, 0.05], 1e-3, &doubling_calibration()).unwrap();
    for e in &v.entries {
        let TrialOutcome::Found { result } = &e.outcome else {
            panic!("gap at {e:?}")
        };
        let blk = &result.blocks.as_ref().unwrap()[0];
        let k = BigUint::parse_bytes(blk.as_bytes(), 2).unwrap();
        let modulus = (BigUint::from(1u8) << blk.len()) - 1u8;
        let scale = BigUint::from(1u8) << 64;
        let as_f64 = |r: &BigUint| {
            let top: BigUint = r * &scale / &modulus;
            top.to_u64_digits().first().copied().unwrap_or(0) as f64 / 2f64.powi(64)
        };
        let xs = recs[e.center_index].points();
        let mut r = &k % &modulus;
        for (step, radius) in result.radii.iter().enumerate() {
            assert!(circle(as_f64(&r), xs[step].coord(0)) < *radius);
            r = (r * 2u8) % &modulus;
        }
        let mut back = &k % &modulus;
        for _ in 0..result.period {
            back = (back * 2u8) % &modulus;
        }
        assert_eq!(back, &k % &modulus);
    }
}

#[test]
fn target_is_monotone_in_eta() {
    let m = DynamicalMap::doubling();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let rec = OrbitRecord::typical(&m, 500, &mut rng).unwrap();
    let cal = doubling_calibration();
    let mut last = 0;
    for eta in [0.01, 0.05, 0.1, 0.2, 0.4] {
        let t = target_rule(&rec, 50, 1e-3, &QProfile::exponential(eta), eta, &cal).unwrap();
        assert!(t.target >= last);
        last = t.target;
    }
}

#[test]
fn discrepancy_of_full_period_set_is_small() {
    // all period-12 points of the doubling map: cos sums over roots of unity vanish
    let m = DynamicalMap::doubling();
    let modulus = (1u64 << 12) - 1;
    let pts: Vec<Point> = (0..modulus).map(|k| Point::Circle(k as f64 / modulus as f64)).collect();
    let d = orbit_discrepancy(&m, &[&pts], &[Observable::Cos, Observable::Sin]).unwrap();
    assert!(d < 1e-12);
    let empty: Vec<hyperlab::closing::ClosingResult> = Vec::new();
    assert!(periodic_measure_discrepancy(&m, &empty, &Observable::LIBRARY).is_err());
}
