//! Finite orbits with cached derivative-cocycle data, Birkhoff averages,
//! Lyapunov spectra and the two hyperbolic-time sufficient conditions
//! (asymptotic expansion and slow approximation to the critical set).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::digits::{window_len, DigitStream};
use crate::geometry::{Jacobian, Point};
use crate::maps::DynamicalMap;
use crate::OrbitError;

/// A finite trajectory f⁰(x₀), …, f^N(x₀) with its log-derivative sequence.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    map: DynamicalMap,
    x0: Point,
    points: Vec<Point>,
    log_inv_norms: Vec<f64>,
    critical_hits: Vec<usize>,
    expansion: Option<Vec<DigitStream>>,
    trunc_cache: Vec<(f64, Vec<f64>)>,
}

impl OrbitRecord {
    /// Iterates `map` from `x0` for `n` steps in floating point.
    pub fn compute(map: &DynamicalMap, x0: Point, n: usize) -> Result<Self, OrbitError> {
        if n == 0 {
            return Err(OrbitError::InvalidArgument("orbit length must be ≥ 1".into()));
        }
        if x0.space() != map.space() {
            return Err(OrbitError::InvalidArgument(format!(
                "{} acts on {:?}, got {x0:?}",
                map.id(),
                map.space()
            )));
        }
        let x0 = x0.wrapped();
        let mut points = Vec::with_capacity(n + 1);
        points.push(x0);
        for i in 0..n {
            let next = map.evaluate(&points[i]);
            points.push(next);
        }
        Ok(Self::from_points(map, points, None))
    }

    /// Builds the orbit of the point whose base-b expansions (one stream per
    /// coordinate) are given. Only valid for maps with `digit_bases`; the
    /// streams must carry at least `n` digits plus one f64 window.
    pub fn from_digits(
        map: &DynamicalMap,
        streams: Vec<DigitStream>,
        n: usize,
    ) -> Result<Self, OrbitError> {
        let bases = map.digit_bases().ok_or_else(|| {
            OrbitError::InvalidArgument(format!("{} has no digit representation", map.id()))
        })?;
        if streams.len() != bases.len()
            || streams.iter().zip(&bases).any(|(s, &b)| s.base() != b)
        {
            return Err(OrbitError::InvalidArgument("digit streams do not match the map's bases".into()));
        }
        if n == 0 {
            return Err(OrbitError::InvalidArgument("orbit length must be ≥ 1".into()));
        }
        let points: Vec<Point> = (0..=n)
            .map(|i| {
                let c: Vec<f64> = streams.iter().map(|s| s.value_at(i)).collect();
                Point::from_coords(map.space(), &c)
            })
            .collect();
        Ok(Self::from_points(map, points, Some(streams)))
    }

    /// Orbit of a point drawn from the map's reference measure. For the
    /// integer-multiplier maps the point is drawn digit by digit so that the
    /// whole orbit stays exact and typical.
    pub fn typical<R: Rng + ?Sized>(
        map: &DynamicalMap,
        n: usize,
        rng: &mut R,
    ) -> Result<Self, OrbitError> {
        match map.digit_bases() {
            Some(bases) => {
                let streams = bases
                    .iter()
                    .map(|&b| DigitStream::random(b, n + window_len(b) + 8, rng))
                    .collect();
                Self::from_digits(map, streams, n)
            }
            None => {
                let x0 = map.reference_measure.sample(map.space(), rng);
                Self::compute(map, x0, n)
            }
        }
    }

    fn from_points(map: &DynamicalMap, points: Vec<Point>, expansion: Option<Vec<DigitStream>>) -> Self {
        let n = points.len() - 1;
        let mut log_inv_norms = Vec::with_capacity(n);
        let mut critical_hits = Vec::new();
        for (i, p) in points[..n].iter().enumerate() {
            match map.log_inverse_norm(p) {
                Ok(v) => log_inv_norms.push(v),
                Err(_) => {
                    log_inv_norms.push(f64::INFINITY);
                    critical_hits.push(i);
                }
            }
        }
        OrbitRecord {
            map: map.clone(),
            x0: points[0],
            points,
            log_inv_norms,
            critical_hits,
            expansion,
            trunc_cache: Vec::new(),
        }
    }

    pub fn map(&self) -> &DynamicalMap {
        &self.map
    }

    pub fn map_id(&self) -> String {
        self.map.id()
    }

    pub fn x0(&self) -> Point {
        self.x0
    }

    /// Orbit length N (number of steps).
    pub fn len(&self) -> usize {
        self.log_inv_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_inv_norms.is_empty()
    }

    /// f⁰(x₀) … f^N(x₀).
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// log ‖Df(fⁱ(x₀))⁻¹‖ for i < N; +∞ at critical hits.
    pub fn log_inv_norms(&self) -> &[f64] {
        &self.log_inv_norms
    }

    pub fn critical_hits(&self) -> &[usize] {
        &self.critical_hits
    }

    /// Digit expansions of x₀ when the record was built from digits.
    pub fn expansion(&self) -> Option<&[DigitStream]> {
        self.expansion.as_deref()
    }

    /// Precomputes −log dist_δ(fⁱ(x₀), C) for i < N.
    pub fn with_truncation(mut self, delta: f64) -> Self {
        if self.log_trunc_dists(delta).is_none() {
            let n = self.len();
            let values = self.points[..n]
                .iter()
                .map(|p| -self.map.truncated_critical_distance(p, delta).ln())
                .collect();
            self.trunc_cache.push((delta, values));
        }
        self
    }

    /// Cached −log dist_δ sequence, if `with_truncation(delta)` was called.
    pub fn log_trunc_dists(&self, delta: f64) -> Option<&[f64]> {
        self.trunc_cache
            .iter()
            .find(|(d, _)| *d == delta)
            .map(|(_, v)| v.as_slice())
    }

    /// (1/N) Σ_{i<N} φ(fⁱ(x₀)).
    pub fn birkhoff_average<F: Fn(&Point) -> f64>(&self, observable: F) -> f64 {
        let n = self.len();
        self.points[..n].iter().map(observable).sum::<f64>() / n as f64
    }

    /// log ‖Dg(gʲ(x₀))⁻¹‖ for g = f^ℓ, j < ⌊N/ℓ⌋, computed from the full
    /// Jacobian products along each block.
    pub fn power_log_inv_norms(&self, ell: usize) -> Vec<f64> {
        assert!(ell >= 1);
        if ell == 1 {
            return self.log_inv_norms.clone();
        }
        let blocks = self.len() / ell;
        (0..blocks)
            .map(|j| {
                let start = j * ell;
                if self.map.dim() == 1 {
                    self.log_inv_norms[start..start + ell].iter().sum()
                } else {
                    let mut prod = Jacobian::identity(self.map.dim());
                    for p in &self.points[start..start + ell] {
                        prod = self.map.jacobian(p).mul(&prod);
                    }
                    prod.inverse_norm().ln()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// Ascending.
    pub exponents: Vec<f64>,
    pub iterates_used: usize,
    pub reorthogonalization_period: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovOptions {
    pub burn_in: usize,
    pub reorthogonalization_period: usize,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        LyapunovOptions {
            burn_in: 1000,
            reorthogonalization_period: 10,
        }
    }
}

/// Lyapunov spectrum from `n` iterates after the default burn-in.
pub fn lyapunov_spectrum(
    map: &DynamicalMap,
    x0: Point,
    n: usize,
) -> Result<LyapunovEstimate, OrbitError> {
    lyapunov_spectrum_with(map, x0, n, LyapunovOptions::default())
}

pub fn lyapunov_spectrum_with(
    map: &DynamicalMap,
    x0: Point,
    n: usize,
    opts: LyapunovOptions,
) -> Result<LyapunovEstimate, OrbitError> {
    if n == 0 || opts.reorthogonalization_period == 0 {
        return Err(OrbitError::InvalidArgument(
            "need n ≥ 1 and a positive reorthogonalization period".into(),
        ));
    }
    let start = map.iterate(&x0.wrapped(), opts.burn_in);
    let record = OrbitRecord::compute(map, start, n)?;
    lyapunov_from_record(&record, opts.reorthogonalization_period)
}

/// Lyapunov spectrum along an existing record (no burn-in).
pub fn lyapunov_from_record(
    record: &OrbitRecord,
    reorthogonalization_period: usize,
) -> Result<LyapunovEstimate, OrbitError> {
    let map = record.map();
    let n = record.len();
    let hits = record.critical_hits().len();
    let used = n - hits;
    let exponents = if map.dim() == 1 {
        let sum: f64 = record
            .log_inv_norms()
            .iter()
            .filter(|v| v.is_finite())
            .map(|v| -v)
            .sum();
        vec![sum / used.max(1) as f64]
    } else {
        qr_exponents(record, reorthogonalization_period)
    };
    let estimate = LyapunovEstimate {
        exponents,
        iterates_used: used,
        reorthogonalization_period,
    };
    if hits > 0 {
        Err(OrbitError::DegenerateCocycle {
            hits,
            partial: estimate,
        })
    } else {
        Ok(estimate)
    }
}

/// Two-dimensional spectrum by Gram–Schmidt reorthogonalization of the
/// tangent frame every `period` steps.
fn qr_exponents(record: &OrbitRecord, period: usize) -> Vec<f64> {
    let map = record.map();
    let n = record.len();
    let mut frame = Jacobian::identity(2);
    let mut sums = [0.0f64; 2];
    let mut used = 0usize;
    for (i, p) in record.points()[..n].iter().enumerate() {
        if record.log_inv_norms()[i].is_infinite() {
            continue;
        }
        frame = map.jacobian(p).mul(&frame);
        used += 1;
        if used.is_multiple_of(period) || i + 1 == n {
            let (q, r) = gram_schmidt(&frame);
            sums[0] += r[0].ln();
            sums[1] += r[1].ln();
            frame = q;
        }
    }
    let mut exps: Vec<f64> = sums.iter().map(|s| s / used.max(1) as f64).collect();
    exps.sort_by(|a, b| a.total_cmp(b));
    exps
}

/// QR of a 2×2 matrix by classical Gram–Schmidt on its columns; returns Q
/// and the diagonal |R₁₁|, |R₂₂|.
fn gram_schmidt(a: &Jacobian) -> (Jacobian, [f64; 2]) {
    let c0 = [a.m[0][0], a.m[1][0]];
    let c1 = [a.m[0][1], a.m[1][1]];
    let r00 = (c0[0] * c0[0] + c0[1] * c0[1]).sqrt();
    let q0 = [c0[0] / r00, c0[1] / r00];
    let r01 = q0[0] * c1[0] + q0[1] * c1[1];
    let v = [c1[0] - r01 * q0[0], c1[1] - r01 * q0[1]];
    let r11 = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let q1 = [v[0] / r11, v[1] / r11];
    (
        Jacobian::matrix([[q0[0], q1[0]], [q0[1], q1[1]]]),
        [r00, r11],
    )
}

/// Running value of the asymptotic-expansion average at the record length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionVerdict {
    /// (1/N) Σ log ‖Df(fⁱx)⁻¹‖⁻¹ over non-critical steps.
    pub value: f64,
    pub threshold: f64,
    pub expanding: bool,
    pub n: usize,
}

pub fn expansion_criterion(record: &OrbitRecord, c: f64) -> Result<ExpansionVerdict, OrbitError> {
    if c <= 0.0 {
        return Err(OrbitError::InvalidArgument(format!("c must be positive, got {c}")));
    }
    let finite: Vec<f64> = record
        .log_inv_norms()
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    let value = -finite.iter().sum::<f64>() / finite.len().max(1) as f64;
    Ok(ExpansionVerdict {
        value,
        threshold: 4.0 * c,
        expanding: value > 4.0 * c,
        n: record.len(),
    })
}

/// (1/N) Σ −log dist_δ(fⁱx, C). A step within the critical tolerance makes
/// the sum +∞ and is reported as `CriticalHit`.
pub fn slow_approximation_criterion(record: &OrbitRecord, delta: f64) -> Result<f64, OrbitError> {
    if delta <= 0.0 {
        return Err(OrbitError::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if let Some(&step) = record.critical_hits().first() {
        return Err(OrbitError::CriticalHit { step });
    }
    let n = record.len();
    let sum: f64 = match record.log_trunc_dists(delta) {
        Some(v) => v.iter().sum(),
        None => record.points()[..n]
            .iter()
            .map(|p| -record.map().truncated_critical_distance(p, delta).ln())
            .sum(),
    };
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn doubling_period_two_orbit() {
        let rec = OrbitRecord::compute(&DynamicalMap::doubling(), Point::Circle(1.0 / 3.0), 4).unwrap();
        let want = [1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0];
        for (p, w) in rec.points().iter().zip(want) {
            assert!((p.coord(0) - w).abs() < 1e-15);
        }
        let rec = OrbitRecord::compute(&DynamicalMap::doubling(), Point::Circle(0.0), 3).unwrap();
        assert!(rec.points().iter().all(|p| *p == Point::Circle(0.0)));
    }

    #[test]
    fn chebyshev_starting_on_critical_point() {
        let rec = OrbitRecord::compute(&DynamicalMap::chebyshev(), Point::Circle(0.5), 2).unwrap();
        let xs: Vec<f64> = rec.points().iter().map(|p| p.coord(0)).collect();
        assert_eq!(xs, vec![0.5, 0.0, 0.0]);
        assert_eq!(rec.critical_hits(), &[0]);
        assert!(rec.log_inv_norms()[0].is_infinite());
        assert!(rec.log_inv_norms()[1].is_finite());
    }

    #[test]
    fn birkhoff_examples() {
        let rec = OrbitRecord::compute(&DynamicalMap::doubling(), Point::Circle(1.0 / 3.0), 2).unwrap();
        let avg = rec.birkhoff_average(|p| (2.0 * std::f64::consts::PI * p.coord(0)).cos());
        assert!((avg + 0.5).abs() < 1e-12);
        assert_eq!(rec.birkhoff_average(|_| 1.0), 1.0);
    }

    #[test]
    fn typical_doubling_orbit_equidistributes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rec = OrbitRecord::typical(&DynamicalMap::doubling(), 1_000_000, &mut rng).unwrap();
        let avg = rec.birkhoff_average(|p| (2.0 * std::f64::consts::PI * p.coord(0)).cos());
        assert!(avg.abs() < 3e-3, "{avg}");
    }

    #[test]
    fn digit_orbit_matches_evaluate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for map in [DynamicalMap::doubling(), DynamicalMap::tripling(), DynamicalMap::diag23()] {
            let rec = OrbitRecord::typical(&map, 500, &mut rng).unwrap();
            for w in rec.points().windows(2) {
                assert!(map.evaluate(&w[0]).dist(&w[1]) < 1e-12);
            }
        }
    }

    #[test]
    fn constant_spectra() {
        let est = lyapunov_spectrum(&DynamicalMap::diag23(), Point::Torus([0.1234, 0.5678]), 1000).unwrap();
        assert!((est.exponents[0] - 2f64.ln()).abs() < 1e-10);
        assert!((est.exponents[1] - 3f64.ln()).abs() < 1e-10);
        let est = lyapunov_spectrum(&DynamicalMap::doubling(), Point::Circle(0.1234), 1000).unwrap();
        assert!((est.exponents[0] - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn reorthogonalization_period_is_irrelevant_for_diag23() {
        let map = DynamicalMap::diag23();
        let x0 = Point::Torus([0.31, 0.77]);
        let base = lyapunov_spectrum_with(&map, x0, 5000, LyapunovOptions { burn_in: 0, reorthogonalization_period: 1 }).unwrap();
        for period in [10, 100] {
            let e = lyapunov_spectrum_with(&map, x0, 5000, LyapunovOptions { burn_in: 0, reorthogonalization_period: period }).unwrap();
            for k in 0..2 {
                assert!((e.exponents[k] - base.exponents[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cocycle_consistency_in_one_dimension() {
        let map = DynamicalMap::chebyshev();
        let rec = OrbitRecord::compute(&map, Point::Circle(0.2137), 100_000).unwrap();
        let est = lyapunov_from_record(&rec, 10).unwrap();
        let birkhoff = rec.log_inv_norms().iter().sum::<f64>() / rec.len() as f64;
        assert!((est.exponents[0] + birkhoff).abs() < 1e-12);
    }

    #[test]
    fn expansion_examples() {
        let rec = OrbitRecord::compute(&DynamicalMap::doubling(), Point::Circle(0.1), 100).unwrap();
        let v = expansion_criterion(&rec, 0.1).unwrap();
        assert!((v.value - 2f64.ln()).abs() < 1e-12 && v.expanding);
        assert!(!expansion_criterion(&rec, 0.2).unwrap().expanding);
    }

    #[test]
    fn slow_approximation_examples() {
        let rec = OrbitRecord::compute(&DynamicalMap::doubling(), Point::Circle(0.1), 50).unwrap();
        assert_eq!(slow_approximation_criterion(&rec, 0.3).unwrap(), 0.0);

        // x₀ with f³(x₀) = 1/2, obtained by pulling 1/2 back along the left branch
        let mut y = 0.5f64;
        for _ in 0..3 {
            y = (1.0 - (1.0 - y).sqrt()) / 2.0;
        }
        let rec = OrbitRecord::compute(&DynamicalMap::chebyshev(), Point::Circle(y), 10).unwrap();
        assert_eq!(
            slow_approximation_criterion(&rec, 1e-3),
            Err(OrbitError::CriticalHit { step: 3 })
        );
    }
}
