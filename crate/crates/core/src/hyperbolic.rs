//! Hyperbolic times: exact backward-sum detection, Pliss times, frequency,
//! concatenation audit, first-time return averages, (γ-)nonlacunarity and
//! the choice of the iterate power ℓ.
//!
//! n is a (c, δ)-hyperbolic time for x when every backward partial sum
//! Σ_{j=k}^{n−1} log‖Df(fʲx)⁻¹‖ is at most −2c(n−k), 0 ≤ k < n. With
//! vⱼ = log‖Df(fʲx)⁻¹‖ + 2c and prefix sums Pₙ = Σ_{j<n} vⱼ this is
//! Pₙ ≤ min_{k<n} Pₖ, so one pass with a running prefix minimum finds all
//! of them.

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::maps::DynamicalMap;
use crate::orbit::OrbitRecord;
use crate::HyperbolicError;

/// Absolute slack on backward sums; absorbs rounding at exact ties such as
/// the doubling map at c = (log 2)/2.
pub const SUM_SLACK: f64 = 1e-9;

/// Largest power tried by [`choose_power`].
pub const MAX_POWER: usize = 64;

/// All 1-based n ≤ len such that every backward partial sum of `values`
/// ending at n − 1 is ≤ `SUM_SLACK`.
pub fn backward_sum_scan(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prefix = 0.0f64;
    let mut min_prefix = 0.0f64;
    for (i, v) in values.iter().enumerate() {
        prefix += v;
        if prefix - min_prefix <= SUM_SLACK {
            out.push(i + 1);
        }
        if prefix < min_prefix {
            min_prefix = prefix;
        }
    }
    out
}

/// Exact hyperbolic times from a log-inverse-norm sequence.
pub fn exact_hyperbolic_times(log_inv_norms: &[f64], c: f64) -> Vec<usize> {
    let shifted: Vec<f64> = log_inv_norms.iter().map(|a| a + 2.0 * c).collect();
    backward_sum_scan(&shifted)
}

/// Pliss times of `values` at level `c1` plus the density statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlissReport {
    pub indices: Vec<usize>,
    pub density: f64,
    /// (c2 − c1)/(A − c1) with A = max(max aⱼ, |lower_bound|), reported
    /// when the sequence average reaches c2; never enforced.
    pub predicted_density: Option<f64>,
    pub average: f64,
}

/// n is a Pliss time iff Σ_{j=k}^{n−1} aⱼ ≥ c1·(n − k) for all k < n.
pub fn pliss_times(
    values: &[f64],
    c1: f64,
    c2: f64,
    lower_bound: f64,
) -> Result<PlissReport, HyperbolicError> {
    if c1 >= c2 {
        return Err(HyperbolicError::InvalidArgument(format!("need c1 < c2, got {c1} ≥ {c2}")));
    }
    if values.iter().any(|&a| a < lower_bound) {
        return Err(HyperbolicError::InvalidArgument(format!(
            "lower bound {lower_bound} exceeds the sequence minimum"
        )));
    }
    let shifted: Vec<f64> = values.iter().map(|a| c1 - a).collect();
    let indices = backward_sum_scan(&shifted);
    let n = values.len().max(1) as f64;
    let average = values.iter().sum::<f64>() / n;
    let sup = values
        .iter()
        .copied()
        .fold(lower_bound.abs(), f64::max);
    let predicted_density = (average >= c2 && sup > c1).then(|| (c2 - c1) / (sup - c1));
    Ok(PlissReport {
        density: indices.len() as f64 / n,
        indices,
        predicted_density,
        average,
    })
}

/// Brute-force O(N²) evaluation of the hyperbolic-time criterion; kept as
/// the reference for the linear scan.
pub fn hyperbolic_times_brute_force(log_inv_norms: &[f64], c: f64) -> Vec<usize> {
    (1..=log_inv_norms.len())
        .filter(|&n| {
            (0..n).all(|k| {
                let s: f64 = log_inv_norms[k..n].iter().sum();
                s <= -2.0 * c * (n - k) as f64 + SUM_SLACK
            })
        })
        .collect()
}

/// |indices| / N.
pub fn hyperbolic_frequency(indices: &[usize], n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        indices.iter().filter(|&&i| i <= n).count() as f64 / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcatenationViolation {
    pub m: usize,
    pub n: usize,
    pub sum: usize,
}

/// For every m in `indices`, rescans the sequence shifted by m and reports
/// each hyperbolic time n of fᵐx with m + n ∉ `indices`.
pub fn concatenation_check(
    log_inv_norms: &[f64],
    c: f64,
    indices: &[usize],
) -> Vec<ConcatenationViolation> {
    let set: std::collections::BTreeSet<usize> = indices.iter().copied().collect();
    let mut violations = Vec::new();
    for &m in indices {
        if m >= log_inv_norms.len() {
            continue;
        }
        for n in exact_hyperbolic_times(&log_inv_norms[m..], c) {
            if !set.contains(&(m + n)) {
                violations.push(ConcatenationViolation { m, n, sum: m + n });
            }
        }
    }
    violations
}

/// Normalizing function γ for gap ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Gamma {
    Identity,
    Power { p: f64 },
}

impl Gamma {
    pub fn apply(&self, t: f64) -> f64 {
        match self {
            Gamma::Identity => t,
            Gamma::Power { p } => t.powf(*p),
        }
    }

    pub fn id(&self) -> String {
        match self {
            Gamma::Identity => "identity".into(),
            Gamma::Power { p } => format!("power-{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub gamma: Gamma,
    /// (n_{k+1} − n_k) / γ(n_k).
    pub ratios: Vec<f64>,
    /// Maximum ratio over the last quartile of the sequence.
    pub tail_max: f64,
}

pub fn nonlacunarity_statistics(indices: &[usize], gamma: Gamma) -> Result<GapReport, HyperbolicError> {
    if indices.len() < 3 {
        return Err(HyperbolicError::TooFewTimes(indices.len()));
    }
    let ratios: Vec<f64> = indices
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64 / gamma.apply(w[0] as f64))
        .collect();
    let start = (3 * ratios.len()) / 4;
    let tail_max = ratios[start..].iter().copied().fold(0.0, f64::max);
    Ok(GapReport {
        gamma,
        ratios,
        tail_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnAverage {
    /// Mean of n_{i+1} − n_i with n₀ = 0, i.e. the orbit average of the
    /// first hyperbolic time along the successive hyperbolic returns.
    pub average: f64,
    /// 1/θ̂.
    pub inverse_frequency: f64,
}

pub fn first_time_return_average(log_inv_norms: &[f64], c: f64) -> Result<ReturnAverage, HyperbolicError> {
    let indices = exact_hyperbolic_times(log_inv_norms, c);
    first_time_return_average_of(&indices, log_inv_norms.len())
}

pub fn first_time_return_average_of(indices: &[usize], n: usize) -> Result<ReturnAverage, HyperbolicError> {
    if indices.is_empty() {
        return Err(HyperbolicError::NoHyperbolicTimes);
    }
    let mut prev = 0usize;
    let mut total = 0usize;
    for &t in indices {
        total += t - prev;
        prev = t;
    }
    Ok(ReturnAverage {
        average: total as f64 / indices.len() as f64,
        inverse_frequency: 1.0 / hyperbolic_frequency(indices, n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionMethod {
    ExactScan,
    Pliss,
}

/// Detected hyperbolic times of one record with their statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicTimeReport {
    pub c: f64,
    pub delta: f64,
    pub ell: usize,
    pub n: usize,
    pub indices: Vec<usize>,
    pub frequency_hat: f64,
    pub first_time: Option<usize>,
    pub gap_ratios: Vec<f64>,
    pub gap_tail_max: Option<f64>,
    pub gamma_id: String,
    pub method: DetectionMethod,
}

impl HyperbolicTimeReport {
    /// Scans `values` (log-inverse norms of g = f^ℓ) at level c.
    pub fn build(values: &[f64], c: f64, delta: f64, ell: usize, gamma: Gamma, method: DetectionMethod) -> Self {
        let indices = match method {
            DetectionMethod::ExactScan => exact_hyperbolic_times(values, c),
            DetectionMethod::Pliss => {
                let a: Vec<f64> = values.iter().map(|v| -v).collect();
                let shifted: Vec<f64> = a.iter().map(|x| 2.0 * c - x).collect();
                backward_sum_scan(&shifted)
            }
        };
        let gaps = nonlacunarity_statistics(&indices, gamma).ok();
        HyperbolicTimeReport {
            c,
            delta,
            ell,
            n: values.len(),
            frequency_hat: hyperbolic_frequency(&indices, values.len()),
            first_time: indices.first().copied(),
            gap_ratios: gaps.as_ref().map(|g| g.ratios.clone()).unwrap_or_default(),
            gap_tail_max: gaps.map(|g| g.tail_max),
            gamma_id: gamma.id(),
            indices,
            method,
        }
    }
}

/// Smallest ℓ ≤ 64 with sample-averaged (1/ℓ) log ‖Df^ℓ(y)⁻¹‖ < −4c, the
/// average running over base points y along orbits of length `n` from each
/// sample point.
pub fn choose_power(map: &DynamicalMap, c: f64, sample: &[Point], n: usize) -> Result<usize, HyperbolicError> {
    if c <= 0.0 || sample.is_empty() || n == 0 {
        return Err(HyperbolicError::InvalidArgument(
            "choose_power needs c > 0, a nonempty sample and n ≥ 1".into(),
        ));
    }
    let records: Vec<OrbitRecord> = sample
        .iter()
        .map(|&x| OrbitRecord::compute(map, x, n + MAX_POWER))
        .collect::<Result<_, _>>()
        .map_err(|e| HyperbolicError::InvalidArgument(e.to_string()))?;
    for ell in 1..=MAX_POWER {
        let mut total = 0.0;
        let mut count = 0usize;
        for rec in &records {
            for v in power_cocycle_windows(map, rec, ell, n) {
                if v.is_finite() {
                    total += v / ell as f64;
                    count += 1;
                }
            }
        }
        if count > 0 && total / (count as f64) < -4.0 * c {
            return Ok(ell);
        }
    }
    Err(HyperbolicError::NoSuchPower { c, max: MAX_POWER })
}

/// log ‖Df^ℓ(fʲx)⁻¹‖ for every base point j < n.
fn power_cocycle_windows(map: &DynamicalMap, rec: &OrbitRecord, ell: usize, n: usize) -> Vec<f64> {
    let a = rec.log_inv_norms();
    if map.dim() == 1 {
        let mut prefix = Vec::with_capacity(a.len() + 1);
        prefix.push(0.0);
        for v in a {
            prefix.push(prefix.last().unwrap() + v);
        }
        (0..n).map(|j| prefix[j + ell] - prefix[j]).collect()
    } else {
        let pts = rec.points();
        (0..n)
            .map(|j| {
                let mut prod = crate::geometry::Jacobian::identity(2);
                for p in &pts[j..j + ell] {
                    prod = map.jacobian(p).mul(&prod);
                }
                prod.inverse_norm().ln()
            })
            .collect()
    }
}

/// Resolved (c, δ, ℓ) for one experiment run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c: f64,
    pub delta: f64,
    pub ell: usize,
    pub frequency: f64,
}

pub const CALIBRATION_THRESHOLD: f64 = 0.05;
pub const DEFAULT_DELTA: f64 = 0.1;

/// The c ladder 0.4, 0.2, 0.1, … (twelve halvings).
pub fn c_ladder() -> impl Iterator<Item = f64> {
    (0..=12).map(|k| 0.4 / f64::powi(2.0, k))
}

/// Largest ladder c whose empirical hyperbolic-time frequency along
/// `record` exceeds 0.05; ℓ is then the smallest power whose cocycle average
/// lies below −2c, evaluated on `power_sample`.
pub fn calibrate(record: &OrbitRecord, power_sample: &[Point], power_n: usize) -> Result<Calibration, HyperbolicError> {
    for c in c_ladder() {
        let idx = exact_hyperbolic_times(record.log_inv_norms(), c);
        let freq = hyperbolic_frequency(&idx, record.len());
        if freq > CALIBRATION_THRESHOLD {
            let ell = choose_power(record.map(), c / 2.0, power_sample, power_n)?;
            return Ok(Calibration {
                c,
                delta: DEFAULT_DELTA,
                ell,
                frequency: freq,
            });
        }
    }
    Err(HyperbolicError::CalibrationFailed {
        threshold: CALIBRATION_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn doubling_boundary_case() {
        let a = vec![-LN2; 20];
        assert_eq!(exact_hyperbolic_times(&a, LN2 / 2.0), (1..=20).collect::<Vec<_>>());
        assert!(exact_hyperbolic_times(&a, 0.4).is_empty());
    }

    #[test]
    fn synthetic_sequence_matches_exhaustive_check() {
        // exhaustive check: n = 3, 4 fail at k = 2 (backward sums +1 and 0)
        let a = [-1.0, -1.0, 1.0, -1.0];
        let oracle = hyperbolic_times_brute_force(&a, 0.25);
        assert_eq!(oracle, vec![1, 2]);
        assert_eq!(exact_hyperbolic_times(&a, 0.25), oracle);
    }

    #[test]
    fn pliss_examples() {
        let r = pliss_times(&[LN2; 8], LN2 / 2.0, LN2 * 0.9, 0.0).unwrap();
        assert_eq!(r.indices, (1..=8).collect::<Vec<_>>());
        let r = pliss_times(&[1.0, 1.0, 0.0, 1.0], 0.5, 0.7, 0.0).unwrap();
        assert_eq!(r.indices, vec![1, 2, 4]);
        assert_eq!(r.predicted_density, Some((0.7 - 0.5) / (1.0 - 0.5)));
        assert!(r.density >= r.predicted_density.unwrap());
        let r = pliss_times(&[-1.0, -1.0, -1.0], 0.5, 0.6, -1.0).unwrap();
        assert!(r.indices.is_empty());
        assert!(pliss_times(&[0.0], 0.5, 0.4, 0.0).is_err());
        assert!(pliss_times(&[0.0], 0.1, 0.4, 1.0).is_err());
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(hyperbolic_frequency(&[1, 2, 3], 3), 1.0);
        assert_eq!(hyperbolic_frequency(&[], 10), 0.0);
        let a = vec![-LN2; 1000];
        assert_eq!(hyperbolic_frequency(&exact_hyperbolic_times(&a, LN2 / 2.0), 1000), 1.0);
    }

    #[test]
    fn concatenation_examples() {
        let a = vec![-LN2; 30];
        let idx = exact_hyperbolic_times(&a, LN2 / 2.0);
        assert!(concatenation_check(&a, LN2 / 2.0, &idx).is_empty());
        let v = concatenation_check(&a, LN2 / 2.0, &[2, 3]);
        assert!(v.contains(&ConcatenationViolation { m: 2, n: 3, sum: 5 }));
    }

    #[test]
    fn gap_examples() {
        let idx: Vec<usize> = (1..=100).collect();
        let g = nonlacunarity_statistics(&idx, Gamma::Identity).unwrap();
        assert!(g.tail_max <= 4.0 / (3.0 * 100.0));
        let idx: Vec<usize> = (0..20).map(|k| 1usize << k).collect();
        let g = nonlacunarity_statistics(&idx, Gamma::Identity).unwrap();
        assert!(g.ratios.iter().all(|&r| r == 1.0));
        assert_eq!(
            nonlacunarity_statistics(&[1, 2], Gamma::Identity),
            Err(HyperbolicError::TooFewTimes(2))
        );
        let g = nonlacunarity_statistics(&[4, 8, 12], Gamma::Power { p: 0.5 }).unwrap();
        assert_eq!(g.ratios, vec![2.0, 4.0 / 8f64.sqrt()]);
    }

    #[test]
    fn return_average_examples() {
        let a = vec![-LN2; 50];
        for c in [LN2 / 2.0, LN2 / 4.0] {
            let r = first_time_return_average(&a, c).unwrap();
            assert_eq!(r.average, 1.0);
            assert_eq!(r.inverse_frequency, 1.0);
        }
        assert_eq!(first_time_return_average(&a, 0.5), Err(HyperbolicError::NoHyperbolicTimes));
    }

    #[test]
    fn power_examples() {
        let d = DynamicalMap::doubling();
        let sample = [Point::Circle(0.1), Point::Circle(0.7)];
        assert_eq!(choose_power(&d, 0.1, &sample, 100), Ok(1));
        assert_eq!(choose_power(&d, 0.17, &sample, 100), Ok(1));
        assert!(matches!(choose_power(&d, 0.2, &sample, 100), Err(HyperbolicError::NoSuchPower { .. })));
    }
}
