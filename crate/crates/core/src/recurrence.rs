//! Poincaré recurrence τ(B(x, r)) = inf{n ≥ 1 : fⁿ(B) ∩ B ≠ ∅} of shrinking
//! balls and the fitted recurrence exponent lim τ/(−log r).

use serde::{Deserialize, Serialize};

use crate::balls::{affine_image, CellCloud};
use crate::geometry::{circle_dist, Point};
use crate::maps::DynamicalMap;
use crate::RecurrenceError;

/// Fraction of a center's radius ladder that may be censored.
pub const CENSOR_LIMIT: f64 = 0.2;

/// Grid-image resolution relative to the radius.
pub const GRID_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauMethod {
    ExactImage,
    GridImage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSample {
    pub center: Point,
    pub radius: f64,
    /// First return, or `n_max` when censored.
    pub tau: usize,
    pub method: TauMethod,
    pub n_max: usize,
    pub censored: bool,
}

/// τ by exact arc/rectangle images for the affine maps, by the linearized
/// cell grid otherwise.
pub fn tau_ball(map: &DynamicalMap, center: &Point, radius: f64, n_max: usize) -> Result<RecurrenceSample, RecurrenceError> {
    let method = if map.digit_bases().is_some() {
        TauMethod::ExactImage
    } else {
        TauMethod::GridImage
    };
    tau_ball_with(map, center, radius, n_max, method)
}

pub fn tau_ball_with(
    map: &DynamicalMap,
    center: &Point,
    radius: f64,
    n_max: usize,
    method: TauMethod,
) -> Result<RecurrenceSample, RecurrenceError> {
    if !(radius > 0.0) || n_max == 0 {
        return Err(RecurrenceError::InvalidArgument(format!(
            "need radius > 0 and n_max ≥ 1, got {radius}, {n_max}"
        )));
    }
    if center.space() != map.space() {
        return Err(RecurrenceError::InvalidArgument(format!("{center:?} is not in the phase space of {}", map.id())));
    }
    let sample = |tau| RecurrenceSample {
        center: *center,
        radius,
        tau,
        method,
        n_max,
        censored: false,
    };
    match method {
        TauMethod::ExactImage => {
            if map.digit_bases().is_none() {
                return Err(RecurrenceError::InvalidArgument(format!(
                    "exact images need an affine map, {} is not",
                    map.id()
                )));
            }
            for n in 1..=n_max {
                let img = affine_image(map, center, radius, n).expect("affine");
                let hit = img.iter().enumerate().all(|(axis, &(c, h))| {
                    2.0 * h >= 1.0 || circle_dist(c, center.coord(axis)) < h + radius
                });
                if hit {
                    return Ok(sample(n));
                }
            }
        }
        TauMethod::GridImage => {
            let mut cloud = CellCloud::new(map, center, radius, radius * GRID_FRACTION);
            for n in 1..=n_max {
                cloud.step();
                if cloud.meets(center, radius) {
                    return Ok(sample(n));
                }
            }
        }
    }
    Err(RecurrenceError::NoReturnBy(n_max))
}

/// `count` radii log-spaced from `r_max` down to `r_min`.
pub fn log_ladder(r_max: f64, r_min: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![r_max];
    }
    let (a, b) = (r_max.ln(), r_min.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterFit {
    pub center: Point,
    pub slope: Option<f64>,
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub samples: Vec<RecurrenceSample>,
    pub per_center: Vec<CenterFit>,
    /// Median of the per-center slopes.
    pub slope: f64,
    /// (1/λ_d, 1/λ₁), when the exponents are known.
    pub bounds: Option<(f64, f64)>,
    /// d/(λ₁ + … + λ_d), the exact value for the product maps.
    pub torus_value: Option<f64>,
    pub below_upper: Option<bool>,
    pub above_lower: Option<bool>,
    /// The lower bound needs positive entropy; taken as known, not checked.
    pub assumes_positive_entropy: bool,
}

/// Ordinary least-squares slope of y on x.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    Some(if m % 2 == 1 { v[m / 2] } else { 0.5 * (v[m / 2 - 1] + v[m / 2]) })
}

/// Fits τ against −log r per center and pools by the median.
pub fn recurrence_exponent(
    map: &DynamicalMap,
    centers: &[Point],
    radius_ladder: &[f64],
    n_max: usize,
) -> Result<ExponentFit, RecurrenceError> {
    validate_inputs(centers, radius_ladder)?;
    let rows: Vec<Vec<RecurrenceSample>> = centers
        .iter()
        .map(|c| ladder_samples(map, c, radius_ladder, n_max))
        .collect::<Result<_, _>>()?;
    fit_from_samples(map, rows)
}

pub fn validate_inputs(centers: &[Point], radius_ladder: &[f64]) -> Result<(), RecurrenceError> {
    if centers.len() < 10 {
        return Err(RecurrenceError::InvalidArgument(format!("need ≥ 10 centers, got {}", centers.len())));
    }
    let (lo, hi) = radius_ladder
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    if radius_ladder.iter().any(|&r| !(r > 0.0)) || hi / lo < 100.0 * (1.0 - 1e-9) {
        return Err(RecurrenceError::InvalidArgument(
            "radius ladder must be positive and span ≥ 2 decades".into(),
        ));
    }
    Ok(())
}

/// τ at every radius for one center; NoReturnBy becomes a censored sample.
pub fn ladder_samples(
    map: &DynamicalMap,
    center: &Point,
    radius_ladder: &[f64],
    n_max: usize,
) -> Result<Vec<RecurrenceSample>, RecurrenceError> {
    radius_ladder
        .iter()
        .map(|&r| match tau_ball(map, center, r, n_max) {
            Ok(s) => Ok(s),
            Err(RecurrenceError::NoReturnBy(_)) => Ok(RecurrenceSample {
                center: *center,
                radius: r,
                tau: n_max,
                method: if map.digit_bases().is_some() {
                    TauMethod::ExactImage
                } else {
                    TauMethod::GridImage
                },
                n_max,
                censored: true,
            }),
            Err(e) => Err(e),
        })
        .collect()
}

/// Pools per-center sample rows (one row per center, ordered by radius).
pub fn fit_from_samples(map: &DynamicalMap, rows: Vec<Vec<RecurrenceSample>>) -> Result<ExponentFit, RecurrenceError> {
    let mut per_center = Vec::with_capacity(rows.len());
    let mut slopes = Vec::new();
    for row in &rows {
        let censored = row.iter().filter(|s| s.censored).count();
        if censored as f64 > CENSOR_LIMIT * row.len() as f64 {
            return Err(RecurrenceError::Censored {
                censored,
                total: row.len(),
            });
        }
        let (x, y): (Vec<f64>, Vec<f64>) = row
            .iter()
            .filter(|s| !s.censored)
            .map(|s| (-s.radius.ln(), s.tau as f64))
            .unzip();
        let slope = ols_slope(&x, &y);
        if let Some(s) = slope {
            slopes.push(s);
        }
        per_center.push(CenterFit {
            center: row.first().map(|s| s.center).unwrap_or(Point::Circle(0.0)),
            slope,
            censored,
        });
    }
    let slope = median(&slopes)
        .ok_or_else(|| RecurrenceError::InvalidArgument("no center produced a slope".into()))?;
    let exps = map.reference_measure.known_exponents.clone();
    let bounds = exps
        .as_ref()
        .map(|e| (1.0 / e[e.len() - 1], 1.0 / e[0]));
    let torus_value = exps
        .as_ref()
        .filter(|e| e.len() == 2)
        .map(|e| e.len() as f64 / e.iter().sum::<f64>());
    Ok(ExponentFit {
        samples: rows.into_iter().flatten().collect(),
        per_center,
        slope,
        bounds,
        torus_value,
        below_upper: bounds.map(|(_, u)| slope <= u),
        above_lower: bounds.map(|(l, _)| slope >= l),
        assumes_positive_entropy: true,
    })
}
