//! One function per subcommand. Each returns the full run output; nothing is
//! written until the run has succeeded.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use hyperlab::balls::QProfile;
use hyperlab::closing::{
    assemble_verdict, closing_record, find_periodic_in_ball, find_periodic_nonuniform, shifted_record, sweep_plan,
    sweep_trial, validate_ladders, ClosingResult, EtaCurve, DEFAULT_PERIOD_SLACK,
};
use hyperlab::hyperbolic::{
    calibrate, choose_power, concatenation_check, exact_hyperbolic_times, first_time_return_average_of,
    hyperbolic_frequency, nonlacunarity_statistics, Calibration, DetectionMethod, Gamma, HyperbolicTimeReport,
    ReturnAverage, DEFAULT_DELTA,
};
use hyperlab::maps::quasi_random_point;
use hyperlab::orbit::lyapunov_spectrum;
use hyperlab::recurrence::{fit_from_samples, ladder_samples, validate_inputs, TauMethod};
use hyperlab::{DynamicalMap, OrbitRecord, Point};

use crate::config::{field, ExperimentConfig, Param};
use crate::output::{Curve, RunOutput};
use crate::CliError;

/// Longest prefix used to calibrate c.
pub const CALIBRATION_PREFIX: usize = 100_000;
/// Quasi-random base points and orbit length used to choose ℓ.
pub const POWER_SAMPLE: usize = 16;
pub const POWER_N: usize = 2000;
/// The concatenation audit rescans from every time, so it is quadratic;
/// it only covers this many leading entries.
pub const AUDIT_WINDOW: usize = 2000;

/// Independent stream per center, so results do not depend on scheduling.
pub fn center_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn center_count(cfg: &ExperimentConfig, default: usize) -> Result<usize, CliError> {
    if cfg.center.is_some() {
        return Ok(1);
    }
    match cfg.centers.unwrap_or(default) {
        0 => Err(field("centers", "must be ≥ 1".into())),
        k => Ok(k),
    }
}

fn sample_center(cfg: &ExperimentConfig, map: &DynamicalMap, index: usize) -> Point {
    cfg.explicit_center(map)
        .unwrap_or_else(|| map.reference_measure.sample(map.space(), &mut center_rng(cfg.seed, index)))
}

/// Orbit record of center `index`: digit-exact where possible.
fn center_record(cfg: &ExperimentConfig, map: &DynamicalMap, index: usize, len: usize) -> Result<OrbitRecord, CliError> {
    match cfg.explicit_center(map) {
        Some(x) => Ok(closing_record(map, x, len)?),
        None => Ok(OrbitRecord::typical(map, len, &mut center_rng(cfg.seed, index))?),
    }
}

fn records(cfg: &ExperimentConfig, map: &DynamicalMap, count: usize, len: usize) -> Result<Vec<OrbitRecord>, CliError> {
    (0..count)
        .into_par_iter()
        .map(|i| center_record(cfg, map, i, len))
        .collect()
}

fn positive_len(value: Option<usize>, name: &str) -> Result<usize, CliError> {
    match ExperimentConfig::require(&value, name)? {
        0 => Err(field(name, "must be ≥ 1".into())),
        v => Ok(v),
    }
}

fn positive(value: Option<f64>, name: &str) -> Result<f64, CliError> {
    let v = ExperimentConfig::require(&value, name)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(field(name, format!("must be positive, got {v}")))
    }
}

/// Resolves c, δ and ℓ against `record` and writes the values back into
/// the echoed config.
pub fn resolve_calibration(cfg: &mut ExperimentConfig, record: &OrbitRecord) -> Result<Calibration, CliError> {
    let map = record.map();
    let sample: Vec<Point> = (0..POWER_SAMPLE).map(|i| quasi_random_point(map.space(), i)).collect();
    let prefix = if record.len() > CALIBRATION_PREFIX {
        shifted_record(record, 0, CALIBRATION_PREFIX)?
    } else {
        record.clone()
    };
    let mut cal = match cfg.c.and_then(|p| p.value()) {
        Some(c) if c > 0.0 => {
            let idx = exact_hyperbolic_times(prefix.log_inv_norms(), c);
            Calibration {
                c,
                delta: DEFAULT_DELTA,
                ell: 1,
                frequency: hyperbolic_frequency(&idx, prefix.len()),
            }
        }
        Some(c) => return Err(field("c", format!("must be positive, got {c}"))),
        None => calibrate(&prefix, &sample, POWER_N)?,
    };
    match cfg.ell.and_then(|p| p.value()) {
        Some(0) => return Err(field("ell", "must be ≥ 1".into())),
        Some(ell) => cal.ell = ell,
        None if cfg.c.and_then(|p| p.value()).is_some() => cal.ell = choose_power(map, cal.c / 2.0, &sample, POWER_N)?,
        None => {}
    }
    if let Some(d) = cfg.delta.and_then(|p| p.value()) {
        if !(d > 0.0 && d < 0.5) {
            return Err(field("delta", format!("must lie in (0, 1/2), got {d}")));
        }
        cal.delta = d;
    }
    cfg.c = Some(Param::Value(cal.c));
    cfg.delta = Some(Param::Value(cal.delta));
    cfg.ell = Some(Param::Value(cal.ell));
    Ok(cal)
}

fn without_calibration(cfg: &ExperimentConfig) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.c = None;
    c.delta = None;
    c.ell = None;
    c
}

#[derive(Debug, Serialize)]
struct LyapunovRecord {
    center_index: usize,
    center: Point,
    exponents: Vec<f64>,
    iterates_used: usize,
    reference: Option<Vec<f64>>,
}

pub fn lyapunov(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let map = cfg.build_map()?;
    let n = positive_len(cfg.orbit_length, "orbit_length")?;
    let k = center_count(cfg, 1)?;
    let rows: Vec<LyapunovRecord> = (0..k)
        .into_par_iter()
        .map(|i| {
            let x0 = sample_center(cfg, &map, i);
            let est = lyapunov_spectrum(&map, x0, n)?;
            Ok(LyapunovRecord {
                center_index: i,
                center: x0,
                exponents: est.exponents,
                iterates_used: est.iterates_used,
                reference: map.reference_measure.known_exponents.clone(),
            })
        })
        .collect::<Result<_, CliError>>()?;
    let mut out = RunOutput::new("lyapunov", without_calibration(cfg));
    for r in &rows {
        out.push("estimate", r);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct Checkpoint {
    n: usize,
    count: usize,
    frequency: f64,
    gap_tail_max: Option<f64>,
}

#[derive(Debug, Serialize)]
struct HyptimesRecord {
    center_index: usize,
    x0: Point,
    c: f64,
    delta: f64,
    ell: usize,
    n: usize,
    count: usize,
    frequency_hat: f64,
    first_time: Option<usize>,
    gap_tail_max: Option<f64>,
    gamma_id: String,
    method: DetectionMethod,
    return_average: Option<ReturnAverage>,
    audit_window: usize,
    concatenation_violations: usize,
    checkpoints: Vec<Checkpoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    indices: Option<Vec<usize>>,
}

pub fn hyptimes(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let map = cfg.build_map()?;
    let n = positive_len(cfg.orbit_length, "orbit_length")?;
    if let Some(&cp) = cfg.checkpoints.iter().find(|&&cp| cp == 0 || cp > n) {
        return Err(field("checkpoints", format!("{cp} is outside 1..={n}")));
    }
    let k = center_count(cfg, 1)?;
    let recs = records(cfg, &map, k, n)?;
    let mut resolved = cfg.clone();
    let cal = resolve_calibration(&mut resolved, &recs[0])?;
    let rows: Vec<HyptimesRecord> = recs
        .par_iter()
        .enumerate()
        .map(|(i, rec)| {
            let values = rec.power_log_inv_norms(cal.ell);
            let rep = HyperbolicTimeReport::build(&values, cal.c, cal.delta, cal.ell, Gamma::Identity, DetectionMethod::ExactScan);
            let w = values.len().min(AUDIT_WINDOW);
            let head = exact_hyperbolic_times(&values[..w], cal.c);
            let checkpoints = cfg
                .checkpoints
                .iter()
                .map(|&cp| {
                    let m = cp / cal.ell;
                    let idx: Vec<usize> = rep.indices.iter().copied().take_while(|&t| t <= m).collect();
                    Checkpoint {
                        n: cp,
                        count: idx.len(),
                        frequency: hyperbolic_frequency(&idx, m),
                        gap_tail_max: nonlacunarity_statistics(&idx, Gamma::Identity).ok().map(|g| g.tail_max),
                    }
                })
                .collect();
            HyptimesRecord {
                center_index: i,
                x0: rec.x0(),
                c: rep.c,
                delta: rep.delta,
                ell: rep.ell,
                n: rep.n,
                count: rep.indices.len(),
                frequency_hat: rep.frequency_hat,
                first_time: rep.first_time,
                gap_tail_max: rep.gap_tail_max,
                gamma_id: rep.gamma_id.clone(),
                method: rep.method,
                return_average: first_time_return_average_of(&rep.indices, rep.n).ok(),
                audit_window: w,
                concatenation_violations: concatenation_check(&values[..w], cal.c, &head).len(),
                checkpoints,
                indices: cfg.emit_indices.then(|| rep.indices.clone()),
            }
        })
        .collect();
    let mut out = RunOutput::new("hyptimes", resolved);
    out.push("calibration", &cal);
    for r in &rows {
        out.push("report", r);
    }
    Ok(out)
}

fn q_profile(id: &str, eta: f64, delta: f64) -> Result<QProfile, CliError> {
    match id {
        "constant" => Ok(QProfile::constant(1.0)),
        "exponential" => Ok(QProfile::exponential(eta)),
        "truncated-distance" => Ok(QProfile::truncated_distance(delta, 1.0, eta)),
        other => Err(field("q_profile", format!("unknown profile `{other}`"))),
    }
}

#[derive(Debug, Serialize)]
struct Witness<'a> {
    center_index: usize,
    /// Every shadow distance lies strictly inside its radius.
    in_ball: bool,
    #[serde(flatten)]
    result: &'a ClosingResult,
}

#[derive(Debug, Serialize)]
struct Gap {
    center_index: usize,
    reason: String,
}

pub fn closing(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let map = cfg.build_map()?;
    let n = positive_len(cfg.n, "n")?;
    let eps = positive(cfg.epsilon, "epsilon")?;
    let max_period = cfg.max_period.unwrap_or(n + DEFAULT_PERIOD_SLACK);
    if max_period < n {
        return Err(field("max_period", format!("must be ≥ n = {n}")));
    }
    let uniform = matches!(cfg.q_profile.as_deref(), None | Some("uniform"));
    let len = cfg.orbit_length.unwrap_or(if uniform { max_period + 64 } else { 16 * n + 256 });
    let k = center_count(cfg, 1)?;
    let recs = records(cfg, &map, k, len)?;
    let mut resolved = cfg.clone();
    let results: Vec<Result<ClosingResult, String>> = if uniform {
        resolved = without_calibration(cfg);
        recs.par_iter()
            .map(|r| find_periodic_in_ball(r, n, eps, max_period).map_err(|e| e.to_string()))
            .collect()
    } else {
        let eta = positive(cfg.eta, "eta")?;
        let cal = resolve_calibration(&mut resolved, &recs[0])?;
        let q = q_profile(cfg.q_profile.as_deref().unwrap_or_default(), eta, cal.delta)?;
        recs.par_iter()
            .map(|r| find_periodic_nonuniform(r, n, eps, &q, eta, &cal).map_err(|e| e.to_string()))
            .collect()
    };
    if results.iter().all(Result::is_err) {
        let reason = results.into_iter().find_map(Result::err).unwrap_or_default();
        return Err(CliError::Experiment(format!("no periodic point found: {reason}")));
    }
    let mut out = RunOutput::new("closing", resolved);
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(result) => {
                let in_ball = result
                    .shadow_distances
                    .iter()
                    .zip(&result.radii)
                    .all(|(d, r)| d < r);
                out.push(
                    "witness",
                    &Witness {
                        center_index: i,
                        in_ball,
                        result,
                    },
                );
            }
            Err(reason) => out.push(
                "gap",
                &Gap {
                    center_index: i,
                    reason: reason.clone(),
                },
            ),
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct CurvesRecord<'a> {
    map_id: &'a str,
    epsilon: f64,
    eta_ladder: &'a [f64],
    n_ladder: &'a [usize],
    curves: &'a [EtaCurve],
}

pub fn spec_sweep(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let map = cfg.build_map()?;
    let n_ladder = ExperimentConfig::require(&cfg.n_ladder, "n_ladder")?;
    let eta_ladder = ExperimentConfig::require(&cfg.eta_ladder, "eta_ladder")?;
    validate_ladders(&n_ladder, &eta_ladder).map_err(|e| field("n_ladder/eta_ladder", e.to_string()))?;
    let eps = positive(cfg.epsilon, "epsilon")?;
    let n_top = n_ladder.iter().copied().max().unwrap_or(1);
    let len = cfg.orbit_length.unwrap_or(16 * n_top);
    let k = center_count(cfg, 8)?;
    let recs = records(cfg, &map, k, len)?;
    let mut resolved = cfg.clone();
    let cal = resolve_calibration(&mut resolved, &recs[0])?;
    let entries: Vec<_> = sweep_plan(recs.len(), &n_ladder, &eta_ladder)
        .into_par_iter()
        .map(|(x, n, eta)| sweep_trial(&recs[x], x, n, eta, eps, &cal))
        .collect();
    let verdict = assemble_verdict(map.id(), eps, &n_ladder, &eta_ladder, entries);
    let mut out = RunOutput::new("spec-sweep", resolved);
    out.push("calibration", &cal);
    for e in &verdict.entries {
        out.push("trial", e);
    }
    out.push(
        "curves",
        &CurvesRecord {
            map_id: &verdict.map_id,
            epsilon: verdict.epsilon,
            eta_ladder: &verdict.eta_ladder,
            n_ladder: &verdict.n_ladder,
            curves: &verdict.curves,
        },
    );
    let mut rows = Vec::new();
    for c in &verdict.curves {
        for p in &c.points {
            rows.push(vec![
                c.eta.to_string(),
                p.n.to_string(),
                p.max_k_over_n.map_or(String::new(), |v| v.to_string()),
                p.found.to_string(),
                p.flagged.to_string(),
                p.gaps.to_string(),
            ]);
        }
    }
    out.curves.push(Curve {
        name: "curves".into(),
        header: vec!["eta", "n", "max_k_over_n", "found", "flagged", "gaps"],
        rows,
    });
    Ok(out)
}

#[derive(Debug, Serialize)]
struct CenterRow {
    center_index: usize,
    center: Point,
    slope: Option<f64>,
    censored: usize,
    /// (r, τ, censored) along the ladder.
    samples: Vec<(f64, usize, bool)>,
}

#[derive(Debug, Serialize)]
struct FitRecord {
    centers: usize,
    method: TauMethod,
    slope: f64,
    bounds: Option<(f64, f64)>,
    torus_value: Option<f64>,
    below_upper: Option<bool>,
    above_lower: Option<bool>,
    assumes_positive_entropy: bool,
}

pub fn recurrence(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let map = cfg.build_map()?;
    let ladder = ExperimentConfig::require(&cfg.radius_ladder, "radius_ladder")?;
    let n_max = cfg.n_max.unwrap_or(200);
    let k = center_count(cfg, 10)?;
    let centers: Vec<Point> = (0..k).map(|i| sample_center(cfg, &map, i)).collect();
    validate_inputs(&centers, &ladder).map_err(|e| field("radius_ladder/centers", e.to_string()))?;
    let rows = centers
        .par_iter()
        .map(|c| ladder_samples(&map, c, &ladder, n_max))
        .collect::<Result<Vec<_>, _>>()?;
    let method = rows[0][0].method;
    let fit = fit_from_samples(&map, rows)?;
    let mut out = RunOutput::new("recurrence", without_calibration(cfg));
    let mut csv = Vec::new();
    for (i, pc) in fit.per_center.iter().enumerate() {
        let samples: Vec<(f64, usize, bool)> = fit
            .samples
            .iter()
            .filter(|s| s.center == pc.center)
            .map(|s| (s.radius, s.tau, s.censored))
            .collect();
        for &(r, tau, cens) in &samples {
            csv.push(vec![
                i.to_string(),
                r.to_string(),
                (-r.ln()).to_string(),
                tau.to_string(),
                cens.to_string(),
            ]);
        }
        out.push(
            "center",
            &CenterRow {
                center_index: i,
                center: pc.center,
                slope: pc.slope,
                censored: pc.censored,
                samples,
            },
        );
    }
    out.push(
        "fit",
        &FitRecord {
            centers: fit.per_center.len(),
            method,
            slope: fit.slope,
            bounds: fit.bounds,
            torus_value: fit.torus_value,
            below_upper: fit.below_upper,
            above_lower: fit.above_lower,
            assumes_positive_entropy: fit.assumes_positive_entropy,
        },
    );
    out.curves.push(Curve {
        name: "tau".into(),
        header: vec!["center_index", "radius", "neg_log_r", "tau", "censored"],
        rows: csv,
    });
    Ok(out)
}
