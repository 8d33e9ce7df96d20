//! Periodic points inside (nonuniform) dynamical balls, the period overshoot
//! K, the specification sweep and periodic-orbit approximation of the
//! reference measure.
//!
//! For the integer-multiplier maps every period-m point is k/(bᵐ − 1), so
//! candidates are m-digit blocks next to the first m digits of the center and
//! the search is exact. Other maps bracket roots of fᵐ(y) − y on the
//! pulled-back ball and refine them by bisection.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::balls::{covering_time, covering_time_exact, slowly_varying_along, BallSpec, QProfile};
use crate::digits::{block_string, minimal_period, offset_block, DigitStream};
use crate::geometry::{signed_diff, Point};
use crate::hyperbolic::{exact_hyperbolic_times, Calibration};
use crate::maps::{quasi_random_point, DynamicalMap, MapKind, MeasureKind};
use crate::orbit::OrbitRecord;
use crate::ClosingError;

/// Largest periodicity residual accepted for a verified point.
pub const PERIOD_RESIDUAL: f64 = 1e-9;

/// Candidate offsets per coordinate and block length are capped here.
pub const MAX_WINDOW: i64 = 1 << 22;

/// Bisection search stops at this period for maps without digit arithmetic.
pub const MAX_SMOOTH_PERIOD: usize = 40;

/// Default period cap beyond n for the uniform search.
pub const DEFAULT_PERIOD_SLACK: usize = 64;

/// Centers used for the support-uniform covering offset.
const UNIFORM_COVER_CENTERS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosingMethod {
    Enumeration,
    Bisection,
}

/// The hyperbolic times and covering offset selecting the period target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetRule {
    pub c: f64,
    pub eta: f64,
    pub ell: usize,
    /// Hyperbolic time of f^ℓ with ℓ·nᵢ ≥ n > ℓ·nᵢ₋₁.
    pub n_i: usize,
    /// First hyperbolic time ≥ ((c + η)/c)·nᵢ.
    pub n_next: usize,
    /// Covering time at the center for radius q(x)⁻²ε.
    pub j_center: usize,
    /// Covering time maximized over a fixed set of centers.
    pub j_uniform: usize,
    /// ℓ·n_next + j_center.
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosingResult {
    pub map_id: String,
    pub center: Point,
    pub n: usize,
    pub epsilon: f64,
    pub eta: Option<f64>,
    pub q_profile: Option<QProfile>,
    pub periodic_point: Point,
    pub period: usize,
    /// period − n.
    pub overshoot: i64,
    /// Set when the period is shorter than n (K < 0).
    pub short_period: bool,
    /// Per-coordinate repeating digit block, for enumerated points.
    pub blocks: Option<Vec<String>>,
    pub shadow_distances: Vec<f64>,
    pub radii: Vec<f64>,
    pub residual: f64,
    /// f⁰(p) … f^{period−1}(p).
    pub orbit: Vec<Point>,
    pub method: ClosingMethod,
    pub target_rule: Option<TargetRule>,
}

/// Builds the center record used by the closing search: digit-exact for the
/// integer-multiplier maps (exact in base 2, rounded in base 3), plain
/// floating point otherwise.
pub fn closing_record(map: &DynamicalMap, x: Point, len: usize) -> Result<OrbitRecord, ClosingError> {
    let err = |e: crate::OrbitError| ClosingError::InvalidArgument(e.to_string());
    match map.digit_bases() {
        Some(bases) => {
            let streams = bases
                .iter()
                .enumerate()
                .map(|(axis, &b)| {
                    DigitStream::from_f64(b, x.coord(axis), len + crate::digits::window_len(b) + 8)
                })
                .collect();
            OrbitRecord::from_digits(map, streams, len).map_err(err)
        }
        None => OrbitRecord::compute(map, x, len).map_err(err),
    }
}

/// Periodic point in B_n(x, ε), searching periods n, n+1, …, `max_period`.
pub fn find_periodic_in_ball(
    record: &OrbitRecord,
    n: usize,
    epsilon: f64,
    max_period: usize,
) -> Result<ClosingResult, ClosingError> {
    let ball = BallSpec::uniform(record.x0(), n, epsilon);
    search(record, &ball, n.max(1), max_period)
}

/// Searches block lengths `m_lo..=m_hi` for a periodic point in `ball`.
pub fn search(record: &OrbitRecord, ball: &BallSpec, m_lo: usize, m_hi: usize) -> Result<ClosingResult, ClosingError> {
    let map = record.map();
    if !(ball.epsilon > 0.0) {
        return Err(ClosingError::InvalidArgument(format!("ε must be positive, got {}", ball.epsilon)));
    }
    if record.len() < ball.n {
        return Err(ClosingError::InvalidArgument(format!(
            "center record has {} steps, ball needs {}",
            record.len(),
            ball.n
        )));
    }
    if m_lo == 0 || m_lo > m_hi {
        return Err(ClosingError::InvalidArgument(format!("empty period range {m_lo}..={m_hi}")));
    }
    let radii = ball.radii(map, record.points());
    match (map.digit_bases(), record.expansion()) {
        (Some(bases), Some(streams)) => enumerate(record, ball, &radii, &bases, streams, m_lo, m_hi),
        (Some(_), None) => Err(ClosingError::InvalidArgument(
            "digit maps need a digit record (see closing_record)".into(),
        )),
        (None, _) => bisection_search(record, ball, m_lo, m_hi),
    }
}

fn enumerate(
    record: &OrbitRecord,
    ball: &BallSpec,
    radii: &[f64],
    bases: &[u32],
    streams: &[DigitStream],
    m_lo: usize,
    m_hi: usize,
) -> Result<ClosingResult, ClosingError> {
    let n = ball.n;
    let center = record.points();
    for m in m_lo..=m_hi {
        let mut per_axis: Vec<(Vec<u8>, f64)> = Vec::with_capacity(bases.len());
        for (axis, (&b, s)) in bases.iter().zip(streams).enumerate() {
            let coord = |k: usize| center[k].coord(axis);
            match best_block(b, s, m, n, radii, &coord) {
                Some(hit) => per_axis.push(hit),
                None => break,
            }
        }
        if per_axis.len() < bases.len() {
            continue;
        }
        let blocks: Vec<Vec<u8>> = per_axis.into_iter().map(|(blk, _)| blk).collect();
        let period = blocks
            .iter()
            .map(|b| minimal_period(b))
            .fold(1, lcm);
        let pstreams: Vec<DigitStream> = bases
            .iter()
            .zip(&blocks)
            .map(|(&b, blk)| DigitStream::periodic(b, blk.clone()))
            .collect();
        let at = |k: usize| -> Point {
            let c: Vec<f64> = pstreams.iter().map(|s| s.value_at(k)).collect();
            Point::from_coords(record.map().space(), &c)
        };
        let orbit: Vec<Point> = (0..period).map(at).collect();
        let shadow: Vec<f64> = (0..=n).map(|k| at(k).dist(&center[k])).collect();
        let residual = at(period).dist(&orbit[0]);
        return Ok(assemble(
            record,
            ball,
            radii,
            orbit,
            period,
            shadow,
            residual,
            Some(blocks.iter().map(|b| block_string(b)).collect()),
            ClosingMethod::Enumeration,
        ));
    }
    Err(ClosingError::NotFound(m_hi))
}

/// The m-digit block closest to the center whose periodic point stays within
/// the radii along one coordinate, with its distance at step 0.
fn best_block(
    base: u32,
    stream: &DigitStream,
    m: usize,
    n: usize,
    radii: &[f64],
    coord: &dyn Fn(usize) -> f64,
) -> Option<(Vec<u8>, f64)> {
    let b = base as f64;
    let w = radii
        .iter()
        .enumerate()
        .map(|(k, r)| r * b.powi(-(k as i32)))
        .fold(f64::INFINITY, f64::min);
    let modulus = b.powi(m as i32) - 1.0;
    let half = (modulus / 2.0).floor();
    let reach = (w * b.powi(m as i32)).ceil() + 2.0;
    let r = reach.min(half).min(MAX_WINDOW as f64) as i64;
    let x_block = stream.prefix(m);
    let mut best: Option<(Vec<u8>, f64)> = None;
    let mut seen = std::collections::BTreeSet::new();
    for delta in -r..=r {
        let blk = offset_block(&x_block, base, delta);
        if !seen.insert(blk.clone()) {
            continue;
        }
        let p = DigitStream::periodic(base, blk.clone());
        // the last step is the most restrictive, test it first
        let inside = (0..=n)
            .rev()
            .all(|k| crate::geometry::circle_dist(p.value_at(k), coord(k)) < radii[k]);
        if inside {
            let d0 = crate::geometry::circle_dist(p.value_at(0), coord(0));
            if best.as_ref().is_none_or(|(_, bd)| d0 < *bd) {
                best = Some((blk, d0));
            }
        }
    }
    best
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    record: &OrbitRecord,
    ball: &BallSpec,
    radii: &[f64],
    orbit: Vec<Point>,
    period: usize,
    shadow: Vec<f64>,
    residual: f64,
    blocks: Option<Vec<String>>,
    method: ClosingMethod,
) -> ClosingResult {
    let overshoot = period as i64 - ball.n as i64;
    ClosingResult {
        map_id: record.map_id(),
        center: record.x0(),
        n: ball.n,
        epsilon: ball.epsilon,
        eta: ball.q_profile.map(|q| q.eta),
        q_profile: ball.q_profile,
        periodic_point: orbit[0],
        period,
        overshoot,
        short_period: overshoot < 0,
        blocks,
        shadow_distances: shadow,
        radii: radii.to_vec(),
        residual,
        orbit,
        method,
        target_rule: None,
    }
}

/// Lifted offsets of the ball component around x, pulled back from step n
/// and clipped by every per-step radius.
fn ball_component(map: &DynamicalMap, center: &[Point], radii: &[f64], n: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (-radii[n], radii[n]);
    for k in (0..n).rev() {
        let p = center[k].coord(0);
        let a = pull_back_clamped(map, p, lo);
        let b = pull_back_clamped(map, p, hi);
        lo = a.min(b).max(-radii[k]);
        hi = a.max(b).min(radii[k]);
    }
    (lo, hi)
}

fn lift1(map: &DynamicalMap, y: f64) -> f64 {
    let k = y.floor();
    let t = y - k;
    match map.kind {
        MapKind::Chebyshev => 4.0 * t * (1.0 - t),
        MapKind::MannevillePomeau { alpha } => t + t * t.powf(alpha) + 2.0 * k,
        _ => map.lipschitz_bound * y,
    }
}

/// Offset v on the lap of p with F(p + v) − F(p) = u, clamped to the lap.
fn pull_back_clamped(map: &DynamicalMap, p: f64, u: f64) -> f64 {
    let (lo, hi) = match map.kind {
        MapKind::Chebyshev => {
            let k = p.floor();
            if p - k < 0.5 {
                (k, k + 0.5)
            } else {
                (k + 0.5, k + 1.0)
            }
        }
        _ => (p - 1.0, p + 1.0),
    };
    let fp = lift1(map, p);
    let g = |v: f64| lift1(map, p + v) - fp - u;
    let (mut a, mut b) = (lo - p, hi - p);
    let (ga, gb) = (g(a), g(b));
    if ga.signum() == gb.signum() {
        // target beyond the lap: the endpoint whose image comes closest
        return if ga.abs() < gb.abs() { a } else { b };
    }
    let increasing = gb > ga;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if (g(mid) < 0.0) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Root bracketing of fᵐ(y) − y on the ball component of the center, for
/// any circle map; the default path for maps without digit arithmetic.
pub fn bisection_search(
    record: &OrbitRecord,
    ball: &BallSpec,
    m_lo: usize,
    m_hi: usize,
) -> Result<ClosingResult, ClosingError> {
    let map = record.map();
    if map.dim() != 1 {
        return Err(ClosingError::InvalidArgument("bisection needs a circle map".into()));
    }
    let radii = &ball.radii(map, record.points())[..];
    let n = ball.n;
    let center = record.points();
    let x = center[0].coord(0);
    let (lo, hi) = ball_component(map, center, radii, n);
    let width = hi - lo;
    if !(width > 0.0) {
        return Err(ClosingError::NotFound(m_hi));
    }
    let fm = |y: f64, m: usize| map.iterate(&Point::Circle(crate::geometry::wrap(y)), m).coord(0);
    let h = |y: f64, m: usize| signed_diff(fm(y, m), crate::geometry::wrap(y));
    let mut diverged = false;
    let a = record.log_inv_norms();
    for m in m_lo..=m_hi.min(MAX_SMOOTH_PERIOD) {
        let growth: f64 = if a.len() >= m {
            (-a[..m].iter().filter(|v| v.is_finite()).sum::<f64>()).exp()
        } else {
            map.lipschitz_bound.powi(m as i32)
        };
        let samples = ((8.0 * width * growth).ceil() as usize).clamp(64, 1 << 20);
        let mut roots: Vec<f64> = Vec::new();
        let mut prev_y = x + lo;
        let mut prev_h = h(prev_y, m);
        for i in 1..=samples {
            let y = x + lo + width * i as f64 / samples as f64;
            let hy = h(y, m);
            if prev_h == 0.0 {
                roots.push(prev_y);
            } else if prev_h.signum() != hy.signum() && prev_h.abs() < 0.25 && hy.abs() < 0.25 {
                let (mut s, mut t, mut hs) = (prev_y, y, prev_h);
                for _ in 0..200 {
                    let mid = 0.5 * (s + t);
                    if mid == s || mid == t {
                        break;
                    }
                    let hm = h(mid, m);
                    if hm.signum() == hs.signum() {
                        s = mid;
                        hs = hm;
                    } else {
                        t = mid;
                    }
                }
                roots.push(0.5 * (s + t));
            }
            prev_y = y;
            prev_h = hy;
        }
        let mut best: Option<ClosingResult> = None;
        for y in roots {
            let p = Point::Circle(crate::geometry::wrap(y));
            let residual = map.iterate(&p, m).dist(&p);
            if residual > PERIOD_RESIDUAL {
                continue;
            }
            let mut pts = vec![p];
            for k in 0..n.max(m) {
                let next = map.evaluate(&pts[k]);
                pts.push(next);
            }
            let shadow: Vec<f64> = (0..=n).map(|k| pts[k].dist(&center[k])).collect();
            if shadow.iter().zip(radii).any(|(d, r)| d >= r) {
                diverged = true;
                continue;
            }
            let period = (1..=m)
                .filter(|d| m % d == 0)
                .find(|&d| pts[d].dist(&p) <= PERIOD_RESIDUAL)
                .unwrap_or(m);
            let res = pts[period].dist(&p);
            let cand = assemble(
                record,
                ball,
                radii,
                pts[..period].to_vec(),
                period,
                shadow,
                res,
                None,
                ClosingMethod::Bisection,
            );
            if best
                .as_ref()
                .is_none_or(|b| cand.shadow_distances[0] < b.shadow_distances[0])
            {
                best = Some(cand);
            }
        }
        if let Some(b) = best {
            return Ok(b);
        }
    }
    if diverged {
        Err(ClosingError::SearchDiverged)
    } else {
        Err(ClosingError::NotFound(m_hi))
    }
}

/// Covering offset for radius ρ: exact images for affine maps, a grid of
/// resolution ρ/10 otherwise.
pub fn covering_offset(map: &DynamicalMap, center: &Point, radius: f64) -> Result<usize, ClosingError> {
    if map.digit_bases().is_some() {
        Ok(covering_time_exact(map, center, radius, crate::balls::DEFAULT_COVER_CAP)?)
    } else {
        Ok(covering_time(map, center, radius, radius / 10.0)?)
    }
}

/// The period-selection rule: ℓ·n_next + J with n_next the first hyperbolic
/// time (of f^ℓ) at or beyond ((c + η)/c)·nᵢ.
pub fn target_rule(
    record: &OrbitRecord,
    n: usize,
    epsilon: f64,
    q: &QProfile,
    eta: f64,
    calibration: &Calibration,
) -> Result<TargetRule, ClosingError> {
    let map = record.map();
    let ell = calibration.ell.max(1);
    let c = calibration.c;
    let g = record.power_log_inv_norms(ell);
    let times = exact_hyperbolic_times(&g, c);
    let i = times
        .iter()
        .position(|&t| ell * t >= n)
        .ok_or(ClosingError::NoHyperbolicFrame(n))?;
    let n_i = times[i];
    let need = (c + eta) / c * n_i as f64;
    let n_next = *times[i..]
        .iter()
        .find(|&&t| t as f64 >= need - 1e-9)
        .ok_or(ClosingError::NoHyperbolicFrame(n))?;
    let x = record.x0();
    let rho = q.value(map, &x).powi(-2) * epsilon;
    let j_center = covering_offset(map, &x, rho)?;
    let mut j_uniform = j_center;
    for k in 0..UNIFORM_COVER_CENTERS {
        let y = quasi_random_point(map.space(), k);
        j_uniform = j_uniform.max(covering_offset(map, &y, rho)?);
    }
    Ok(TargetRule {
        c,
        eta,
        ell,
        n_i,
        n_next,
        j_center,
        j_uniform,
        target: ell * n_next + j_center,
    })
}

/// Periodic point in the nonuniform ball with radii ε·q(fᵏx)⁻², periods
/// searched from n up to the rule's target.
pub fn find_periodic_nonuniform(
    record: &OrbitRecord,
    n: usize,
    epsilon: f64,
    q: &QProfile,
    eta: f64,
    calibration: &Calibration,
) -> Result<ClosingResult, ClosingError> {
    let map = record.map();
    if !slowly_varying_along(q, map, &record.points()[..=n.min(record.len())], eta) {
        return Err(ClosingError::InvalidArgument(format!(
            "q profile {} is not {eta}-slowly varying along the center orbit",
            q.id()
        )));
    }
    let rule = target_rule(record, n, epsilon, q, eta, calibration)?;
    let ball = BallSpec::nonuniform(record.x0(), n, epsilon, *q);
    let mut res = search(record, &ball, n.max(1), rule.target.max(n.max(1)))?;
    res.eta = Some(eta);
    res.target_rule = Some(rule);
    Ok(res)
}

// ---------------------------------------------------------------------------
// Specification sweep

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TrialOutcome {
    Found { result: Box<ClosingResult> },
    Gap { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub center_index: usize,
    pub n: usize,
    pub eta: f64,
    pub outcome: TrialOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    /// max K/n over unflagged found trials.
    pub max_k_over_n: Option<f64>,
    pub found: usize,
    pub flagged: usize,
    pub gaps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaCurve {
    pub eta: f64,
    pub points: Vec<CurvePoint>,
    /// Curve value at the largest n.
    pub limit_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecificationVerdict {
    pub map_id: String,
    pub epsilon: f64,
    pub eta_ladder: Vec<f64>,
    pub n_ladder: Vec<usize>,
    pub curves: Vec<EtaCurve>,
    pub entries: Vec<SweepEntry>,
}

pub fn validate_ladders(n_ladder: &[usize], eta_ladder: &[f64]) -> Result<(), ClosingError> {
    if n_ladder.len() < 5 || eta_ladder.len() < 3 {
        return Err(ClosingError::InvalidArgument(format!(
            "need ≥ 5 n values and ≥ 3 η values, got {} and {}",
            n_ladder.len(),
            eta_ladder.len()
        )));
    }
    if n_ladder.contains(&0) || eta_ladder.iter().any(|&e| !(e > 0.0)) {
        return Err(ClosingError::InvalidArgument("ladders need n ≥ 1 and η > 0".into()));
    }
    Ok(())
}

/// One (center, n, η) trial with q(x) = exp(η·x₁).
pub fn sweep_trial(
    record: &OrbitRecord,
    center_index: usize,
    n: usize,
    eta: f64,
    epsilon: f64,
    calibration: &Calibration,
) -> SweepEntry {
    let q = QProfile::exponential(eta);
    let outcome = match find_periodic_nonuniform(record, n, epsilon, &q, eta, calibration) {
        Ok(r) => TrialOutcome::Found { result: Box::new(r) },
        Err(e) => TrialOutcome::Gap { reason: e.to_string() },
    };
    SweepEntry {
        center_index,
        n,
        eta,
        outcome,
    }
}

/// Sweep trials in (center, n, η) lexicographic order.
pub fn sweep_plan(centers: usize, n_ladder: &[usize], eta_ladder: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut plan = Vec::with_capacity(centers * n_ladder.len() * eta_ladder.len());
    for x in 0..centers {
        for &n in n_ladder {
            for &eta in eta_ladder {
                plan.push((x, n, eta));
            }
        }
    }
    plan
}

/// Collapses trial entries into per-η curves of max K/n; flagged (K < 0)
/// entries and gaps are excluded from the curves.
pub fn assemble_verdict(
    map_id: String,
    epsilon: f64,
    n_ladder: &[usize],
    eta_ladder: &[f64],
    entries: Vec<SweepEntry>,
) -> SpecificationVerdict {
    let curves = eta_ladder
        .iter()
        .map(|&eta| {
            let points: Vec<CurvePoint> = n_ladder
                .iter()
                .map(|&n| {
                    let mut pt = CurvePoint {
                        n,
                        max_k_over_n: None,
                        found: 0,
                        flagged: 0,
                        gaps: 0,
                    };
                    for e in entries.iter().filter(|e| e.n == n && e.eta == eta) {
                        match &e.outcome {
                            TrialOutcome::Gap { .. } => pt.gaps += 1,
                            TrialOutcome::Found { result } if result.short_period => pt.flagged += 1,
                            TrialOutcome::Found { result } => {
                                pt.found += 1;
                                let v = result.overshoot as f64 / n as f64;
                                pt.max_k_over_n = Some(pt.max_k_over_n.map_or(v, |m| m.max(v)));
                            }
                        }
                    }
                    pt
                })
                .collect();
            let limit_estimate = points.last().and_then(|p| p.max_k_over_n);
            EtaCurve {
                eta,
                points,
                limit_estimate,
            }
        })
        .collect();
    SpecificationVerdict {
        map_id,
        epsilon,
        eta_ladder: eta_ladder.to_vec(),
        n_ladder: n_ladder.to_vec(),
        curves,
        entries,
    }
}

pub fn specification_sweep(
    records: &[OrbitRecord],
    n_ladder: &[usize],
    eta_ladder: &[f64],
    epsilon: f64,
    calibration: &Calibration,
) -> Result<SpecificationVerdict, ClosingError> {
    validate_ladders(n_ladder, eta_ladder)?;
    let first = records
        .first()
        .ok_or_else(|| ClosingError::InvalidArgument("empty center sample".into()))?;
    let entries = sweep_plan(records.len(), n_ladder, eta_ladder)
        .into_iter()
        .map(|(x, n, eta)| sweep_trial(&records[x], x, n, eta, epsilon, calibration))
        .collect();
    Ok(assemble_verdict(first.map_id(), epsilon, n_ladder, eta_ladder, entries))
}

/// The record restarted at step `offset`, keeping digit exactness.
pub fn shifted_record(record: &OrbitRecord, offset: usize, len: usize) -> Result<OrbitRecord, ClosingError> {
    let err = |e: crate::OrbitError| ClosingError::InvalidArgument(e.to_string());
    match record.expansion() {
        Some(streams) => {
            let shifted = streams
                .iter()
                .map(|s| DigitStream::new(s.base(), s.digits().get(offset..).unwrap_or(&[]).to_vec()))
                .collect();
            OrbitRecord::from_digits(record.map(), shifted, len).map_err(err)
        }
        None => {
            let x = *record
                .points()
                .get(offset)
                .ok_or_else(|| ClosingError::InvalidArgument(format!("offset {offset} beyond the record")))?;
            OrbitRecord::compute(record.map(), x, len).map_err(err)
        }
    }
}

/// Periodic points of block length `period` closing `count` orbit segments
/// that start every `stride` steps along `record`. Each ball has length
/// `period` minus the steps needed to resolve ε, so a witness always exists
/// for the digit maps; segments without one are skipped.
pub fn harvest_periodic(
    record: &OrbitRecord,
    period: usize,
    count: usize,
    stride: usize,
    epsilon: f64,
) -> Result<Vec<ClosingResult>, ClosingError> {
    let growth = record.map().lipschitz_bound.min(
        record
            .map()
            .min_expansion()
            .unwrap_or(record.map().lipschitz_bound),
    );
    let lead = ((2.0 / epsilon).ln() / growth.ln()).ceil() as usize + 1;
    let n = period.saturating_sub(lead).max(1);
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let rec = shifted_record(record, j * stride, period.max(n) + 1)?;
        let ball = BallSpec::uniform(rec.x0(), n, epsilon);
        if let Ok(r) = search(&rec, &ball, period, period) {
            out.push(r);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Periodic-orbit measures

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    /// cos 2πx (2D: cos 2πx · cos 2πy)
    Cos,
    /// sin 2πx (2D: sin 2πx · sin 2πy)
    Sin,
    /// x(1 − x) (2D: x(1 − x) · y(1 − y))
    Parabola,
}

impl Observable {
    pub const LIBRARY: [Observable; 3] = [Observable::Cos, Observable::Sin, Observable::Parabola];

    fn scalar(self, t: f64) -> f64 {
        match self {
            Observable::Cos => (2.0 * PI * t).cos(),
            Observable::Sin => (2.0 * PI * t).sin(),
            Observable::Parabola => t * (1.0 - t),
        }
    }

    pub fn eval(self, x: &Point) -> f64 {
        match x {
            Point::Circle(t) => self.scalar(*t),
            Point::Torus([a, b]) => self.scalar(*a) * self.scalar(*b),
        }
    }
}

/// Birkhoff length used for the empirical reference integrals.
pub const ACIP_BIRKHOFF_LEN: usize = 1_000_000;

/// ∫ φ dμ for the map's reference measure.
pub fn reference_integral(map: &DynamicalMap, obs: Observable) -> Result<f64, ClosingError> {
    let two_d = map.dim() == 2;
    match map.reference_measure.kind {
        MeasureKind::Lebesgue => Ok(match (obs, two_d) {
            (Observable::Cos | Observable::Sin, _) => 0.0,
            (Observable::Parabola, false) => 1.0 / 6.0,
            (Observable::Parabola, true) => 1.0 / 36.0,
        }),
        MeasureKind::ChebyshevArcsine => {
            // x = sin²(πs/2) pushes ds forward to the arcsine law
            let cells = 200_000;
            let sum: f64 = (0..cells)
                .map(|i| {
                    let s = (i as f64 + 0.5) / cells as f64;
                    obs.scalar((PI * s / 2.0).sin().powi(2))
                })
                .sum();
            Ok(sum / cells as f64)
        }
        MeasureKind::AcipEmpirical => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ac19);
            let rec = OrbitRecord::typical(map, ACIP_BIRKHOFF_LEN, &mut rng)
                .map_err(|_| ClosingError::UnknownReference(map.id()))?;
            Ok(rec.birkhoff_average(|p| obs.eval(p)))
        }
    }
}

/// max over observables of |average over the union of the periodic orbits
/// − reference integral|.
pub fn periodic_measure_discrepancy(
    map: &DynamicalMap,
    results: &[ClosingResult],
    observables: &[Observable],
) -> Result<f64, ClosingError> {
    let orbits: Vec<&[Point]> = results.iter().map(|r| r.orbit.as_slice()).collect();
    orbit_discrepancy(map, &orbits, observables)
}

pub fn orbit_discrepancy(map: &DynamicalMap, orbits: &[&[Point]], observables: &[Observable]) -> Result<f64, ClosingError> {
    let total: usize = orbits.iter().map(|o| o.len()).sum();
    if total == 0 || observables.is_empty() {
        return Err(ClosingError::InvalidArgument("no orbit points or observables".into()));
    }
    let mut worst = 0.0f64;
    for &obs in observables {
        let avg = orbits
            .iter()
            .flat_map(|o| o.iter())
            .map(|p| obs.eval(p))
            .sum::<f64>()
            / total as f64;
        worst = worst.max((avg - reference_integral(map, obs)?).abs());
    }
    Ok(worst)
}
