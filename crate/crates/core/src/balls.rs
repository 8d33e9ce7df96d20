//! Dynamical balls, nonuniform balls, hyperbolic pre-balls, slowly varying
//! profiles, continuity moduli and strong-transitivity covering times.

use serde::{Deserialize, Serialize};

use crate::geometry::{circle_dist, wrap, PhaseSpace, Point};
use crate::maps::{DynamicalMap, MapKind};
use crate::orbit::OrbitRecord;
use crate::BallError;

/// Default cap on covering-time iterations.
pub const DEFAULT_COVER_CAP: usize = 64;

/// Relative slack on pre-ball contraction checks.
pub const PREBALL_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QKind {
    /// q ≡ k
    Constant { k: f64 },
    /// q(x) = exp(η·x₁)
    ExponentialCoordinate,
    /// q(x) = dist_δ(x, C)^(−power)
    TruncatedDistancePower { delta: f64, power: f64 },
}

/// A named slowly varying function q with its budget η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QProfile {
    #[serde(flatten)]
    pub kind: QKind,
    pub eta: f64,
}

impl QProfile {
    pub fn constant(k: f64) -> Self {
        QProfile {
            kind: QKind::Constant { k },
            eta: 0.0,
        }
    }

    pub fn exponential(eta: f64) -> Self {
        QProfile {
            kind: QKind::ExponentialCoordinate,
            eta,
        }
    }

    pub fn truncated_distance(delta: f64, power: f64, eta: f64) -> Self {
        QProfile {
            kind: QKind::TruncatedDistancePower { delta, power },
            eta,
        }
    }

    pub fn id(&self) -> String {
        match self.kind {
            QKind::Constant { k } => format!("constant-{k}"),
            QKind::ExponentialCoordinate => format!("exp-coordinate-{}", self.eta),
            QKind::TruncatedDistancePower { delta, power } => {
                format!("trunc-dist-{delta}-{power}-{}", self.eta)
            }
        }
    }

    pub fn value(&self, map: &DynamicalMap, x: &Point) -> f64 {
        match self.kind {
            QKind::Constant { k } => k,
            QKind::ExponentialCoordinate => (self.eta * x.coord(0)).exp(),
            QKind::TruncatedDistancePower { delta, power } => {
                map.truncated_critical_distance(x, delta).powf(-power)
            }
        }
    }
}

/// q(f(xᵢ)) ≤ e^η q(xᵢ) along every step of the record.
pub fn slowly_varying_check(q: &QProfile, record: &OrbitRecord, eta: f64) -> bool {
    slowly_varying_along(q, record.map(), record.points(), eta)
}

pub fn slowly_varying_along(q: &QProfile, map: &DynamicalMap, points: &[Point], eta: f64) -> bool {
    let bound = eta.exp() * (1.0 + 1e-12);
    points
        .windows(2)
        .all(|w| q.value(map, &w[1]) <= bound * q.value(map, &w[0]))
}

/// A dynamical ball of length `n`; a `q_profile` makes it nonuniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: Point,
    pub n: usize,
    pub epsilon: f64,
    pub q_profile: Option<QProfile>,
}

impl BallSpec {
    pub fn uniform(center: Point, n: usize, epsilon: f64) -> Self {
        BallSpec {
            center,
            n,
            epsilon,
            q_profile: None,
        }
    }

    pub fn nonuniform(center: Point, n: usize, epsilon: f64, q: QProfile) -> Self {
        BallSpec {
            center,
            n,
            epsilon,
            q_profile: Some(q),
        }
    }

    /// Radius at a center-orbit point: ε, or ε·q(fᵏx)⁻².
    pub fn radius_at(&self, map: &DynamicalMap, center_k: &Point) -> f64 {
        match &self.q_profile {
            None => self.epsilon,
            Some(q) => self.epsilon * q.value(map, center_k).powi(-2),
        }
    }

    /// Radii for k = 0..=n along `center_orbit`.
    pub fn radii(&self, map: &DynamicalMap, center_orbit: &[Point]) -> Vec<f64> {
        center_orbit[..=self.n]
            .iter()
            .map(|p| self.radius_at(map, p))
            .collect()
    }
}

/// dist(fᵏy, fᵏx) for k = 0..=n from two precomputed orbits.
pub fn shadow_distances(center_orbit: &[Point], y_orbit: &[Point], n: usize) -> Vec<f64> {
    (0..=n).map(|k| center_orbit[k].dist(&y_orbit[k])).collect()
}

fn orbit(map: &DynamicalMap, x: &Point, n: usize) -> Vec<Point> {
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(*x);
    for k in 0..n {
        pts.push(map.evaluate(&pts[k]));
    }
    pts
}

/// Membership in B_n(x, ε), ignoring any q profile. Open balls.
pub fn in_dynamical_ball(map: &DynamicalMap, ball: &BallSpec, y: &Point) -> bool {
    let xs = orbit(map, &ball.center, ball.n);
    let ys = orbit(map, y, ball.n);
    xs.iter().zip(&ys).all(|(a, b)| a.dist(b) < ball.epsilon)
}

/// Membership in the nonuniform ball with radii ε·q(fᵏx)⁻².
pub fn in_nonuniform_ball(map: &DynamicalMap, ball: &BallSpec, y: &Point) -> bool {
    let xs = orbit(map, &ball.center, ball.n);
    let ys = orbit(map, y, ball.n);
    let radii = ball.radii(map, &xs);
    xs.iter()
        .zip(&ys)
        .zip(&radii)
        .all(|((a, b), r)| a.dist(b) < *r)
}

/// γ = ε / C^ℓ, so that fᵏ(B(y, γ)) ⊆ B(fᵏy, ε) for k ≤ ℓ.
pub fn power_ball_modulus(map: &DynamicalMap, epsilon: f64, ell: usize) -> f64 {
    epsilon / map.lipschitz_bound.powi(ell as i32)
}

// ---------------------------------------------------------------------------
// One-dimensional lifts and inverse branches

/// Per-coordinate lift of the map: a continuous real function agreeing with
/// the map mod 1 (for Chebyshev, 4t(1 − t) extended with period 1).
fn lift(kind: MapKind, axis: usize, y: f64) -> f64 {
    let k = y.floor();
    let t = y - k;
    match kind {
        MapKind::Doubling => 2.0 * y,
        MapKind::Tripling => 3.0 * y,
        MapKind::Diag23 => {
            if axis == 0 {
                2.0 * y
            } else {
                3.0 * y
            }
        }
        MapKind::Chebyshev => 4.0 * t * (1.0 - t),
        MapKind::MannevillePomeau { alpha } => t + t * t.powf(alpha) + 2.0 * k,
    }
}

fn lift_derivative(kind: MapKind, axis: usize, y: f64) -> f64 {
    let t = y - y.floor();
    match kind {
        MapKind::Doubling => 2.0,
        MapKind::Tripling => 3.0,
        MapKind::Diag23 => {
            if axis == 0 {
                2.0
            } else {
                3.0
            }
        }
        MapKind::Chebyshev => 4.0 - 8.0 * t,
        MapKind::MannevillePomeau { alpha } => 1.0 + (1.0 + alpha) * t.powf(alpha),
    }
}

fn affine_factor(kind: MapKind, axis: usize) -> Option<f64> {
    match kind {
        MapKind::Doubling => Some(2.0),
        MapKind::Tripling => Some(3.0),
        MapKind::Diag23 => Some(if axis == 0 { 2.0 } else { 3.0 }),
        _ => None,
    }
}

/// The monotone lap of the lift containing `p`, as an open interval.
fn lap_around(kind: MapKind, p: f64) -> Option<(f64, f64)> {
    match kind {
        MapKind::Chebyshev => {
            let k = p.floor();
            let t = p - k;
            if t == 0.0 || t == 0.5 {
                None
            } else if t < 0.5 {
                Some((k, k + 0.5))
            } else {
                Some((k + 0.5, k + 1.0))
            }
        }
        _ => Some((p - 1.0, p + 1.0)),
    }
}

/// Offset v with F(p + v) − F(p) = u on the lap of p.
fn pull_back_offset(kind: MapKind, axis: usize, p: f64, u: f64) -> Option<f64> {
    if let Some(b) = affine_factor(kind, axis) {
        return Some(u / b);
    }
    let (lo, hi) = lap_around(kind, p)?;
    let fp = lift(kind, axis, p);
    let g = |v: f64| lift(kind, axis, p + v) - fp - u;
    let (mut a, mut b) = (lo - p, hi - p);
    let (ga, gb) = (g(a), g(b));
    if ga == 0.0 {
        return Some(a);
    }
    if gb == 0.0 {
        return Some(b);
    }
    if ga.signum() == gb.signum() {
        return None;
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
    Some(0.5 * (a + b))
}

/// The pull-back Vₙ(x) of B(fⁿx, δ) along the orbit's inverse branches,
/// stored per step k as coordinatewise offset intervals around fᵏx.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreBall {
    pub n: usize,
    pub delta: f64,
    pub orbit: Vec<Point>,
    /// offsets[k][axis] = (lo, hi)
    pub offsets: Vec<Vec<(f64, f64)>>,
}

impl PreBall {
    /// Diameter of V₀ in the phase-space metric.
    pub fn diameter(&self) -> f64 {
        self.offsets[0]
            .iter()
            .map(|(lo, hi)| (hi - lo).min(1.0))
            .fold(0.0, f64::max)
    }

    /// A lifted point of Vₖ given per-axis positions t ∈ [0, 1].
    fn lifted_point(&self, k: usize, t: &[f64]) -> Vec<f64> {
        self.offsets[k]
            .iter()
            .enumerate()
            .map(|(axis, (lo, hi))| self.orbit[k].coord(axis) + lo + t[axis] * (hi - lo))
            .collect()
    }
}

/// Pulls B(fⁿx, δ) back n steps along the orbit of x.
pub fn pull_back_preball(map: &DynamicalMap, orbit: &[Point], n: usize, delta: f64) -> Result<PreBall, BallError> {
    if delta <= 0.0 || delta >= 0.5 {
        return Err(BallError::InvalidArgument(format!("δ must lie in (0, 1/2), got {delta}")));
    }
    if orbit.len() <= n {
        return Err(BallError::InvalidArgument(format!(
            "orbit has {} points, need {}",
            orbit.len(),
            n + 1
        )));
    }
    let d = map.dim();
    let mut offsets = vec![Vec::new(); n + 1];
    offsets[n] = vec![(-delta, delta); d];
    for k in (0..n).rev() {
        let mut cur = Vec::with_capacity(d);
        for axis in 0..d {
            let p = orbit[k].coord(axis);
            let (ulo, uhi) = offsets[k + 1][axis];
            let a = pull_back_offset(map.kind, axis, p, ulo).ok_or(BallError::BranchAmbiguity { step: k })?;
            let b = pull_back_offset(map.kind, axis, p, uhi).ok_or(BallError::BranchAmbiguity { step: k })?;
            cur.push((a.min(b), a.max(b)));
        }
        offsets[k] = cur;
    }
    Ok(PreBall {
        n,
        delta,
        orbit: orbit[..=n].to_vec(),
        offsets,
    })
}

fn quasi_pair(i: usize, d: usize) -> (Vec<f64>, Vec<f64>) {
    const G: [f64; 4] = [
        0.618_033_988_749_894_8,
        0.754_877_666_246_692_7,
        0.569_840_290_998_053_3,
        0.858_560_656_185_527_7,
    ];
    let s = (i + 1) as f64;
    let t1 = (0..d).map(|a| wrap(s * G[a])).collect();
    let t2 = (0..d).map(|a| wrap(s * G[a + 2] + 0.5)).collect();
    (t1, t2)
}

/// Checks backward contraction dist(fᵏy₁, fᵏy₂) ≤ e^{−2c(n−k)} dist(fⁿy₁, fⁿy₂)
/// on `pair_samples` pairs of the pre-ball (the endpoint pair first).
pub fn verify_preball(
    map: &DynamicalMap,
    x: &Point,
    n: usize,
    c: f64,
    delta: f64,
    pair_samples: usize,
) -> Result<bool, BallError> {
    let pts = orbit(map, x, n);
    verify_preball_along(map, &pts, n, c, delta, pair_samples)
}

pub fn verify_preball_along(
    map: &DynamicalMap,
    orbit: &[Point],
    n: usize,
    c: f64,
    delta: f64,
    pair_samples: usize,
) -> Result<bool, BallError> {
    let pre = pull_back_preball(map, orbit, n, delta)?;
    let d = map.dim();
    let mut pairs = vec![(vec![0.0; d], vec![1.0; d])];
    pairs.extend((0..pair_samples).map(|i| quasi_pair(i, d)));
    for (t1, t2) in pairs {
        let mut y1 = pre.lifted_point(0, &t1);
        let mut y2 = pre.lifted_point(0, &t2);
        let mut dists = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let dk = y1
                .iter()
                .zip(&y2)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            dists.push(dk);
            if k < n {
                for axis in 0..d {
                    y1[axis] = lift(map.kind, axis, y1[axis]);
                    y2[axis] = lift(map.kind, axis, y2[axis]);
                }
            }
        }
        let dn = dists[n];
        if dn == 0.0 {
            continue;
        }
        for (k, dk) in dists.iter().enumerate() {
            let bound = (-2.0 * c * (n - k) as f64).exp() * dn * (1.0 + PREBALL_SLACK);
            if *dk > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Forward images of balls

/// Sub-cells of a ball tracked forward by linearization: per axis a center
/// and a half-width.
#[derive(Debug, Clone)]
pub(crate) struct CellCloud {
    kind: MapKind,
    dim: usize,
    centers: Vec<[f64; 2]>,
    half: Vec<[f64; 2]>,
}

impl CellCloud {
    /// Tiles B(center, radius) by cells of width ≤ `resolution`.
    pub(crate) fn new(map: &DynamicalMap, center: &Point, radius: f64, resolution: f64) -> Self {
        let dim = map.dim();
        let per_axis = ((2.0 * radius / resolution).ceil() as usize).max(1);
        let w = 2.0 * radius / per_axis as f64;
        let axis_centers = |axis: usize| -> Vec<f64> {
            (0..per_axis)
                .map(|i| center.coord(axis) - radius + (i as f64 + 0.5) * w)
                .collect()
        };
        let mut centers = Vec::new();
        if dim == 1 {
            for a in axis_centers(0) {
                centers.push([a, 0.0]);
            }
        } else {
            let xs = axis_centers(0);
            let ys = axis_centers(1);
            for &a in &xs {
                for &b in &ys {
                    centers.push([a, b]);
                }
            }
        }
        let half = vec![[0.5 * w, if dim == 2 { 0.5 * w } else { 0.0 }]; centers.len()];
        CellCloud {
            kind: map.kind,
            dim,
            centers,
            half,
        }
    }

    pub(crate) fn step(&mut self) {
        for (c, h) in self.centers.iter_mut().zip(self.half.iter_mut()) {
            for axis in 0..self.dim {
                h[axis] *= lift_derivative(self.kind, axis, c[axis]).abs();
                c[axis] = wrap(lift(self.kind, axis, c[axis]));
            }
        }
    }

    /// Some cell image meets the open ball B(center, radius).
    pub(crate) fn meets(&self, center: &Point, radius: f64) -> bool {
        self.centers.iter().zip(&self.half).any(|(c, h)| {
            (0..self.dim).all(|axis| circle_dist(c[axis], center.coord(axis)) < h[axis] + radius)
        })
    }

    fn mark(&self, grid: &mut CoverGrid) {
        for (c, h) in self.centers.iter().zip(&self.half) {
            grid.mark(&c[..self.dim], &h[..self.dim]);
        }
    }
}

struct CoverGrid {
    cells: usize,
    dim: usize,
    covered: Vec<bool>,
    remaining: usize,
}

impl CoverGrid {
    fn new(dim: usize, resolution: f64) -> Self {
        let cells = (1.0 / resolution).ceil() as usize;
        let total = cells.pow(dim as u32);
        CoverGrid {
            cells,
            dim,
            covered: vec![false; total],
            remaining: total,
        }
    }

    /// Indices of cells whose centers lie in the arc [c − h, c + h].
    fn axis_range(&self, c: f64, h: f64) -> Vec<usize> {
        let m = self.cells;
        if 2.0 * h >= 1.0 {
            return (0..m).collect();
        }
        let lo = ((c - h) * m as f64 - 0.5).ceil() as i64;
        let hi = ((c + h) * m as f64 - 0.5).floor() as i64;
        (lo..=hi).map(|i| i.rem_euclid(m as i64) as usize).collect()
    }

    fn mark(&mut self, c: &[f64], h: &[f64]) {
        let xs = self.axis_range(c[0], h[0]);
        if self.dim == 1 {
            for i in xs {
                if !self.covered[i] {
                    self.covered[i] = true;
                    self.remaining -= 1;
                }
            }
        } else {
            let ys = self.axis_range(c[1], h[1]);
            for &i in &xs {
                for &j in &ys {
                    let idx = i * self.cells + j;
                    if !self.covered[idx] {
                        self.covered[idx] = true;
                        self.remaining -= 1;
                    }
                }
            }
        }
    }
}

/// Smallest N with f⁰(U) ∪ … ∪ f^N(U) covering the phase space on a grid of
/// the given resolution, U = B(center, radius).
pub fn covering_time(
    map: &DynamicalMap,
    center: &Point,
    radius: f64,
    grid_resolution: f64,
) -> Result<usize, BallError> {
    covering_time_capped(map, center, radius, grid_resolution, DEFAULT_COVER_CAP)
}

pub fn covering_time_capped(
    map: &DynamicalMap,
    center: &Point,
    radius: f64,
    grid_resolution: f64,
    cap: usize,
) -> Result<usize, BallError> {
    if radius <= 0.0 || grid_resolution <= 0.0 || grid_resolution > radius / 10.0 {
        return Err(BallError::InvalidArgument(format!(
            "need radius > 0 and 0 < resolution ≤ radius/10, got {radius}, {grid_resolution}"
        )));
    }
    if grid_resolution < 1e-6 || (map.dim() == 2 && grid_resolution < 1e-3) {
        return Err(BallError::InvalidArgument(format!(
            "grid resolution {grid_resolution} is too fine"
        )));
    }
    let mut cloud = CellCloud::new(map, center, radius, grid_resolution);
    let mut grid = CoverGrid::new(map.dim(), grid_resolution);
    for j in 0..=cap {
        if j > 0 {
            cloud.step();
        }
        cloud.mark(&mut grid);
        if grid.remaining == 0 {
            return Ok(j);
        }
    }
    Err(BallError::NotCoveredBy(cap))
}

/// Per-axis arc of f^j(B(center, r)) for the affine maps: (center, half-width).
pub(crate) fn affine_image(map: &DynamicalMap, center: &Point, radius: f64, j: usize) -> Option<Vec<(f64, f64)>> {
    let bases = map.digit_bases()?;
    Some(
        bases
            .iter()
            .enumerate()
            .map(|(axis, &b)| {
                let mut c = center.coord(axis);
                for _ in 0..j {
                    c = wrap(b as f64 * c);
                }
                (c, radius * (b as f64).powi(j as i32))
            })
            .collect(),
    )
}

/// Exact covering time for the affine maps via coordinate compression of
/// the union of image rectangles.
pub fn covering_time_exact(map: &DynamicalMap, center: &Point, radius: f64, cap: usize) -> Result<usize, BallError> {
    if map.digit_bases().is_none() {
        return Err(BallError::InvalidArgument(format!("{} is not affine", map.id())));
    }
    let d = map.dim();
    // each image as a list of per-axis closed arcs split into [a, b] ⊆ [0, 1]
    let mut boxes: Vec<Vec<Vec<(f64, f64)>>> = Vec::new();
    for j in 0..=cap {
        let img = affine_image(map, center, radius, j).expect("affine");
        boxes.push(img.iter().map(|&(c, h)| split_arc(c, h)).collect());
        let mut cuts: Vec<Vec<f64>> = vec![vec![0.0, 1.0]; d];
        for bx in &boxes {
            for axis in 0..d {
                for &(a, b) in &bx[axis] {
                    cuts[axis].push(a);
                    cuts[axis].push(b);
                }
            }
        }
        for c in cuts.iter_mut() {
            c.sort_by(f64::total_cmp);
            c.dedup();
        }
        let mids = |axis: usize| -> Vec<f64> {
            cuts[axis]
                .windows(2)
                .filter(|w| w[1] > w[0])
                .map(|w| 0.5 * (w[0] + w[1]))
                .collect()
        };
        let inside = |arcs: &[(f64, f64)], t: f64| arcs.iter().any(|&(a, b)| a <= t && t <= b);
        let xs = mids(0);
        let ys = if d == 2 { mids(1) } else { vec![0.0] };
        let all = xs.iter().all(|&x| {
            ys.iter().all(|&y| {
                boxes.iter().any(|bx| inside(&bx[0], x) && (d == 1 || inside(&bx[1], y)))
            })
        });
        if all {
            return Ok(j);
        }
    }
    Err(BallError::NotCoveredBy(cap))
}

fn split_arc(c: f64, h: f64) -> Vec<(f64, f64)> {
    if 2.0 * h >= 1.0 {
        return vec![(0.0, 1.0)];
    }
    let a = c - h;
    let b = c + h;
    if a < 0.0 {
        vec![(0.0, b), (a + 1.0, 1.0)]
    } else if b > 1.0 {
        vec![(a, 1.0), (0.0, b - 1.0)]
    } else {
        vec![(a, b)]
    }
}

/// Whether the phase space is one-dimensional.
pub fn is_circle(map: &DynamicalMap) -> bool {
    map.space() == PhaseSpace::Circle
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn membership_examples() {
        let m = DynamicalMap::doubling();
        let b = BallSpec::uniform(Point::Circle(0.3), 3, 0.1);
        assert!(in_dynamical_ball(&m, &b, &Point::Circle(0.3)));
        assert!(in_dynamical_ball(&m, &b, &Point::Circle(0.31)));
        assert!(!in_dynamical_ball(&m, &b, &Point::Circle(0.32)));
        let q = BallSpec::nonuniform(Point::Circle(0.3), 3, 0.1, QProfile::constant(2.0));
        assert!(!in_nonuniform_ball(&m, &q, &Point::Circle(0.31)));
        assert!(in_nonuniform_ball(&m, &q, &Point::Circle(0.3)));
    }

    #[test]
    fn preball_examples() {
        let m = DynamicalMap::doubling();
        let x = Point::Circle(0.3);
        assert!(verify_preball(&m, &x, 5, LN2 / 2.0, 0.1, 32).unwrap());
        assert!(!verify_preball(&m, &x, 5, 0.4, 0.1, 32).unwrap());
        let pre = pull_back_preball(&m, &orbit(&m, &x, 5), 5, 0.1).unwrap();
        assert!((pre.diameter() - 0.2 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_branch_ambiguity_at_critical_point() {
        let m = DynamicalMap::chebyshev();
        let r = verify_preball(&m, &Point::Circle(0.5), 1, 0.1, 0.05, 4);
        assert_eq!(r, Err(BallError::BranchAmbiguity { step: 0 }));
    }

    #[test]
    fn slowly_varying_examples() {
        let m = DynamicalMap::doubling();
        let rec = OrbitRecord::compute(&m, Point::Circle(0.3), 10).unwrap();
        assert!(slowly_varying_check(&QProfile::constant(3.0), &rec, 0.01));
        let q = QProfile::exponential(1.0);
        assert!(!slowly_varying_check(&q, &rec, 0.2));
        assert!(slowly_varying_check(&QProfile::exponential(0.2), &rec, 0.2));
    }

    #[test]
    fn modulus_examples() {
        assert!((power_ball_modulus(&DynamicalMap::doubling(), 0.1, 3) - 0.0125).abs() < 1e-15);
        assert!((power_ball_modulus(&DynamicalMap::diag23(), 0.1, 2) - 0.1 / 9.0).abs() < 1e-15);
        assert!((power_ball_modulus(&DynamicalMap::chebyshev(), 0.1, 1) - 0.025).abs() < 1e-15);
    }

    #[test]
    fn covering_examples() {
        let d = DynamicalMap::doubling();
        let c = Point::Circle(0.37);
        assert_eq!(covering_time(&d, &c, 0.125, 0.0125).unwrap(), 2);
        assert_eq!(covering_time_exact(&d, &c, 0.125, 64).unwrap(), 2);
        assert_eq!(covering_time(&d, &c, 0.5, 0.01).unwrap(), 0);
        let t = DynamicalMap::diag23();
        let c2 = Point::Torus([0.3, 0.7]);
        assert_eq!(covering_time(&t, &c2, 0.1, 0.01).unwrap(), 3);
        assert_eq!(covering_time_exact(&t, &c2, 0.1, 64).unwrap(), 3);
        assert!(covering_time(&d, &c, 0.1, 0.5).is_err());
    }
}
