//! Catalog of concrete expanding maps on S¹ and T².

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{signed_diff, wrap, Jacobian, PhaseSpace, Point};
use crate::MapError;

/// Points within this distance of the critical set are treated as critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

/// Default intermittency exponent of the Manneville–Pomeau map.
pub const DEFAULT_MP_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum MapKind {
    /// x ↦ 2x mod 1
    Doubling,
    /// x ↦ 3x mod 1
    Tripling,
    /// x ↦ 4x(1 − x), critical point 1/2
    Chebyshev,
    /// x ↦ x(1 + x^α) mod 1, neutral fixed point at 0
    MannevillePomeau { alpha: f64 },
    /// (x, y) ↦ (2x, 3y) mod 1
    Diag23,
}

/// Critical-set description together with the non-degeneracy constants
/// β, B and K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSetSpec {
    pub points: Vec<Point>,
    pub beta: f64,
    pub bound_b: f64,
    pub bound_k: f64,
}

impl CriticalSetSpec {
    pub fn empty() -> Self {
        CriticalSetSpec {
            points: Vec::new(),
            beta: 0.0,
            bound_b: 1.0,
            bound_k: 1.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    Lebesgue,
    ChebyshevArcsine,
    AcipEmpirical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceMeasure {
    pub kind: MeasureKind,
    /// Ascending Lyapunov exponents when known analytically.
    pub known_exponents: Option<Vec<f64>>,
}

impl ReferenceMeasure {
    /// Analytic density, or `None` for empirically known measures.
    pub fn density(&self, x: &Point) -> Option<f64> {
        match self.kind {
            MeasureKind::Lebesgue => Some(1.0),
            MeasureKind::ChebyshevArcsine => {
                let t = x.coord(0);
                Some(1.0 / (PI * (t * (1.0 - t)).sqrt()))
            }
            MeasureKind::AcipEmpirical => None,
        }
    }

    pub fn has_analytic_density(&self) -> bool {
        self.kind != MeasureKind::AcipEmpirical
    }

    /// Draws a point distributed according to the measure. The ACIP of the
    /// intermittent map is equivalent to Lebesgue, so a Lebesgue draw is
    /// typical for it too.
    pub fn sample<R: Rng + ?Sized>(&self, space: PhaseSpace, rng: &mut R) -> Point {
        match (self.kind, space) {
            (MeasureKind::ChebyshevArcsine, _) => {
                let u: f64 = rng.random();
                Point::Circle(wrap((PI * u / 2.0).sin().powi(2)))
            }
            (_, PhaseSpace::Circle) => Point::Circle(rng.random::<f64>()),
            (_, PhaseSpace::Torus) => Point::Torus([rng.random::<f64>(), rng.random::<f64>()]),
        }
    }
}

/// A catalog entry: the map, its derivative, critical set and reference
/// invariant measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicalMap {
    pub kind: MapKind,
    pub critical_set: CriticalSetSpec,
    pub reference_measure: ReferenceMeasure,
    /// Upper bound C on ‖Df‖ off the critical set.
    pub lipschitz_bound: f64,
}

impl fmt::Display for DynamicalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl DynamicalMap {
    pub fn doubling() -> Self {
        Self::uniform(MapKind::Doubling, 2.0, vec![2f64.ln()])
    }

    pub fn tripling() -> Self {
        Self::uniform(MapKind::Tripling, 3.0, vec![3f64.ln()])
    }

    pub fn diag23() -> Self {
        Self::uniform(MapKind::Diag23, 3.0, vec![2f64.ln(), 3f64.ln()])
    }

    pub fn chebyshev() -> Self {
        DynamicalMap {
            kind: MapKind::Chebyshev,
            critical_set: CriticalSetSpec {
                points: vec![Point::Circle(0.5)],
                beta: 1.0,
                bound_b: 8.0,
                bound_k: 8.0,
            },
            reference_measure: ReferenceMeasure {
                kind: MeasureKind::ChebyshevArcsine,
                known_exponents: Some(vec![2f64.ln()]),
            },
            lipschitz_bound: 4.0,
        }
    }

    /// Manneville–Pomeau with exponent `alpha ∈ (0, 1)`.
    pub fn manneville_pomeau(alpha: f64) -> Result<Self, MapError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(MapError::InvalidParameter(format!(
                "manneville-pomeau alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(DynamicalMap {
            kind: MapKind::MannevillePomeau { alpha },
            critical_set: CriticalSetSpec::empty(),
            reference_measure: ReferenceMeasure {
                kind: MeasureKind::AcipEmpirical,
                known_exponents: None,
            },
            lipschitz_bound: 2.0 + alpha,
        })
    }

    fn uniform(kind: MapKind, lipschitz: f64, exps: Vec<f64>) -> Self {
        DynamicalMap {
            kind,
            critical_set: CriticalSetSpec::empty(),
            reference_measure: ReferenceMeasure {
                kind: MeasureKind::Lebesgue,
                known_exponents: Some(exps),
            },
            lipschitz_bound: lipschitz,
        }
    }

    /// Looks a map up by its id string. `alpha` only applies to
    /// `manneville-pomeau`.
    pub fn from_id(id: &str, alpha: Option<f64>) -> Result<Self, MapError> {
        match id {
            "doubling" => Ok(Self::doubling()),
            "tripling" => Ok(Self::tripling()),
            "chebyshev" => Ok(Self::chebyshev()),
            "diag23" => Ok(Self::diag23()),
            "manneville-pomeau" => Self::manneville_pomeau(alpha.unwrap_or(DEFAULT_MP_ALPHA)),
            other => Err(MapError::UnknownMap(other.to_string())),
        }
    }

    pub fn catalog() -> Vec<DynamicalMap> {
        vec![
            Self::doubling(),
            Self::tripling(),
            Self::chebyshev(),
            Self::manneville_pomeau(DEFAULT_MP_ALPHA).expect("default alpha is valid"),
            Self::diag23(),
        ]
    }

    pub fn with_critical_set(mut self, spec: CriticalSetSpec) -> Self {
        self.critical_set = spec;
        self
    }

    pub fn with_lipschitz_bound(mut self, c: f64) -> Self {
        self.lipschitz_bound = c;
        self
    }

    pub fn id(&self) -> String {
        match self.kind {
            MapKind::Doubling => "doubling",
            MapKind::Tripling => "tripling",
            MapKind::Chebyshev => "chebyshev",
            MapKind::MannevillePomeau { .. } => "manneville-pomeau",
            MapKind::Diag23 => "diag23",
        }
        .to_string()
    }

    pub fn space(&self) -> PhaseSpace {
        match self.kind {
            MapKind::Diag23 => PhaseSpace::Torus,
            _ => PhaseSpace::Circle,
        }
    }

    pub fn dim(&self) -> usize {
        self.space().dim()
    }

    /// Per-coordinate integer multipliers for the maps of the form
    /// x ↦ b·x mod 1 (coordinatewise). These admit exact digit arithmetic.
    pub fn digit_bases(&self) -> Option<Vec<u32>> {
        match self.kind {
            MapKind::Doubling => Some(vec![2]),
            MapKind::Tripling => Some(vec![3]),
            MapKind::Diag23 => Some(vec![2, 3]),
            _ => None,
        }
    }

    /// Smallest expansion factor of the affine maps (used for full-cover
    /// ceilings); `None` for nonlinear maps.
    pub fn min_expansion(&self) -> Option<f64> {
        self.digit_bases()
            .map(|b| b.into_iter().min().expect("nonempty") as f64)
    }

    pub fn evaluate(&self, x: &Point) -> Point {
        match (self.kind, x) {
            (MapKind::Doubling, Point::Circle(t)) => Point::Circle(wrap(2.0 * t)),
            (MapKind::Tripling, Point::Circle(t)) => Point::Circle(wrap(3.0 * t)),
            (MapKind::Chebyshev, Point::Circle(t)) => Point::Circle(wrap(4.0 * t * (1.0 - t))),
            (MapKind::MannevillePomeau { alpha }, Point::Circle(t)) => {
                Point::Circle(wrap(t + t * t.powf(alpha)))
            }
            (MapKind::Diag23, Point::Torus([a, b])) => Point::Torus([wrap(2.0 * a), wrap(3.0 * b)]),
            _ => panic!("{} evaluated at a point of the wrong space: {x:?}", self.id()),
        }
    }

    /// `n`-fold iterate.
    pub fn iterate(&self, x: &Point, n: usize) -> Point {
        let mut y = *x;
        for _ in 0..n {
            y = self.evaluate(&y);
        }
        y
    }

    pub fn jacobian(&self, x: &Point) -> Jacobian {
        match (self.kind, x) {
            (MapKind::Doubling, _) => Jacobian::scalar(2.0),
            (MapKind::Tripling, _) => Jacobian::scalar(3.0),
            (MapKind::Chebyshev, Point::Circle(t)) => Jacobian::scalar(4.0 - 8.0 * t),
            (MapKind::MannevillePomeau { alpha }, Point::Circle(t)) => {
                Jacobian::scalar(1.0 + (1.0 + alpha) * t.powf(alpha))
            }
            (MapKind::Diag23, _) => Jacobian::matrix([[2.0, 0.0], [0.0, 3.0]]),
            _ => panic!("{} jacobian at a point of the wrong space: {x:?}", self.id()),
        }
    }

    /// dist(x, C), or `None` when the critical set is empty.
    pub fn critical_distance(&self, x: &Point) -> Option<f64> {
        self.critical_set
            .points
            .iter()
            .map(|c| c.dist(x))
            .min_by(|a, b| a.total_cmp(b))
    }

    pub fn is_critical(&self, x: &Point) -> bool {
        self.critical_distance(x)
            .is_some_and(|d| d <= CRITICAL_TOLERANCE)
    }

    /// log ‖Df(x)⁻¹‖. Fails on the critical set, where the value is +∞.
    pub fn log_inverse_norm(&self, x: &Point) -> Result<f64, MapError> {
        if self.is_critical(x) {
            return Err(MapError::CriticalPoint(*x));
        }
        let v = self.jacobian(x).inverse_norm().ln();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(MapError::CriticalPoint(*x))
        }
    }

    /// The δ-truncated distance: dist(x, C) when it is below δ, else 1.
    pub fn truncated_critical_distance(&self, x: &Point, delta: f64) -> f64 {
        match self.critical_distance(x) {
            Some(d) if d < delta => d,
            _ => 1.0,
        }
    }

    /// Checks the four non-degeneracy conditions on a deterministic
    /// quasi-random sample of `sample_count` points.
    pub fn check_nondegenerate_critical(&self, sample_count: usize) -> ConditionReport {
        let sample_count = sample_count.max(100);
        if self.critical_set.is_empty() {
            return ConditionReport::vacuous();
        }
        let spec = &self.critical_set;
        let (beta, b, k, c) = (spec.beta, spec.bound_b, spec.bound_k, self.lipschitz_bound);
        let mut report = ConditionReport::default();

        for i in 0..sample_count {
            let x = quasi_random_point(self.space(), i);
            let Some(d) = self.critical_distance(&x) else {
                continue;
            };
            if d <= CRITICAL_TOLERANCE {
                continue;
            }
            let jac = self.jacobian(&x);
            let (smax, smin) = jac.singular_values();
            let db = d.powf(beta);

            // (1) dist^β / B ≤ ‖Df v‖/‖v‖ ≤ B dist^−β, over all directions
            report.conditions[0].record(le(db / b, smin) && le(smax, b / db));

            // (2) log-Lipschitz control of ‖Df⁻¹‖ on dist(x, y) < dist(x, C)/2
            let u = 2.0 * quasi_random_scalar(i, 7) - 1.0;
            let step = 0.5 * d * u * 0.999;
            let y = x.offset(&vec![step; x.dim()]);
            if !self.is_critical(&y) && x.dist(&y) < d / 2.0 {
                let lx = jac.inverse_norm().ln();
                let ly = self.jacobian(&y).inverse_norm().ln();
                report.conditions[1].record(le((lx - ly).abs(), b / db * x.dist(&y)));
            }

            // (3) |det Df(x)| < K dist(x, C)^β
            report.conditions[2].record(le(jac.det().abs(), k * db));

            // (4) ‖Df(x)‖ < C
            report.conditions[3].record(le(smax, c));
        }
        report
    }
}

/// Comparison used by the condition checks. The boundary is admitted: the
/// Chebyshev map attains |det Df| = 8·dist(x, C) and ‖Df(0)‖ = 4 exactly.
fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + 1e-12) + 1e-300
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub checked: usize,
    pub failures: usize,
}

impl ConditionOutcome {
    fn record(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Per-condition outcome of the non-degeneracy check, conditions (1)–(4) in
/// order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub vacuous: bool,
    pub conditions: [ConditionOutcome; 4],
}

impl ConditionReport {
    fn vacuous() -> Self {
        ConditionReport {
            vacuous: true,
            ..Default::default()
        }
    }

    pub fn condition(&self, index: usize) -> &ConditionOutcome {
        &self.conditions[index - 1]
    }

    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(ConditionOutcome::passed)
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const PLASTIC_1: f64 = 0.754_877_666_246_692_7;
const PLASTIC_2: f64 = 0.569_840_290_998_053_2;

/// Additive-recurrence (golden / R₂) low-discrepancy sequence.
pub fn quasi_random_point(space: PhaseSpace, i: usize) -> Point {
    let k = i as f64 + 1.0;
    match space {
        PhaseSpace::Circle => Point::Circle(wrap(0.5 + k * GOLDEN)),
        PhaseSpace::Torus => Point::Torus([wrap(0.5 + k * PLASTIC_1), wrap(0.5 + k * PLASTIC_2)]),
    }
}

fn quasi_random_scalar(i: usize, salt: usize) -> f64 {
    wrap(0.5 + (i * 31 + salt) as f64 * PLASTIC_1)
}

/// Finite-difference derivative on the circle, with the difference of the
/// images taken as a signed wraparound difference.
pub fn finite_difference(map: &DynamicalMap, x: &Point, h: f64) -> Jacobian {
    let fx = map.evaluate(x);
    match x {
        Point::Circle(_) => {
            let fy = map.evaluate(&x.offset(&[h]));
            Jacobian::scalar(signed_diff(fy.coord(0), fx.coord(0)) / h)
        }
        Point::Torus(_) => {
            let mut m = [[0.0; 2]; 2];
            for j in 0..2 {
                let mut e = [0.0; 2];
                e[j] = h;
                let fy = map.evaluate(&x.offset(&e));
                for (i, row) in m.iter_mut().enumerate() {
                    row[j] = signed_diff(fy.coord(i), fx.coord(i)) / h;
                }
            }
            Jacobian::matrix(m)
        }
    }
}

/// Composite trapezoid integral of the analytic density over the phase
/// space. The arcsine density is integrated in the angle variable
/// x = sin²(πs/2), where it becomes the constant 1.
pub fn density_mass(measure: &ReferenceMeasure, space: PhaseSpace, cells: usize) -> Option<f64> {
    if !measure.has_analytic_density() {
        return None;
    }
    let h = 1.0 / cells as f64;
    let trap = |f: &dyn Fn(f64) -> f64| {
        let mut s = 0.5 * (f(0.0) + f(1.0));
        for i in 1..cells {
            s += f(i as f64 * h);
        }
        s * h
    };
    match measure.kind {
        MeasureKind::ChebyshevArcsine => {
            let f = |s: f64| {
                let x = (PI * s / 2.0).sin().powi(2);
                let dx = PI / 2.0 * (PI * s).sin();
                if dx == 0.0 || x * (1.0 - x) <= 0.0 {
                    // the product density·dx/ds has limit 1 at both ends
                    1.0
                } else {
                    dx / (PI * (x * (1.0 - x)).sqrt())
                }
            };
            Some(trap(&f))
        }
        _ => {
            let one = trap(&|_| 1.0);
            Some(if space == PhaseSpace::Torus { one * one } else { one })
        }
    }
}
