//! Points on the circle and the two-torus, the wraparound metric, and small
//! Jacobian matrices.

use serde::{Deserialize, Serialize};

/// Phase space of a catalog map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSpace {
    /// S¹ = [0, 1) with wraparound.
    Circle,
    /// T² = [0, 1)² with componentwise wraparound and the max metric.
    Torus,
}

impl PhaseSpace {
    pub fn dim(self) -> usize {
        match self {
            PhaseSpace::Circle => 1,
            PhaseSpace::Torus => 2,
        }
    }
}

/// A point of S¹ (serialized as a bare number) or T² (serialized as a pair).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Circle(f64),
    Torus([f64; 2]),
}

impl Point {
    pub fn space(&self) -> PhaseSpace {
        match self {
            Point::Circle(_) => PhaseSpace::Circle,
            Point::Torus(_) => PhaseSpace::Torus,
        }
    }

    pub fn dim(&self) -> usize {
        self.space().dim()
    }

    /// Coordinate `i` (0-based).
    pub fn coord(&self, i: usize) -> f64 {
        match (self, i) {
            (Point::Circle(x), 0) => *x,
            (Point::Torus(p), i) if i < 2 => p[i],
            _ => panic!("coordinate {i} out of range for {self:?}"),
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        match self {
            Point::Circle(x) => vec![*x],
            Point::Torus(p) => p.to_vec(),
        }
    }

    /// Builds a point of the given space from coordinates, reducing mod 1.
    pub fn from_coords(space: PhaseSpace, c: &[f64]) -> Point {
        match space {
            PhaseSpace::Circle => Point::Circle(wrap(c[0])),
            PhaseSpace::Torus => Point::Torus([wrap(c[0]), wrap(c[1])]),
        }
    }

    /// Reduces every coordinate into [0, 1).
    pub fn wrapped(self) -> Point {
        match self {
            Point::Circle(x) => Point::Circle(wrap(x)),
            Point::Torus([x, y]) => Point::Torus([wrap(x), wrap(y)]),
        }
    }

    pub fn in_fundamental_domain(&self) -> bool {
        self.coords().iter().all(|c| (0.0..1.0).contains(c))
    }

    pub fn dist(&self, other: &Point) -> f64 {
        match (self, other) {
            (Point::Circle(a), Point::Circle(b)) => circle_dist(*a, *b),
            (Point::Torus(a), Point::Torus(b)) => {
                circle_dist(a[0], b[0]).max(circle_dist(a[1], b[1]))
            }
            _ => panic!("distance between points of different spaces"),
        }
    }

    /// Translates by `delta` (coordinatewise) and wraps.
    pub fn offset(&self, delta: &[f64]) -> Point {
        match self {
            Point::Circle(x) => Point::Circle(wrap(x + delta[0])),
            Point::Torus([x, y]) => Point::Torus([wrap(x + delta[0]), wrap(y + delta[1])]),
        }
    }
}

/// Reduces `v` into [0, 1). Values that round up to exactly 1 collapse to 0.
pub fn wrap(v: f64) -> f64 {
    let r = v - v.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Wraparound distance on S¹: min(|a − b|, 1 − |a − b|).
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(1.0 - d)
}

/// Signed representative of `a − b` in [−1/2, 1/2).
pub fn signed_diff(a: f64, b: f64) -> f64 {
    let d = wrap(a - b + 0.5);
    d - 0.5
}

/// A real d×d Jacobian with d ∈ {1, 2}, stored in the top-left of a 2×2 array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub dim: usize,
    pub m: [[f64; 2]; 2],
}

impl Jacobian {
    pub fn scalar(a: f64) -> Self {
        Jacobian {
            dim: 1,
            m: [[a, 0.0], [0.0, 0.0]],
        }
    }

    pub fn matrix(m: [[f64; 2]; 2]) -> Self {
        Jacobian { dim: 2, m }
    }

    pub fn identity(dim: usize) -> Self {
        match dim {
            1 => Jacobian::scalar(1.0),
            _ => Jacobian::matrix([[1.0, 0.0], [0.0, 1.0]]),
        }
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            1 => self.m[0][0],
            _ => self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0],
        }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Jacobian) -> Jacobian {
        debug_assert_eq!(self.dim, rhs.dim);
        match self.dim {
            1 => Jacobian::scalar(self.m[0][0] * rhs.m[0][0]),
            _ => {
                let a = &self.m;
                let b = &rhs.m;
                Jacobian::matrix([
                    [
                        a[0][0] * b[0][0] + a[0][1] * b[1][0],
                        a[0][0] * b[0][1] + a[0][1] * b[1][1],
                    ],
                    [
                        a[1][0] * b[0][0] + a[1][1] * b[1][0],
                        a[1][0] * b[0][1] + a[1][1] * b[1][1],
                    ],
                ])
            }
        }
    }

    /// Singular values (largest, smallest).
    pub fn singular_values(&self) -> (f64, f64) {
        match self.dim {
            1 => {
                let a = self.m[0][0].abs();
                (a, a)
            }
            _ => {
                let [[a, b], [c, d]] = self.m;
                let s1 = a * a + b * b + c * c + d * d;
                let t = a * a + b * b - c * c - d * d;
                let u = a * c + b * d;
                let s2 = (t * t + 4.0 * u * u).sqrt();
                let max = ((s1 + s2) / 2.0).sqrt();
                let min = if max > 0.0 { self.det().abs() / max } else { 0.0 };
                // diagonal matrices: take the entries directly so no rounding creeps in
                if b == 0.0 && c == 0.0 {
                    let (x, y) = (a.abs(), d.abs());
                    return (x.max(y), x.min(y));
                }
                (max, min)
            }
        }
    }

    /// Operator norm ‖J‖ (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().0
    }

    /// ‖J⁻¹‖ = 1 / smallest singular value; +∞ when singular.
    pub fn inverse_norm(&self) -> f64 {
        let s = self.singular_values().1;
        if s == 0.0 {
            f64::INFINITY
        } else {
            1.0 / s
        }
    }

    /// Solves J v = rhs. Returns `None` when singular.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        match self.dim {
            1 => Some(vec![rhs[0] / det]),
            _ => {
                let [[a, b], [c, d]] = self.m;
                Some(vec![
                    (d * rhs[0] - b * rhs[1]) / det,
                    (-c * rhs[0] + a * rhs[1]) / det,
                ])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_collapses_one() {
        assert_eq!(wrap(1.0), 0.0);
        assert_eq!(wrap(-0.25), 0.75);
        assert_eq!(wrap(-1e-20), 0.0);
    }

    #[test]
    fn circle_distance_wraps() {
        assert!((circle_dist(0.05, 0.95) - 0.1).abs() < 1e-15);
        assert!((circle_dist(0.3, 0.2) - 0.1).abs() < 1e-15);
        assert!((signed_diff(0.05, 0.95) - 0.1).abs() < 1e-15);
        assert!((signed_diff(0.95, 0.05) + 0.1).abs() < 1e-15);
    }

    #[test]
    fn torus_uses_max_metric() {
        let a = Point::Torus([0.1, 0.9]);
        let b = Point::Torus([0.15, 0.1]);
        assert!((a.dist(&b) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn singular_values_of_rotation_scale() {
        let j = Jacobian::matrix([[0.0, -2.0], [2.0, 0.0]]);
        let (a, b) = j.singular_values();
        assert!((a - 2.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
        let j = Jacobian::matrix([[1.0, 1.0], [0.0, 1.0]]);
        let (a, b) = j.singular_values();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((a - golden).abs() < 1e-12);
        assert!((b - 1.0 / golden).abs() < 1e-12);
    }

    #[test]
    fn diagonal_norms() {
        let j = Jacobian::matrix([[2.0, 0.0], [0.0, 3.0]]);
        assert_eq!(j.operator_norm(), 3.0);
        assert_eq!(j.inverse_norm(), 0.5);
        assert_eq!(Jacobian::scalar(0.0).inverse_norm(), f64::INFINITY);
    }
}
