//! Numerical laboratory for nonuniformly expanding maps: hyperbolic times,
//! closing of orbit segments by periodic points inside (nonuniform)
//! dynamical balls, and Poincaré recurrence of shrinking balls.
//!
//! Everything is built around a small catalog of maps on the circle and the
//! two-torus ([`maps::DynamicalMap`]) whose invariant measures and Lyapunov
//! exponents are known, so every statistic can be checked against an
//! independent value.

pub mod balls;
pub mod closing;
pub mod digits;
mod error;
pub mod geometry;
pub mod hyperbolic;
pub mod maps;
pub mod orbit;
pub mod recurrence;

pub use error::{BallError, ClosingError, HyperbolicError, MapError, OrbitError, RecurrenceError};
pub use geometry::{Jacobian, PhaseSpace, Point};
pub use maps::DynamicalMap;
pub use orbit::OrbitRecord;

/// Crate version, echoed into result headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
