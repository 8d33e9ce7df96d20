//! Browser bindings: hyperbolic-time scans, closing witnesses and
//! recurrence curves, each returned as a JSON string.

use serde_json::json;
use wasm_bindgen::prelude::*;

use hyperlab::closing::{closing_record, find_periodic_in_ball, DEFAULT_PERIOD_SLACK};
use hyperlab::hyperbolic::{exact_hyperbolic_times, hyperbolic_frequency};
use hyperlab::recurrence::{log_ladder, tau_ball};
use hyperlab::{DynamicalMap, OrbitRecord, Point};

/// Upper bounds that keep a single call interactive.
const MAX_ORBIT: usize = 200_000;
const MAX_LADDER: usize = 64;
const TAU_CAP: usize = 200;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn map_and_point(map_id: &str, x: f64, y: f64) -> Result<(DynamicalMap, Point), JsError> {
    let map = DynamicalMap::from_id(map_id, None).map_err(js_err)?;
    let p = Point::from_coords(map.space(), &[x, y][..map.dim()]).wrapped();
    Ok((map, p))
}

/// Hyperbolic times at level `c` along the orbit of (x, y), with the
/// running log-inverse-norm sums used to draw them.
#[wasm_bindgen]
pub fn hyperbolic_scan(map_id: &str, x: f64, y: f64, n: usize, c: f64) -> Result<String, JsError> {
    if n == 0 || n > MAX_ORBIT {
        return Err(JsError::new(&format!("orbit length must be in 1..={MAX_ORBIT}")));
    }
    let (map, p) = map_and_point(map_id, x, y)?;
    let rec = closing_record(&map, p, n).map_err(js_err)?;
    let a = rec.log_inv_norms();
    let idx = exact_hyperbolic_times(a, c);
    let mut running = 0.0;
    let partial: Vec<f64> = a
        .iter()
        .map(|v| {
            running += if v.is_finite() { *v } else { 0.0 };
            running
        })
        .collect();
    Ok(json!({
        "map": map.id(),
        "n": n,
        "c": c,
        "frequency": hyperbolic_frequency(&idx, n),
        "first": idx.first(),
        "indices": idx,
        "partial_sums": partial,
    })
    .to_string())
}

/// Periodic point in B_n(x, ε) for the integer-multiplier maps and the
/// smooth circle maps.
#[wasm_bindgen]
pub fn closing_witness(map_id: &str, x: f64, y: f64, n: usize, epsilon: f64) -> Result<String, JsError> {
    let (map, p) = map_and_point(map_id, x, y)?;
    let max_period = n + DEFAULT_PERIOD_SLACK;
    let rec = closing_record(&map, p, max_period + 64).map_err(js_err)?;
    let res = find_periodic_in_ball(&rec, n, epsilon, max_period).map_err(js_err)?;
    serde_json::to_string(&res).map_err(js_err)
}

/// First-return time τ against −log r over a log-spaced radius ladder.
#[wasm_bindgen]
pub fn recurrence_curve(map_id: &str, x: f64, y: f64, r_max: f64, r_min: f64, count: usize) -> Result<String, JsError> {
    if !(2..=MAX_LADDER).contains(&count) {
        return Err(JsError::new(&format!("ladder size must be in 2..={MAX_LADDER}")));
    }
    let (map, p) = map_and_point(map_id, x, y)?;
    let points = log_ladder(r_max, r_min, count)
        .into_iter()
        .map(|r| {
            let s = tau_ball(&map, &p, r, TAU_CAP).map_err(js_err)?;
            Ok(json!({ "radius": r, "neg_log_r": -r.ln(), "tau": s.tau }))
        })
        .collect::<Result<Vec<_>, JsError>>()?;
    Ok(json!({ "map": map.id(), "center": p, "points": points }).to_string())
}

/// Orbit of (x, y) for plotting; digit-exact for the integer-multiplier maps.
#[wasm_bindgen]
pub fn orbit(map_id: &str, x: f64, y: f64, n: usize) -> Result<String, JsError> {
    let (map, p) = map_and_point(map_id, x, y)?;
    let rec = match map.digit_bases() {
        Some(_) => closing_record(&map, p, n.min(MAX_ORBIT)).map_err(js_err)?,
        None => OrbitRecord::compute(&map, p, n.min(MAX_ORBIT)).map_err(js_err)?,
    };
    serde_json::to_string(rec.points()).map_err(js_err)
}
