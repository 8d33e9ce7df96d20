//! Success paths only: building a JsError needs a JavaScript host.

use hyperlab_web::{closing_witness, hyperbolic_scan, orbit, recurrence_curve};
use serde_json::Value;

#[test]
fn scan_reports_every_time_for_doubling() {
    let v: Value = serde_json::from_str(&hyperbolic_scan("doubling", 0.3, 0.0, 50, 0.2).unwrap()).unwrap();
    assert_eq!(v["indices"].as_array().unwrap().len(), 50);
    assert_eq!(v["frequency"], 1.0);
}

#[test]
fn witness_for_point_three() {
    let v: Value = serde_json::from_str(&closing_witness("doubling", 0.3, 0.0, 3, 0.1).unwrap()).unwrap();
    assert_eq!(v["period"], 5);
    assert!((v["periodic_point"].as_f64().unwrap() - 9.0 / 31.0).abs() < 1e-15);
}

#[test]
fn recurrence_curve_is_monotone() {
    let v: Value =
        serde_json::from_str(&recurrence_curve("diag23", 0.413, 0.287, 1e-2, 1e-4, 8).unwrap()).unwrap();
    let taus: Vec<u64> = v["points"].as_array().unwrap().iter().map(|p| p["tau"].as_u64().unwrap()).collect();
    assert_eq!(taus.len(), 8);
    assert!(taus.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn orbit_of_torus_point() {
    let v: Value = serde_json::from_str(&orbit("diag23", 0.5, 0.25, 3).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[1], serde_json::json!([0.0, 0.75]));
}
