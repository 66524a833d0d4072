//! Browser bindings. Every export returns a JSON string; `www/main.js` draws
//! the curves on a canvas.

use iot_pricing::compare::{
    crossing_points, table1, ComparisonRow, CrossingPoints, PreferenceTable,
};
use iot_pricing::oracle::{verify_profile, GridSpec, VerificationReport};
use iot_pricing::{solve, AdState, EquilibriumOutcome, MarketParams, Model};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Grid for the in-browser oracle check; coarser than the library default.
pub const BROWSER_GRID_STEPS: usize = 401;
pub const MAX_SAMPLES: usize = 5000;

#[derive(Debug, Serialize)]
pub struct Curves {
    pub ba1: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
    pub thresholds: CrossingPoints,
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub outcome: EquilibriumOutcome,
    pub verification: VerificationReport,
}

#[derive(Debug, Serialize)]
pub struct CompareTable {
    pub thresholds: CrossingPoints,
    pub table1: PreferenceTable,
}

fn market(d: f64, d_max: f64) -> Result<MarketParams, String> {
    MarketParams::new(d, d_max).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn curves(
    d: f64,
    d_max: f64,
    stop: f64,
    samples: usize,
    lambda: f64,
) -> Result<Curves, String> {
    let params = market(d, d_max)?;
    if !(stop.is_finite() && stop > 0.0) {
        return Err(format!("stop = {stop} must be positive"));
    }
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!("samples = {samples} outside [2, {MAX_SAMPLES}]"));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(format!("lambda = {lambda} outside [0, 1]"));
    }
    let ba1: Vec<f64> = (0..samples)
        .map(|i| stop * i as f64 / (samples - 1) as f64)
        .collect();
    let rows = ba1
        .iter()
        .map(|&r| ComparisonRow::evaluate(&params, r, lambda))
        .collect();
    let thresholds = crossing_points(&params).map_err(|e| e.to_string())?;
    Ok(Curves {
        ba1,
        rows,
        thresholds,
    })
}

pub fn point(
    model: &str,
    d: f64,
    d_max: f64,
    ba1: f64,
    lambda: f64,
) -> Result<PointReport, String> {
    let model: Model = model
        .parse()
        .map_err(|e: iot_pricing::Error| e.to_string())?;
    let params = market(d, d_max)?;
    let ad = AdState::from_revenue(ba1, &params).map_err(|e| e.to_string())?;
    let outcome = solve(model, &params, &ad, lambda).map_err(|e| e.to_string())?;
    let grid = GridSpec::covering(&params, ba1, BROWSER_GRID_STEPS);
    let verification = verify_profile(model, &outcome.prices, &params, &ad, &grid, 1e-6)
        .map_err(|e| e.to_string())?;
    Ok(PointReport {
        outcome,
        verification,
    })
}

pub fn preferences(
    d: f64,
    d_max: f64,
    low_r: f64,
    high_r: f64,
    lambda: f64,
) -> Result<CompareTable, String> {
    let params = market(d, d_max)?;
    Ok(CompareTable {
        thresholds: crossing_points(&params).map_err(|e| e.to_string())?,
        table1: table1(&params, low_r, high_r, lambda).map_err(|e| e.to_string())?,
    })
}

/// Per-model curves over `ba1` in `[0, stop]`, plus the crossing thresholds.
#[wasm_bindgen]
pub fn sweep_curves(
    d: f64,
    d_max: f64,
    stop: f64,
    samples: usize,
    lambda: f64,
) -> Result<String, JsError> {
    curves(d, d_max, stop, samples, lambda)
        .and_then(|c| to_json(&c))
        .map_err(|e| JsError::new(&e))
}

/// One model's equilibrium at `ba1`, checked by the deviation oracle.
#[wasm_bindgen]
pub fn equilibrium_at(
    model: &str,
    d: f64,
    d_max: f64,
    ba1: f64,
    lambda: f64,
) -> Result<String, JsError> {
    point(model, d, d_max, ba1, lambda)
        .and_then(|p| to_json(&p))
        .map_err(|e| JsError::new(&e))
}

/// Crossing thresholds and the preferred model per entity.
#[wasm_bindgen]
pub fn compare_table(
    d: f64,
    d_max: f64,
    low_r: f64,
    high_r: f64,
    lambda: f64,
) -> Result<String, JsError> {
    preferences(d, d_max, low_r, high_r, lambda)
        .and_then(|t| to_json(&t))
        .map_err(|e| JsError::new(&e))
}
