//! Browser bindings. Every export returns a JSON string; errors become
//! JavaScript exceptions carrying the message.

use outagelab::optimizer::{self, degree_grid};
use outagelab::outage::{self, db_to_linear, linear_to_db, OutageQuery};
use outagelab::{build_named, Constellation, MiConfig, MiEngine, Precoder};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Quadrature order of the demo engine, low enough to keep the page responsive.
pub const DEMO_GH_ORDER: usize = 24;
pub const DEMO_INTERVALS: usize = 128;

fn engine() -> Result<MiEngine, String> {
    MiEngine::new(MiConfig { gh_order: DEMO_GH_ORDER, ..MiConfig::default() }).map_err(|e| e.to_string())
}

fn two_block(name: &str) -> Result<Constellation, String> {
    let c = build_named(name).map_err(|e| e.to_string())?;
    if c.dim() != 2 {
        return Err(format!("{name}: the demo handles two-block sets only"));
    }
    Ok(c)
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Serialize)]
struct View {
    name: String,
    bits: f64,
    /// Real part of each rotated point, one pair per point.
    points: Vec<[f64; 2]>,
    min_distance: f64,
    min_product_distance: f64,
}

pub fn constellation_view_json(name: &str, theta_deg: f64) -> Result<String, String> {
    let c = two_block(name)?;
    let x = Precoder::rotation2(theta_deg.to_radians()).apply(&c).map_err(|e| e.to_string())?;
    let points = x.points().map(|p| if x.real_dims() == 2 { [p[0], p[1]] } else { [p[0], p[2]] }).collect();
    json(&View {
        name: name.into(),
        bits: c.bits(),
        points,
        min_distance: x.min_distance(),
        min_product_distance: x.min_product_distance(),
    })
}

#[derive(Serialize)]
struct Profile {
    theta_deg: Vec<f64>,
    /// `null` where the rate is unreachable
    gamma_s_db: Vec<Option<f64>>,
    gaussian_floor_db: f64,
    theta_opt_deg: Option<f64>,
}

pub fn sweep_profile_json(name: &str, rate: f64, step_deg: f64) -> Result<String, String> {
    let c = two_block(name)?;
    let grid: Vec<f64> =
        degree_grid(0.0, 90.0, step_deg).map_err(|e| e.to_string())?.iter().map(|d| d.to_radians()).collect();
    let p = optimizer::sweep(&engine()?, &c, rate, &grid, false).map_err(|e| e.to_string())?;
    json(&Profile {
        theta_deg: p.grid.iter().map(|t| t.to_degrees()).collect(),
        gamma_s_db: p.gamma_s.iter().map(|g| finite(linear_to_db(*g))).collect(),
        gaussian_floor_db: linear_to_db(p.gaussian_floor),
        theta_opt_deg: p.argmin().map(|k| p.grid[k].to_degrees()),
    })
}

#[derive(Serialize)]
struct Boundary {
    lambda_rad: Vec<f64>,
    /// `null` on saturated directions
    rho: Vec<Option<f64>>,
    alpha_o: Option<f64>,
    alpha_e: Option<f64>,
    p_out: f64,
    p_up: f64,
    p_low: f64,
}

pub fn outage_boundary_json(name: &str, theta_deg: f64, rate: f64, gamma_db: f64) -> Result<String, String> {
    let c = two_block(name)?;
    let e = engine()?;
    let pre = Precoder::rotation2(theta_deg.to_radians());
    let q = OutageQuery::discrete(&e, &c, &pre, rate, db_to_linear(gamma_db)).map_err(|e| e.to_string())?;
    let anchors = outage::compute_anchors(&e, &q).map_err(|e| e.to_string())?;
    let trace = outage::trace_boundary_2d(&e, &q, DEMO_INTERVALS).map_err(|e| e.to_string())?;
    let r = outage::outage_from_boundary_2d(&trace).map_err(|e| e.to_string())?;
    json(&Boundary {
        lambda_rad: trace.points.iter().map(|p| p.lambda_rad).collect(),
        rho: trace.points.iter().map(|p| finite(p.rho)).collect(),
        alpha_o: anchors.alpha_o,
        alpha_e: anchors.alpha_e,
        p_out: r.p_out,
        p_up: r.p_up,
        p_low: r.p_low,
    })
}

/// Rotated points and distance figures of a two-block set.
#[wasm_bindgen]
pub fn constellation_view(name: &str, theta_deg: f64) -> Result<String, JsError> {
    constellation_view_json(name, theta_deg).map_err(|e| JsError::new(&e))
}

/// Required SNR against the rotation angle over `[0°, 90°]`.
#[wasm_bindgen]
pub fn sweep_profile(name: &str, rate: f64, step_deg: f64) -> Result<String, JsError> {
    sweep_profile_json(name, rate, step_deg).map_err(|e| JsError::new(&e))
}

/// Outage boundary in polar form with anchors and outage probability.
#[wasm_bindgen]
pub fn outage_boundary(name: &str, theta_deg: f64, rate: f64, gamma_db: f64) -> Result<String, JsError> {
    outage_boundary_json(name, theta_deg, rate, gamma_db).map_err(|e| JsError::new(&e))
}
