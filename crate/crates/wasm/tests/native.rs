use outagelab_wasm::{constellation_view_json, outage_boundary_json, sweep_profile_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn view_rotates_points_and_reports_distances() {
    let v = parse(constellation_view_json("r2_4", 0.0).unwrap());
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    assert_eq!(v["bits"], 2.0);
    assert_eq!(v["min_product_distance"], 0.0);
    let r = parse(constellation_view_json("r2_4", 27.0).unwrap());
    assert!(r["min_product_distance"].as_f64().unwrap() > 0.0);
    let d0 = v["min_distance"].as_f64().unwrap();
    assert!((r["min_distance"].as_f64().unwrap() - d0).abs() < 1e-12);
}

#[test]
fn complex_sets_show_the_real_parts() {
    let v = parse(constellation_view_json("c2_16", 30.0).unwrap());
    assert_eq!(v["points"].as_array().unwrap().len(), 16);
}

#[test]
fn sweep_marks_saturated_angles_and_finds_the_optimum() {
    let v = parse(sweep_profile_json("r2_4", 0.9, 1.0).unwrap());
    let g = v["gamma_s_db"].as_array().unwrap();
    assert_eq!(g.len(), 91);
    assert!(g[0].is_null());
    let theta = v["theta_opt_deg"].as_f64().unwrap();
    assert!((theta - 27.66).abs() < 1.0, "{theta}");
    let best = g.iter().filter_map(Value::as_f64).fold(f64::INFINITY, f64::min);
    assert!(best > v["gaussian_floor_db"].as_f64().unwrap());
}

#[test]
fn boundary_reports_outage_between_its_bounds() {
    let v = parse(outage_boundary_json("r2_4", 27.0, 0.9, 8.0).unwrap());
    assert_eq!(v["rho"].as_array().unwrap().len(), 129);
    let p = v["p_out"].as_f64().unwrap();
    assert!(v["p_low"].as_f64().unwrap() <= p && p <= v["p_up"].as_f64().unwrap());
    assert!((v["alpha_o"].as_f64().unwrap() - 1.13369).abs() < 1e-3);
}

#[test]
fn errors_are_messages() {
    assert!(constellation_view_json("r3_8", 0.0).unwrap_err().contains("two-block"));
    assert!(sweep_profile_json("nope", 0.9, 1.0).is_err());
    assert!(outage_boundary_json("r2_4", 27.0, -1.0, 8.0).is_err());
}
