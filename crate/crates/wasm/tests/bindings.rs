use o2hopf_wasm::{coefficients_json, dispersion_json, wave_frame_json};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.expect("call succeeds")).expect("valid JSON")
}

#[test]
fn dispersion_at_canonical_onset() {
    let v = parse(dispersion_json(2.0, 1.0, 1.0, 0.0, 8));
    assert_eq!(v["verdict"], "hopf_onset");
    assert_eq!(v["modes"].as_array().unwrap().len(), 17);
    let one = &v["modes"][9];
    assert_eq!(one["n"], 1);
    assert!(one["re"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn coefficients_carry_all_routes() {
    let v = parse(coefficients_json(2.0, 1.0, 1.0, 0.05));
    let routes = v["routes"].as_array().unwrap();
    assert_eq!(routes.len(), 3);
    assert_eq!(routes[0]["route"], "paper_closed_form");
    assert!((routes[0]["coefficients"]["b"]["re"].as_f64().unwrap() + 2.125).abs() < 1e-12);
    assert_eq!(routes[2]["regime"]["rotating_wave_stable"], true);
}

#[test]
fn wave_frames() {
    let v = parse(wave_frame_json(2.0, 1.0, 1.0, 0.05, "standing", 0.3, 64));
    assert_eq!(v["u1"].as_array().unwrap().len(), 64);
    assert_eq!(v["stability"], "unstable");
    assert!(wave_frame_json(2.0, 1.0, 1.0, -0.05, "rotating", 0.0, 64).is_err());
    assert!(wave_frame_json(2.0, 1.0, 1.0, 0.05, "spiral", 0.0, 64).is_err());
    assert!(dispersion_json(-1.0, 1.0, 1.0, 0.0, 8).is_err());
}
