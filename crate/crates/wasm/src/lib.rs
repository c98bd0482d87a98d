//! Browser bindings: dispersion curve, normal-form coefficients with their regime,
//! and one frame of a reconstructed rotating or standing wave.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic so
//! they can be tested natively; the exported wrappers only convert errors.

use o2hopf_core::normalform::{self, Route};
use o2hopf_core::reduced::{self, BranchKind, ReducedSystem};
use o2hopf_core::spectral;
use o2hopf_core::{ModelParams, RawParams};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn params(alpha: f64, delta1: f64, delta2: f64, mu: f64) -> Result<ModelParams, String> {
    RawParams::new(alpha, 1.0, delta1, delta2)
        .check_positive()
        .and_then(|p| p.with_mu(mu))
        .map_err(|e| e.to_string())
}

/// Leading eigenvalue of every mode `|n| <= n_max` at `beta = beta_1 + mu`.
pub fn dispersion_json(alpha: f64, delta1: f64, delta2: f64, mu: f64, n_max: i32) -> Result<String, String> {
    let p = params(alpha, delta1, delta2, mu)?;
    let n_max = i64::from(n_max.clamp(1, 256));
    let modes: Vec<_> = (-n_max..=n_max)
        .map(|n| {
            let m = spectral::mode_eigenvalues(&p, n, p.beta());
            let lead = if m.roots[0].re >= m.roots[1].re { m.roots[0] } else { m.roots[1] };
            json!({"n": n, "k": m.k, "re": m.max_real_part, "im": lead.im.abs()})
        })
        .collect();
    let onset = p.onset();
    let verdict = spectral::onset_scan(&p, p.beta(), n_max.max(2), spectral::DEFAULT_IMAG_TOL)
        .ok()
        .map(|s| s.verdict);
    Ok(json!({"onset": onset, "verdict": verdict, "modes": modes}).to_string())
}

/// `a`, `b`, `c` on the closed-form, direct and projection routes, each with its regime and branches.
pub fn coefficients_json(alpha: f64, delta1: f64, delta2: f64, mu: f64) -> Result<String, String> {
    let p = params(alpha, delta1, delta2, mu)?;
    let mut routes = Vec::new();
    for route in [Route::ClosedForm, Route::Direct, Route::Projection] {
        let nf = normalform::coeffs(&p, route).map_err(|e| e.to_string())?;
        let sys = ReducedSystem::from_coeffs(&nf, p.onset().mu);
        routes.push(json!({
            "route": route,
            "coefficients": nf,
            "regime": reduced::classify_regime(&sys),
            "branches": reduced::branches(&sys),
        }));
    }
    Ok(json!({"onset": p.onset(), "routes": routes}).to_string())
}

/// Fields `u1`, `u2` of the rotating (`"rotating"`) or standing (`"standing"`)
/// wave predicted by the projection-route normal form, at time `t`.
pub fn wave_frame_json(
    alpha: f64,
    delta1: f64,
    delta2: f64,
    mu: f64,
    kind: &str,
    t: f64,
    n_grid: u32,
) -> Result<String, String> {
    let p = params(alpha, delta1, delta2, mu)?;
    let want = match kind {
        "rotating" => BranchKind::RotatingWave1,
        "standing" => BranchKind::StandingWave,
        other => return Err(format!("unknown wave kind `{other}` (rotating, standing)")),
    };
    let nf = normalform::coeffs(&p, Route::Projection).map_err(|e| e.to_string())?;
    let sys = ReducedSystem::from_coeffs(&nf, p.onset().mu);
    let branch = reduced::branches(&sys)
        .into_iter()
        .find(|b| b.kind == want && b.r1 + b.r2 > 0.0)
        .ok_or_else(|| format!("no {kind} wave exists at mu = {mu}"))?;
    let frame = reduced::reconstruct_wave(&p, &branch, 0.0, 0.0, t, n_grid.clamp(8, 4096) as usize)
        .map_err(|e| e.to_string())?;
    let x = o2hopf_core::pdesim::grid(p.half_length(), frame.field.grid_size());
    Ok(json!({
        "kind": kind,
        "stability": branch.stability,
        "omega_star": frame.omega_star,
        "period": 2.0 * std::f64::consts::PI / frame.omega_star,
        "x": x,
        "u1": frame.field.u1,
        "u2": frame.field.u2,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn dispersion(alpha: f64, delta1: f64, delta2: f64, mu: f64, n_max: i32) -> Result<String, JsValue> {
    dispersion_json(alpha, delta1, delta2, mu, n_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn coefficients(alpha: f64, delta1: f64, delta2: f64, mu: f64) -> Result<String, JsValue> {
    coefficients_json(alpha, delta1, delta2, mu).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn wave_frame(
    alpha: f64,
    delta1: f64,
    delta2: f64,
    mu: f64,
    kind: &str,
    t: f64,
    n_grid: u32,
) -> Result<String, JsValue> {
    wave_frame_json(alpha, delta1, delta2, mu, kind, t, n_grid).map_err(|e| JsValue::from_str(&e))
}
