use std::f64::consts::PI;

use o2hopf_core::model::canonical;
use o2hopf_core::normalform::{coeffs, Route};
use o2hopf_core::reduced::*;
use o2hopf_core::{Complex64, RawParams};
use proptest::prelude::*;

fn projection(mu: f64) -> ReducedSystem {
    ReducedSystem::from_coeffs(&coeffs(&canonical(), Route::Projection).unwrap(), mu)
}

fn any_system() -> impl Strategy<Value = ReducedSystem> {
    (-1.0f64..1.0, 0.5f64..3.0, prop::array::uniform6(-3.0f64..3.0)).prop_map(|(mu, w, v)| {
        ReducedSystem::new(
            mu,
            w,
            Complex64::new(0.5, v[0]),
            Complex64::new(v[1], v[2]),
            Complex64::new(v[3], v[4]),
        )
    })
}

proptest! {
    #[test]
    fn radial_part_ignores_phases(s in any_system(), r1 in 0.0f64..2.0, r2 in 0.0f64..2.0,
                                  t1 in -7.0f64..7.0, t2 in -7.0f64..7.0) {
        prop_assert_eq!(polar_vector_field(&s, r1, r2, 0.0, 0.0), polar_vector_field(&s, r1, r2, t1, t2));
    }

    #[test]
    fn exchange_symmetry(s in any_system(), r1 in 0.0f64..2.0, r2 in 0.0f64..2.0) {
        let f = polar_vector_field(&s, r1, r2, 0.0, 0.0);
        let g = polar_vector_field(&s, r2, r1, 0.0, 0.0);
        prop_assert_eq!([f[1], f[0], f[3], f[2]], g);
    }

    #[test]
    fn classification_matches_branch_stability(s in any_system()) {
        let r = classify_regime(&s);
        prop_assume!(!r.degenerate && s.mu.abs() > 1e-3);
        for p in &r.probes {
            let bs = branches(&s.with_mu(p.mu));
            let tw = bs.iter().find(|b| b.kind == BranchKind::RotatingWave1).map(|b| b.stability);
            prop_assert_eq!(tw, p.rotating_wave);
        }
    }
}

#[test]
fn phase_rate_stays_above_half_omega() {
    for route in [Route::Projection, Route::ClosedForm] {
        let nf = coeffs(&canonical(), route).unwrap();
        for i in -50..=50 {
            let mu = i as f64 * 1e-3;
            for b in branches(&ReducedSystem::from_coeffs(&nf, mu)) {
                assert!(b.frequencies[0] >= nf.omega / 2.0, "{route:?} mu={mu} {b:?}");
            }
        }
    }
}

#[test]
fn radius_scales_as_sqrt_mu() {
    let s = projection(0.0);
    let mus: Vec<f64> = (0..=20).map(|i| 10f64.powf(-4.0 + 2.0 * i as f64 / 20.0)).collect();
    let pts: Vec<(f64, f64)> = mus
        .iter()
        .map(|&mu| {
            let r = branches(&s.with_mu(mu))
                .into_iter()
                .find(|b| b.kind == BranchKind::RotatingWave1)
                .unwrap()
                .r1;
            (mu.ln(), r.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    assert!((sxy / sxx - 0.5).abs() < 1e-6);
}

#[test]
fn stable_rotating_wave_attracts() {
    let mu = 0.05;
    let s = projection(mu);
    let tw = branches(&s).into_iter().find(|b| b.kind == BranchKind::RotatingWave1).unwrap();
    assert_eq!(tw.stability, Stability::Stable);
    let rows = integrate_truncated(
        &s,
        Complex64::new(1.2 * tw.r1, 0.0),
        Complex64::new(0.01, 0.0),
        200.0 / mu,
        1.0,
    )
    .unwrap();
    let last = rows.last().unwrap();
    assert!((last.r1 - tw.r1).abs() < 1e-6, "{last:?} vs {}", tw.r1);
    assert!(last.r2 < 1e-6);
}

#[test]
fn phase_winding_on_rotating_wave() {
    let mu = 0.05;
    let s = projection(mu);
    let tw = branches(&s).into_iter().find(|b| b.kind == BranchKind::RotatingWave1).unwrap();
    let t = 50.0;
    let rows = integrate_truncated(&s, Complex64::new(tw.r1, 0.0), Complex64::new(0.0, 0.0), t, 0.1).unwrap();
    let last = rows.last().unwrap();
    let expected = (s.omega + s.a.im * mu + s.b.im * tw.r1 * tw.r1) * t;
    assert!((last.th1 - expected).abs() < 1e-6 * expected);
    assert!((last.r1 - tw.r1).abs() < 1e-9);
}

#[test]
fn trajectories_are_deterministic() {
    let s = projection(0.05);
    let z = Complex64::new(0.1, 0.05);
    let a = integrate_truncated(&s, z, z * 0.5, 20.0, 0.25).unwrap();
    let b = integrate_truncated(&s, z, z * 0.5, 20.0, 0.25).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 81);
}

fn standing_wave(params: &o2hopf_core::ModelParams) -> (TorusWave, BranchPoint) {
    let nf = coeffs(params, Route::Projection).unwrap();
    // standing waves of the true coefficients exist for mu > 0
    let s = ReducedSystem::from_coeffs(&nf, 0.05);
    let sw = branches(&s).into_iter().find(|b| b.kind == BranchKind::StandingWave).unwrap();
    (TorusWave::new(params, &sw, 0.4, -0.9).unwrap(), sw)
}

#[test]
fn standing_wave_symmetries() {
    for l in [PI, 2.3] {
        let mut raw = RawParams::new(2.0, 7.0, 1.0, 1.0);
        raw.half_length = l;
        let p = raw.check_positive().unwrap();
        let (w, _) = standing_wave(&p);
        let psi = (w.phi1 - w.phi2) / w.kappa;
        let half_period = PI / w.omega_star;
        for i in 0..40 {
            let x = -l + 2.0 * l * i as f64 / 40.0 + 0.013;
            let t = 0.37 * i as f64;
            let u = w.eval(x, t);
            // R(psi) S U = U
            let v = w.eval(-(x + psi), t);
            assert!((u[0] - v[0]).abs() < 1e-13 && (u[1] - v[1]).abs() < 1e-13);
            // R(pi) U(t) = U(t + pi / omega*)
            let shifted = w.eval(x + PI / w.kappa, t);
            let later = w.eval(x, t + half_period);
            assert!((shifted[0] - later[0]).abs() < 1e-13 && (shifted[1] - later[1]).abs() < 1e-13);
        }
    }
}

#[test]
fn reconstructed_field_is_real() {
    let p = canonical();
    let (_, sw) = standing_wave(&p);
    let frame = reconstruct_wave(&p, &sw, 0.4, -0.9, 3.3, 128).unwrap();
    assert!(frame.imag_residue <= 1e-13);
    assert_eq!(frame.field.u1.len(), 128);
    assert_eq!(frame.omega_star, sw.frequencies[0]);
    let trivial = branches(&projection(0.05))[0];
    assert!(reconstruct_wave(&p, &trivial, 0.0, 0.0, 0.0, 16).is_err());
}
