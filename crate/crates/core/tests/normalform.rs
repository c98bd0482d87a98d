use o2hopf_core::model::canonical;
use o2hopf_core::normalform::{coeffs, coeffs_report, solve_psi, Route};
use o2hopf_core::{Complex64, ModelParams, RawParams};
use proptest::prelude::*;

fn admissible() -> impl Strategy<Value = ModelParams> {
    (0.3f64..3.0, 0.1f64..3.0, 0.1f64..3.0, prop_oneof![Just(std::f64::consts::PI), 1.0f64..6.0])
        .prop_filter_map("inadmissible", |(a, d1, d2, l)| {
            let mut raw = RawParams::new(a, 1.0, d1, d2);
            raw.half_length = l;
            let p = raw.check_positive().ok()?;
            let p = p.with_beta(p.beta1()).ok()?;
            p.require_admissible().ok()?;
            Some(p)
        })
}

#[test]
fn canonical_projection_matches_oracle() {
    let nf = coeffs(&canonical(), Route::Projection).unwrap();
    let b = Complex64::new(-0.45833333333333337, -0.5051814855409228);
    let c = Complex64::new(-2.749999999999999, 0.4330127018922195);
    assert!((nf.b - b).norm() < 1e-12, "{}", nf.b);
    assert!((nf.c - c).norm() < 1e-12, "{}", nf.c);
    // exact forms: -11/24 - 7i/(8 sqrt 3), -11/4 + i sqrt3/4
    let s3 = 3f64.sqrt();
    assert!((nf.b - Complex64::new(-11.0 / 24.0, -7.0 / (8.0 * s3))).norm() < 1e-13);
    assert!((nf.c - Complex64::new(-11.0 / 4.0, s3 / 4.0)).norm() < 1e-13);
}

#[test]
fn canonical_closed_form_real_parts() {
    let nf = coeffs(&canonical(), Route::ClosedForm).unwrap();
    assert!((nf.b.re + 17.0 / 8.0).abs() < 1e-12);
    assert!((nf.c.re - 11.0 / 4.0).abs() < 1e-12);
    assert!((nf.b.re + nf.c.re - 5.0 / 8.0).abs() < 1e-12);
    assert!((nf.a.re - 0.5).abs() < 1e-15);
}

#[test]
fn report_serializes_with_obstruction() {
    let r = coeffs_report(&canonical()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["mean_zero_obstruction"]["verdict"], "present");
    assert_eq!(v["routes"][0]["route"], "paper_closed_form");
    assert!(r.consistency.flagged.iter().any(|f| f.contains("paper_closed_form")));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_and_direct_agree(p in admissible()) {
        let x = coeffs(&p, Route::Projection).unwrap();
        let y = coeffs(&p, Route::Direct).unwrap();
        for (u, v) in [(x.a, y.a), (x.b, y.b), (x.c, y.c)] {
            prop_assert!((u - v).norm() <= 1e-10 * (1.0 + u.norm()), "{u} vs {v}");
        }
        prop_assert!((x.a.re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn psi_residuals_small(p in admissible()) {
        prop_assert!(solve_psi(&p).unwrap().residuals.max() <= 1e-12);
    }

    #[test]
    fn coefficients_do_not_depend_on_mu(p in admissible(), mu in -0.5f64..0.5) {
        let q = p.with_mu(mu).unwrap();
        prop_assert_eq!(coeffs(&p, Route::Projection).unwrap(), coeffs(&q, Route::Projection).unwrap());
    }
}
