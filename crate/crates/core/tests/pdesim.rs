use o2hopf_core::model::canonical;
use o2hopf_core::normalform::{coeffs, Route};
use o2hopf_core::pdesim::*;
use o2hopf_core::reduced::{branches, BranchKind, ReducedSystem, TorusWave};
use o2hopf_core::spectral;
use o2hopf_core::Complex64;

fn base() -> SimConfig {
    SimConfig {
        n_grid: 64,
        dt: 1e-3,
        ..SimConfig::default()
    }
}

#[test]
fn growth_rates_match_dispersion() {
    let p = canonical();
    for k in 0..=4 {
        for mu in [-0.2, 0.05, 0.3] {
            let beta = p.beta1() + mu;
            let m = measure_growth_rates(&p, beta, k, 1e-5, 2.0, &base()).unwrap();
            let roots = spectral::mode_eigenvalues(&p, k, beta).roots;
            let mut theory = [roots[0].re, roots[1].re];
            theory.sort_by(|a, b| b.total_cmp(a));
            for (got, want) in m.rates.iter().zip(theory) {
                assert!((got - want).abs() <= 0.05 * want.abs(), "k={k} mu={mu}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn uniform_mode_grows_below_onset() {
    // The k = 0 mode has trace d1 + d2 at beta_1, so it is unstable even for
    // beta somewhat below beta_1: small perturbations do not return to uniform.
    let p = canonical().with_mu(-0.2).unwrap();
    let cfg = SimConfig {
        t_max: 20.0,
        init: InitSpec::Random { eps: 1e-6 },
        seed: 1,
        ..base()
    };
    let run = simulate(&p, &cfg, &[1], 0.1).unwrap();
    let first = run.samples[0].means[0] - p.alpha();
    let last = run.final_state.max_abs() - p.beta() / p.alpha();
    assert!(first.abs() < 1e-5);
    assert!(last > 0.1, "{last}");
}

#[test]
fn equivariance_commutators() {
    let p = canonical();
    let cfg = SimConfig {
        n_grid: 128,
        init: InitSpec::Random { eps: 1e-2 },
        seed: 11,
        ..base()
    };
    let r = equivariance_test(&p, &cfg, 0.7, 1.0).unwrap();
    assert!(r.translation <= 1e-8 && r.reflection <= 1e-8, "{r:?}");
    let zero = equivariance_test(&p, &cfg, 0.0, 1.0).unwrap();
    assert_eq!(zero.translation, 0.0);
}

#[test]
fn mean_identity_holds() {
    let cfg = SimConfig {
        init: InitSpec::Random { eps: 1e-2 },
        seed: 5,
        ..base()
    };
    let r = mean_identity_check(&canonical(), &cfg, 2.0, 0.01).unwrap();
    assert!(r.max_relative_error <= 1e-3, "{r:?}");
}

#[test]
fn second_order_in_time() {
    let cfg = SimConfig {
        dt: 1e-2,
        init: InitSpec::Random { eps: 0.1 },
        seed: 2,
        ..base()
    };
    let r = convergence_order(&canonical(), &cfg, 1.0).unwrap();
    assert!(r.order >= 1.8, "{r:?}");
}

#[test]
fn runs_are_bit_identical() {
    let cfg = SimConfig {
        t_max: 0.5,
        init: InitSpec::Random { eps: 1e-3 },
        seed: 9,
        ..base()
    };
    let a = simulate(&canonical(), &cfg, &[0, 1, 2], 0.1).unwrap();
    let b = simulate(&canonical(), &cfg, &[0, 1, 2], 0.1).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.samples.len(), 6);
}

#[test]
fn reconstructed_standing_wave_frequency() {
    let p = canonical();
    let nf = coeffs(&p, Route::Projection).unwrap();
    let sw = branches(&ReducedSystem::from_coeffs(&nf, 0.05))
        .into_iter()
        .find(|b| b.kind == BranchKind::StandingWave)
        .unwrap();
    let wave = TorusWave::new(&p, &sw, 0.3, 1.1).unwrap();
    let xs = grid(p.half_length(), 64);
    let mut ts = Vec::new();
    let mut amps: Vec<Complex64> = Vec::new();
    for i in 0..400 {
        let t = i as f64 * 0.05;
        let (u1, u2): (Vec<f64>, Vec<f64>) = xs.iter().map(|&x| wave.eval(x, t)).map(|[a, b]| (a, b)).unzip();
        let state = FieldState { half_length: p.half_length(), u1, u2, time: t };
        ts.push(t);
        amps.push(mode_amplitude(&state, 1).unwrap());
    }
    let f = oscillation_frequency(&ts, &amps).unwrap();
    assert!((f - wave.omega_star).abs() <= 0.01 * wave.omega_star, "{f} vs {}", wave.omega_star);
}

#[test]
fn perturbation_spec_parsing() {
    assert_eq!(InitSpec::parse("1:1e-4").unwrap(), InitSpec::Mode { k: 1, eps: 1e-4 });
    assert_eq!(InitSpec::parse("random:0.01").unwrap(), InitSpec::Random { eps: 0.01 });
    assert!(InitSpec::parse("x:1").is_err());
    assert!(InitSpec::parse("3").is_err());
}
