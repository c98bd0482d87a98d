//! Linear stability of the uniform state and the center space at onset.
//!
//! Perturbations `v = u - (alpha, beta/alpha)` evolve under `L_beta`, which acts on
//! `e^{ikx}` through
//!
//! ```text
//! M_n = [ -k^2 delta1 + beta - 1     alpha^2          ]
//!       [ -beta                     -k^2 delta2 - alpha^2 ]
//! ```
//!
//! with characteristic polynomial `P_n(l, beta) = l^2 + (beta(n) - beta) l + gamma(n) - k^2 delta2 beta`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2};
use crate::model::ModelParams;
use crate::modes::{ModeSum, ModeVector};

/// Default tolerance on `|Re lambda|` for "purely imaginary".
pub const DEFAULT_IMAG_TOL: f64 = 1e-10;
/// Default number of wave indices scanned.
pub const DEFAULT_N_MAX: i64 = 64;

/// `beta(n) = 1 + alpha^2 + k^2 (delta1 + delta2)`.
pub fn beta_n(params: &ModelParams, n: i64) -> f64 {
    let k = params.wave_number(n);
    let a = params.alpha();
    1.0 + a * a + k * k * (params.delta1() + params.delta2())
}

/// `gamma(n) = k^2 delta2 + k^2 delta1 alpha^2 + k^4 delta1 delta2 + alpha^2`.
pub fn gamma_n(params: &ModelParams, n: i64) -> f64 {
    let k2 = params.wave_number(n).powi(2);
    let a2 = params.alpha() * params.alpha();
    let (d1, d2) = (params.delta1(), params.delta2());
    k2 * d2 + k2 * d1 * a2 + k2 * k2 * d1 * d2 + a2
}

/// The real matrix `M_n` at a given `beta`.
pub fn mode_matrix(params: &ModelParams, n: i64, beta: f64) -> [[f64; 2]; 2] {
    let k2 = params.wave_number(n).powi(2);
    let a2 = params.alpha() * params.alpha();
    [
        [-k2 * params.delta1() + beta - 1.0, a2],
        [-beta, -k2 * params.delta2() - a2],
    ]
}

pub fn mode_matrix_c(params: &ModelParams, n: i64, beta: f64) -> Mat2 {
    linalg::real_mat(mode_matrix(params, n, beta))
}

/// Coefficients `(b, c)` of `P_n(l, beta) = l^2 + b l + c`.
pub fn char_poly(params: &ModelParams, n: i64, beta: f64) -> (f64, f64) {
    let k2 = params.wave_number(n).powi(2);
    (
        beta_n(params, n) - beta,
        gamma_n(params, n) - k2 * params.delta2() * beta,
    )
}

/// Evaluate `P_n(l, beta)` at a complex point.
pub fn char_poly_eval(params: &ModelParams, n: i64, beta: f64, lambda: Complex64) -> Complex64 {
    let (b, c) = char_poly(params, n, beta);
    lambda * lambda + lambda * b + c
}

/// Roots of `l^2 + b l + c` for real `b`, `c`.
///
/// Real roots use `q = -(b + sign(b) sqrt(disc)) / 2`, roots `q` and `c / q`.
pub fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        let re = -b / 2.0;
        let im = (-disc).sqrt() / 2.0;
        return [Complex64::new(re, im), Complex64::new(re, -im)];
    }
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -(b + sign * disc.sqrt()) / 2.0;
    if q == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    let (r1, r2) = (q, c / q);
    // larger real part first
    if r1 >= r2 {
        [r1.into(), r2.into()]
    } else {
        [r2.into(), r1.into()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub n: i64,
    pub k: f64,
    #[serde(with = "crate::serde_complex::pair")]
    pub roots: [Complex64; 2],
    pub max_real_part: f64,
}

pub fn mode_eigenvalues(params: &ModelParams, n: i64, beta: f64) -> ModeRecord {
    let (b, c) = char_poly(params, n, beta);
    let roots = quadratic_roots(b, c);
    ModeRecord {
        n,
        k: params.wave_number(n),
        roots,
        max_real_part: roots[0].re.max(roots[1].re),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnsetVerdict {
    /// Exactly the modes `n = +-1` sit on the imaginary axis.
    HopfOnset,
    NoCriticalMode,
    /// Some other set of modes is critical.
    Degenerate,
}

/// Closed-form certificate `gamma(n) - k^2 delta2 beta >= k^2 delta2 ((1 + alpha sqrt(delta1/delta2))^2 - beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnsetCertificate {
    /// `(1 + alpha sqrt(delta1/delta2))^2 - beta`, independent of `n`.
    pub bound_factor: f64,
    /// Smallest `(gamma(n) - k^2 delta2 beta) - k^2 delta2 bound_factor` over `1 <= |n| <= n_max`.
    pub min_margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetScan {
    pub beta: f64,
    pub n_max: i64,
    pub tol: f64,
    pub modes: Vec<ModeRecord>,
    pub critical_modes: Vec<i64>,
    pub verdict: OnsetVerdict,
    pub certificate: OnsetCertificate,
}

fn on_axis(rec: &ModeRecord, tol: f64) -> bool {
    rec.roots.iter().any(|r| r.re.abs() <= tol)
}

pub fn onset_scan(params: &ModelParams, beta: f64, n_max: i64, tol: f64) -> Result<OnsetScan> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be >= 2, got {n_max}")));
    }
    params.require_admissible()?;

    let modes: Vec<ModeRecord> = (-n_max..=n_max)
        .map(|n| mode_eigenvalues(params, n, beta))
        .collect();
    let critical_modes: Vec<i64> = modes
        .iter()
        .filter(|m| m.n != 0 && on_axis(m, tol))
        .map(|m| m.n)
        .collect();

    let pm_one_imaginary = modes
        .iter()
        .filter(|m| m.n.abs() == 1)
        .all(|m| m.roots.iter().all(|r| r.re.abs() <= tol && r.im.abs() > tol));
    let verdict = if pm_one_imaginary && critical_modes == [-1, 1] {
        OnsetVerdict::HopfOnset
    } else if critical_modes.is_empty() {
        OnsetVerdict::NoCriticalMode
    } else {
        OnsetVerdict::Degenerate
    };

    let onset = params.onset();
    let bound_factor = onset.assumption_bound - beta;
    let d2 = params.delta2();
    let min_margin = (1..=n_max)
        .map(|n| {
            let k2 = params.wave_number(n).powi(2);
            let (_, c) = char_poly(params, n, beta);
            c - k2 * d2 * bound_factor
        })
        .fold(f64::INFINITY, f64::min);
    // allow for rounding in the AM-GM equality case
    let holds = bound_factor > 0.0 && min_margin >= -1e-12 * onset.assumption_bound.max(1.0);

    Ok(OnsetScan {
        beta,
        n_max,
        tol,
        modes,
        critical_modes,
        verdict,
        certificate: OnsetCertificate {
            bound_factor,
            min_margin,
            holds,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuringReport {
    #[serde(with = "crate::serde_complex::pair")]
    pub roots: [Complex64; 2],
    pub both_positive_real_part: bool,
}

/// Roots of `P_0(l, beta_1)`; the uniform state is not Turing unstable when
/// both have positive real part (it is already unstable without diffusion).
pub fn turing_check(params: &ModelParams) -> TuringReport {
    let rec = mode_eigenvalues(params, 0, params.beta1());
    TuringReport {
        roots: rec.roots,
        both_positive_real_part: rec.roots.iter().all(|r| r.re > 0.0),
    }
}

/// Second component of the critical eigenvector, `(-alpha^2 - delta2 + i omega) / alpha^2`.
fn xi_second(params: &ModelParams, omega: f64) -> Complex64 {
    let a2 = params.alpha() * params.alpha();
    let (_, d2) = params.effective_diffusion();
    Complex64::new(-a2 - d2, omega) / a2
}

/// `xi_1 = e^{i kappa x} (1, (-alpha^2 - delta2 + i omega)/alpha^2)`, eigenvalue `i omega`.
pub fn xi1(params: &ModelParams) -> Result<ModeVector> {
    let omega = params.require_admissible()?.omega;
    Ok(ModeVector::new(1, [Complex64::new(1.0, 0.0), xi_second(params, omega)]))
}

/// `xi_2 = S xi_1`, the mirror image; same eigenvalue.
pub fn xi2(params: &ModelParams) -> Result<ModeVector> {
    Ok(xi1(params)?.reflect())
}

/// Dual eigenfunction in `ker (i omega - L)^*`, normalised so that `<xi_1, xi_1^*> = 1`.
pub fn xi1_star(params: &ModelParams) -> Result<ModeVector> {
    let omega = params.require_admissible()?.omega;
    let a2 = params.alpha() * params.alpha();
    let (_, d2) = params.effective_diffusion();
    let pre = Complex64::new(0.0, a2 / (4.0 * params.half_length() * omega));
    Ok(ModeVector::new(
        1,
        [pre * Complex64::new(d2 + a2, -omega) / a2, pre],
    ))
}

pub fn inner_product(f: &ModeSum, g: &ModeSum) -> Result<Complex64> {
    f.inner(g)
}

/// Apply `L_beta` to a mode sum.
pub fn apply_linear(params: &ModelParams, beta: f64, v: &ModeSum) -> ModeSum {
    ModeSum::from_terms(
        v.half_length,
        v.terms().map(|(n, a)| {
            let m = mode_matrix_c(params, n, beta);
            (n, linalg::matvec(&m, &a))
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonical, RawParams};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent root finder: Newton from many seeds on the monic quadratic.
    fn brute_roots(b: f64, cc: f64) -> Vec<Complex64> {
        let p = |z: Complex64| z * z + z * b + cc;
        let dp = |z: Complex64| z * 2.0 + b;
        let mut found: Vec<Complex64> = Vec::new();
        for i in 0..16 {
            let mut z = Complex64::from_polar(10.0, i as f64 * 0.4 + 0.1);
            for _ in 0..200 {
                z -= p(z) / dp(z);
            }
            if !found.iter().any(|w| (w - z).norm() < 1e-8) {
                found.push(z);
            }
        }
        found
    }

    #[test]
    fn canonical_beta_and_gamma() {
        let p = canonical();
        assert_eq!(beta_n(&p, 1), 7.0);
        assert_eq!(beta_n(&p, 0), 5.0);
        assert_eq!(gamma_n(&p, 0), 4.0);
        assert_eq!(gamma_n(&p, 1), 10.0);
        let o = p.onset();
        assert!((gamma_n(&p, 1) - p.delta2() * o.beta1 - o.omega_squared).abs() < 1e-14);
    }

    #[test]
    fn critical_pair_at_onset() {
        let p = canonical();
        let r = mode_eigenvalues(&p, 1, 7.0);
        assert!(r.roots[0].re.abs() < 1e-15);
        assert!((r.roots[0].im - 3f64.sqrt()).abs() < 1e-15);
        assert!((r.roots[1].im + 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_mode_at_onset() {
        let p = canonical();
        let r = mode_eigenvalues(&p, 0, 7.0);
        // l^2 - 2 l + 4
        assert!((r.roots[0] - c(1.0, 3f64.sqrt())).norm() < 1e-15);
        assert!((r.roots[1] - c(1.0, -(3f64.sqrt()))).norm() < 1e-15);
    }

    #[test]
    fn mode_two_is_off_axis() {
        let p = canonical();
        let (b, cc) = char_poly(&p, 2, 7.0);
        assert_eq!((b, cc), (6.0, 12.0));
        let brute = brute_roots(b, cc);
        assert!(brute.iter().all(|z| z.re.abs() > 1.0));
        let r = mode_eigenvalues(&p, 2, 7.0);
        for z in r.roots {
            assert!(brute.iter().any(|w| (w - z).norm() < 1e-10));
        }
    }

    #[test]
    fn stable_formula_avoids_cancellation() {
        let [r1, r2] = quadratic_roots(1e8, 1.0);
        assert!((r2.re + 1e8).abs() < 1e-6);
        assert!((r1.re + 1e-8).abs() < 1e-22);
    }

    #[test]
    fn canonical_scan_is_hopf_onset() {
        let scan = onset_scan(&canonical(), 7.0, 16, DEFAULT_IMAG_TOL).unwrap();
        assert_eq!(scan.verdict, OnsetVerdict::HopfOnset);
        assert_eq!(scan.critical_modes, vec![-1, 1]);
        assert!(scan.certificate.holds);
    }

    #[test]
    fn below_onset_no_critical_mode() {
        let scan = onset_scan(&canonical(), 6.5, 16, DEFAULT_IMAG_TOL).unwrap();
        assert_eq!(scan.verdict, OnsetVerdict::NoCriticalMode);
        assert!(scan.modes.iter().filter(|m| m.n != 0).all(|m| m.max_real_part < 0.0));
    }

    #[test]
    fn rescaled_domain_moves_onset_to_k_two() {
        let raw = RawParams {
            half_length: PI / 2.0,
            ..RawParams::new(2.0, 7.0, 0.25, 0.25)
        };
        let p = raw.check_positive().unwrap();
        // effective diffusion kappa^2 delta = 1, so beta(k = 2) equals the canonical 7
        let b1 = p.beta1();
        assert!((b1 - 7.0).abs() < 1e-12);
        let scan = onset_scan(&p, b1, 16, DEFAULT_IMAG_TOL).unwrap();
        assert_eq!(scan.verdict, OnsetVerdict::HopfOnset);
        let one = scan.modes.iter().find(|m| m.n == 1).unwrap();
        assert!((one.k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scan_rejects_small_n_max_and_inadmissible() {
        assert!(matches!(
            onset_scan(&canonical(), 7.0, 1, 1e-10),
            Err(Error::InvalidArgument(_))
        ));
        let bad = RawParams::new(2.0, 7.0, 0.1, 3.0).check_positive().unwrap();
        assert!(matches!(
            onset_scan(&bad, 7.0, 8, 1e-10),
            Err(Error::InadmissibleRegime { .. })
        ));
    }

    #[test]
    fn turing_roots() {
        let t = turing_check(&canonical());
        assert!(t.both_positive_real_part);
        let p = RawParams::new(10.0, 103.0, 1.0, 1.0).check_positive().unwrap();
        let t = turing_check(&p);
        // l^2 - 2 l + 100
        assert!(t.both_positive_real_part);
        assert!((t.roots[0].re - 1.0).abs() < 1e-14);
        assert!((t.roots[0].im.abs() - 99f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn canonical_eigenfunctions() {
        let p = canonical();
        let x1 = xi1(&p).unwrap();
        assert!((x1.amp[1] - c(-5.0, 3f64.sqrt()) / 4.0).norm() < 1e-15);
        let x2 = xi2(&p).unwrap();
        assert_eq!(x2.n, -1);
        assert_eq!(x2.amp, x1.amp);
    }

    #[test]
    fn dual_normalisation_and_product() {
        let p = canonical();
        let l = p.half_length();
        let s1 = ModeSum::single(l, xi1(&p).unwrap());
        let star = ModeSum::single(l, xi1_star(&p).unwrap());
        assert!((s1.inner(&star).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let s2 = ModeSum::single(l, xi2(&p).unwrap());
        assert_eq!(s1.inner(&s2).unwrap(), c(0.0, 0.0));
        let e = ModeSum::single(l, ModeVector::new(1, [c(1.0, 0.0), c(-1.0, 0.0)]));
        let w = 3f64.sqrt();
        let expected = c(0.0, -1.0) * c(1.0, w) / (2.0 * w);
        assert!((e.inner(&star).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn dual_normalisation_on_other_domain() {
        let raw = RawParams {
            half_length: 2.5,
            ..RawParams::new(2.0, 7.0, 1.0, 1.0)
        };
        let p = raw.check_positive().unwrap();
        let s1 = ModeSum::single(2.5, xi1(&p).unwrap());
        let star = ModeSum::single(2.5, xi1_star(&p).unwrap());
        assert!((s1.inner(&star).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }
}
