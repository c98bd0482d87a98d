//! Golden checks behind `o2hopf verify` and the acceptance test target.
//!
//! Each criterion bundles several sub-checks; it passes iff all of them pass.
//! Random parameter sets come from a fixed seed so reruns are identical.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{canonical, ModelParams, RawParams};
use crate::meanzero::Obstruction;
use crate::normalform::{self, coeff_a, coeff_b, coeff_c, closed_form_constants, solve_psi, Route};
use crate::pdesim::{self, InitSpec, SimConfig};
use crate::reduced::{self, BranchKind, ReducedSystem, Stability};
use crate::spectral::{self, OnsetVerdict, DEFAULT_N_MAX};

/// Frozen output of `oracle/oracle.py` at canonical parameters.
pub const ORACLE_CANONICAL: &str = include_str!("../data/oracle_canonical.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCheck {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<SubCheck>,
    pub elapsed_s: f64,
}

impl CriterionReport {
    /// `[PASS] 3 route consistency (0.02 s)` plus the failing sub-checks.
    pub fn summary_line(&self) -> String {
        let mut s = format!(
            "[{}] criterion {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed_s
        );
        for c in self.checks.iter().filter(|c| !c.passed) {
            s.push_str(&format!("\n       failed: {}: {}", c.label, c.detail));
        }
        s
    }
}

struct Collector {
    checks: Vec<SubCheck>,
}

impl Collector {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(SubCheck {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn rel(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        self.check(label, err <= tol, format!("got {got:.15e}, want {want:.15e}, rel err {err:.2e}"));
    }

    fn finish(self, id: u8, title: &str, start: Instant) -> CriterionReport {
        CriterionReport {
            id,
            title: title.to_string(),
            passed: self.checks.iter().all(|c| c.passed),
            checks: self.checks,
            elapsed_s: start.elapsed().as_secs_f64(),
        }
    }
}

/// Uniform draw from a box, retried until admissible. Half the draws use `L != pi`.
pub fn random_admissible(rng: &mut impl Rng) -> ModelParams {
    loop {
        let mut raw = RawParams::new(
            rng.gen_range(0.3..3.0),
            1.0,
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.1..3.0),
        );
        if rng.gen_bool(0.5) {
            raw.half_length = rng.gen_range(1.0..6.0);
        }
        let Ok(p) = raw.check_positive() else { continue };
        let Ok(p) = p.with_beta(p.beta1()) else { continue };
        if p.require_admissible().is_ok() {
            return p;
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn oracle_value(key: &str) -> Complex64 {
    let v: serde_json::Value = serde_json::from_str(ORACLE_CANONICAL).expect("oracle data is valid JSON");
    Complex64::new(
        v[key]["re"].as_f64().expect("oracle re"),
        v[key]["im"].as_f64().expect("oracle im"),
    )
}

pub fn criterion_1() -> CriterionReport {
    let start = Instant::now();
    let mut c = Collector::new();
    let p = canonical();
    let onset = p.onset();
    let s3 = 3f64.sqrt();
    c.rel("beta_1", onset.beta1, 7.0, 1e-12);
    c.rel("omega", onset.omega, s3, 1e-12);
    match closed_form_constants(&p) {
        Ok(k) => {
            c.rel("N_r", k.n_r, 66.0, 1e-12);
            c.rel("N_i", k.n_i, 12.0, 1e-12);
            c.rel("B_r", k.b_r, 18.0, 1e-12);
            c.rel("B_i", k.b_i, -33.0, 1e-12);
            c.rel("C_2r", k.c2r, -192.0, 1e-12);
            c.rel("C_2i", k.c2i, 72.0 * s3, 1e-12);
            c.rel("P_2(0)", k.p2_zero, 12.0, 1e-12);
            c.rel("Q_r", k.q_r, 42.0, 1e-12);
            c.rel("Q_i", k.q_i, -20.0 * s3, 1e-12);
        }
        Err(e) => c.check("closed-form constants", false, e.to_string()),
    }
    match (coeff_b(&p, Route::ClosedForm), coeff_c(&p, Route::ClosedForm)) {
        (Ok(b), Ok(cc)) => {
            c.rel("Re b", b.re, -17.0 / 8.0, 1e-12);
            c.rel("Re c", cc.re, 11.0 / 4.0, 1e-12);
            c.rel("Re b + Re c", b.re + cc.re, 5.0 / 8.0, 1e-12);
        }
        _ => c.check("closed-form b, c", false, "route failed"),
    }
    let elapsed = start.elapsed().as_secs_f64();
    c.check("runtime < 1 s", elapsed < 1.0, format!("{elapsed:.3} s"));
    c.finish(1, "closed-form values at canonical parameters", start)
}

pub fn criterion_2() -> CriterionReport {
    let start = Instant::now();
    let mut c = Collector::new();
    let mut r = rng(2);
    let sets: Vec<ModelParams> = std::iter::once(canonical()).chain((0..50).map(|_| random_admissible(&mut r))).collect();
    let mut worst: f64 = 0.0;
    let mut re_exact = true;
    let mut failures = 0;
    for p in &sets {
        let onset = p.onset();
        let (_, d2) = p.effective_diffusion();
        let want = Complex64::new(0.5, -d2 / (2.0 * onset.omega));
        for route in [Route::ClosedForm, Route::Asymptotic, Route::Projection] {
            match coeff_a(p, route) {
                Ok(a) => worst = worst.max((a - want).norm() / want.norm()),
                Err(_) => failures += 1,
            }
        }
        re_exact &= coeff_a(p, Route::ClosedForm).map(|a| a.re == 0.5).unwrap_or(false);
    }
    c.check("routes evaluated", failures == 0, format!("{failures} failures"));
    c.check(
        "a = 1/2 - i delta2/(2 omega), closed-form/asymptotic/projection, 51 sets",
        worst <= 1e-12,
        format!("max rel err {worst:.2e}"),
    );
    c.check("Re a = 1/2 exactly (closed form)", re_exact, "");
    c.finish(2, "a coefficient", start)
}

pub fn criterion_3() -> CriterionReport {
    let start = Instant::now();
    let mut c = Collector::new();
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    let mut closed_gap: f64 = 0.0;
    let n_sets = 25;
    for _ in 0..n_sets {
        let p = random_admissible(&mut r);
        let vals = (|| -> crate::Result<_> {
            Ok([
                (coeff_b(&p, Route::Projection)?, coeff_b(&p, Route::Direct)?, coeff_b(&p, Route::ClosedForm)?),
                (coeff_c(&p, Route::Projection)?, coeff_c(&p, Route::Direct)?, coeff_c(&p, Route::ClosedForm)?),
            ])
        })();
        match vals {
            Ok(v) => {
                for (proj, direct, closed) in v {
                    worst = worst.max((proj - direct).norm() / (1.0 + proj.norm()));
                    closed_gap = closed_gap.max((proj - closed).norm() / (1.0 + proj.norm()));
                }
            }
            Err(e) => c.check("route evaluation", false, e.to_string()),
        }
    }
    c.check(
        format!("projection == direct for b, c on {n_sets} random sets"),
        worst <= 1e-10,
        format!("max rel discrepancy {worst:.2e}"),
    );
    c.check(
        "closed-form discrepancy computed and reported",
        closed_gap.is_finite(),
        format!("max rel discrepancy vs projection {closed_gap:.3e}"),
    );
    let p = canonical();
    for (key, got) in [
        ("b_direct", coeff_b(&p, Route::Direct)),
        ("c_direct", coeff_c(&p, Route::Direct)),
        ("b_projection", coeff_b(&p, Route::Projection)),
        ("c_projection", coeff_c(&p, Route::Projection)),
    ] {
        let want = oracle_value(key);
        match got {
            Ok(v) => {
                let err = (v - want).norm() / want.norm();
                c.check(format!("{key} pinned to oracle"), err <= 1e-12, format!("got {v}, oracle {want}, rel err {err:.2e}"));
            }
            Err(e) => c.check(key, false, e.to_string()),
        }
    }
    match normalform::coeffs_report(&p) {
        Ok(rep) => c.check(
            "report flags closed form as inconsistent, projection/direct as consistent",
            rep.consistency.projection_direct_consistent && !rep.consistency.closed_form_consistent,
            format!("flagged: {:?}", rep.consistency.flagged),
        ),
        Err(e) => c.check("coeffs report", false, e.to_string()),
    }
    c.finish(3, "route consistency", start)
}

pub fn criterion_4() -> CriterionReport {
    let start = Instant::now();
    let mut c = Collector::new();
    let mut sets = vec![canonical()];
    let mut r = rng(4);
    sets.extend((0..20).map(|_| random_admissible(&mut r)));
    let mut worst: f64 = 0.0;
    for p in &sets {
        match solve_psi(p) {
            Ok(psi) => {
                worst = worst.max(psi.residuals.max());
                if !psi.psi_00001.is_zero() {
                    c.check("psi_00001 = 0", false, format!("{:?}", psi.psi_00001));
                }
                let d = psi.psi_00110.max_abs_diff(&psi.psi_11000.reflect());
                if d > 1e-13 {
                    c.check("psi_00110 = S psi_11000", false, format!("diff {d:.2e}"));
                }
            }
            Err(e) => c.check("psi solve", false, e.to_string()),
        }
    }
    c.check("residuals <= 1e-12 (21 sets)", worst <= 1e-12, format!("max relative residual {worst:.2e}"));
    c.check("psi_00001 = 0 and psi_00110 = S psi_11000", c.checks.iter().all(|x| x.passed), "");
    match solve_psi(&canonical()) {
        Ok(psi) => {
            let rep = crate::meanzero::zero_mode_content(&psi);
            c.check(
                "mean-zero obstruction present at canonical parameters",
                rep.verdict == Obstruction::Present,
                rep.message,
            );
        }
        Err(e) => c.check("mean-zero", false, e.to_string()),
    }
    c.finish(4, "center-manifold equations", start)
}

pub fn criterion_5() -> CriterionReport {
    let start = Instant::now();
    let mut c = Collector::new();
    let p = canonical();
    let w = p.onset().omega;
    match spectral::onset_scan(&p, p.beta1(), DEFAULT_N_MAX, 1e-10) {
        Ok(scan) => {
            c.check("verdict HopfOnset", scan.verdict == OnsetVerdict::HopfOnset, format!("{:?}", scan.verdict));
            for m in scan.modes.iter().filter(|m| m.n.abs() == 1) {
                let mut ims = [m.roots[0].im, m.roots[1].im];
                ims.sort_by(f64::total_cmp);
                let ok = m.roots.iter().all(|r| r.re.abs() <= 1e-10)
                    && (ims[0] + w).abs() <= 1e-10
                    && (ims[1] - w).abs() <= 1e-10;
                c.check(format!("mode {} on the axis at +-i omega", m.n), ok, format!("{:?}", m.roots));
            }
            let off = scan
                .modes
                .iter()
                .filter(|m| m.n.abs() >= 2)
                .all(|m| m.roots.iter().all(|r| r.re.abs() > 1e-10));
            c.check("2 <= |n| <= 64 off the axis", off, "");
        }
        Err(e) => c.check("onset scan", false, e.to_string()),
    }
    let t = spectral::turing_check(&p);
    c.check(
        "P_0 roots have positive real part (no Turing instability)",
        t.both_positive_real_part,
        format!("{:?}", t.roots),
    );
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let q = random_admissible(&mut r);
        let n = r.gen_range(0..=DEFAULT_N_MAX);
        let beta = q.beta1() + r.gen_range(-2.0..2.0);
        let (b, cc) = spectral::char_poly(&q, n, beta);
        let [x, y] = spectral::mode_eigenvalues(&q, n, beta).roots;
        let sum = ((x + y) + b).norm() / (1.0 + b.abs());
        let prod = ((x * y) - cc).norm() / (1.0 + cc.abs());
        worst = worst.max(sum).max(prod);
    }
    c.check("Vieta on 500 random cases", worst <= 1e-12, format!("max rel err {worst:.2e}"));
    let elapsed = start.elapsed().as_secs_f64();
    c.check("runtime < 1 s", elapsed < 1.0, format!("{elapsed:.3} s"));
    c.finish(5, "spectral onset", start)
}

pub fn criterion_6() -> CriterionReport {
    let start = Instant::now();
    let mut c = Collector::new();
    let p = canonical();
    let cfg = SimConfig {
        n_grid: 64,
        dt: 1e-3,
        ..SimConfig::default()
    };
    for mu in [0.05, -0.05] {
        let beta = p.beta1() + mu;
        match pdesim::measure_growth_rates(&p, beta, 1, 1e-5, 2.0, &cfg) {
            Ok(m) => {
                let want = mu / 2.0;
                let err = (m.rates[0] - want).abs() / want.abs();
                c.check(
                    format!("mode 1, mu = {mu}: rate vs mu/2"),
                    err <= 0.05,
                    format!("measured {:.6}, expected {want}, rel err {err:.2e}", m.rates[0]),
                );
            }
            Err(e) => c.check(format!("mode 1, mu = {mu}"), false, e.to_string()),
        }
        for k in [2, 3] {
            let want = spectral::mode_eigenvalues(&p, k, beta).max_real_part;
            match pdesim::measure_growth_rates(&p, beta, k, 1e-5, 2.0, &cfg) {
                Ok(m) => {
                    let err = (m.rates[0] - want).abs() / want.abs();
                    c.check(
                        format!("mode {k}, mu = {mu}: rate vs Re lambda"),
                        err <= 0.05,
                        format!("measured {:.6}, expected {want:.6}, rel err {err:.2e}", m.rates[0]),
                    );
                }
                Err(e) => c.check(format!("mode {k}, mu = {mu}"), false, e.to_string()),
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    c.check("runtime < 1 min", elapsed < 60.0, format!("{elapsed:.2} s"));
    c.finish(6, "PDE linear regime", start)
}

pub fn criterion_7() -> CriterionReport {
    let start = Instant::now();
    let mut c = Collector::new();
    let p = canonical();
    let mus = [0.01, 0.02, 0.03, 0.05];
    match pdesim::amplitude_scaling_experiment(&p, &mus, &SimConfig::default()) {
        Ok(fit) => {
            let pts: Vec<String> = fit
                .points
                .iter()
                .map(|q| {
                    format!(
                        "mu={} |mode1|={:.3e} uniform-part amplitude={:.3} at frequency {:?}",
                        q.mu, q.amplitude, q.mode0_amplitude, q.mode0_frequency
                    )
                })
                .collect();
            match fit.slope {
                Some(s) => c.check("log-log slope 0.5 +- 0.1", (s - 0.5).abs() <= 0.1, format!("slope {s:.4}; {}", pts.join("; "))),
                None => c.check("log-log slope 0.5 +- 0.1", false, format!("{}; {}", fit.verdict, pts.join("; "))),
            }
            let w = 3f64.sqrt();
            match fit.frequency_limit {
                Some(f) => c.check(
                    "frequency extrapolates to sqrt 3 within 5%",
                    (f - w).abs() <= 0.05 * w,
                    format!("extrapolated {f:.4}"),
                ),
                None => c.check(
                    "frequency extrapolates to sqrt 3 within 5%",
                    false,
                    "no saturated mode-1 oscillation to extrapolate from",
                ),
            }
        }
        Err(e) => {
            c.check("log-log slope 0.5 +- 0.1", false, e.to_string());
            c.check("frequency extrapolates to sqrt 3 within 5%", false, e.to_string());
        }
    }
    let eq_cfg = SimConfig {
        n_grid: 128,
        init: InitSpec::Random { eps: 1e-2 },
        seed: 7,
        ..SimConfig::default()
    };
    match pdesim::equivariance_test(&p, &eq_cfg, 0.7, 1.0) {
        Ok(r) => {
            c.check("translation commutator <= 1e-8 over T = 1", r.translation <= 1e-8, format!("{:.2e}", r.translation));
            c.check("reflection commutator <= 1e-8 over T = 1", r.reflection <= 1e-8, format!("{:.2e}", r.reflection));
        }
        Err(e) => c.check("equivariance", false, e.to_string()),
    }
    let conv_cfg = SimConfig {
        dt: 1e-2,
        init: InitSpec::Random { eps: 0.1 },
        seed: 7,
        ..SimConfig::default()
    };
    match pdesim::convergence_order(&p, &conv_cfg, 1.0) {
        Ok(r) => c.check("time-step convergence order >= 1.8", r.order >= 1.8, format!("order {:.3}", r.order)),
        Err(e) => c.check("convergence", false, e.to_string()),
    }
    let elapsed = start.elapsed().as_secs_f64();
    c.check("runtime <= 10 min", elapsed <= 600.0, format!("{elapsed:.1} s"));
    c.finish(7, "PDE nonlinear scaling", start)
}

pub fn criterion_8() -> CriterionReport {
    let start = Instant::now();
    let mut c = Collector::new();
    let p = canonical();
    let coeffs = |route| normalform::coeffs(&p, route);
    let (Ok(proj), Ok(closed)) = (coeffs(Route::Projection), coeffs(Route::ClosedForm)) else {
        c.check("coefficients", false, "route failed");
        return c.finish(8, "reduced dynamics", start);
    };

    // (system, branch, initial perturbation factors for (r1, r2), label)
    let mu = 0.05;
    let cases = [
        (ReducedSystem::from_coeffs(&proj, mu), BranchKind::RotatingWave1, (1.2, 0.02), "stable rotating wave"),
        (ReducedSystem::from_coeffs(&proj, mu), BranchKind::StandingWave, (0.8, 0.8), "standing wave, on r1 = r2"),
        (ReducedSystem::from_coeffs(&closed, mu), BranchKind::RotatingWave1, (1.2, 0.0), "closed-form rotating wave, on r2 = 0"),
    ];
    for (sys, kind, (f1, f2), label) in cases {
        let Some(b) = reduced::branches(&sys).into_iter().find(|b| b.kind == kind) else {
            c.check(label, false, "branch missing");
            continue;
        };
        let (z1, z2) = if kind == BranchKind::StandingWave {
            (Complex64::new(f1 * b.r1, 0.0), Complex64::new(f2 * b.r2, 0.3))
        } else {
            (Complex64::new(f1 * b.r1, 0.0), Complex64::new(f2, 0.0))
        };
        // keep the standing-wave start exactly on the diagonal
        let z2 = if kind == BranchKind::StandingWave { z2 * (z1.norm() / z2.norm()) } else { z2 };
        // Long enough to contract by e^-25 along the branch, short enough that
        // roundoff off an invariant subspace cannot grow past the tolerance.
        let slowest = b.jacobian_eigenvalues.iter().copied().filter(|l| *l < 0.0).fold(f64::NEG_INFINITY, f64::max);
        let t_end = 30.0 / slowest.abs();
        match reduced::integrate_truncated(&sys, z1, z2, t_end, 1.0) {
            Ok(rows) => {
                let last = rows.last().expect("non-empty trajectory");
                let err = (last.r1 - b.r1).abs().max((last.r2 - b.r2).abs());
                c.check(format!("{label} converges to predicted radii"), err <= 1e-6, format!("radius error {err:.2e} at t = {t_end:.0}"));
            }
            Err(e) => c.check(label, false, e.to_string()),
        }
    }

    let sys = ReducedSystem::from_coeffs(&proj, mu);
    if let Some(sw) = reduced::branches(&sys).into_iter().find(|b| b.kind == BranchKind::StandingWave) {
        let n = 128;
        let t = 0.9;
        let frames = (
            reduced::reconstruct_wave(&p, &sw, 0.4, -1.3, t, n),
            reduced::reconstruct_wave(&p, &sw, 0.4, -1.3, t + PI / sw.omega_star(), n),
        );
        match frames {
            (Ok(now), Ok(later)) => {
                let shifted = pdesim::translate(&now.field, p.half_length());
                let d = shifted.max_abs_diff(&later.field);
                c.check("R(pi) U(t) = U(t + pi/omega*) on the grid", d <= 1e-10, format!("max diff {d:.2e}"));
            }
            _ => c.check("standing-wave reconstruction", false, "failed"),
        }
    } else {
        c.check("standing-wave branch", false, "missing");
    }

    let reg = reduced::classify_regime(&ReducedSystem::from_coeffs(&closed, 0.0));
    let re_b = reg.relations[1].value;
    let re_bc = reg.relations[2].value;
    c.check(
        "canonical closed form: Re b < 0 and Re b + Re c > 0",
        re_b < 0.0 && re_bc > 0.0 && !reg.degenerate,
        format!("Re b = {re_b}, Re b + Re c = {re_bc}, sector {}", reg.sector),
    );
    let stable_tw = reduced::branches(&sys)
        .iter()
        .any(|b| b.kind == BranchKind::RotatingWave1 && b.stability == Stability::Stable);
    c.check("projection coefficients: rotating wave stable for mu > 0", stable_tw, "");
    c.finish(8, "reduced dynamics", start)
}

pub fn run_criterion(id: u8) -> Option<CriterionReport> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        _ => return None,
    })
}

/// Criteria run by `verify --quick`: everything except the long PDE experiments.
pub const QUICK: [u8; 6] = [1, 2, 3, 4, 5, 8];
pub const ALL: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

pub fn run(quick: bool) -> Vec<CriterionReport> {
    let ids: &[u8] = if quick { &QUICK } else { &ALL };
    ids.iter().filter_map(|&i| run_criterion(i)).collect()
}
