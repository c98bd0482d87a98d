//! The cubic truncation of the O(2)-Hopf normal form.
//!
//! In polar coordinates `z_j = r_j e^{i theta_j}`:
//!
//! ```text
//! r1'     = r1 (Re a mu + Re b r1^2 + Re c r2^2)
//! r2'     = r2 (Re a mu + Re b r2^2 + Re c r1^2)
//! theta1' = omega + Im a mu + Im b r1^2 + Im c r2^2
//! theta2' = omega + Im a mu + Im b r2^2 + Im c r1^2
//! ```
//!
//! The radial part does not involve the phases, so equilibria of the radial
//! system are invariant tori (rotating and standing waves) of the full one.

use num_complex::Complex64;
use ode_solvers::dop_shared::IntegrationError;
use ode_solvers::{Dopri5, SVector, System};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::ModelParams;
use crate::normalform::NormalFormCoeffs;
use crate::pdesim::{self, FieldState};
use crate::spectral;

/// Eigenvalues with `|Re| <= ZERO_TOL` count as zero.
pub const ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedSystem {
    pub mu: f64,
    pub omega: f64,
    #[serde(with = "crate::serde_complex")]
    pub a: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub b: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub c: Complex64,
}

impl ReducedSystem {
    pub fn new(mu: f64, omega: f64, a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self { mu, omega, a, b, c }
    }

    pub fn from_coeffs(nf: &NormalFormCoeffs, mu: f64) -> Self {
        Self::new(mu, nf.omega, nf.a, nf.b, nf.c)
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..*self }
    }

    fn degeneracy_tol(&self) -> f64 {
        1e-10 * (1.0 + self.b.norm() + self.c.norm())
    }

    /// `(r1', r2')` and the radial Jacobian at `(r1, r2)`.
    fn radial(&self, r1: f64, r2: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let (am, br, cr) = (self.a.re * self.mu, self.b.re, self.c.re);
        let (s1, s2) = (r1 * r1, r2 * r2);
        let f = [r1 * (am + br * s1 + cr * s2), r2 * (am + br * s2 + cr * s1)];
        let off = 2.0 * cr * r1 * r2;
        let j = [[am + 3.0 * br * s1 + cr * s2, off], [off, am + 3.0 * br * s2 + cr * s1]];
        (f, j)
    }

    fn phase_rates(&self, r1: f64, r2: f64) -> [f64; 2] {
        let base = self.omega + self.a.im * self.mu;
        let (s1, s2) = (r1 * r1, r2 * r2);
        [base + self.b.im * s1 + self.c.im * s2, base + self.b.im * s2 + self.c.im * s1]
    }
}

/// `(r1', r2', theta1', theta2')`. The phases do not enter.
pub fn polar_vector_field(sys: &ReducedSystem, r1: f64, r2: f64, _theta1: f64, _theta2: f64) -> [f64; 4] {
    let ([d1, d2], _) = sys.radial(r1, r2);
    let [w1, w2] = sys.phase_rates(r1, r2);
    [d1, d2, w1, w2]
}

/// Right-hand side in complex form.
pub fn complex_vector_field(sys: &ReducedSystem, z1: Complex64, z2: Complex64) -> [Complex64; 2] {
    let lin = Complex64::new(0.0, sys.omega) + sys.a * sys.mu;
    let (n1, n2) = (z1.norm_sqr(), z2.norm_sqr());
    [
        z1 * (lin + sys.b * n1 + sys.c * n2),
        z2 * (lin + sys.b * n2 + sys.c * n1),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Trivial,
    RotatingWave1,
    RotatingWave2,
    StandingWave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub kind: BranchKind,
    pub r1: f64,
    pub r2: f64,
    pub stability: Stability,
    /// `(theta1', theta2')` on the branch.
    pub frequencies: [f64; 2],
    /// Eigenvalues of the radial Jacobian, ascending.
    pub jacobian_eigenvalues: [f64; 2],
}

impl BranchPoint {
    /// Oscillation frequency of the wave, `theta1'` (or `theta2'` when only `z2` is excited).
    pub fn omega_star(&self) -> f64 {
        if self.kind == BranchKind::RotatingWave2 {
            self.frequencies[1]
        } else {
            self.frequencies[0]
        }
    }
}

fn classify_eigs(eigs: [f64; 2]) -> Stability {
    if eigs.iter().any(|&e| e > ZERO_TOL) {
        Stability::Unstable
    } else if eigs.iter().all(|&e| e < -ZERO_TOL) {
        Stability::Stable
    } else {
        Stability::Degenerate
    }
}

fn branch_point(sys: &ReducedSystem, kind: BranchKind, r1: f64, r2: f64) -> BranchPoint {
    let (_, j) = sys.radial(r1, r2);
    let ev = linalg::eigenvalues(&linalg::real_mat(j));
    let mut eigs = [ev[0].re, ev[1].re];
    eigs.sort_by(f64::total_cmp);
    BranchPoint {
        kind,
        r1,
        r2,
        stability: classify_eigs(eigs),
        frequencies: sys.phase_rates(r1, r2),
        jacobian_eigenvalues: eigs,
    }
}

/// Degenerate placeholder for a family whose radius formula divides by zero.
fn degenerate_family(sys: &ReducedSystem, kind: BranchKind) -> BranchPoint {
    BranchPoint {
        kind,
        r1: 0.0,
        r2: 0.0,
        stability: Stability::Degenerate,
        frequencies: sys.phase_rates(0.0, 0.0),
        jacobian_eigenvalues: [0.0, 0.0],
    }
}

/// All equilibria of the radial system. A family whose denominator (`Re b`, or
/// `Re b + Re c`) vanishes within tolerance is reported once with
/// [`Stability::Degenerate`] and zero radii.
pub fn branches(sys: &ReducedSystem) -> Vec<BranchPoint> {
    let tol = sys.degeneracy_tol();
    let mut out = vec![branch_point(sys, BranchKind::Trivial, 0.0, 0.0)];
    let am = sys.a.re * sys.mu;

    let br = sys.b.re;
    if br.abs() <= tol {
        out.push(degenerate_family(sys, BranchKind::RotatingWave1));
        out.push(degenerate_family(sys, BranchKind::RotatingWave2));
    } else {
        let r2 = -am / br;
        if r2 > 0.0 {
            let r = r2.sqrt();
            out.push(branch_point(sys, BranchKind::RotatingWave1, r, 0.0));
            out.push(branch_point(sys, BranchKind::RotatingWave2, 0.0, r));
        }
    }

    let s = sys.b.re + sys.c.re;
    if s.abs() <= tol {
        out.push(degenerate_family(sys, BranchKind::StandingWave));
    } else {
        let r2 = -am / s;
        if r2 > 0.0 {
            let r = r2.sqrt();
            out.push(branch_point(sys, BranchKind::StandingWave, r, r));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub value: f64,
    pub degenerate: bool,
}

/// Stability of the wave families at one probe value of `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub mu: f64,
    pub rotating_wave: Option<Stability>,
    pub standing_wave: Option<Stability>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRecord {
    /// `A = c`.
    #[serde(rename = "A", with = "crate::serde_complex")]
    pub big_a: Complex64,
    /// `B = b - c`.
    #[serde(rename = "B", with = "crate::serde_complex")]
    pub big_b: Complex64,
    /// `lambda = a mu`.
    #[serde(with = "crate::serde_complex")]
    pub lambda: Complex64,
    /// `Re B`, `Re A + Re B`, `2 Re A + Re B`.
    pub relations: Vec<Relation>,
    pub degenerate: bool,
    /// Sign pattern of the three relations, which fixes the sector of the `(A_R, B_R)` plane.
    pub sector: String,
    pub probes: Vec<Probe>,
    pub rotating_wave_stable: bool,
    pub standing_wave_stable: bool,
    pub summary: String,
}

fn sign_str(v: f64, degenerate: bool) -> &'static str {
    if degenerate {
        "=0"
    } else if v > 0.0 {
        ">0"
    } else {
        "<0"
    }
}

/// Regime of `(A, B) = (c, b - c)`. Stability is read off the radial Jacobian
/// at `mu = +-|sys.mu|` (or `+-0.01` when `sys.mu = 0`).
pub fn classify_regime(sys: &ReducedSystem) -> RegimeRecord {
    let tol = sys.degeneracy_tol();
    let big_a = sys.c;
    let big_b = sys.b - sys.c;
    let rel = |name: &str, value: f64| Relation {
        name: name.to_string(),
        value,
        degenerate: value.abs() <= tol,
    };
    let relations = vec![
        rel("Re B", big_b.re),
        rel("Re A + Re B", big_a.re + big_b.re),
        rel("2 Re A + Re B", 2.0 * big_a.re + big_b.re),
    ];
    let degenerate = relations.iter().any(|r| r.degenerate);
    let sector = format!(
        "B_R{}, A_R+B_R{}, 2A_R+B_R{}",
        sign_str(relations[0].value, relations[0].degenerate),
        sign_str(relations[1].value, relations[1].degenerate),
        sign_str(relations[2].value, relations[2].degenerate),
    );

    let m = if sys.mu != 0.0 { sys.mu.abs() } else { 1e-2 };
    let probes: Vec<Probe> = [m, -m]
        .into_iter()
        .map(|mu| {
            let bs = branches(&sys.with_mu(mu));
            let find = |k: BranchKind| bs.iter().find(|b| b.kind == k && (b.r1 > 0.0 || b.r2 > 0.0)).map(|b| b.stability);
            Probe {
                mu,
                rotating_wave: find(BranchKind::RotatingWave1),
                standing_wave: find(BranchKind::StandingWave),
            }
        })
        .collect();
    let tw = probes.iter().any(|p| p.rotating_wave == Some(Stability::Stable));
    let sw = probes.iter().any(|p| p.standing_wave == Some(Stability::Stable));
    let summary = if degenerate {
        "degenerate: a non-degeneracy relation vanishes".to_string()
    } else {
        match (tw, sw) {
            (true, true) => "rotating and standing waves both stable".to_string(),
            (true, false) => "rotating waves stable, standing waves unstable".to_string(),
            (false, true) => "standing waves stable, rotating waves unstable".to_string(),
            (false, false) => "no stable bifurcating wave".to_string(),
        }
    };
    RegimeRecord {
        big_a,
        big_b,
        lambda: sys.a * sys.mu,
        relations,
        degenerate,
        sector,
        probes,
        rotating_wave_stable: tw,
        standing_wave_stable: sw,
        summary,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub r1: f64,
    pub r2: f64,
    pub th1: f64,
    pub th2: f64,
}

type State = SVector<f64, 6>;

/// Cartesian `(Re z1, Im z1, Re z2, Im z2)` plus the two unwrapped phases.
struct Truncated(ReducedSystem);

impl System<f64, State> for Truncated {
    fn system(&self, _t: f64, y: &State, dy: &mut State) {
        let z1 = Complex64::new(y[0], y[1]);
        let z2 = Complex64::new(y[2], y[3]);
        let [d1, d2] = complex_vector_field(&self.0, z1, z2);
        let [w1, w2] = self.0.phase_rates(z1.norm(), z2.norm());
        dy[0] = d1.re;
        dy[1] = d1.im;
        dy[2] = d2.re;
        dy[3] = d2.im;
        dy[4] = w1;
        dy[5] = w2;
    }
}

pub const INTEGRATION_RTOL: f64 = 1e-10;
pub const INTEGRATION_ATOL: f64 = 1e-12;

/// Adaptive Dormand-Prince integration, sampled on a uniform grid of spacing
/// close to `dt` (`t_end` is always the last sample).
pub fn integrate_truncated(
    sys: &ReducedSystem,
    z1: Complex64,
    z2: Complex64,
    t_end: f64,
    dt: f64,
) -> Result<Vec<TrajectoryRow>> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t_end}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if ![z1.re, z1.im, z2.re, z2.im].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("initial point is not finite".into()));
    }
    let n_samples = (t_end / dt).round().max(1.0) as usize;
    let mut y = State::from([z1.re, z1.im, z2.re, z2.im, z1.arg(), z2.arg()]);
    let mut rows = Vec::with_capacity(n_samples + 1);
    let row = |t: f64, y: &State| TrajectoryRow {
        t,
        r1: y[0].hypot(y[1]),
        r2: y[2].hypot(y[3]),
        th1: y[4],
        th2: y[5],
    };
    rows.push(row(0.0, &y));
    // One solver run per sample interval, so every sample is a step endpoint
    // rather than an interpolant.
    for i in 0..n_samples {
        let t0 = t_end * i as f64 / n_samples as f64;
        let t1 = t_end * (i + 1) as f64 / n_samples as f64;
        let mut solver = Dopri5::from_param(
            Truncated(*sys),
            t0,
            t1,
            t1 - t0,
            y,
            INTEGRATION_RTOL,
            INTEGRATION_ATOL,
            0.9,
            0.04,
            0.2,
            10.0,
            t1 - t0,
            0.0,
            u32::MAX,
            1000,
            ode_solvers::OutputType::Sparse,
        );
        solver.integrate().map_err(|e| match e {
            IntegrationError::StepSizeUnderflow { x } => Error::StepSizeUnderflow { t: x, h: 0.0 },
            IntegrationError::MaxNumStepReached { x, n_step } => Error::IntegrationFailed {
                t: x,
                reason: format!("more than {n_step} steps needed"),
            },
            IntegrationError::StiffnessDetected { x } => Error::IntegrationFailed {
                t: x,
                reason: "problem became stiff".into(),
            },
        })?;
        y = *solver.y_out().last().expect("solver records the final state");
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::StepSizeUnderflow { t: t1, h: 0.0 });
        }
        rows.push(row(t1, &y));
    }
    Ok(rows)
}

/// A point on the torus of waves, mapped back to field space through the
/// critical eigenvectors:
/// `r1 e^{i(omega* t + phi1)} xi1 + r2 e^{i(omega* t + phi2)} xi2 + c.c.`
/// The field is the perturbation from the uniform state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusWave {
    pub half_length: f64,
    pub kappa: f64,
    #[serde(with = "crate::serde_complex::pair")]
    pub amplitude: [Complex64; 2],
    pub r1: f64,
    pub r2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub omega_star: f64,
}

impl TorusWave {
    pub fn new(params: &ModelParams, branch: &BranchPoint, phi1: f64, phi2: f64) -> Result<Self> {
        if branch.kind == BranchKind::Trivial || (branch.r1 == 0.0 && branch.r2 == 0.0) {
            return Err(Error::InvalidArgument("wave reconstruction needs a nontrivial branch".into()));
        }
        Ok(Self {
            half_length: params.half_length(),
            kappa: params.kappa(),
            amplitude: spectral::xi1(params)?.amp,
            r1: branch.r1,
            r2: branch.r2,
            phi1,
            phi2,
            omega_star: branch.omega_star(),
        })
    }

    /// Complex sum of the four terms; its imaginary part is rounding residue.
    pub fn eval_complex(&self, x: f64, t: f64) -> [Complex64; 2] {
        let e = |phase: f64| Complex64::from_polar(1.0, phase);
        let wt = self.omega_star * t;
        let kx = self.kappa * x;
        let s = e(wt + self.phi1 + kx) * self.r1 + e(wt + self.phi2 - kx) * self.r2;
        let [p, q] = self.amplitude;
        let (u, v) = (s * p, s * q);
        [u + u.conj(), v + v.conj()]
    }

    pub fn eval(&self, x: f64, t: f64) -> [f64; 2] {
        let [u, v] = self.eval_complex(x, t);
        [u.re, v.re]
    }

    /// Same wave with phases `(phi1, phi2)` and frequency untouched.
    pub fn with_phases(&self, phi1: f64, phi2: f64) -> Self {
        Self { phi1, phi2, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFrame {
    pub field: FieldState,
    pub imag_residue: f64,
    pub omega_star: f64,
}

pub fn reconstruct_wave(
    params: &ModelParams,
    branch: &BranchPoint,
    phi1: f64,
    phi2: f64,
    t: f64,
    n_grid: usize,
) -> Result<WaveFrame> {
    if n_grid == 0 {
        return Err(Error::InvalidArgument("grid size must be positive".into()));
    }
    let wave = TorusWave::new(params, branch, phi1, phi2)?;
    let xs = pdesim::grid(params.half_length(), n_grid);
    let mut u1 = Vec::with_capacity(n_grid);
    let mut u2 = Vec::with_capacity(n_grid);
    let mut imag_residue: f64 = 0.0;
    for &x in &xs {
        let [u, v] = wave.eval_complex(x, t);
        imag_residue = imag_residue.max(u.im.abs()).max(v.im.abs());
        u1.push(u.re);
        u2.push(v.re);
    }
    Ok(WaveFrame {
        field: FieldState {
            half_length: params.half_length(),
            u1,
            u2,
            time: t,
        },
        imag_residue,
        omega_star: wave.omega_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Canonical closed-form coefficients (only the real parts matter for branches).
    fn closed_form(mu: f64) -> ReducedSystem {
        ReducedSystem::new(mu, 3f64.sqrt(), c(0.5, -0.3), c(-17.0 / 8.0, 0.2), c(11.0 / 4.0, 0.1))
    }

    #[test]
    fn origin_rates() {
        let s = closed_form(0.2);
        let f = polar_vector_field(&s, 0.0, 0.0, 1.0, 2.0);
        assert_eq!(&f[..2], &[0.0, 0.0]);
        let w = 3f64.sqrt() - 0.3 * 0.2;
        assert!((f[2] - w).abs() < 1e-15 && (f[3] - w).abs() < 1e-15);
    }

    #[test]
    fn rotating_wave_is_equilibrium() {
        let s = closed_form(0.17);
        let r = (4.0 * 0.17 / 17.0f64).sqrt();
        assert!(polar_vector_field(&s, r, 0.0, 0.0, 0.0)[0].abs() < 1e-16);
    }

    #[test]
    fn canonical_closed_form_branches() {
        let bs = branches(&closed_form(0.1));
        let kinds: Vec<_> = bs.iter().map(|b| b.kind).collect();
        assert_eq!(kinds, vec![BranchKind::Trivial, BranchKind::RotatingWave1, BranchKind::RotatingWave2]);
        assert!((bs[1].r1 - (0.4f64 / 17.0).sqrt()).abs() < 1e-15);
        assert_eq!(bs[1].stability, Stability::Unstable);

        let bs = branches(&closed_form(-0.1));
        assert!(bs.iter().any(|b| b.kind == BranchKind::StandingWave));
        assert!(bs.iter().all(|b| b.stability == Stability::Unstable || b.kind == BranchKind::Trivial));
    }

    #[test]
    fn zero_mu_only_trivial() {
        let bs = branches(&closed_form(0.0));
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].stability, Stability::Degenerate);
    }

    #[test]
    fn all_families_present() {
        let s = ReducedSystem::new(0.05, 1.0, c(0.5, 0.0), c(-1.0, 0.3), c(-0.5, 0.2));
        let bs = branches(&s);
        assert_eq!(bs.len(), 4);
        let sw = bs.iter().find(|b| b.kind == BranchKind::StandingWave).unwrap();
        assert!((sw.r1 - (0.025f64 / 1.5).sqrt()).abs() < 1e-15);
        assert_eq!(sw.r1, sw.r2);
    }

    #[test]
    fn classify_canonical_closed_form() {
        let r = classify_regime(&closed_form(0.0));
        assert!((r.relations[1].value + 17.0 / 8.0).abs() < 1e-14);
        assert!((r.relations[2].value - 5.0 / 8.0).abs() < 1e-14);
        assert!(!r.degenerate);
        assert!(!r.rotating_wave_stable && !r.standing_wave_stable);
    }

    #[test]
    fn b_equals_c_is_degenerate() {
        let s = ReducedSystem::new(0.1, 1.0, c(0.5, 0.0), c(-1.0, 0.5), c(-1.0, 0.5));
        let r = classify_regime(&s);
        assert!(r.relations[0].degenerate && r.degenerate);
    }

    #[test]
    fn origin_stays_put() {
        let rows = integrate_truncated(&closed_form(0.1), c(0.0, 0.0), c(0.0, 0.0), 5.0, 0.5).unwrap();
        assert!(rows.iter().all(|r| r.r1 == 0.0 && r.r2 == 0.0));
    }

    #[test]
    fn bad_integration_arguments() {
        let s = closed_form(0.1);
        assert!(integrate_truncated(&s, c(0.1, 0.0), c(0.0, 0.0), 0.0, 0.1).is_err());
        assert!(integrate_truncated(&s, c(0.1, 0.0), c(0.0, 0.0), 1.0, -0.1).is_err());
    }
}
