//! Cubic normal-form coefficients of the O(2)-Hopf reduction.
//!
//! The reduced dynamics on the center manifold, truncated at cubic order, read
//!
//! ```text
//! z1' = i omega z1 + z1 (a mu + b |z1|^2 + c |z2|^2)
//! z2' = i omega z2 + z2 (a mu + b |z2|^2 + c |z1|^2)
//! ```
//!
//! Three evaluation routes are provided:
//!
//! * [`Route::Projection`] solves the center-manifold equations for the quadratic
//!   coefficients `Psi_pqrsl` (each a 2x2 linear system on one Fourier mode) and
//!   projects the cubic remainders onto the dual eigenfunction. This is the
//!   reference route.
//! * [`Route::Direct`] evaluates the unsimplified complex expressions for `b`
//!   and `c`, with `1/P_2(2 i omega)` and `1/P_0(2 i omega)` taken by actual complex
//!   division.
//! * [`Route::ClosedForm`] reproduces the simplified real-arithmetic closed forms
//!   (`N_r`, `B_r`, `C_2r`, `Q_r`, ...). These use
//!   `1/P_2(2 i omega) = -3 (alpha^2 - 4 d1 d2 + 2 (d1 + d2) omega i) / D`, which is nine
//!   times the true reciprocal, and reuse the same expression in place of
//!   `1/P_0(2 i omega)` for `c`. The route is kept so the closed-form numbers can be
//!   reproduced; its discrepancy against the other two is reported, not hidden.
//!
//! `a` additionally has [`Route::Asymptotic`]: the `beta`-derivative of the
//! critical eigenvalue, by implicit differentiation of `P_1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Vec2};
use crate::meanzero::{self, MeanZeroReport};
use crate::model::{ModelParams, OnsetData, RawParams};
use crate::modes::ModeSum;
use crate::multilinear::Nonlinearity;
use crate::spectral::{self, apply_linear};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Route-to-route agreement threshold: `|x - y| <= tol (1 + |x|)`.
pub const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    #[serde(rename = "paper_closed_form")]
    ClosedForm,
    Direct,
    Projection,
    Asymptotic,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::ClosedForm => "paper_closed_form",
            Route::Direct => "direct",
            Route::Projection => "projection",
            Route::Asymptotic => "asymptotic",
        }
    }

    pub fn parse(s: &str) -> Option<Route> {
        match s {
            "paper_closed_form" | "closed_form" | "closed-form" => Some(Route::ClosedForm),
            "direct" => Some(Route::Direct),
            "projection" => Some(Route::Projection),
            "asymptotic" => Some(Route::Asymptotic),
            _ => None,
        }
    }
}

/// Critical eigenvectors, dual, and eigenvalue used by the projection route.
///
/// The conjugated basis (eigenvalue `-i omega`) exists to check that every
/// coefficient comes out conjugated.
#[derive(Debug, Clone)]
pub struct CenterBasis {
    pub xi1: ModeSum,
    pub xi2: ModeSum,
    pub xi1_star: ModeSum,
    /// `i omega`, or `-i omega` for the conjugated basis.
    pub eigenvalue: Complex64,
}

impl CenterBasis {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let onset = params.require_admissible()?;
        let l = params.half_length();
        Ok(Self {
            xi1: ModeSum::single(l, spectral::xi1(params)?),
            xi2: ModeSum::single(l, spectral::xi2(params)?),
            xi1_star: ModeSum::single(l, spectral::xi1_star(params)?),
            eigenvalue: Complex64::new(0.0, onset.omega),
        })
    }

    pub fn conjugated(&self) -> Self {
        Self {
            xi1: self.xi1.conj(),
            xi2: self.xi2.conj(),
            xi1_star: self.xi1_star.conj(),
            eigenvalue: self.eigenvalue.conj(),
        }
    }
}

/// Quadratic center-manifold coefficients, indexed by the exponents of
/// `z1^p conj(z1)^q z2^r conj(z2)^s mu^l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiTable {
    pub psi_00001: ModeSum,
    pub psi_11000: ModeSum,
    pub psi_00110: ModeSum,
    pub psi_20000: ModeSum,
    pub psi_10100: ModeSum,
    pub psi_10010: ModeSum,
    pub residuals: PsiResiduals,
}

/// Relative residuals `|(z - L) Psi - rhs| / (1 + |rhs|)` of each defining equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiResiduals {
    pub psi_00001: f64,
    pub psi_11000: f64,
    pub psi_00110: f64,
    pub psi_20000: f64,
    pub psi_10100: f64,
    pub psi_10010: f64,
}

impl PsiResiduals {
    pub fn max(&self) -> f64 {
        [
            self.psi_00001,
            self.psi_11000,
            self.psi_00110,
            self.psi_20000,
            self.psi_10100,
            self.psi_10010,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Solve `(shift - L_{beta_1}) psi = rhs` mode by mode.
fn solve_shifted(
    params: &ModelParams,
    shift: Complex64,
    rhs: &ModeSum,
    equation: &'static str,
) -> Result<(ModeSum, f64)> {
    let beta1 = params.beta1();
    let mut psi = ModeSum::zero(rhs.half_length);
    for (n, amp) in rhs.terms() {
        let m = linalg::shift(shift, &spectral::mode_matrix_c(params, n, beta1));
        psi.add_term(n, linalg::solve2(&m, &amp, equation)?);
    }
    // residual through an independent application of L
    let applied = psi.scale(shift).add(&apply_linear(params, beta1, &psi).scale(re(-1.0)))?;
    let diff = applied.add(&rhs.scale(re(-1.0)))?;
    let residual = diff.l2_norm() / (1.0 + rhs.l2_norm());
    Ok((psi, residual))
}

/// `(L + R01) psi = 0` on the constant mode; the matrix has determinant `alpha^2`.
fn solve_psi_00001(params: &ModelParams) -> Result<(ModeSum, f64)> {
    let mut m = spectral::mode_matrix_c(params, 0, params.beta1());
    m[0][0] += 1.0;
    m[1][0] -= 1.0;
    let zero = [re(0.0); 2];
    let v = linalg::solve2(&m, &zero, "(L + R01) psi_00001 = 0")?;
    let res = linalg::norm(&linalg::matvec(&m, &v));
    Ok((ModeSum::from_terms(params.half_length(), [(0, v)]), res))
}

pub fn solve_psi(params: &ModelParams) -> Result<PsiTable> {
    solve_psi_with(params, &CenterBasis::new(params)?)
}

pub fn solve_psi_with(params: &ModelParams, basis: &CenterBasis) -> Result<PsiTable> {
    let nl = Nonlinearity::new(params);
    let two = re(2.0);
    let zero = re(0.0);
    let (x1, x2) = (&basis.xi1, &basis.xi2);
    let (x1c, x2c) = (x1.conj(), x2.conj());
    let two_eig = basis.eigenvalue * 2.0;

    let (psi_00001, r00001) = solve_psi_00001(params)?;
    let (psi_11000, r11000) =
        solve_shifted(params, zero, &nl.r20(x1, &x1c)?.scale(two), "L psi_11000 = -2 R20(xi1, conj xi1)")?;
    let (psi_00110, r00110) =
        solve_shifted(params, zero, &nl.r20(x2, &x2c)?.scale(two), "L psi_00110 = -2 R20(xi2, conj xi2)")?;
    let (psi_20000, r20000) =
        solve_shifted(params, two_eig, &nl.r20(x1, x1)?, "(2 i omega - L) psi_20000 = R20(xi1, xi1)")?;
    let (psi_10100, r10100) = solve_shifted(
        params,
        two_eig,
        &nl.r20(x1, x2)?.scale(two),
        "(2 i omega - L) psi_10100 = 2 R20(xi1, xi2)",
    )?;
    let (psi_10010, r10010) =
        solve_shifted(params, zero, &nl.r20(x1, &x2c)?.scale(two), "L psi_10010 = -2 R20(xi1, conj xi2)")?;

    Ok(PsiTable {
        psi_00001,
        psi_11000,
        psi_00110,
        psi_20000,
        psi_10100,
        psi_10010,
        residuals: PsiResiduals {
            psi_00001: r00001,
            psi_11000: r11000,
            psi_00110: r00110,
            psi_20000: r20000,
            psi_10100: r10100,
            psi_10010: r10010,
        },
    })
}

/// The three cubic-order remainders whose `xi_1^*` projections give `a`, `b`, `c`.
pub struct ProjectionTerms {
    pub a_term: ModeSum,
    pub b_term: ModeSum,
    pub c_term: ModeSum,
}

pub fn projection_terms(params: &ModelParams, basis: &CenterBasis, psi: &PsiTable) -> Result<ProjectionTerms> {
    let nl = Nonlinearity::new(params);
    let two = re(2.0);
    let (x1, x2) = (&basis.xi1, &basis.xi2);
    let (x1c, x2c) = (x1.conj(), x2.conj());

    let a_term = nl.r01(x1).add(&nl.r20(x1, &psi.psi_00001)?.scale(two))?;
    let b_term = nl
        .r20(x1, &psi.psi_11000)?
        .scale(two)
        .add(&nl.r20(&x1c, &psi.psi_20000)?.scale(two))?
        .add(&nl.r30(x1, x1, &x1c)?.scale(re(3.0)))?;
    let c_term = nl
        .r20(x1, &psi.psi_00110)?
        .scale(two)
        .add(&nl.r20(x2, &psi.psi_10010)?.scale(two))?
        .add(&nl.r20(&x2c, &psi.psi_10100)?.scale(two))?
        .add(&nl.r30(x1, x2, &x2c)?.scale(re(6.0)))?;
    Ok(ProjectionTerms { a_term, b_term, c_term })
}

/// Projection-route coefficients `(a, b, c)` for a given basis.
pub fn projection_coeffs(params: &ModelParams, basis: &CenterBasis) -> Result<[Complex64; 3]> {
    let psi = solve_psi_with(params, basis)?;
    let t = projection_terms(params, basis, &psi)?;
    Ok([
        t.a_term.inner(&basis.xi1_star)?,
        t.b_term.inner(&basis.xi1_star)?,
        t.c_term.inner(&basis.xi1_star)?,
    ])
}

/// Per-term certificate that `f - coef xi_1` lies in the range of `i omega - L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeCertificate {
    /// `|<f - coef xi_1, xi_1^*>|`.
    pub dual_projection: f64,
    /// Normalised cross product of the mode-1 remainder with a column of `i omega - M_1`.
    pub range_residual: f64,
}

pub fn range_certificates(params: &ModelParams) -> Result<[RangeCertificate; 3]> {
    let basis = CenterBasis::new(params)?;
    let psi = solve_psi_with(params, &basis)?;
    let t = projection_terms(params, &basis, &psi)?;
    let shifted = linalg::shift(
        basis.eigenvalue,
        &spectral::mode_matrix_c(params, 1, params.beta1()),
    );
    let col = [shifted[0][0], shifted[1][0]];
    let mut out = Vec::with_capacity(3);
    for f in [&t.a_term, &t.b_term, &t.c_term] {
        let coef = f.inner(&basis.xi1_star)?;
        let g = f.add(&basis.xi1.scale(-coef))?;
        let dual_projection = g.inner(&basis.xi1_star)?.norm();
        let g1: Vec2 = g.amp(1);
        let cross = col[0] * g1[1] - col[1] * g1[0];
        let scale = linalg::norm(&col) * linalg::norm(&g1) + f64::MIN_POSITIVE;
        out.push(RangeCertificate {
            dual_projection,
            range_residual: cross.norm() / scale.max(1.0),
        });
    }
    Ok([out[0], out[1], out[2]])
}

/// Intermediate constants of the closed forms, plus the true values
/// of the polynomial evaluations they stand for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormConstants {
    pub n_r: f64,
    pub n_i: f64,
    /// `(alpha^2 - 4 d1 d2)^2 + 4 (d1 + d2)^2 omega^2`.
    pub denominator: f64,
    pub b_r: f64,
    pub b_i: f64,
    #[serde(with = "crate::serde_complex")]
    pub c1: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub c2: Complex64,
    pub c2r: f64,
    pub c2i: f64,
    pub q_r: f64,
    pub q_i: f64,
    pub p2_zero: f64,
    #[serde(with = "crate::serde_complex")]
    pub p2_two_i_omega: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub p0_two_i_omega: Complex64,
    /// `1 / P_2(2 i omega)` by complex division.
    #[serde(with = "crate::serde_complex")]
    pub inv_p2_two_i_omega: Complex64,
    /// The closed-form expression for `1 / P_2(2 i omega)`.
    #[serde(with = "crate::serde_complex")]
    pub inv_p2_two_i_omega_closed_form: Complex64,
}

struct Effective {
    a2: f64,
    d1: f64,
    d2: f64,
    beta1: f64,
    omega: f64,
}

fn effective(params: &ModelParams) -> Result<Effective> {
    let onset = params.require_admissible()?;
    let (d1, d2) = params.effective_diffusion();
    Ok(Effective {
        a2: params.alpha() * params.alpha(),
        d1,
        d2,
        beta1: onset.beta1,
        omega: onset.omega,
    })
}

pub fn closed_form_constants(params: &ModelParams) -> Result<ClosedFormConstants> {
    let Effective { a2, d1, d2, beta1: b1, omega: w } = effective(params)?;
    let alpha = params.alpha();
    let w2 = w * w;

    // N_r + i omega N_i
    let f = b1 - 2.0 * a2 - 2.0 * d2;
    let g = 2.0 * w2 + 4.0 * d2 + 4.0 * d1 * d2 - a2 - 4.0 * a2 * d1;
    let h = 2.0 + 2.0 * d1 - 4.0 * d2 - 2.0 * a2;
    let n_r = f * g - 2.0 * w2 * h;
    let n_i = f * h + 2.0 * g;

    let x = a2 - 4.0 * d1 * d2;
    let s = d1 + d2;
    let denominator = x * x + 4.0 * s * s * w2;
    let b_r = -6.0 / denominator * (x * n_r - 2.0 * w2 * s * n_i);
    let b_i = -6.0 / denominator * (x * n_i + 2.0 * s * n_r);

    let p2_zero = a2 * (4.0 * d1 - 4.0 * d2 + 1.0) + 12.0 * d1 * d2 - 4.0 * d2 * d2;

    let u = 1.0 + d1 - d2 - a2;
    let v = 1.0 + d1 - a2;
    let cx = u * (2.0 * w2 - a2) - 4.0 * v * w2;
    let cy = 2.0 * w2 - a2 + u * v;
    let c2r = x * cx - 4.0 * w2 * s * cy;
    let c2i = 2.0 * w * (s * cx + x * cy);

    let k = 2.0 * a2 + 2.0 * d2 - b1;
    let q_r = 2.0 * (a2 + d2) - 4.0 * b1
        + 4.0 / p2_zero * k * (4.0 * a2 * d1 + a2 - 4.0 * d2 - 4.0 * d1 * d2)
        - 12.0 * c2r / denominator;
    let q_i = 2.0 * w - 16.0 * d2 * w / p2_zero * k - 12.0 * c2i / denominator;

    let lam = Complex64::new(0.0, 2.0 * w);
    let beta1 = params.beta1();
    let p2w = spectral::char_poly_eval(params, 2, beta1, lam);
    let p0w = spectral::char_poly_eval(params, 0, beta1, lam);

    let c1 = 4.0 / p2_zero * (2.0 * (a2 + d2) - b1) / alpha
        * (re(alpha * (4.0 * d1 + 1.0)) - (I * w + 1.0 + d1) * (4.0 * d2 / alpha));
    let c2 = 4.0 / p0w * (Complex64::new(2.0 * (-a2 - d2), 2.0 * w) + b1) / alpha
        * (-(I * 2.0 * w + 1.0) * alpha + I * 2.0 * w / alpha * (Complex64::new(1.0 + d1, -w)));

    Ok(ClosedFormConstants {
        n_r,
        n_i,
        denominator,
        b_r,
        b_i,
        c1,
        c2,
        c2r,
        c2i,
        q_r,
        q_i,
        p2_zero,
        p2_two_i_omega: p2w,
        p0_two_i_omega: p0w,
        inv_p2_two_i_omega: 1.0 / p2w,
        inv_p2_two_i_omega_closed_form: Complex64::new(x, 2.0 * s * w) * (-3.0 / denominator),
    })
}

/// Common prefactor `<e^{ix}(1,-1), xi_1^*> = (omega - i delta2) / (2 omega)`.
fn dual_prefactor(e: &Effective) -> Complex64 {
    Complex64::new(e.omega, -e.d2) / (2.0 * e.omega)
}

fn a_closed(e: &Effective) -> Complex64 {
    Complex64::new(0.5, -e.d2 / (2.0 * e.omega))
}

fn a_asymptotic(params: &ModelParams) -> Result<Complex64> {
    params.require_admissible()?;
    let beta1 = params.beta1();
    let rec = spectral::mode_eigenvalues(params, 1, beta1);
    let lambda = if rec.roots[0].im > 0.0 { rec.roots[0] } else { rec.roots[1] };
    let k2 = params.wave_number(1).powi(2);
    // P(l, beta) = l^2 + (beta(1) - beta) l + gamma(1) - k^2 d2 beta
    let dp_dbeta = -lambda - k2 * params.delta2();
    let dp_dl = lambda * 2.0 + (spectral::beta_n(params, 1) - beta1);
    Ok(-dp_dbeta / dp_dl)
}

fn b_direct(params: &ModelParams, e: &Effective) -> Complex64 {
    let alpha = params.alpha();
    let Effective { a2, d1, d2, beta1: b1, omega: w } = *e;
    let p2w = spectral::char_poly_eval(params, 2, params.beta1(), Complex64::new(0.0, 2.0 * w));
    let first = Complex64::new(5.0 * (a2 + d2) - 4.0 * b1, w) / a2;
    let r = Complex64::new(-2.0 * (a2 + d2) + b1, 2.0 * w) / alpha;
    let bracket = -(Complex64::new(4.0 * d1 + 1.0, 2.0 * w)) * alpha
        - Complex64::new(4.0 * d2, 2.0 * w) / alpha * Complex64::new(-1.0 - d1, w);
    dual_prefactor(e) * (first + 2.0 / p2w * r * bracket)
}

fn c_direct(params: &ModelParams, e: &Effective) -> Result<Complex64> {
    let k = closed_form_constants(params)?;
    let Effective { a2, d2, beta1: b1, omega: w, .. } = *e;
    let first = Complex64::new(2.0 * (a2 + d2) - 4.0 * b1, 2.0 * w) / a2;
    Ok(dual_prefactor(e) * (first + k.c1 + k.c2))
}

fn b_closed(e: &Effective, k: &ClosedFormConstants) -> Complex64 {
    let Effective { a2, d2, beta1: b1, omega: w, .. } = *e;
    Complex64::new(w, -d2) / (2.0 * w * a2)
        * Complex64::new(5.0 * (a2 + d2) - 4.0 * b1 + k.b_r, w * (1.0 + k.b_i))
}

fn c_closed(e: &Effective, k: &ClosedFormConstants) -> Complex64 {
    let Effective { a2, d2, omega: w, .. } = *e;
    Complex64::new(w, -d2) / (2.0 * w * a2) * Complex64::new(k.q_r, k.q_i)
}

pub fn coeff_a(params: &ModelParams, route: Route) -> Result<Complex64> {
    let e = effective(params)?;
    match route {
        Route::ClosedForm => Ok(a_closed(&e)),
        Route::Asymptotic => a_asymptotic(params),
        Route::Projection => Ok(projection_coeffs(params, &CenterBasis::new(params)?)?[0]),
        Route::Direct => Err(Error::UnsupportedRoute {
            coefficient: "a",
            route: route.name(),
        }),
    }
}

pub fn coeff_b(params: &ModelParams, route: Route) -> Result<Complex64> {
    let e = effective(params)?;
    match route {
        Route::ClosedForm => Ok(b_closed(&e, &closed_form_constants(params)?)),
        Route::Direct => Ok(b_direct(params, &e)),
        Route::Projection => Ok(projection_coeffs(params, &CenterBasis::new(params)?)?[1]),
        Route::Asymptotic => Err(Error::UnsupportedRoute {
            coefficient: "b",
            route: route.name(),
        }),
    }
}

pub fn coeff_c(params: &ModelParams, route: Route) -> Result<Complex64> {
    let e = effective(params)?;
    match route {
        Route::ClosedForm => Ok(c_closed(&e, &closed_form_constants(params)?)),
        Route::Direct => c_direct(params, &e),
        Route::Projection => Ok(projection_coeffs(params, &CenterBasis::new(params)?)?[2]),
        Route::Asymptotic => Err(Error::UnsupportedRoute {
            coefficient: "c",
            route: route.name(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFormCoeffs {
    #[serde(with = "crate::serde_complex")]
    pub a: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub b: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub c: Complex64,
    pub route: Route,
    pub omega: f64,
    pub beta1: f64,
}

/// `a`, `b`, `c` along one route. For [`Route::Direct`], `a` comes from the
/// asymptotic route since there is no separate unsimplified expression for it.
pub fn coeffs(params: &ModelParams, route: Route) -> Result<NormalFormCoeffs> {
    let onset = params.require_admissible()?;
    let (a, b, c) = match route {
        Route::Projection => {
            let [a, b, c] = projection_coeffs(params, &CenterBasis::new(params)?)?;
            (a, b, c)
        }
        Route::Direct => (
            coeff_a(params, Route::Asymptotic)?,
            coeff_b(params, Route::Direct)?,
            coeff_c(params, Route::Direct)?,
        ),
        Route::ClosedForm => (
            coeff_a(params, Route::ClosedForm)?,
            coeff_b(params, Route::ClosedForm)?,
            coeff_c(params, Route::ClosedForm)?,
        ),
        Route::Asymptotic => {
            return Err(Error::UnsupportedRoute {
                coefficient: "b",
                route: route.name(),
            })
        }
    };
    Ok(NormalFormCoeffs {
        a,
        b,
        c,
        route,
        omega: onset.omega,
        beta1: onset.beta1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub first: Route,
    pub second: Route,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub consistent: bool,
}

fn discrepancy(x: &NormalFormCoeffs, y: &NormalFormCoeffs) -> Discrepancy {
    let d = |p: Complex64, q: Complex64| (p - q).norm();
    let ok = |p: Complex64, q: Complex64| d(p, q) <= CONSISTENCY_TOL * (1.0 + p.norm());
    Discrepancy {
        first: x.route,
        second: y.route,
        a: d(x.a, y.a),
        b: d(x.b, y.b),
        c: d(x.c, y.c),
        consistent: ok(x.a, y.a) && ok(x.b, y.b) && ok(x.c, y.c),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub projection_direct_consistent: bool,
    pub closed_form_consistent: bool,
    pub all_consistent: bool,
    pub flagged: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffsReport {
    pub params: RawParams,
    pub onset: OnsetData,
    pub routes: Vec<NormalFormCoeffs>,
    #[serde(with = "crate::serde_complex")]
    pub a_asymptotic: Complex64,
    pub constants: ClosedFormConstants,
    pub discrepancies: Vec<Discrepancy>,
    pub consistency: Consistency,
    pub psi_residuals: PsiResiduals,
    pub range_certificates: [RangeCertificate; 3],
    pub mean_zero_obstruction: MeanZeroReport,
}

impl CoeffsReport {
    pub fn route(&self, route: Route) -> Option<&NormalFormCoeffs> {
        self.routes.iter().find(|r| r.route == route)
    }
}

pub fn coeffs_report(params: &ModelParams) -> Result<CoeffsReport> {
    let onset = params.require_admissible()?;
    let routes = vec![
        coeffs(params, Route::ClosedForm)?,
        coeffs(params, Route::Direct)?,
        coeffs(params, Route::Projection)?,
    ];
    let mut discrepancies = Vec::new();
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            discrepancies.push(discrepancy(&routes[i], &routes[j]));
        }
    }
    let pd = discrepancies
        .iter()
        .find(|d| d.first == Route::Direct && d.second == Route::Projection)
        .map(|d| d.consistent)
        .unwrap_or(false);
    let cf = discrepancies
        .iter()
        .filter(|d| d.first == Route::ClosedForm)
        .all(|d| d.consistent);
    let flagged = discrepancies
        .iter()
        .filter(|d| !d.consistent)
        .map(|d| format!("{} vs {}", d.first.name(), d.second.name()))
        .collect();
    let psi = solve_psi(params)?;
    Ok(CoeffsReport {
        params: params.raw(),
        onset,
        routes,
        a_asymptotic: coeff_a(params, Route::Asymptotic)?,
        constants: closed_form_constants(params)?,
        discrepancies,
        consistency: Consistency {
            projection_direct_consistent: pd,
            closed_form_consistent: cf,
            all_consistent: pd && cf,
            flagged,
        },
        psi_residuals: psi.residuals,
        range_certificates: range_certificates(params)?,
        mean_zero_obstruction: meanzero::zero_mode_content(&psi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::canonical;
    use crate::modes::ModeVector;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn psi_11000_canonical() {
        let psi = solve_psi(&canonical()).unwrap();
        let expected = ModeSum::single(PI, ModeVector::new(0, [c(0.0, 0.0), c(0.75, 0.0)]));
        assert!(psi.psi_11000.max_abs_diff(&expected) < 1e-14);
        assert!(psi.psi_00001.is_zero());
    }

    #[test]
    fn psi_closed_displays() {
        // golden cross-checks against the displayed solutions
        let p = canonical();
        let psi = solve_psi(&p).unwrap();
        let (a, d1, d2, b1) = (2.0_f64, 1.0, 1.0, 7.0);
        let a2 = a * a;
        let w = 3f64.sqrt();
        let k = closed_form_constants(&p).unwrap();

        let s20 = c(-2.0 * (a2 + d2) + b1, 2.0 * w) / a / k.p2_two_i_omega;
        let v20 = [s20 * c(4.0 * d2, 2.0 * w), s20 * c(-4.0 * d1 - 1.0, -2.0 * w)];
        assert!(psi.psi_20000.max_abs_diff(&ModeSum::from_terms(PI, [(2, v20)])) < 1e-14);

        let s1001 = (4.0 * (a2 + d2) - 2.0 * b1) / a / k.p2_zero;
        let v1001 = [c(-4.0 * d2 * s1001, 0.0), c((4.0 * d1 + 1.0) * s1001, 0.0)];
        assert!(psi.psi_10010.max_abs_diff(&ModeSum::from_terms(PI, [(2, v1001)])) < 1e-14);

        let s101 = c(4.0 * (-a2 - d2) + 2.0 * b1, 4.0 * w) / a / k.p0_two_i_omega;
        let v101 = [s101 * c(0.0, 2.0 * w), s101 * c(-1.0, -2.0 * w)];
        assert!(psi.psi_10100.max_abs_diff(&ModeSum::from_terms(PI, [(0, v101)])) < 1e-14);
    }

    #[test]
    fn psi_00110_is_mirror_of_psi_11000() {
        let psi = solve_psi(&canonical()).unwrap();
        assert!(psi.psi_00110.max_abs_diff(&psi.psi_11000.reflect()) < 1e-15);
        assert!(psi.residuals.max() < 1e-12);
    }

    #[test]
    fn canonical_p2_zero() {
        assert_eq!(closed_form_constants(&canonical()).unwrap().p2_zero, 12.0);
    }

    #[test]
    fn canonical_a() {
        let p = canonical();
        let expected = c(0.5, -1.0 / (2.0 * 3f64.sqrt()));
        for route in [Route::ClosedForm, Route::Projection, Route::Asymptotic] {
            let a = coeff_a(&p, route).unwrap();
            assert!((a - expected).norm() < 1e-14, "{route:?}: {a}");
        }
        assert!(coeff_a(&p, Route::Direct).is_err());
    }

    #[test]
    fn canonical_closed_form_constants() {
        let k = closed_form_constants(&canonical()).unwrap();
        let s3 = 3f64.sqrt();
        assert!((k.n_r - 66.0).abs() < 1e-12);
        assert!((k.n_i - 12.0).abs() < 1e-12);
        assert!((k.b_r - 18.0).abs() < 1e-12);
        assert!((k.b_i + 33.0).abs() < 1e-12);
        assert!((k.c2r + 192.0).abs() < 1e-12);
        assert!((k.c2i - 72.0 * s3).abs() < 1e-12);
        assert!((k.q_r - 42.0).abs() < 1e-12);
        assert!((k.q_i + 20.0 * s3).abs() < 1e-12);
        let b = coeff_b(&canonical(), Route::ClosedForm).unwrap();
        let cc = coeff_c(&canonical(), Route::ClosedForm).unwrap();
        assert!((b.re + 17.0 / 8.0).abs() < 1e-14);
        assert!((cc.re - 11.0 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_reciprocal_is_nine_times_the_true_one() {
        let k = closed_form_constants(&canonical()).unwrap();
        let ratio = k.inv_p2_two_i_omega_closed_form / k.inv_p2_two_i_omega;
        assert!((ratio - c(9.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn projection_agrees_with_direct() {
        let p = canonical();
        for (f, name) in [(coeff_b as fn(&ModelParams, Route) -> Result<Complex64>, "b"), (coeff_c, "c")] {
            let x = f(&p, Route::Projection).unwrap();
            let y = f(&p, Route::Direct).unwrap();
            assert!((x - y).norm() < 1e-12, "{name}: {x} vs {y}");
        }
    }

    #[test]
    fn conjugated_basis_conjugates_coefficients() {
        let p = canonical();
        let basis = CenterBasis::new(&p).unwrap();
        let plain = projection_coeffs(&p, &basis).unwrap();
        let conj = projection_coeffs(&p, &basis.conjugated()).unwrap();
        for (x, y) in plain.iter().zip(conj.iter()) {
            assert!((x.conj() - y).norm() < 1e-13);
        }
    }

    #[test]
    fn range_certificates_vanish() {
        for cert in range_certificates(&canonical()).unwrap() {
            assert!(cert.dual_projection < 1e-12);
            assert!(cert.range_residual < 1e-12, "{cert:?}");
        }
    }

    #[test]
    fn report_is_mu_independent() {
        let p = canonical();
        let r0 = coeffs_report(&p).unwrap();
        let r1 = coeffs_report(&p.with_mu(0.1).unwrap()).unwrap();
        assert_eq!(r0.routes, r1.routes);
        assert_eq!(r0.constants, r1.constants);
        assert!(r0.consistency.projection_direct_consistent);
        assert!(!r0.consistency.closed_form_consistent);
    }

    #[test]
    fn unsupported_routes() {
        let p = canonical();
        assert!(matches!(coeff_b(&p, Route::Asymptotic), Err(Error::UnsupportedRoute { .. })));
        assert!(matches!(coeff_c(&p, Route::Asymptotic), Err(Error::UnsupportedRoute { .. })));
    }
}
