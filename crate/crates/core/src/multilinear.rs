//! The Brusselator nonlinearity as multilinear maps on Fourier mode sums.
//!
//! With `v = u - (alpha, beta_1/alpha)` and `mu = beta - beta_1`,
//!
//! ```text
//! R(v, mu) = mu R01 v + R20(v, v) + R30(v, v, v) + mu R21(v, v)
//! ```
//!
//! where every map has the shape `s (1, -1)^T` for a scalar `s`. Products of
//! single modes add their wave indices.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::Vec2;
use crate::model::ModelParams;
use crate::modes::ModeSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinearity {
    pub alpha: f64,
    /// `beta_1` is baked into `R20`; the `mu` dependence lives in `R01` and `R21`.
    pub beta1: f64,
}

fn pm(s: Complex64) -> Vec2 {
    [s, -s]
}

impl Nonlinearity {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            alpha: params.alpha(),
            beta1: params.beta1(),
        }
    }

    pub fn r01_amp(&self, v: &Vec2) -> Vec2 {
        pm(v[0])
    }

    pub fn r20_amp(&self, u: &Vec2, v: &Vec2) -> Vec2 {
        let a = self.alpha;
        pm((u[0] * v[1] + u[1] * v[0]) * a + u[0] * v[0] * (self.beta1 / a))
    }

    pub fn r30_amp(&self, u: &Vec2, v: &Vec2, w: &Vec2) -> Vec2 {
        pm((u[0] * v[0] * w[1] + u[0] * v[1] * w[0] + u[1] * v[0] * w[0]) / 3.0)
    }

    pub fn r21_amp(&self, u: &Vec2, v: &Vec2) -> Vec2 {
        pm(u[0] * v[0] / self.alpha)
    }

    /// `R01 v = (v1, -v1)` mode by mode.
    pub fn r01(&self, v: &ModeSum) -> ModeSum {
        ModeSum::from_terms(v.half_length, v.terms().map(|(n, a)| (n, self.r01_amp(&a))))
    }

    pub fn r20(&self, u: &ModeSum, v: &ModeSum) -> Result<ModeSum> {
        bilinear(u, v, |a, b| self.r20_amp(a, b))
    }

    pub fn r30(&self, u: &ModeSum, v: &ModeSum, w: &ModeSum) -> Result<ModeSum> {
        let uv = u.add(v)?; // domain check
        let _ = uv.add(w)?;
        let mut out = ModeSum::zero(u.half_length);
        for (i, a) in u.terms() {
            for (j, b) in v.terms() {
                for (k, c) in w.terms() {
                    out.add_term(i + j + k, self.r30_amp(&a, &b, &c));
                }
            }
        }
        Ok(out)
    }

    pub fn r21(&self, u: &ModeSum, v: &ModeSum) -> Result<ModeSum> {
        bilinear(u, v, |a, b| self.r21_amp(a, b))
    }

    /// Pointwise quadratic-plus-cubic part at `mu = 0`, as read off the
    /// perturbation equations: `2 alpha v1 v2 + (beta/alpha) v1^2 + v1^2 v2`.
    pub fn pointwise(&self, v: [f64; 2]) -> [f64; 2] {
        let s = 2.0 * self.alpha * v[0] * v[1] + self.beta1 / self.alpha * v[0] * v[0]
            + v[0] * v[0] * v[1];
        [s, -s]
    }
}

fn bilinear(u: &ModeSum, v: &ModeSum, f: impl Fn(&Vec2, &Vec2) -> Vec2) -> Result<ModeSum> {
    u.add(v)?;
    let mut out = ModeSum::zero(u.half_length);
    for (i, a) in u.terms() {
        for (j, b) in v.terms() {
            out.add_term(i + j, f(&a, &b));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::canonical;
    use crate::modes::ModeVector;
    use crate::spectral::{xi1, xi1_star, xi2};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup() -> (Nonlinearity, ModeSum, ModeSum, f64, f64, f64) {
        let p = canonical();
        let o = p.onset();
        (
            Nonlinearity::new(&p),
            ModeSum::single(PI, xi1(&p).unwrap()),
            ModeSum::single(PI, xi2(&p).unwrap()),
            p.alpha(),
            p.delta2(),
            o.omega,
        )
    }

    fn single_pm(n: i64, s: Complex64) -> ModeSum {
        ModeSum::single(PI, ModeVector::new(n, [s, -s]))
    }

    #[test]
    fn r01_of_xi1() {
        let (nl, x1, ..) = setup();
        let r = nl.r01(&x1);
        assert_eq!(r.max_abs_diff(&single_pm(1, c(1.0, 0.0))), 0.0);
        assert!(nl.r01(&ModeSum::zero(PI)).is_zero());
        let star = ModeSum::single(PI, xi1_star(&canonical()).unwrap());
        let w = 3f64.sqrt();
        let expected = c(0.5, -1.0 / (2.0 * w));
        assert!((r.inner(&star).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn r20_displays() {
        let (nl, x1, _, a, d2, w) = setup();
        let b1 = nl.beta1;
        let m = nl.r20(&x1, &x1.conj()).unwrap().scale(c(-2.0, 0.0));
        let expected = single_pm(0, c((4.0 * (a * a + d2) - 2.0 * b1) / a, 0.0));
        assert!(m.max_abs_diff(&expected) < 1e-14);

        let m = nl.r20(&x1, &x1).unwrap();
        let expected = single_pm(2, c(-2.0 * (a * a + d2) + b1, 2.0 * w) / a);
        assert!(m.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn r30_displays() {
        let (nl, x1, x2, a, d2, w) = setup();
        let m = nl.r30(&x1, &x1, &x1.conj()).unwrap().scale(c(3.0, 0.0));
        let expected = single_pm(1, c(-3.0 * (a * a + d2), w) / (a * a));
        assert!(m.max_abs_diff(&expected) < 1e-14);

        let m = nl.r30(&x1, &x2, &x2.conj()).unwrap().scale(c(6.0, 0.0));
        let expected = single_pm(1, c(-3.0 * (a * a + d2), w) * (2.0 / (a * a)));
        assert!(m.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn r21_of_critical_pair() {
        let (nl, x1, x2, a, ..) = setup();
        let m = nl.r21(&x1, &x2).unwrap();
        assert!(m.max_abs_diff(&single_pm(0, c(1.0 / a, 0.0))) < 1e-15);
        assert!(nl.r21(&ModeSum::zero(PI), &x2).unwrap().is_zero());
        assert_eq!(nl.r21(&x1, &x2).unwrap(), nl.r21(&x2, &x1).unwrap());
    }

    fn arb_sum() -> impl Strategy<Value = ModeSum> {
        prop::collection::vec((-3i64..=3, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 1..4)
            .prop_map(|v| {
                ModeSum::from_terms(PI, v.into_iter().map(|(n, a, b, cc, d)| (n, [c(a, b), c(cc, d)])))
            })
    }

    /// Real field: add the conjugate.
    fn arb_real_sum() -> impl Strategy<Value = ModeSum> {
        arb_sum().prop_map(|s| s.add(&s.conj()).unwrap().scale(c(0.05, 0.0)))
    }

    proptest! {
        #[test]
        fn r20_is_symmetric(u in arb_sum(), v in arb_sum()) {
            let nl = setup().0;
            let a = nl.r20(&u, &v).unwrap();
            let b = nl.r20(&v, &u).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-14);
        }

        #[test]
        fn r30_is_symmetric(u in arb_sum(), v in arb_sum(), w in arb_sum()) {
            let nl = setup().0;
            let base = nl.r30(&u, &v, &w).unwrap();
            for perm in [[&u, &w, &v], [&v, &u, &w], [&v, &w, &u], [&w, &u, &v], [&w, &v, &u]] {
                let p = nl.r30(perm[0], perm[1], perm[2]).unwrap();
                prop_assert!(base.max_abs_diff(&p) < 1e-13);
            }
        }

        #[test]
        fn maps_commute_with_conjugation(u in arb_sum(), v in arb_sum(), w in arb_sum()) {
            let nl = setup().0;
            let a = nl.r20(&u, &v).unwrap().conj();
            let b = nl.r20(&u.conj(), &v.conj()).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-14);
            let a = nl.r30(&u, &v, &w).unwrap().conj();
            let b = nl.r30(&u.conj(), &v.conj(), &w.conj()).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-14);
        }

        #[test]
        fn wave_indices_add(n in -4i64..=4, m in -4i64..=4, k in -4i64..=4) {
            let nl = setup().0;
            let one = |i| ModeSum::single(PI, ModeVector::new(i, [c(1.0, 0.0), c(0.5, 0.5)]));
            prop_assert_eq!(nl.r20(&one(n), &one(m)).unwrap().support(), vec![n + m]);
            prop_assert_eq!(nl.r30(&one(n), &one(m), &one(k)).unwrap().support(), vec![n + m + k]);
        }

        #[test]
        fn matches_pointwise_nonlinearity(v in arb_real_sum(), x in -PI..PI) {
            let nl = setup().0;
            let total = nl.r20(&v, &v).unwrap().add(&nl.r30(&v, &v, &v).unwrap()).unwrap();
            let point = v.eval(x);
            prop_assert!(point[0].im.abs() < 1e-14 && point[1].im.abs() < 1e-14);
            let direct = nl.pointwise([point[0].re, point[1].re]);
            let via = total.eval(x);
            prop_assert!((via[0].re - direct[0]).abs() < 1e-10);
            prop_assert!((via[1].re - direct[1]).abs() < 1e-10);
        }
    }
}
