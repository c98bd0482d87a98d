//! Finite Fourier sums of two-component fields.
//!
//! A [`ModeSum`] represents `sum_n amp_n e^{i n kappa x}` on `[-L, L)`; it is
//! the representation used by all center-manifold computations, which only
//! ever touch a handful of modes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vec2;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A single Fourier mode `amp e^{i n kappa x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeVector {
    pub n: i64,
    #[serde(with = "crate::serde_complex::pair")]
    pub amp: Vec2,
}

impl ModeVector {
    pub fn new(n: i64, amp: Vec2) -> Self {
        Self { n, amp }
    }

    /// Complex conjugate of the field: negates the index, conjugates the amplitude.
    pub fn conj(&self) -> Self {
        Self {
            n: -self.n,
            amp: [self.amp[0].conj(), self.amp[1].conj()],
        }
    }

    /// Reflection `S v(x) = v(-x)`.
    pub fn reflect(&self) -> Self {
        Self {
            n: -self.n,
            amp: self.amp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSum {
    pub half_length: f64,
    terms: BTreeMap<i64, Vec2>,
}

impl ModeSum {
    pub fn zero(half_length: f64) -> Self {
        Self {
            half_length,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(half_length: f64, mode: ModeVector) -> Self {
        let mut s = Self::zero(half_length);
        s.add_term(mode.n, mode.amp);
        s
    }

    pub fn from_terms(half_length: f64, terms: impl IntoIterator<Item = (i64, Vec2)>) -> Self {
        let mut s = Self::zero(half_length);
        for (n, amp) in terms {
            s.add_term(n, amp);
        }
        s
    }

    /// Merge `amp` into index `n`.
    pub fn add_term(&mut self, n: i64, amp: Vec2) {
        let slot = self.terms.entry(n).or_insert([ZERO; 2]);
        slot[0] += amp[0];
        slot[1] += amp[1];
    }

    pub fn amp(&self, n: i64) -> Vec2 {
        self.terms.get(&n).copied().unwrap_or([ZERO; 2])
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Vec2)> + '_ {
        self.terms.iter().map(|(&n, &a)| (n, a))
    }

    /// Indices whose amplitude is not exactly zero.
    pub fn support(&self) -> Vec<i64> {
        self.terms
            .iter()
            .filter(|(_, a)| a[0] != ZERO || a[1] != ZERO)
            .map(|(&n, _)| n)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_empty()
    }

    fn check_domain(&self, other: &Self) -> Result<()> {
        if self.half_length.to_bits() != other.half_length.to_bits() {
            return Err(Error::DomainMismatch(format!(
                "half lengths {} and {}",
                self.half_length, other.half_length
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_domain(other)?;
        let mut out = self.clone();
        for (n, a) in other.terms() {
            out.add_term(n, a);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            half_length: self.half_length,
            terms: self
                .terms
                .iter()
                .map(|(&n, a)| (n, [a[0] * s, a[1] * s]))
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            half_length: self.half_length,
            terms: self
                .terms
                .iter()
                .map(|(&n, a)| (-n, [a[0].conj(), a[1].conj()]))
                .collect(),
        }
    }

    /// Reflection `S v(x) = v(-x)`.
    pub fn reflect(&self) -> Self {
        Self {
            half_length: self.half_length,
            terms: self.terms.iter().map(|(&n, a)| (-n, *a)).collect(),
        }
    }

    /// Translation `R(phi) v(x) = v(x + phi)`.
    pub fn translate(&self, phi: f64) -> Self {
        let kappa = std::f64::consts::PI / self.half_length;
        Self {
            half_length: self.half_length,
            terms: self
                .terms
                .iter()
                .map(|(&n, a)| {
                    let p = Complex64::from_polar(1.0, n as f64 * kappa * phi);
                    (n, [a[0] * p, a[1] * p])
                })
                .collect(),
        }
    }

    /// Hermitian pairing `<f, g> = int_{-L}^{L} (f1 conj(g1) + f2 conj(g2)) dx`,
    /// evaluated exactly by orthogonality of the exponentials.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_domain(other)?;
        let mut acc = ZERO;
        for (n, a) in self.terms() {
            if let Some(b) = other.terms.get(&n) {
                acc += a[0] * b[0].conj() + a[1] * b[1].conj();
            }
        }
        Ok(acc * (2.0 * self.half_length))
    }

    /// `L^2` norm over one period.
    pub fn l2_norm(&self) -> f64 {
        self.inner(self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    /// Largest amplitude difference over all indices.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut idx: Vec<i64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter()
            .map(|n| {
                let (a, b) = (self.amp(n), other.amp(n));
                (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Point values at `x`.
    pub fn eval(&self, x: f64) -> Vec2 {
        let kappa = std::f64::consts::PI / self.half_length;
        let mut out = [ZERO; 2];
        for (n, a) in self.terms() {
            let e = Complex64::from_polar(1.0, n as f64 * kappa * x);
            out[0] += a[0] * e;
            out[1] += a[1] * e;
        }
        out
    }
}

impl From<(f64, ModeVector)> for ModeSum {
    fn from((half_length, mode): (f64, ModeVector)) -> Self {
        ModeSum::single(half_length, mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn distinct_modes_are_orthogonal() {
        let a = ModeSum::single(PI, ModeVector::new(1, [c(1.0, 0.0), c(0.3, 0.2)]));
        let b = ModeSum::single(PI, ModeVector::new(-1, [c(1.0, 0.0), c(0.3, 0.2)]));
        assert_eq!(a.inner(&b).unwrap(), ZERO);
    }

    #[test]
    fn inner_matches_quadrature() {
        let f = ModeSum::from_terms(
            2.0,
            [(0, [c(0.5, 0.0), c(-1.0, 0.3)]), (2, [c(0.1, 0.7), c(0.0, -0.4)])],
        );
        let g = ModeSum::from_terms(
            2.0,
            [(2, [c(1.0, -0.2), c(0.6, 0.6)]), (0, [c(-0.3, 0.0), c(0.2, 0.1)])],
        );
        let n = 64;
        let h = 4.0 / n as f64;
        let mut quad = ZERO;
        for j in 0..n {
            let x = -2.0 + j as f64 * h;
            let (fv, gv) = (f.eval(x), g.eval(x));
            quad += (fv[0] * gv[0].conj() + fv[1] * gv[1].conj()) * h;
        }
        assert!((quad - f.inner(&g).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let a = ModeSum::zero(PI);
        let b = ModeSum::zero(1.0);
        assert!(matches!(a.inner(&b), Err(Error::DomainMismatch(_))));
        assert!(matches!(a.add(&b), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn conjugation_negates_index() {
        let m = ModeVector::new(3, [c(1.0, 2.0), c(-0.5, 0.5)]);
        let cm = m.conj();
        assert_eq!(cm.n, -3);
        assert_eq!(cm.amp, [c(1.0, -2.0), c(-0.5, -0.5)]);
        assert_eq!(cm.conj(), m);
    }

    #[test]
    fn translation_and_reflection_act_on_point_values() {
        let f = ModeSum::from_terms(PI, [(1, [c(1.0, 0.5), c(0.0, 1.0)]), (-2, [c(0.2, 0.0), c(0.3, -0.1)])]);
        let x = 0.37;
        let phi = 1.1;
        let t = f.translate(phi).eval(x);
        let d = f.eval(x + phi);
        assert!((t[0] - d[0]).norm() < 1e-14 && (t[1] - d[1]).norm() < 1e-14);
        let r = f.reflect().eval(x);
        let d = f.eval(-x);
        assert!((r[0] - d[0]).norm() < 1e-14 && (r[1] - d[1]).norm() < 1e-14);
    }
}
