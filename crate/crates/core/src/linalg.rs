//! 2x2 complex linear algebra.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Vec2 = [Complex64; 2];
pub type Mat2 = [[Complex64; 2]; 2];

/// Relative determinant guard for [`solve2`].
pub const SINGULAR_TOL: f64 = 1e-13;

pub fn real_mat(m: [[f64; 2]; 2]) -> Mat2 {
    [
        [m[0][0].into(), m[0][1].into()],
        [m[1][0].into(), m[1][1].into()],
    ]
}

pub fn det(m: &Mat2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn matvec(m: &Mat2, v: &Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// `z I - m`.
pub fn shift(z: Complex64, m: &Mat2) -> Mat2 {
    [[z - m[0][0], -m[0][1]], [-m[1][0], z - m[1][1]]]
}

pub fn norm(v: &Vec2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

pub fn sub(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

/// Solve `m x = rhs` through the adjugate. Fails when `|det|` is below
/// `SINGULAR_TOL * scale^2`, `scale` being the largest entry modulus.
pub fn solve2(m: &Mat2, rhs: &Vec2, equation: &'static str) -> Result<Vec2> {
    let d = det(m);
    let scale = m
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    if d.norm() <= SINGULAR_TOL * scale * scale {
        return Err(Error::SingularSystem {
            equation,
            det: d.norm(),
        });
    }
    Ok([
        (m[1][1] * rhs[0] - m[0][1] * rhs[1]) / d,
        (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / d,
    ])
}

/// Eigenvalues of a general complex 2x2 matrix.
pub fn eigenvalues(m: &Mat2) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let half = tr / 2.0;
    let disc = (half * half - det(m)).sqrt();
    [half + disc, half - disc]
}

/// Inverse of a 2x2 matrix, `None` when exactly singular.
pub fn inverse(m: &Mat2) -> Option<Mat2> {
    let d = det(m);
    if d == Complex64::new(0.0, 0.0) {
        return None;
    }
    Some([
        [m[1][1] / d, -m[0][1] / d],
        [-m[1][0] / d, m[0][0] / d],
    ])
}

pub fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_round_trip() {
        let m = [[c(1.0, 2.0), c(-0.5, 0.1)], [c(3.0, 0.0), c(0.2, -1.0)]];
        let x = [c(0.3, -0.7), c(1.1, 0.4)];
        let rhs = matvec(&m, &x);
        let y = solve2(&m, &rhs, "test").unwrap();
        assert!(norm(&sub(&x, &y)) < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let m = real_mat([[1.0, 2.0], [2.0, 4.0]]);
        let err = solve2(&m, &[c(1.0, 0.0), c(0.0, 0.0)], "rank one").unwrap_err();
        assert!(matches!(err, Error::SingularSystem { equation: "rank one", .. }));
    }

    #[test]
    fn eigenvalues_match_trace_and_det() {
        let m = [[c(0.5, 0.0), c(2.0, 1.0)], [c(-1.0, 0.0), c(-0.3, 0.2)]];
        let [l1, l2] = eigenvalues(&m);
        assert!((l1 + l2 - (m[0][0] + m[1][1])).norm() < 1e-14);
        assert!((l1 * l2 - det(&m)).norm() < 1e-14);
    }
}
