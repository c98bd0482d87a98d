//! Constant-mode content of the center-manifold coefficients.
//!
//! The reduction cannot be carried out on a space of mean-zero perturbations:
//! `Psi_11000` and `Psi_10100` are forced at Fourier mode 0, so the quadratic
//! part of the center manifold leaves any such subspace.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Vec2};
use crate::normalform::PsiTable;

/// Amplitudes below this are treated as zero.
pub const ZERO_MODE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    Present,
    Absent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeEntry {
    pub name: String,
    #[serde(with = "crate::serde_complex::pair")]
    pub amplitude: Vec2,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanZeroReport {
    pub entries: Vec<ZeroModeEntry>,
    pub verdict: Obstruction,
    pub message: String,
    /// `Psi_11000` vanishes identically (the case `4 (alpha^2 + delta2) = 2 beta1`);
    /// the verdict then rests on `Psi_10100` alone.
    pub psi_11000_degenerate: bool,
}

impl MeanZeroReport {
    pub fn entry(&self, name: &str) -> Option<&ZeroModeEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

pub fn zero_mode_content(psi: &PsiTable) -> MeanZeroReport {
    let entries: Vec<ZeroModeEntry> = [
        ("psi_00001", &psi.psi_00001),
        ("psi_11000", &psi.psi_11000),
        ("psi_00110", &psi.psi_00110),
        ("psi_20000", &psi.psi_20000),
        ("psi_10100", &psi.psi_10100),
        ("psi_10010", &psi.psi_10010),
    ]
    .into_iter()
    .map(|(name, sum)| {
        let amplitude = sum.amp(0);
        ZeroModeEntry {
            name: name.to_string(),
            amplitude,
            norm: linalg::norm(&amplitude),
        }
    })
    .collect();

    let nonzero = |name: &str| {
        entries
            .iter()
            .find(|e| e.name == name)
            .is_some_and(|e| e.norm > ZERO_MODE_TOL)
    };
    let psi_11000_degenerate = !nonzero("psi_11000");
    let (verdict, message) = if nonzero("psi_11000") || nonzero("psi_10100") {
        (
            Obstruction::Present,
            "mean-zero obstruction present: psi_11000 or psi_10100 has a nonzero constant mode".to_string(),
        )
    } else {
        (
            Obstruction::Absent,
            "no constant-mode content in psi_11000 or psi_10100".to_string(),
        )
    };
    MeanZeroReport {
        entries,
        verdict,
        message,
        psi_11000_degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonical, RawParams};
    use crate::normalform::solve_psi;
    use num_complex::Complex64;

    #[test]
    fn canonical_obstruction() {
        let r = zero_mode_content(&solve_psi(&canonical()).unwrap());
        assert_eq!(r.verdict, Obstruction::Present);
        let e = r.entry("psi_11000").unwrap();
        assert!((e.amplitude[0]).norm() < 1e-15);
        assert!((e.amplitude[1] - Complex64::new(0.75, 0.0)).norm() < 1e-14);
        assert_eq!(r.entry("psi_20000").unwrap().norm, 0.0);
        assert_eq!(r.entry("psi_10010").unwrap().norm, 0.0);
        assert_eq!(r.entry("psi_00001").unwrap().norm, 0.0);
        assert!(!r.psi_11000_degenerate);
    }

    #[test]
    fn degenerate_psi_11000_still_obstructed() {
        // alpha^2 + delta2 = 1 + delta1 gives 4 (alpha^2 + delta2) = 2 beta1
        let p = RawParams::new(1.0, 3.0, 0.5, 0.5).validate().unwrap();
        let r = zero_mode_content(&solve_psi(&p).unwrap());
        assert!(r.psi_11000_degenerate);
        assert_eq!(r.verdict, Obstruction::Present);
        assert!(r.entry("psi_10100").unwrap().norm > 0.1);
    }
}
