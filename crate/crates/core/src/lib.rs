//! Equivariant Hopf analysis of the diffusive Brusselator on a periodic interval.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the nondimensional parameters and the onset quantities,
//! * [`spectral`] does the linear stability analysis and builds the center space,
//! * [`modes`] and [`multilinear`] provide the Fourier-mode algebra of the nonlinearity,
//! * [`normalform`] solves the center-manifold equations and computes `a`, `b`, `c`,
//! * [`reduced`] analyses the cubic normal form (branches, stability, trajectories),
//! * [`pdesim`] integrates the full reaction-diffusion system pseudospectrally,
//! * [`meanzero`] checks the constant-mode content of the center-manifold coefficients,
//! * [`verify`] bundles the golden checks used by the `verify` command.

pub mod error;
pub mod linalg;
pub mod meanzero;
pub mod model;
pub mod modes;
pub mod multilinear;
pub mod normalform;
pub mod pdesim;
pub mod reduced;
pub mod serde_complex;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ModelParams, OnsetData, RawParams};
pub use modes::{ModeSum, ModeVector};
pub use num_complex::Complex64;
