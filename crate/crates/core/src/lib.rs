//! Numerical laboratory for p-ellipticity of complex coefficient matrices.
//!
//! The crate is split by role:
//! - [`algebra`]: complex matrices, real forms and the p-ellipticity constant.
//! - [`bellman`]: the two-variable Bellman function, power functions, their
//!   mollified approximants and sampling-based convexity certification.
//! - [`semigroup`]: grid domains with mixed boundary conditions, discrete
//!   divergence-form operators, time stepping and the flow experiments.
//! - [`spectral`]: the closed-form parabola and critical angles.
//! - [`exec`]: batch scheduling with a rayon backend and a sequential fallback.

pub mod algebra;
pub mod bellman;
pub mod error;
pub mod exec;
pub mod semigroup;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
