//! Complex coefficient matrices, their real forms and the p-ellipticity constant.

mod ellipticity;
mod field;
mod matrix;
pub mod sample;

pub use ellipticity::{
    analyticity_angle, delta_p, delta_p_field, delta_p_value, p_ellipticity_range, PEllipticityReport,
    PRange, ANGLE_TOL, P_MAX, P_TOL,
};
pub use field::ComplexMatrixField;
pub use matrix::{
    conjugation, from_real_vec, symplectic, to_real_vec, ComplexMatrix, RealForm, ELLIPTICITY_FLOOR,
};

/// The exponent conjugate to `p`.
pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}
