use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix in cell {cell} is not elliptic (lambda = {lambda:e})")]
    NotElliptic { cell: usize, lambda: f64 },

    #[error("coefficients are not p-elliptic at p = {p} (delta = {delta:e})")]
    NotPElliptic { p: f64, delta: f64 },

    #[error("empty coefficient field")]
    EmptyField,

    #[error("domain mask has no cells")]
    EmptyMask,

    #[error("coefficient field has {found} cells but the domain has {expected}")]
    MisalignedField { expected: usize, found: usize },

    #[error("evaluation point lies on a singular set: {0}")]
    Singular(&'static str),

    #[error("quadrature too coarse: {points} points per radius, need at least {min}")]
    TooCoarse { points: usize, min: usize },

    #[error("constant C1 has not been calibrated")]
    Uncalibrated,

    #[error("linear solver breakdown (residual {residual:e})")]
    SolverBreakdown { residual: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
