use super::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Piecewise-constant coefficient field: one elliptic matrix per grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrixField {
    cells: Vec<ComplexMatrix>,
    dim: usize,
}

impl ComplexMatrixField {
    pub fn new(cells: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = cells.first().ok_or(Error::EmptyField)?.dim();
        for (i, a) in cells.iter().enumerate() {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.dim(),
                });
            }
            a.check_elliptic(i)?;
        }
        Ok(Self { cells, dim })
    }

    pub fn constant(a: ComplexMatrix, count: usize) -> Result<Self> {
        Self::new(vec![a; count])
    }

    pub fn cells(&self) -> &[ComplexMatrix] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        Self {
            cells: self.cells.iter().map(ComplexMatrix::adjoint).collect(),
            dim: self.dim,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.cells.iter().map(ComplexMatrix::lambda).fold(f64::INFINITY, f64::min)
    }

    pub fn big_lambda(&self) -> f64 {
        self.cells.iter().map(ComplexMatrix::big_lambda).fold(0.0, f64::max)
    }
}
