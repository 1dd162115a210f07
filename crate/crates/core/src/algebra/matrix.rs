use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result, C64};

/// Matrices with `λ(A)` at or below this value are treated as non-elliptic.
pub const ELLIPTICITY_FLOOR: f64 = 1e-12;

/// Square complex matrix acting on `ℂ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

/// The `2d × 2d` real matrix `[[Re A, -Im A], [Im A, Re A]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealForm(pub DMatrix<f64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::param("matrix", "dimension must be positive"));
        }
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("matrix", "entries must be finite"));
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major real and imaginary parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let d = re.len();
        if im.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: im.len(),
            });
        }
        for row in re.iter().chain(im) {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| C64::new(re[i][j], im[i][j])))
    }

    pub fn from_real(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| C64::new(x, 0.0)))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn scalar(d: usize, z: C64) -> Self {
        Self(DMatrix::from_diagonal_element(d, d, z))
    }

    /// `e^{iφ} I_d`.
    pub fn rotation(d: usize, phi: f64) -> Self {
        Self::scalar(d, C64::from_polar(1.0, phi))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn re_parts(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)].re).collect())
            .collect()
    }

    pub fn im_parts(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)].im).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, z: C64) -> Self {
        Self(&self.0 * z)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn apply(&self, xi: &[C64]) -> Vec<C64> {
        let v = DVector::from_column_slice(xi);
        (&self.0 * v).iter().copied().collect()
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    /// `Re⟨Aξ, η⟩` with the inner product linear in the first slot.
    pub fn re_form(&self, xi: &[C64], eta: &[C64]) -> f64 {
        self.apply(xi)
            .iter()
            .zip(eta)
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn real_form(&self) -> RealForm {
        let d = self.dim();
        RealForm(DMatrix::from_fn(2 * d, 2 * d, |i, j| {
            let z = self.0[(i % d, j % d)];
            match (i < d, j < d) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        }))
    }

    /// Ellipticity constant `λ(A) = min_{|ξ|=1} Re⟨Aξ,ξ⟩`.
    pub fn lambda(&self) -> f64 {
        let m = self.real_form().0;
        min_sym_eigen(&m).0
    }

    /// Boundedness constant: the spectral norm of the real form.
    pub fn big_lambda(&self) -> f64 {
        let m = self.real_form().0;
        m.singular_values().max()
    }

    pub fn check_elliptic(&self, cell: usize) -> Result<()> {
        let lambda = self.lambda();
        if lambda > ELLIPTICITY_FLOOR {
            Ok(())
        } else {
            Err(Error::NotElliptic { cell, lambda })
        }
    }
}

/// Smallest eigenvalue of `(m + mᵀ)/2` and a unit eigenvector for it.
pub(crate) fn min_sym_eigen(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let k = eig.eigenvalues.imin();
    (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())
}

/// Real form of multiplication by `i` on `ℂ^d`.
pub fn symplectic(d: usize) -> DMatrix<f64> {
    ComplexMatrix::scalar(d, C64::i()).real_form().0
}

/// Real form of complex conjugation: `diag(I_d, -I_d)`.
pub fn conjugation(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * d, 2 * d, |i, j| match (i == j, i < d) {
        (true, true) => 1.0,
        (true, false) => -1.0,
        _ => 0.0,
    })
}

/// Splits `ξ ∈ ℂ^d` into `(Re ξ, Im ξ) ∈ ℝ^{2d}`.
pub fn to_real_vec(xi: &[C64]) -> Vec<f64> {
    xi.iter().map(|z| z.re).chain(xi.iter().map(|z| z.im)).collect()
}

pub fn from_real_vec(x: &[f64]) -> Vec<C64> {
    let d = x.len() / 2;
    (0..d).map(|i| C64::new(x[i], x[i + d])).collect()
}

impl RealForm {
    pub fn transpose(&self) -> Self {
        RealForm(self.0.transpose())
    }
}
