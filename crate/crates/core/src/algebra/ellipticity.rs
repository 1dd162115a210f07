use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::field::ComplexMatrixField;
use super::matrix::{conjugation, min_sym_eigen, ComplexMatrix, ELLIPTICITY_FLOOR};
use crate::{Error, Result, C64};

/// Cap on the upper exponent; ranges that reach it are reported unbounded.
pub const P_MAX: f64 = 1e6;
pub const P_TOL: f64 = 1e-9;
pub const ANGLE_TOL: f64 = 1e-8;

/// Exponents `(p⁻, p⁺)` with `Δ_p > 0` strictly inside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PRange {
    pub lower: f64,
    /// `None` when the range is unbounded.
    pub upper: Option<f64>,
}

impl PRange {
    pub fn unbounded() -> Self {
        Self {
            lower: 1.0,
            upper: None,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        p > self.lower && self.upper.is_none_or(|u| p < u)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PEllipticityReport {
    pub p: f64,
    pub delta: f64,
    /// Unit vector of `ℝ^{2d}` attaining the minimum.
    pub minimizer: Vec<f64>,
    /// Cell attaining the minimum, for fields.
    pub cell: Option<usize>,
    /// Present when the input is elliptic.
    pub p_range: Option<PRange>,
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::param("p", format!("must be > 1, got {p}")))
    }
}

fn form_matrix(a: &ComplexMatrix, p: f64) -> nalgebra::DMatrix<f64> {
    let d = a.dim();
    let beta = 1.0 - 2.0 / p;
    let weight = nalgebra::DMatrix::identity(2 * d, 2 * d) + conjugation(d) * beta;
    weight * a.real_form().0
}

fn min_form(a: &ComplexMatrix, p: f64) -> (f64, Vec<f64>) {
    let (v, x) = min_sym_eigen(&form_matrix(a, p));
    (v, x.iter().copied().collect())
}

/// `Δ_p(A)` without validation or report.
pub fn delta_p_value(a: &ComplexMatrix, p: f64) -> f64 {
    min_form(a, p).0
}

/// `Δ_p(A) = min_{|ξ|=1} Re⟨Aξ, ξ + (1-2/p) ξ̄⟩`.
pub fn delta_p(a: &ComplexMatrix, p: f64) -> Result<PEllipticityReport> {
    check_p(p)?;
    let (delta, minimizer) = min_form(a, p);
    let cells = std::slice::from_ref(a);
    let p_range = if a.lambda() > ELLIPTICITY_FLOOR {
        Some(range_of(cells))
    } else {
        None
    };
    Ok(PEllipticityReport {
        p,
        delta,
        minimizer,
        cell: None,
        p_range,
    })
}

fn cells_delta(cells: &[ComplexMatrix], p: f64) -> (f64, usize, Vec<f64>) {
    cells
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (v, x) = min_form(a, p);
            (v, i, x)
        })
        .fold((f64::INFINITY, 0, Vec::new()), |best, cur| {
            if cur.0 < best.0 {
                cur
            } else {
                best
            }
        })
}

fn cells_delta_value(cells: &[ComplexMatrix], p: f64) -> f64 {
    cells
        .iter()
        .map(|a| delta_p_value(a, p))
        .fold(f64::INFINITY, f64::min)
}

/// Minimum of `Δ_p` over the cells of a piecewise-constant field.
pub fn delta_p_field(field: &ComplexMatrixField, p: f64) -> Result<PEllipticityReport> {
    check_p(p)?;
    let (delta, cell, minimizer) = cells_delta(field.cells(), p);
    Ok(PEllipticityReport {
        p,
        delta,
        minimizer,
        cell: Some(cell),
        p_range: Some(range_of(field.cells())),
    })
}

fn range_of(cells: &[ComplexMatrix]) -> PRange {
    if cells_delta_value(cells, P_MAX) > 0.0 {
        return PRange::unbounded();
    }
    let (mut lo, mut hi) = (2.0, P_MAX);
    while hi - lo > P_TOL * lo.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if cells_delta_value(cells, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let upper = 0.5 * (lo + hi);
    PRange {
        lower: upper / (upper - 1.0),
        upper: Some(upper),
    }
}

/// Open interval of exponents for which the field is p-elliptic.
pub fn p_ellipticity_range(field: &ComplexMatrixField) -> Result<PRange> {
    let lambda = cells_delta_value(field.cells(), 2.0);
    if lambda <= ELLIPTICITY_FLOOR {
        return Err(Error::NotElliptic {
            cell: cells_delta(field.cells(), 2.0).1,
            lambda,
        });
    }
    Ok(range_of(field.cells()))
}

/// Supremum of `θ ∈ [0, π/2)` with `Δ_p(e^{±iθ} A) > 0`.
pub fn analyticity_angle(field: &ComplexMatrixField, p: f64) -> Result<f64> {
    check_p(p)?;
    let delta = cells_delta_value(field.cells(), p);
    if delta <= 0.0 {
        return Err(Error::NotPElliptic { p, delta });
    }
    let rotated = |theta: f64| {
        field
            .cells()
            .iter()
            .flat_map(|a| {
                let plus = a.scale(C64::from_polar(1.0, theta));
                let minus = a.scale(C64::from_polar(1.0, -theta));
                [delta_p_value(&plus, p), delta_p_value(&minus, p)]
            })
            .fold(f64::INFINITY, f64::min)
    };
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    while hi - lo > ANGLE_TOL {
        let mid = 0.5 * (lo + hi);
        if rotated(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    fn field(cells: Vec<ComplexMatrix>) -> ComplexMatrixField {
        ComplexMatrixField::new(cells).unwrap()
    }

    #[test]
    fn identity_and_rotation() {
        let r = delta_p(&ComplexMatrix::identity(2), 2.0).unwrap();
        assert_abs_diff_eq!(r.delta, 1.0, epsilon = 1e-14);
        let r = delta_p(&ComplexMatrix::rotation(2, PI / 3.0), 4.0).unwrap();
        assert_abs_diff_eq!(r.delta, 0.0, epsilon = 1e-14);
        assert!(delta_p(&ComplexMatrix::identity(1), 1.0).is_err());
    }

    #[test]
    fn upper_triangular_example() {
        let a = ComplexMatrix::from_real(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0])).unwrap();
        let r = delta_p(&a, 2.0).unwrap();
        assert_abs_diff_eq!(r.delta, (3.0 - 2f64.sqrt()) / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn minimizer_reproduces_delta() {
        let a = ComplexMatrix::from_parts(
            &[vec![2.0, 0.3], vec![-0.4, 1.5]],
            &[vec![0.7, -0.2], vec![0.1, -0.9]],
        )
        .unwrap();
        let r = delta_p(&a, 3.3).unwrap();
        let x = nalgebra::DVector::from_vec(r.minimizer.clone());
        let val = x.dot(&(form_matrix(&a, 3.3) * &x));
        assert_abs_diff_eq!(val, r.delta, epsilon = 1e-12);
    }

    #[test]
    fn field_minimum_and_range() {
        let f = field(vec![ComplexMatrix::identity(1), ComplexMatrix::rotation(1, PI / 3.0)]);
        let r = delta_p_field(&f, 4.0).unwrap();
        assert_abs_diff_eq!(r.delta, 0.0, epsilon = 1e-14);
        assert_eq!(r.cell, Some(1));

        let phi = 0.9f64;
        let range = p_ellipticity_range(&field(vec![ComplexMatrix::rotation(2, phi)])).unwrap();
        let expected = 2.0 / (1.0 - phi.cos());
        assert!((range.upper.unwrap() - expected).abs() < 1e-8);
        assert_abs_diff_eq!(1.0 / range.lower + 1.0 / range.upper.unwrap(), 1.0, epsilon = 1e-14);

        let real = field(vec![ComplexMatrix::from_real(DMatrix::from_row_slice(
            2,
            2,
            &[1.0, 0.5, -0.2, 3.0],
        ))
        .unwrap()]);
        assert_eq!(p_ellipticity_range(&real).unwrap(), PRange::unbounded());
    }

    #[test]
    fn analyticity_examples() {
        let id = field(vec![ComplexMatrix::identity(2)]);
        let t = analyticity_angle(&id, 2.0).unwrap();
        assert!(t < FRAC_PI_2 && t > FRAC_PI_2 - 2.0 * ANGLE_TOL);
        let t = analyticity_angle(&id, 4.0).unwrap();
        assert!((t - PI / 3.0).abs() < 2.0 * ANGLE_TOL);
    }

    #[test]
    fn analyticity_matches_scan() {
        let diag = field(vec![ComplexMatrix::from_real(DMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![1.0, 5.0]),
        ))
        .unwrap()]);
        let mut prev = FRAC_PI_2;
        for p in [3.0, 6.0, 12.0, 40.0] {
            let t = analyticity_angle(&diag, p).unwrap();
            assert!(t > 0.0 && t < prev);
            prev = t;
            let scan = (0..20000)
                .map(|k| k as f64 * FRAC_PI_2 / 20000.0)
                .take_while(|&th| {
                    let a = &diag.cells()[0];
                    delta_p_value(&a.scale(C64::from_polar(1.0, th)), p) > 0.0
                        && delta_p_value(&a.scale(C64::from_polar(1.0, -th)), p) > 0.0
                })
                .last()
                .unwrap();
            assert!((t - scan).abs() < FRAC_PI_2 / 20000.0 + 1e-8);
        }
    }
}
