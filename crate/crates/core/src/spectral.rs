//! Closed-form parabola `𝐏_{p,α}` and the critical angles.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolaSpec {
    pub p: f64,
    pub alpha: f64,
}

/// A point of the parabola, or the ray `{x ≥ start, y = 0}` it collapses to at `p = 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParabolaValue {
    Point(C64),
    Ray { start: f64 },
}

impl ParabolaSpec {
    pub fn new(p: f64, alpha: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::param("p", format!("must be > 1, got {p}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::param("alpha", format!("must be > 0, got {alpha}")));
        }
        Ok(Self { p, alpha })
    }

    /// Real part at `y = 0`.
    pub fn vertex(&self) -> f64 {
        self.alpha * self.alpha * vertex_height(self.p)
    }

    pub fn point(&self, y: f64) -> ParabolaValue {
        let p = self.p;
        if p == 2.0 {
            return ParabolaValue::Ray {
                start: self.alpha * self.alpha / 4.0,
            };
        }
        let a2 = self.alpha * self.alpha;
        let t = y / a2;
        let curv = p * p / ((p - 2.0) * (p - 2.0));
        ParabolaValue::Point(C64::new(a2 * (curv * t * t + vertex_height(p)), y))
    }

    /// `arg(x + iy)` of the parabola point; zero on the degenerate ray.
    pub fn arg(&self, y: f64) -> f64 {
        match self.point(y) {
            ParabolaValue::Point(z) => z.arg(),
            ParabolaValue::Ray { .. } => 0.0,
        }
    }
}

/// `1/p - 1/p²`, maximal at `p = 2`.
pub fn vertex_height(p: f64) -> f64 {
    1.0 / p - 1.0 / (p * p)
}

/// `(φ*_p, φ_p) = (arcsin|2/p - 1|, π/2 - φ*_p)`.
pub fn critical_angle(p: f64) -> Result<(f64, f64)> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::param("p", format!("must be > 1, got {p}")));
    }
    let star = (2.0 / p - 1.0).abs().asin();
    Ok((star, FRAC_PI_2 - star))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport {
    pub p: f64,
    pub alpha: f64,
    pub phi_star: f64,
    /// Largest `|arg|` found along the parabola.
    pub sup_arg: f64,
    /// Ordinate where the supremum is attained.
    pub y_at_sup: f64,
    /// `min (φ* - |arg|)` over all sampled points; nonnegative when tangency holds.
    pub min_margin: f64,
    pub y_max: f64,
    /// `φ*` minus the running supremum of `|arg|` over `|y| ≤ y_max`.
    pub gap_at_y_max: f64,
    /// `|arg|` at `y_max` itself.
    pub arg_at_y_max: f64,
    /// Running supremum is nondecreasing along the sweep (by construction) and reaches `φ*`.
    pub sup_increases_to_phi_star: bool,
    pub samples: usize,
}

/// Sweeps `|y| ∈ α²·[10^{-6}, 10^6]` on a log grid and refines the maximum of `|arg|`.
pub fn tangency_check(p: f64, alpha: f64) -> Result<TangencyReport> {
    let spec = ParabolaSpec::new(p, alpha)?;
    if p == 2.0 {
        return Err(Error::param("p", "the parabola degenerates at p = 2"));
    }
    let (phi_star, _) = critical_angle(p)?;
    let a2 = alpha * alpha;
    let per_decade = 200;
    let ys: Vec<f64> = (0..=12 * per_decade)
        .map(|k| a2 * 10f64.powf(-6.0 + k as f64 / per_decade as f64))
        .collect();
    let mut sup = 0.0f64;
    let mut y_at_sup = 0.0;
    let mut min_margin = f64::INFINITY;
    for &y in &ys {
        for s in [y, -y] {
            let a = spec.arg(s).abs();
            min_margin = min_margin.min(phi_star - a);
            if a > sup {
                sup = a;
                y_at_sup = y;
            }
        }
    }
    // golden-section refinement of the unimodal |arg| around the grid maximum
    let step = 10f64.powf(1.0 / per_decade as f64);
    let (mut lo, mut hi) = (y_at_sup / step, y_at_sup * step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |y: f64| spec.arg(y).abs();
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let y_ref = 0.5 * (lo + hi);
    let refined = f(y_ref);
    min_margin = min_margin.min(phi_star - refined);
    if refined > sup {
        sup = refined;
        y_at_sup = y_ref;
    }
    let y_max = *ys.last().expect("nonempty sweep");
    Ok(TangencyReport {
        p,
        alpha,
        phi_star,
        sup_arg: sup,
        y_at_sup,
        min_margin,
        y_max,
        gap_at_y_max: phi_star - sup,
        arg_at_y_max: spec.arg(y_max).abs(),
        sup_increases_to_phi_star: (phi_star - sup).abs() < 1e-9,
        samples: 2 * ys.len() + 1,
    })
}

/// `(y, x, arg)` rows for plotting, symmetric in `y`.
pub fn parabola_samples(spec: &ParabolaSpec, y_max: f64, count: usize) -> Vec<(f64, f64, f64)> {
    let count = count.max(2);
    (0..count)
        .map(|k| -y_max + 2.0 * y_max * k as f64 / (count - 1) as f64)
        .map(|y| match spec.point(y) {
            ParabolaValue::Point(z) => (y, z.re, z.arg()),
            ParabolaValue::Ray { start } => (0.0, start, 0.0),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{delta_p_value, ComplexMatrix};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn vertex_examples() {
        let s = ParabolaSpec::new(4.0, 1.0).unwrap();
        assert_eq!(s.point(0.0), ParabolaValue::Point(C64::new(3.0 / 16.0, 0.0)));
        assert_eq!(
            ParabolaSpec::new(2.0, 1.0).unwrap().point(0.3),
            ParabolaValue::Ray { start: 0.25 }
        );
        let near = ParabolaSpec::new(2.0 + 1e-9, 1.0).unwrap().vertex();
        assert_abs_diff_eq!(near, 0.25, epsilon = 1e-9);
        for p in [1.1, 1.5, 3.0, 10.0, 40.0] {
            assert!(vertex_height(p) < 0.25);
        }
    }

    #[test]
    fn homogeneity() {
        for (alpha, y) in [(0.5, 0.3), (2.0, -1.7), (3.0, 40.0)] {
            let a = ParabolaSpec::new(3.0, alpha).unwrap();
            let b = ParabolaSpec::new(3.0, 1.0).unwrap();
            let (ParabolaValue::Point(za), ParabolaValue::Point(zb)) =
                (a.point(y), b.point(y / (alpha * alpha)))
            else {
                panic!("non-degenerate p");
            };
            assert_abs_diff_eq!(za.re, alpha * alpha * zb.re, epsilon = 1e-12 * za.re.abs());
        }
    }

    #[test]
    fn angles() {
        assert_eq!(critical_angle(2.0).unwrap(), (0.0, FRAC_PI_2));
        assert_abs_diff_eq!(critical_angle(4.0).unwrap().0, PI / 6.0, epsilon = 1e-15);
        let p = 5.0;
        let q = p / (p - 1.0);
        assert_abs_diff_eq!(critical_angle(p).unwrap().0, critical_angle(q).unwrap().0, epsilon = 1e-15);
        for p in [1.2, 1.9, 3.0, 7.0, 40.0] {
            let phi = critical_angle(p).unwrap().1;
            assert_abs_diff_eq!(delta_p_value(&ComplexMatrix::rotation(2, phi), p), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn tangency() {
        let r = tangency_check(4.0, 1.0).unwrap();
        assert!(r.min_margin >= -1e-15);
        assert!(r.gap_at_y_max < 1e-3);
        assert!(r.sup_increases_to_phi_star);
        let expected = 2.0 * 3f64.sqrt() / 16.0;
        assert!((r.y_at_sup - expected).abs() < 1e-6);
        let others: Vec<f64> = [0.5, 2.0]
            .iter()
            .map(|&a| tangency_check(4.0, a).unwrap().sup_arg)
            .collect();
        for s in others {
            assert_abs_diff_eq!(s, r.sup_arg, epsilon = 1e-12);
        }
    }
}
