//! Radial bump mollifier on a tensor grid and smooth value/gradient/Hessian triples.

use nalgebra::{Matrix4, Vector4};

use super::nt::{Accum, BellmanSpec};
use crate::{Error, Result};

pub const MIN_RADIUS_POINTS: usize = 8;

/// Value, gradient and Hessian of a `C²` function on `ℝ⁴` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Smooth {
    pub value: f64,
    pub gradient: Vector4<f64>,
    pub hessian: Matrix4<f64>,
}

impl Smooth {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            gradient: Vector4::zeros(),
            hessian: Matrix4::zeros(),
        }
    }

    /// Product rule for `self · other`.
    pub fn times(&self, other: &Smooth) -> Smooth {
        let ga = &self.gradient;
        let gb = &other.gradient;
        Smooth {
            value: self.value * other.value,
            gradient: gb * self.value + ga * other.value,
            hessian: other.hessian * self.value
                + self.hessian * other.value
                + ga * gb.transpose()
                + gb * ga.transpose(),
        }
    }

    pub fn scaled(&self, c: f64) -> Smooth {
        Smooth {
            value: self.value * c,
            gradient: self.gradient * c,
            hessian: self.hessian * c,
        }
    }

    pub fn plus(&self, other: &Smooth) -> Smooth {
        Smooth {
            value: self.value + other.value,
            gradient: self.gradient + other.gradient,
            hessian: self.hessian + other.hessian,
        }
    }

    pub(crate) fn from_accum(acc: &Accum) -> Smooth {
        Smooth {
            value: acc.value,
            gradient: Vector4::from_column_slice(&acc.grad),
            hessian: acc.hessian(),
        }
    }
}

/// Discretized `φ_ν(ω) = ν^{-4} φ(ω/ν)` with `φ(ω) ∝ exp(-1/(1-|ω|²))` on the unit ball.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifierSpec {
    pub nu: f64,
    /// Grid points per radius `ν`.
    pub radius_points: usize,
    nodes: Vec<[f64; 4]>,
    weights: Vec<f64>,
}

impl MollifierSpec {
    pub fn new(nu: f64, radius_points: usize) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::param("nu", format!("must lie in (0,1], got {nu}")));
        }
        if radius_points < MIN_RADIUS_POINTS {
            return Err(Error::TooCoarse {
                points: radius_points,
                min: MIN_RADIUS_POINTS,
            });
        }
        let m = radius_points as i64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for a in -m..=m {
            for b in -m..=m {
                for c in -m..=m {
                    for d in -m..=m {
                        let k2 = (a * a + b * b + c * c + d * d) as f64 / (m * m) as f64;
                        if k2 < 1.0 {
                            let step = nu / m as f64;
                            nodes.push([a as f64 * step, b as f64 * step, c as f64 * step, d as f64 * step]);
                            weights.push((-1.0 / (1.0 - k2)).exp());
                        }
                    }
                }
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self {
            nu,
            radius_points,
            nodes,
            weights,
        })
    }

    pub fn step(&self) -> f64 {
        self.nu / self.radius_points as f64
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&[f64; 4], f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }

    /// `(G ⋆ φ_ν)(ω)` with `G` given as value/gradient/Hessian accumulation at each shifted node.
    pub(crate) fn convolve<F>(&self, omega: &[f64; 4], mut kernel: F) -> Smooth
    where
        F: FnMut(&[f64; 4], f64, &mut Accum),
    {
        let mut acc = Accum::default();
        for (y, w) in self.nodes() {
            let pt = [omega[0] - y[0], omega[1] - y[1], omega[2] - y[2], omega[3] - y[3]];
            kernel(&pt, w, &mut acc);
        }
        Smooth::from_accum(&acc)
    }
}

/// `𝒬 ⋆ φ_ν` with gradient `(D𝒬) ⋆ φ_ν` and Hessian `(D²𝒬) ⋆ φ_ν`.
pub fn mollified_q(spec: &BellmanSpec, moll: &MollifierSpec, omega: &[f64; 4]) -> Smooth {
    moll.convolve(omega, |pt, w, acc| spec.accumulate(pt, w, acc))
}

/// Value of `𝒬 ⋆ φ_ν` alone.
pub fn mollified_q_value(spec: &BellmanSpec, moll: &MollifierSpec, omega: &[f64; 4]) -> f64 {
    moll.nodes()
        .map(|(y, w)| {
            let pt = [omega[0] - y[0], omega[1] - y[1], omega[2] - y[2], omega[3] - y[3]];
            w * spec.value(&pt)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        let m = MollifierSpec::new(0.25, 8).unwrap();
        assert!((m.weight_sum() - 1.0).abs() < 1e-10);
        assert!(m.min_weight() >= 0.0);
        assert!(m.nodes().all(|(y, _)| y.iter().map(|v| v * v).sum::<f64>().sqrt() < 0.25));
        assert_eq!(MollifierSpec::new(0.25, 4).unwrap_err(), Error::TooCoarse { points: 4, min: 8 });
    }

    #[test]
    fn product_rule() {
        let a = Smooth {
            value: 2.0,
            gradient: Vector4::new(1.0, 0.0, 0.0, 0.0),
            hessian: Matrix4::identity(),
        };
        let b = Smooth {
            value: 3.0,
            gradient: Vector4::new(0.0, 1.0, 0.0, 0.0),
            hessian: Matrix4::zeros(),
        };
        let c = a.times(&b);
        assert_eq!(c.value, 6.0);
        assert_eq!(c.gradient, Vector4::new(3.0, 2.0, 0.0, 0.0));
        assert_eq!(c.hessian[(0, 1)], 1.0);
        assert_eq!(c.hessian[(0, 0)], 3.0);
    }
}
