//! The two-variable Bellman function `𝒬(ζ, η)` on `ℝ² × ℝ²`.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Distance to the singular set below which the Hessian is not reported.
pub const SINGULAR_TOL: f64 = 1e-9;
/// Offset applied to sampling and quadrature nodes that fall near the singular set.
pub const SINGULAR_SHIFT: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellmanSpec {
    pub p: f64,
    pub q: f64,
    pub delta: f64,
}

/// Value, gradient and (off the singular set) Hessian at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QEval {
    pub value: f64,
    pub gradient: [f64; 4],
    pub hessian: Option<Matrix4<f64>>,
}

/// Radial profile data: `g_r/r`, `g_rr`, `g_s/s`, `g_ss`, `g_rs` of `𝒬 = g(|ζ|, |η|)`.
#[derive(Clone, Copy, Debug)]
struct Radial {
    value: f64,
    /// `|ζ|^p - |η|^q`
    indicator: f64,
    ar: f64,
    br: f64,
    as_: f64,
    bs: f64,
    c: f64,
}

impl BellmanSpec {
    pub fn new(p: f64, delta: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 2.0) {
            return Err(Error::param("p", format!("must be >= 2, got {p}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", format!("must lie in (0,1), got {delta}")));
        }
        Ok(Self {
            p,
            q: p / (p - 1.0),
            delta,
        })
    }

    /// `|ζ|^p - |η|^q`, the indicator separating the two branches.
    pub fn branch_indicator(&self, w: &[f64; 4]) -> f64 {
        let r = w[0].hypot(w[1]);
        let s = w[2].hypot(w[3]);
        r.powf(self.p) - s.powf(self.q)
    }

    pub fn near_singular(&self, w: &[f64; 4]) -> bool {
        w[2].hypot(w[3]) <= SINGULAR_TOL || self.branch_indicator(w).abs() <= SINGULAR_TOL
    }

    /// Moves `w` off the singular set by [`SINGULAR_SHIFT`] when it lies within [`SINGULAR_TOL`].
    pub fn perturb(&self, w: [f64; 4]) -> [f64; 4] {
        let mut w = w;
        if w[2].hypot(w[3]) <= SINGULAR_TOL {
            w[2] += SINGULAR_SHIFT;
        }
        if self.branch_indicator(&w).abs() <= SINGULAR_TOL {
            let s = w[2].hypot(w[3]);
            let f = 1.0 + SINGULAR_SHIFT / s.max(SINGULAR_SHIFT);
            w[2] *= f;
            w[3] *= f;
        }
        w
    }

    fn radial(&self, r2: f64, s2: f64) -> Radial {
        let (p, q, dl) = (self.p, self.q, self.delta);
        let ln_r = 0.5 * r2.ln();
        let ln_s = 0.5 * s2.ln();
        let rp2 = if r2 > 0.0 {
            ((p - 2.0) * ln_r).exp()
        } else if p == 2.0 {
            1.0
        } else {
            0.0
        };
        let sq2 = ((q - 2.0) * ln_s).exp();
        if p * ln_r <= q * ln_s {
            let s2mq = 1.0 / sq2;
            let cross = dl * (2.0 - q) * r2 * s2mq / s2;
            Radial {
                value: rp2 * r2 + sq2 * s2 + dl * r2 * s2mq,
                indicator: rp2 * r2 - sq2 * s2,
                ar: p * rp2 + 2.0 * dl * s2mq,
                br: p * (p - 1.0) * rp2 + 2.0 * dl * s2mq,
                as_: q * sq2 + cross,
                bs: q * (q - 1.0) * sq2 + (1.0 - q) * cross,
                c: 2.0 * dl * (2.0 - q) * r2.sqrt() * s2mq / s2.sqrt(),
            }
        } else {
            let k1 = p + 2.0 * dl;
            let k2 = q + dl * (2.0 - q);
            Radial {
                value: (1.0 + 2.0 * dl / p) * rp2 * r2 + (1.0 + dl * (2.0 / q - 1.0)) * sq2 * s2,
                indicator: rp2 * r2 - sq2 * s2,
                ar: k1 * rp2,
                br: k1 * (p - 1.0) * rp2,
                as_: k2 * sq2,
                bs: k2 * (q - 1.0) * sq2,
                c: 0.0,
            }
        }
    }

    pub fn value(&self, w: &[f64; 4]) -> f64 {
        self.eval_partial(w).0
    }

    fn eval_partial(&self, w: &[f64; 4]) -> (f64, [f64; 4], Option<Radial>) {
        let r2 = w[0] * w[0] + w[1] * w[1];
        let s2 = w[2] * w[2] + w[3] * w[3];
        if s2 == 0.0 {
            if r2 == 0.0 {
                return (0.0, [0.0; 4], None);
            }
            let (p, dl) = (self.p, self.delta);
            let rp2 = r2.powf(0.5 * (p - 2.0));
            let k1 = p + 2.0 * dl;
            return (
                (1.0 + 2.0 * dl / p) * rp2 * r2,
                [k1 * rp2 * w[0], k1 * rp2 * w[1], 0.0, 0.0],
                None,
            );
        }
        let g = self.radial(r2, s2);
        (
            g.value,
            [g.ar * w[0], g.ar * w[1], g.as_ * w[2], g.as_ * w[3]],
            Some(g),
        )
    }

    /// Hessian without the singular-set check; callers guarantee `η ≠ 0`.
    pub fn hessian_raw(&self, w: &[f64; 4]) -> Matrix4<f64> {
        let r2 = w[0] * w[0] + w[1] * w[1];
        let s2 = w[2] * w[2] + w[3] * w[3];
        hessian_from(&self.radial(r2, s2), w, r2, s2)
    }

    /// Value, gradient and Hessian; the Hessian is `None` near the singular set.
    pub fn eval(&self, w: &[f64; 4]) -> QEval {
        let (value, gradient, radial) = self.eval_partial(w);
        let hessian = match radial {
            Some(g) if !self.near_singular(w) => {
                let r2 = w[0] * w[0] + w[1] * w[1];
                let s2 = w[2] * w[2] + w[3] * w[3];
                Some(hessian_from(&g, w, r2, s2))
            }
            _ => None,
        };
        QEval {
            value,
            gradient,
            hessian,
        }
    }

    /// Accumulates `weight ·` (value, gradient, Hessian upper triangle) at `w`, moving `w`
    /// off the singular set first when needed.
    #[inline]
    pub(crate) fn accumulate(&self, w: &[f64; 4], weight: f64, acc: &mut Accum) {
        let mut w = *w;
        let mut s2 = w[2] * w[2] + w[3] * w[3];
        if s2 <= SINGULAR_TOL * SINGULAR_TOL {
            w = self.perturb(w);
            s2 = w[2] * w[2] + w[3] * w[3];
        }
        let mut r2 = w[0] * w[0] + w[1] * w[1];
        let mut g = self.radial(r2, s2);
        if g.indicator.abs() <= SINGULAR_TOL {
            w = self.perturb(w);
            r2 = w[0] * w[0] + w[1] * w[1];
            s2 = w[2] * w[2] + w[3] * w[3];
            g = self.radial(r2, s2);
        }
        acc.value += weight * g.value;
        acc.grad[0] += weight * g.ar * w[0];
        acc.grad[1] += weight * g.ar * w[1];
        acc.grad[2] += weight * g.as_ * w[2];
        acc.grad[3] += weight * g.as_ * w[3];
        let h = hessian_from(&g, &w, r2, s2);
        for (k, (i, j)) in UPPER.iter().enumerate() {
            acc.hess[k] += weight * h[(*i, *j)];
        }
    }

    /// Wirtinger derivatives `(∂_ζ 𝒬, ∂_η 𝒬)` with `∂_ζ = (∂_{ζ₁} - i ∂_{ζ₂})/2`.
    pub fn wirtinger(&self, w: &[f64; 4]) -> (C64, C64) {
        wirtinger_of(&self.eval_partial(w).1)
    }
}

pub(crate) fn wirtinger_of(g: &[f64; 4]) -> (C64, C64) {
    (
        C64::new(0.5 * g[0], -0.5 * g[1]),
        C64::new(0.5 * g[2], -0.5 * g[3]),
    )
}

pub(crate) const UPPER: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Accum {
    pub value: f64,
    pub grad: [f64; 4],
    pub hess: [f64; 10],
}

impl Accum {
    pub fn hessian(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for (k, (i, j)) in UPPER.iter().enumerate() {
            m[(*i, *j)] = self.hess[k];
            m[(*j, *i)] = self.hess[k];
        }
        m
    }
}

fn hessian_from(g: &Radial, w: &[f64; 4], r2: f64, s2: f64) -> Matrix4<f64> {
    let mut h = Matrix4::zeros();
    let kr = if r2 > 0.0 { (g.br - g.ar) / r2 } else { 0.0 };
    let ks = (g.bs - g.as_) / s2;
    let kc = if r2 > 0.0 { g.c / (r2 * s2).sqrt() } else { 0.0 };
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            h[(i, j)] = g.ar * id + kr * w[i] * w[j];
            h[(i + 2, j + 2)] = g.as_ * id + ks * w[i + 2] * w[j + 2];
            let cross = kc * w[i] * w[j + 2];
            h[(i, j + 2)] = cross;
            h[(j + 2, i)] = cross;
        }
    }
    h
}
