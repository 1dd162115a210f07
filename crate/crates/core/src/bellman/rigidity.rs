//! Search for negativity of `H^A_Γ` for radial functions `Γ(ζ) = γ(|ζ|)` on `ℝ²`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::certify::{verdict_for, ConvexityCertificate, Normalization, SamplingPlan, Witness};
use crate::algebra::ComplexMatrix;
use crate::exec::{batch_rng, DEFAULT_BATCH};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    Constant { value: f64 },
    /// `max(0, t - knee)²`.
    FlatThenQuadratic { knee: f64 },
    Power { exponent: f64 },
}

impl RadialProfile {
    /// `(γ, γ', γ'')` at `t > 0`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            RadialProfile::Constant { value } => (value, 0.0, 0.0),
            RadialProfile::FlatThenQuadratic { knee } => {
                if t <= knee {
                    (0.0, 0.0, 0.0)
                } else {
                    let u = t - knee;
                    (u * u, 2.0 * u, 2.0)
                }
            }
            RadialProfile::Power { exponent: r } => (t.powf(r), r * t.powf(r - 1.0), r * (r - 1.0) * t.powf(r - 2.0)),
        }
    }

    /// Radius scale over which samples are drawn.
    fn reach(&self) -> f64 {
        match *self {
            RadialProfile::FlatThenQuadratic { knee } => 3.0 * knee.max(1.0),
            _ => 3.0,
        }
    }
}

/// Smallest eigenvalue of the symmetric part of `ℳ(A)ᵀ (D²Γ(ζ) ⊗ I_d)` and its eigenvector.
pub fn radial_form_min(a: &ComplexMatrix, profile: &RadialProfile, zeta: [f64; 2]) -> (f64, Vec<f64>) {
    let d = a.dim();
    let t = zeta[0].hypot(zeta[1]);
    let (_, g1, g2) = profile.eval(t);
    let u = [zeta[0] / t, zeta[1] / t];
    let hess = |i: usize, j: usize| {
        let id = if i == j { 1.0 } else { 0.0 };
        g2 * u[i] * u[j] + (g1 / t) * (id - u[i] * u[j])
    };
    let kron = DMatrix::from_fn(2 * d, 2 * d, |r, c| if r % d == c % d { hess(r / d, c / d) } else { 0.0 });
    let h = a.real_form().0.transpose() * kron;
    let e = SymmetricEigen::new((&h + h.transpose()) * 0.5);
    let k = e.eigenvalues.imin();
    (e.eigenvalues[k], e.eigenvectors.column(k).iter().copied().collect())
}

fn refine(a: &ComplexMatrix, profile: &RadialProfile, t0: f64, th0: f64) -> (f64, f64, f64) {
    let f = |t: f64, th: f64| radial_form_min(a, profile, [t * th.cos(), t * th.sin()]).0;
    let (mut t, mut th) = (t0, th0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let golden = |lo: f64, hi: f64, h: &dyn Fn(f64) -> f64| {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if h(m1) < h(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        0.5 * (lo + hi)
    };
    for _ in 0..3 {
        let nt = golden(0.5 * t, 1.5 * t, &|x| f(x, th));
        if f(nt, th) < f(t, th) {
            t = nt;
        }
        let nth = golden(th - 0.5, th + 0.5, &|x| f(t, x));
        if f(t, nth) < f(t, th) {
            th = nth;
        }
    }
    (f(t, th), t, th)
}

/// Random search over `(ζ, X)` followed by a local descent in `ζ` from the best sample.
pub fn rigidity_probe(a: &ComplexMatrix, profile: &RadialProfile, plan: SamplingPlan) -> ConvexityCertificate {
    let reach = profile.reach();
    let best = plan
        .exec
        .map_batches(plan.count, DEFAULT_BATCH, |b, len| {
            let mut rng = batch_rng(plan.seed, b);
            (0..len)
                .map(|_| {
                    let t = reach * (1.0 - rng.random::<f64>());
                    let th = 2.0 * PI * rng.random::<f64>();
                    (radial_form_min(a, profile, [t * th.cos(), t * th.sin()]).0, t, th)
                })
                .fold((f64::INFINITY, 0.0, 0.0), |x, y| if y.0 < x.0 { y } else { x })
        })
        .into_iter()
        .fold((f64::INFINITY, 0.0, 0.0), |x, y| if y.0 < x.0 { y } else { x });
    let (mut value, mut t, mut th) = best;
    if value < 0.0 {
        let r = refine(a, profile, t, th);
        if r.0 < value {
            (value, t, th) = r;
        }
    }
    let zeta = [t * th.cos(), t * th.sin()];
    let (value_again, x) = radial_form_min(a, profile, zeta);
    debug_assert!((value_again - value).abs() < 1e-12 * (1.0 + value.abs()));
    let tolerance = 1e-9;
    let mut parameters = BTreeMap::new();
    parameters.insert("reach".into(), reach);
    ConvexityCertificate {
        region: "R2".into(),
        seed: plan.seed,
        sample_count: plan.count,
        skipped: 0,
        normalization: Normalization::Sphere,
        threshold: 0.0,
        tolerance,
        min_normalized_form: value_again,
        margin: value_again,
        witness: Witness {
            omega: zeta.to_vec(),
            x,
            y: vec![],
        },
        verdict: verdict_for(value_again, 0.0, tolerance),
        parameters,
    }
}
