//! Sampling-based certification of generalized convexity.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nt::BellmanSpec;
use super::xy::{min_product_normalized, xy_ratio};
use crate::algebra::{delta_p_value, ComplexMatrix};
use crate::exec::{batch_rng, Exec, DEFAULT_BATCH};
use crate::{Error, Result};

/// A form value below `-WITNESS_TOL` counts as a negativity witness.
pub const WITNESS_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedNonnegativeWithMargin,
    NegativityWitness,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide by `|Ξ|²`: the smallest eigenvalue of the symmetric part.
    Sphere,
    /// Divide by `|X||Y|`.
    ProductXy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub omega: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub region: String,
    pub seed: u64,
    pub sample_count: usize,
    /// Samples dropped because the Hessian was undefined there.
    pub skipped: usize,
    pub normalization: Normalization,
    pub threshold: f64,
    pub tolerance: f64,
    pub min_normalized_form: f64,
    /// `min_normalized_form - threshold`.
    pub margin: f64,
    pub witness: Witness,
    pub verdict: Verdict,
    pub parameters: BTreeMap<String, f64>,
}

impl ConvexityCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::CertifiedNonnegativeWithMargin
    }
}

pub fn verdict_for(min: f64, threshold: f64, tolerance: f64) -> Verdict {
    if min >= threshold - tolerance {
        Verdict::CertifiedNonnegativeWithMargin
    } else if min < -WITNESS_TOL {
        Verdict::NegativityWitness
    } else {
        Verdict::Inconclusive
    }
}

/// A coefficient pair `(A, B)` with cached transposed real forms.
#[derive(Clone, Debug)]
pub struct Pair {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    ma_t: DMatrix<f64>,
    mb_t: DMatrix<f64>,
}

impl Pair {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        let ma_t = a.real_form().0.transpose();
        let mb_t = b.real_form().0.transpose();
        Ok(Self { a, b, ma_t, mb_t })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn delta_p(&self, p: f64) -> f64 {
        delta_p_value(&self.a, p).min(delta_p_value(&self.b, p))
    }

    pub fn lambda(&self) -> f64 {
        self.a.lambda().min(self.b.lambda())
    }

    pub fn big_lambda(&self) -> f64 {
        self.a.big_lambda().max(self.b.big_lambda())
    }

    /// Generalized Hessian `(ℳ(A*) ⊕ ℳ(B*)) (D²Φ ⊗ I_d)` for a Hessian on `ℝ⁴`.
    pub fn gen_hessian(&self, hess: &Matrix4<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let m = 2 * d;
        let mut kron = DMatrix::zeros(2 * m, 2 * m);
        for a in 0..4 {
            for b in 0..4 {
                let v = hess[(a, b)];
                for i in 0..d {
                    kron[(a * d + i, b * d + i)] = v;
                }
            }
        }
        let mut h = DMatrix::zeros(2 * m, 2 * m);
        h.view_mut((0, 0), (m, 2 * m))
            .copy_from(&(&self.ma_t * kron.view((0, 0), (m, 2 * m))));
        h.view_mut((m, 0), (m, 2 * m))
            .copy_from(&(&self.mb_t * kron.view((m, 0), (m, 2 * m))));
        h
    }

    /// Re-evaluates the normalized form at a witness.
    pub fn normalized_form(&self, hess: &Matrix4<f64>, normalization: Normalization, x: &[f64], y: &[f64]) -> f64 {
        let h = self.gen_hessian(hess);
        match normalization {
            Normalization::ProductXy => xy_ratio(&h, x, y),
            Normalization::Sphere => {
                let n2: f64 = x.iter().chain(y).map(|v| v * v).sum();
                xy_ratio(&h, x, y) * x.iter().map(|v| v * v).sum::<f64>().sqrt()
                    * y.iter().map(|v| v * v).sum::<f64>().sqrt()
                    / n2
            }
        }
    }
}

/// Minimum of a normalized generalized-Hessian form at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct FormMin {
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Minimizes the normalized form for a fixed Hessian of `Φ`.
pub fn min_gen_hess_at(pair: &Pair, hess: &Matrix4<f64>, normalization: Normalization) -> FormMin {
    let h = pair.gen_hessian(hess);
    let m = 2 * pair.dim();
    match normalization {
        Normalization::Sphere => {
            let e = SymmetricEigen::new((&h + h.transpose()) * 0.5);
            let i = e.eigenvalues.imin();
            let v = e.eigenvectors.column(i);
            FormMin {
                value: e.eigenvalues[i],
                x: v.rows(0, m).iter().copied().collect(),
                y: v.rows(m, m).iter().copied().collect(),
            }
        }
        Normalization::ProductXy => {
            let r = min_product_normalized(&h, m);
            FormMin {
                value: r.value,
                x: r.x,
                y: r.y,
            }
        }
    }
}

/// `minGenHess`: the normalized minimum of `H_Φ^{(A,B)}[ω; ·]`.
pub fn min_gen_hess<F>(phi_hessian: F, pair: &Pair, omega: &[f64; 4], normalization: Normalization) -> Result<FormMin>
where
    F: Fn(&[f64; 4]) -> Option<Matrix4<f64>>,
{
    let h = phi_hessian(omega).ok_or(Error::Singular("Hessian undefined at omega"))?;
    Ok(min_gen_hess_at(pair, &h, normalization))
}

/// What to certify: a sampler of points and the Hessian of `Φ` there.
pub struct CertifyTask<'a, S, F> {
    pub region: &'a str,
    pub pair: &'a Pair,
    pub normalization: Normalization,
    pub threshold: f64,
    pub tolerance: f64,
    pub sampler: S,
    pub hessian: F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub seed: u64,
    pub count: usize,
    pub exec: Exec,
}

/// Runs the sampler in deterministic batches and records the worst sample.
pub fn certify<S, F>(plan: SamplingPlan, task: CertifyTask<'_, S, F>) -> ConvexityCertificate
where
    S: Fn(&mut ChaCha8Rng) -> [f64; 4] + Sync,
    F: Fn(&[f64; 4]) -> Option<Matrix4<f64>> + Sync,
{
    let pair = task.pair;
    let per_batch = plan.exec.map_batches(plan.count, DEFAULT_BATCH, |b, len| {
        let mut rng = batch_rng(plan.seed, b);
        let mut best: Option<([f64; 4], FormMin)> = None;
        let mut skipped = 0;
        for _ in 0..len {
            let w = (task.sampler)(&mut rng);
            match (task.hessian)(&w) {
                Some(h) => {
                    let f = min_gen_hess_at(pair, &h, task.normalization);
                    if best.as_ref().is_none_or(|(_, b)| f.value < b.value) {
                        best = Some((w, f));
                    }
                }
                None => skipped += 1,
            }
        }
        (best, skipped)
    });
    let skipped = per_batch.iter().map(|(_, s)| s).sum();
    let best = per_batch
        .into_iter()
        .filter_map(|(b, _)| b)
        .fold(None::<([f64; 4], FormMin)>, |acc, cur| match acc {
            Some(a) if a.1.value <= cur.1.value => Some(a),
            _ => Some(cur),
        });
    let (omega, fm) = best.unwrap_or((
        [0.0; 4],
        FormMin {
            value: f64::NAN,
            x: vec![],
            y: vec![],
        },
    ));
    let verdict = if fm.value.is_nan() {
        Verdict::Inconclusive
    } else {
        verdict_for(fm.value, task.threshold, task.tolerance)
    };
    ConvexityCertificate {
        region: task.region.to_string(),
        seed: plan.seed,
        sample_count: plan.count,
        skipped,
        normalization: task.normalization,
        threshold: task.threshold,
        tolerance: task.tolerance,
        min_normalized_form: fm.value,
        margin: fm.value - task.threshold,
        witness: Witness {
            omega: omega.to_vec(),
            x: fm.x,
            y: fm.y,
        },
        verdict,
        parameters: BTreeMap::new(),
    }
}

/// Uniform direction in `ℝ²` scaled to length `r`.
pub(crate) fn polar<R: Rng + ?Sized>(rng: &mut R, r: f64) -> [f64; 2] {
    let a = 2.0 * PI * rng.random::<f64>();
    [r * a.cos(), r * a.sin()]
}

/// Point of `ℝ⁴` with `|ζ|^p + |η|^q = 1` and `|ζ|^p/|η|^q` log-uniform in `[1e-8, 1e8]`.
///
/// The product-normalized form of `𝒬` is invariant under `(ζ, η) ↦ (s^{1/p}ζ, s^{1/q}η)`,
/// so this slice covers every point up to that scaling.
pub fn sample_bellman_point<R: Rng + ?Sized>(rng: &mut R, spec: &BellmanSpec) -> [f64; 4] {
    let t = 10f64.powf(rng.random_range(-8.0..8.0));
    let rp = t / (1.0 + t);
    let sq = 1.0 / (1.0 + t);
    let z = polar(rng, rp.powf(1.0 / spec.p));
    let e = polar(rng, sq.powf(1.0 / spec.q));
    spec.perturb([z[0], z[1], e[0], e[1]])
}

/// `Δ_p(A,B) λ(A,B) / (5 Λ(A,B))`.
pub fn bellman_threshold(pair: &Pair, p: f64) -> f64 {
    pair.delta_p(p) * pair.lambda() / (5.0 * pair.big_lambda())
}

/// Outcome of the downward scan `δ = 2^{-k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaCalibration {
    pub delta: f64,
    pub threshold: f64,
    /// `(δ, sampled minimum)` for every δ tried.
    pub trials: Vec<(f64, f64)>,
}

pub const DELTA_MAX_HALVINGS: u32 = 30;

/// Largest `δ = 2^{-k}` whose sampled product-normalized minimum meets the strict bound.
pub fn calibrate_delta(p: f64, pair: &Pair, plan: SamplingPlan) -> Result<DeltaCalibration> {
    let delta_ab = pair.delta_p(p);
    if !(delta_ab > 0.0) {
        return Err(Error::NotPElliptic { p, delta: delta_ab });
    }
    let threshold = bellman_threshold(pair, p);
    let mut trials = Vec::new();
    for k in 1..=DELTA_MAX_HALVINGS {
        let delta = 0.5f64.powi(k as i32);
        let cert = certify_bellman(p, delta, pair, plan)?;
        trials.push((delta, cert.min_normalized_form));
        if cert.min_normalized_form >= threshold {
            return Ok(DeltaCalibration {
                delta,
                threshold,
                trials,
            });
        }
    }
    Err(Error::param(
        "delta",
        format!("no δ ≥ 2^-{DELTA_MAX_HALVINGS} meets the strict bound"),
    ))
}

/// Samples `H_𝒬/(|X||Y|)` against the strict bound `Δ_p λ/(5Λ)`.
pub fn certify_bellman(p: f64, delta: f64, pair: &Pair, plan: SamplingPlan) -> Result<ConvexityCertificate> {
    let spec = BellmanSpec::new(p, delta)?;
    let threshold = bellman_threshold(pair, p);
    let mut cert = certify(
        plan,
        CertifyTask {
            region: "R4 minus singular set",
            pair,
            normalization: Normalization::ProductXy,
            threshold,
            tolerance: 1e-9,
            sampler: |rng: &mut ChaCha8Rng| sample_bellman_point(rng, &spec),
            hessian: |w: &[f64; 4]| spec.eval(w).hessian,
        },
    );
    cert.parameters.insert("p".into(), p);
    cert.parameters.insert("delta".into(), delta);
    Ok(cert)
}
