//! Approximant sequences: the profiles `f_n`, the power mixtures `P_p` and `𝒫_n`, the cutoff
//! `ψ_n`, and the smooth approximants `ℛ_{n,ν}` with their calibration.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::certify::{certify, polar, verdict_for, CertifyTask, ConvexityCertificate, Normalization, Pair, SamplingPlan, Verdict};
use super::mollify::{mollified_q, MollifierSpec, Smooth};
use super::nt::{Accum, BellmanSpec, UPPER};
use crate::algebra::sample::unit_vector;
use crate::exec::{batch_rng, DEFAULT_BATCH};
use crate::{Error, Result};

/// A radial profile `t ↦ f(t)` with its first two derivatives.
pub trait Profile {
    fn eval(&self, t: f64) -> (f64, f64, f64);
}

/// `t ↦ t^r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile(pub f64);

impl Profile for PowerProfile {
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let r = self.0;
        if t == 0.0 {
            let d2 = if r == 2.0 { 2.0 } else { 0.0 };
            return (0.0, 0.0, d2);
        }
        let tr2 = t.powf(r - 2.0);
        (tr2 * t * t, r * tr2 * t, r * (r - 1.0) * tr2)
    }
}

/// `f_n(t) = n^{-ε} t^{p+ε}` for `t ≤ n`, and `(p+ε)/2 n^{p-2} t² + (1-(p+ε)/2) n^p` beyond.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPower {
    pub n: f64,
    pub p: f64,
    pub epsilon: f64,
}

impl Profile for TruncatedPower {
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        TruncatedPowerEval::from(*self).eval(t)
    }
}

/// [`TruncatedPower`] with its `n`-dependent constants precomputed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedPowerEval {
    n: f64,
    r: f64,
    inner: f64,
    np2: f64,
}

impl From<TruncatedPower> for TruncatedPowerEval {
    fn from(f: TruncatedPower) -> Self {
        Self {
            n: f.n,
            r: f.p + f.epsilon,
            inner: f.n.powf(-f.epsilon),
            np2: f.n.powf(f.p - 2.0),
        }
    }
}

impl Profile for TruncatedPowerEval {
    #[inline]
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let r = self.r;
        if t <= self.n {
            let (v, d1, d2) = PowerProfile(r).eval(t);
            (self.inner * v, self.inner * d1, self.inner * d2)
        } else {
            let np = self.np2 * self.n * self.n;
            (0.5 * r * self.np2 * t * t + (1.0 - 0.5 * r) * np, r * self.np2 * t, r * self.np2)
        }
    }
}

/// `ψ(ω/n)` with `ψ = 1` on `|ω| ≤ 3`, `0` on `|ω| ≥ 4` and a quintic transition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub n: f64,
}

impl Profile for Cutoff {
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let s = t / self.n - 3.0;
        if s <= 0.0 {
            return (1.0, 0.0, 0.0);
        }
        if s >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let v = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
        let d1 = -30.0 * s * s * (1.0 - s) * (1.0 - s);
        let d2 = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
        (v, d1 / self.n, d2 / (self.n * self.n))
    }
}

/// Adds `weight · f(|w_S|)` and its derivatives for the coordinate block `S = START..START+LEN`.
#[inline]
fn radial_accumulate<P: Profile, const START: usize, const LEN: usize>(f: &P, w: &[f64; 4], weight: f64, acc: &mut Accum) {
    let mut t2 = 0.0;
    for x in &w[START..START + LEN] {
        t2 += x * x;
    }
    let t = t2.sqrt();
    let (v, d1, d2) = f.eval(t);
    acc.value += weight * v;
    let (a, b) = if t > 0.0 { (d1 / t, (d2 - d1 / t) / t2) } else { (d2, 0.0) };
    let (a, b) = (weight * a, weight * b);
    for i in START..START + LEN {
        acc.grad[i] += a * w[i];
    }
    for (k, (i, j)) in UPPER.iter().enumerate() {
        if *i >= START && *j < START + LEN {
            let id = if i == j { a } else { 0.0 };
            acc.hess[k] += id + b * w[*i] * w[*j];
        }
    }
}

/// `f(|ω|) + K (f(|ζ|) + f(|η|))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerMix<P> {
    pub profile: P,
    pub big_k: f64,
}

impl<P: Profile> PowerMix<P> {
    pub(crate) fn accumulate(&self, w: &[f64; 4], weight: f64, acc: &mut Accum) {
        radial_accumulate::<P, 0, 4>(&self.profile, w, weight, acc);
        if self.big_k != 0.0 {
            radial_accumulate::<P, 0, 2>(&self.profile, w, weight * self.big_k, acc);
            radial_accumulate::<P, 2, 2>(&self.profile, w, weight * self.big_k, acc);
        }
    }

    pub fn eval(&self, w: &[f64; 4]) -> Smooth {
        let mut acc = Accum::default();
        self.accumulate(w, 1.0, &mut acc);
        Smooth::from_accum(&acc)
    }

    pub fn mollified(&self, moll: &MollifierSpec, w: &[f64; 4]) -> Smooth {
        moll.convolve(w, |pt, weight, acc| self.accumulate(pt, weight, acc))
    }
}

pub fn cutoff_eval(n: f64, w: &[f64; 4]) -> Smooth {
    let mut acc = Accum::default();
    radial_accumulate::<Cutoff, 0, 4>(&Cutoff { n }, w, 1.0, &mut acc);
    Smooth::from_accum(&acc)
}

/// `(κ_r, K_r)` with `κ_r = (r-2)Λ/Δ_r` and `K_r = (2κ_r)^{r-1}` when `κ_r > 1`, else `0`.
pub fn kappa_and_k(pair: &Pair, r: f64) -> (f64, f64) {
    let kappa = (r - 2.0) * pair.big_lambda() / pair.delta_p(r);
    let big_k = if kappa <= 1.0 { 0.0 } else { (2.0 * kappa).powf(r - 1.0) };
    (kappa, big_k)
}

/// `P_p = F_p(ω) + K_p (F_p(ζ) + F_p(η))`.
pub fn p_mix(pair: &Pair, p: f64) -> PowerMix<PowerProfile> {
    PowerMix {
        profile: PowerProfile(p),
        big_k: kappa_and_k(pair, p).1,
    }
}

/// Largest `ε ≤ 1` (to `1e-9`) with `Δ_{p+ε}(A,B) > Δ_p(A,B)/2`.
pub fn choose_epsilon(pair: &Pair, p: f64) -> Result<f64> {
    let base = pair.delta_p(p);
    if !(base > 0.0) {
        return Err(Error::NotPElliptic { p, delta: base });
    }
    if pair.delta_p(p + 1.0) > 0.5 * base {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if pair.delta_p(p + mid) > 0.5 * base {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximantSpec {
    pub bellman: BellmanSpec,
    pub n: u32,
    pub epsilon: f64,
    pub c1: Option<f64>,
    pub kappa: f64,
    pub big_k: f64,
    pub mollifier: MollifierSpec,
}

/// `ℛ_{n,ν} = cut + C₁ · convex` with `cut = ψ_n (𝒬⋆φ_ν)` and `convex = ν^{q-2} (𝒫_n⋆φ_ν)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RParts {
    pub cut: Smooth,
    pub convex: Smooth,
}

impl RParts {
    pub fn combine(&self, c1: f64) -> Smooth {
        self.cut.plus(&self.convex.scaled(c1))
    }
}

impl ApproximantSpec {
    pub fn new(bellman: BellmanSpec, pair: &Pair, n: u32, mollifier: MollifierSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be positive"));
        }
        let epsilon = choose_epsilon(pair, bellman.p)?;
        let (kappa, big_k) = kappa_and_k(pair, bellman.p + epsilon);
        Ok(Self {
            bellman,
            n,
            epsilon,
            c1: None,
            kappa,
            big_k,
            mollifier,
        })
    }

    pub fn with_c1(mut self, c1: f64) -> Self {
        self.c1 = Some(c1);
        self
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = n;
        self
    }

    pub fn nu(&self) -> f64 {
        self.mollifier.nu
    }

    pub fn profile(&self) -> TruncatedPower {
        TruncatedPower {
            n: self.n as f64,
            p: self.bellman.p,
            epsilon: self.epsilon,
        }
    }

    /// `𝒫_n = f_n(|ω|) + K_{p+ε}(f_n(|ζ|) + f_n(|η|))`.
    pub fn p_n(&self) -> PowerMix<TruncatedPowerEval> {
        PowerMix {
            profile: self.profile().into(),
            big_k: self.big_k,
        }
    }

    pub fn parts(&self, w: &[f64; 4]) -> RParts {
        let n = self.n as f64;
        let rho = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let cut = if rho >= 4.0 * n {
            Smooth::zero()
        } else {
            let g = mollified_q(&self.bellman, &self.mollifier, w);
            if rho <= 3.0 * n {
                g
            } else {
                cutoff_eval(n, w).times(&g)
            }
        };
        let scale = self.nu().powf(self.bellman.q - 2.0);
        RParts {
            cut,
            convex: self.p_n().mollified(&self.mollifier, w).scaled(scale),
        }
    }

    pub fn eval(&self, w: &[f64; 4]) -> Result<Smooth> {
        let c1 = self.c1.ok_or(Error::Uncalibrated)?;
        Ok(self.parts(w).combine(c1))
    }
}

fn sym_min(pair: &Pair, h: &Matrix4<f64>) -> f64 {
    let g = pair.gen_hessian(h);
    SymmetricEigen::new((&g + g.transpose()) * 0.5).eigenvalues.min()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C1Calibration {
    pub nu: f64,
    /// Smallest passing power of two, or `None` when nothing up to `2^64` passes.
    pub c1: Option<f64>,
    pub exponent: Option<i32>,
    pub samples: usize,
    pub ns: Vec<u32>,
    /// Sampled annulus minimum of the sphere-normalized form at the chosen `C₁`.
    pub annulus_min: f64,
    /// Fitted `max |D²(ψ_n 𝒬⋆φ_ν)| / (ν^{q-2} n^{p-2})` over the annulus samples.
    pub c0_fit: f64,
    /// Sampled minimum of the `𝒫_n` term against its lower bound `(p+ε)n^{p-2}λ` (scaled by `ν^{q-2}`).
    pub convex_ratio_min: f64,
    pub verdict: Verdict,
}

pub const C1_MIN_EXPONENT: i32 = -20;
pub const C1_MAX_EXPONENT: i32 = 64;

fn sample_shell<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> [f64; 4] {
    let rho = rng.random_range(lo..hi);
    let u = unit_vector(rng, 4);
    [rho * u[0], rho * u[1], rho * u[2], rho * u[3]]
}

/// Smallest power of two `C₁` making `ℛ_{n,ν}` convex on sampled annuli `3n ≤ |ω| ≤ 4n`.
pub fn calibrate_c1(base: &ApproximantSpec, pair: &Pair, ns: &[u32], plan: SamplingPlan) -> Result<C1Calibration> {
    let p = base.bellman.p;
    let delta = pair.delta_p(p);
    if !(delta > 0.0) {
        return Err(Error::NotPElliptic { p, delta });
    }
    if ns.is_empty() {
        return Err(Error::param("ns", "need at least one n"));
    }
    let nu_scale = base.nu().powf(base.bellman.q - 2.0);
    let lambda = pair.lambda();
    let specs: Vec<ApproximantSpec> = ns.iter().map(|&n| base.clone().with_n(n)).collect();
    let batches = plan.exec.map_batches(plan.count, DEFAULT_BATCH, |b, len| {
        let mut rng = batch_rng(plan.seed, b);
        (0..len)
            .map(|i| {
                let spec = &specs[(b * DEFAULT_BATCH + i) % specs.len()];
                let n = spec.n as f64;
                let w = spec.bellman.perturb(sample_shell(&mut rng, 3.0 * n, 4.0 * n));
                let parts = spec.parts(&w);
                let scale = nu_scale * n.powf(p - 2.0);
                let c0 = parts.cut.hessian.norm() / scale;
                let bound = (p + spec.epsilon) * n.powf(p - 2.0) * lambda * nu_scale;
                let conv = sym_min(pair, &parts.convex.hessian) / bound;
                (parts.cut.hessian, parts.convex.hessian, c0, conv)
            })
            .collect::<Vec<_>>()
    });
    let samples: Vec<_> = batches.into_iter().flatten().collect();
    let c0_fit = samples.iter().map(|s| s.2).fold(0.0, f64::max);
    let convex_ratio_min = samples.iter().map(|s| s.3).fold(f64::INFINITY, f64::min);
    let annulus_min = |c: f64| {
        let mins = plan
            .exec
            .map_batches(samples.len(), DEFAULT_BATCH, |b, len| {
                samples[b * DEFAULT_BATCH..b * DEFAULT_BATCH + len]
                    .iter()
                    .map(|(h0, h1, _, _)| sym_min(pair, &(h0 + h1 * c)))
                    .fold(f64::INFINITY, f64::min)
            });
        mins.into_iter().fold(f64::INFINITY, f64::min)
    };
    for k in C1_MIN_EXPONENT..=C1_MAX_EXPONENT {
        let c = 2f64.powi(k);
        let m = annulus_min(c);
        if m >= 0.0 {
            return Ok(C1Calibration {
                nu: base.nu(),
                c1: Some(c),
                exponent: Some(k),
                samples: samples.len(),
                ns: ns.to_vec(),
                annulus_min: m,
                c0_fit,
                convex_ratio_min,
                verdict: Verdict::CertifiedNonnegativeWithMargin,
            });
        }
    }
    Ok(C1Calibration {
        nu: base.nu(),
        c1: None,
        exponent: None,
        samples: samples.len(),
        ns: ns.to_vec(),
        annulus_min: annulus_min(2f64.powi(C1_MAX_EXPONENT)),
        c0_fit,
        convex_ratio_min,
        verdict: Verdict::Inconclusive,
    })
}

/// Point with `|ω|` log-uniform in `[lo, hi]` and uniform direction.
pub fn sample_log_shell<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> [f64; 4] {
    let rho = (rng.random_range(lo.ln()..hi.ln())).exp();
    let u = unit_vector(rng, 4);
    [rho * u[0], rho * u[1], rho * u[2], rho * u[3]]
}

/// Sphere-normalized certification of `ℛ_{n,ν}` on `|ω| ∈ [ν/100, 6n]`.
pub fn certify_rn(spec: &ApproximantSpec, pair: &Pair, plan: SamplingPlan) -> Result<ConvexityCertificate> {
    let c1 = spec.c1.ok_or(Error::Uncalibrated)?;
    let (lo, hi) = (spec.nu() / 100.0, 6.0 * spec.n as f64);
    let mut cert = certify(
        plan,
        CertifyTask {
            region: "global",
            pair,
            normalization: Normalization::Sphere,
            threshold: 0.0,
            tolerance: 1e-9,
            sampler: |rng: &mut ChaCha8Rng| spec.bellman.perturb(sample_log_shell(rng, lo, hi)),
            hessian: |w: &[f64; 4]| Some(spec.parts(w).combine(c1).hessian),
        },
    );
    cert.parameters.insert("n".into(), spec.n as f64);
    cert.parameters.insert("nu".into(), spec.nu());
    cert.parameters.insert("C1".into(), c1);
    cert.parameters.insert("epsilon".into(), spec.epsilon);
    cert.parameters.insert("delta".into(), spec.bellman.delta);
    Ok(cert)
}

/// Sphere-normalized check of `P_p` over `|ω|` log-uniform in `[1e-3, 1e3]`.
pub fn certify_p_mix(p: f64, pair: &Pair, plan: SamplingPlan) -> ConvexityCertificate {
    let mix = p_mix(pair, p);
    certify(
        plan,
        CertifyTask {
            region: "R4",
            pair,
            normalization: Normalization::Sphere,
            threshold: 0.0,
            tolerance: 1e-9,
            sampler: |rng: &mut ChaCha8Rng| sample_log_shell(rng, 1e-3, 1e3),
            hessian: |w: &[f64; 4]| Some(mix.eval(w).hessian),
        },
    )
}

/// Sphere-normalized check of `F_p` on unit points of `S_κ = {|ζ| ≤ |η|/κ} ∪ {|η| ≤ |ζ|/κ}`.
pub fn certify_power_on_s_kappa(p: f64, kappa: f64, pair: &Pair, plan: SamplingPlan) -> ConvexityCertificate {
    let power = PowerMix {
        profile: PowerProfile(p),
        big_k: 0.0,
    };
    certify(
        plan,
        CertifyTask {
            region: "S_kappa",
            pair,
            normalization: Normalization::Sphere,
            threshold: 0.0,
            tolerance: 1e-9,
            sampler: |rng: &mut ChaCha8Rng| {
                // the smaller block has modulus at most 1/κ times the larger
                let ratio = rng.random::<f64>() / kappa.max(1.0);
                let big = 1.0 / (1.0 + ratio * ratio).sqrt();
                let small = ratio * big;
                let (a, b) = (polar(rng, big), polar(rng, small));
                if rng.random::<bool>() {
                    [a[0], a[1], b[0], b[1]]
                } else {
                    [b[0], b[1], a[0], a[1]]
                }
            },
            hessian: |w: &[f64; 4]| Some(power.eval(w).hessian),
        },
    )
}

/// Minimum over sampled `|ω| > n` of the sphere-normalized `𝒫_n` form minus `(p+ε)n^{p-2}λ`.
pub fn p_n_outer_margin(spec: &ApproximantSpec, pair: &Pair, plan: SamplingPlan) -> (f64, [f64; 4]) {
    let n = spec.n as f64;
    let bound = (spec.bellman.p + spec.epsilon) * n.powf(spec.bellman.p - 2.0) * pair.lambda();
    let mix = spec.p_n();
    plan.exec
        .map_batches(plan.count, DEFAULT_BATCH, |b, len| {
            let mut rng = batch_rng(plan.seed, b);
            (0..len)
                .map(|_| {
                    let w = sample_log_shell(&mut rng, n * (1.0 + 1e-12), 100.0 * n);
                    (sym_min(pair, &mix.eval(&w).hessian) - bound, w)
                })
                .fold((f64::INFINITY, [0.0; 4]), |a, c| if c.0 < a.0 { c } else { a })
        })
        .into_iter()
        .fold((f64::INFINITY, [0.0; 4]), |a, c| if c.0 < a.0 { c } else { a })
}

/// Fitted `max |D F(ω)| / (|ω|^{a} + |ω|^{b})` over the given points.
pub fn growth_constant<F>(points: &[[f64; 4]], a: f64, b: f64, gradient: F) -> f64
where
    F: Fn(&[f64; 4]) -> Vector4<f64>,
{
    points
        .iter()
        .map(|w| {
            let r = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            gradient(w).norm() / (r.powf(a) + r.powf(b))
        })
        .fold(0.0, f64::max)
}

pub fn annulus_verdict(min: f64) -> Verdict {
    verdict_for(min, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ComplexMatrix;
    use crate::exec::Exec;

    fn fd_check<P: Profile>(f: &P, t: f64) {
        let h = 1e-6 * t.max(1.0);
        let (_, d1, d2) = f.eval(t);
        let (vp, d1p, _) = f.eval(t + h);
        let (vm, d1m, _) = f.eval(t - h);
        assert!(((vp - vm) / (2.0 * h) - d1).abs() < 1e-6 * (1.0 + d1.abs()));
        assert!(((d1p - d1m) / (2.0 * h) - d2).abs() < 1e-5 * (1.0 + d2.abs()));
    }

    #[test]
    fn truncated_power_is_c1() {
        for (n, p, eps) in [(1.0, 2.5, 0.3), (4.0, 3.0, 1.0), (2.0, 8.0, 0.05)] {
            let f = TruncatedPower { n, p, epsilon: eps };
            let r = p + eps;
            let inner = n.powf(-eps) * n.powf(r);
            let outer = 0.5 * r * n.powf(p - 2.0) * n * n + (1.0 - 0.5 * r) * n.powf(p);
            assert!((inner - n.powf(p)).abs() <= 1e-12 * n.powf(p));
            assert!((outer - n.powf(p)).abs() <= 1e-12 * n.powf(p));
            let d_in = r * n.powf(-eps) * n.powf(r - 1.0);
            let d_out = r * n.powf(p - 2.0) * n;
            assert!((d_in - d_out).abs() <= 1e-12 * d_out);
            for t in [0.3 * n, 0.9 * n, 1.5 * n, 7.0 * n] {
                fd_check(&f, t);
            }
        }
    }

    #[test]
    fn cutoff_profile() {
        let c = Cutoff { n: 2.0 };
        assert_eq!(c.eval(5.9).0, 1.0);
        assert_eq!(c.eval(8.1).0, 0.0);
        for t in [6.1, 6.9, 7.5, 7.99] {
            fd_check(&c, t);
        }
        let (v, d1, d2) = c.eval(6.0 + 1e-9);
        assert!((v - 1.0).abs() < 1e-12 && d1.abs() < 1e-12 && d2.abs() < 1e-6);
    }

    #[test]
    fn mixture_hessian_matches_differences() {
        let mix = PowerMix {
            profile: PowerProfile(3.3),
            big_k: 2.5,
        };
        let w = [0.4, -0.2, 0.9, 0.3];
        let s = mix.eval(&w);
        for j in 0..4 {
            let mut wp = w;
            let mut wm = w;
            wp[j] += 1e-6;
            wm[j] -= 1e-6;
            let col = (mix.eval(&wp).gradient - mix.eval(&wm).gradient) / 2e-6;
            for i in 0..4 {
                assert!((col[i] - s.hessian[(i, j)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn epsilon_and_constants() {
        let pair = Pair::new(ComplexMatrix::rotation(1, 0.9), ComplexMatrix::identity(1)).unwrap();
        let eps = choose_epsilon(&pair, 3.0).unwrap();
        assert!(eps > 0.0 && eps <= 1.0);
        assert!(pair.delta_p(3.0 + eps) > 0.5 * pair.delta_p(3.0));
        let (kappa, big_k) = kappa_and_k(&pair, 3.0 + eps);
        assert!(kappa > 1.0 && big_k == (2.0 * kappa).powf(2.0 + eps));
        let bad = Pair::new(ComplexMatrix::rotation(1, 1.3), ComplexMatrix::identity(1)).unwrap();
        assert!(choose_epsilon(&bad, 3.0).is_err());
    }

    #[test]
    fn p_mix_convex_small_sample() {
        let pair = Pair::new(ComplexMatrix::rotation(2, 0.5), ComplexMatrix::identity(2)).unwrap();
        let plan = SamplingPlan {
            seed: 1,
            count: 2000,
            exec: Exec::Parallel,
        };
        let cert = certify_p_mix(3.0, &pair, plan);
        assert!(cert.passed(), "{}", cert.min_normalized_form);
    }
}
