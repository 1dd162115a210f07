//! Contractivity, bilinear embedding and Bellman heat-flow experiments.

use serde::{Deserialize, Serialize};

use super::data::{random_data, sample_enveloped, InitialData};
use super::domain::{DomainDescriptor, GridDomain};
use super::operator::{lp_norm, CellLayout, Operator};
use super::stepping::{check_times, geometric_times, richardson_error, Batch, Propagator, StepPolicy};
use crate::algebra::{conjugate_exponent, delta_p_field, from_real_vec, ComplexMatrix, ELLIPTICITY_FLOOR};
use crate::bellman::Pair;
use crate::exec::{batch_rng, Exec};
use crate::{Error, Result, C64};

/// Envelope width, as a fraction of the domain extent, applied near Dirichlet walls.
const ENVELOPE_FRACTION: f64 = 0.1;
/// States evolved together in one batch.
const CHUNK: usize = 32;

/// A domain and the matrices laid out over it, for each of `A` and `B`.
#[derive(Clone, Debug)]
pub struct Setup {
    pub domain: DomainDescriptor,
    pub layout: CellLayout,
    pub a: Vec<ComplexMatrix>,
    pub b: Vec<ComplexMatrix>,
}

/// One discretization level of a [`Setup`].
#[derive(Clone, Debug)]
pub struct Level {
    pub domain: GridDomain,
    pub op_a: Operator,
    pub op_b: Operator,
}

impl Setup {
    pub fn new(domain: DomainDescriptor, layout: CellLayout, a: Vec<ComplexMatrix>) -> Self {
        let b = a.clone();
        Self { domain, layout, a, b }
    }

    pub fn with_b(mut self, b: Vec<ComplexMatrix>) -> Self {
        self.b = b;
        self
    }

    /// Builds the level with mesh width `h / 2^refinements`.
    pub fn level(&self, refinements: u32) -> Result<Level> {
        let mut desc = self.domain.clone();
        for _ in 0..refinements {
            desc = desc.refined();
        }
        let domain = GridDomain::build(&desc)?;
        let op_a = Operator::assemble(&domain, &self.layout.spread(&domain, &self.a)?)?;
        let op_b = Operator::assemble(&domain, &self.layout.spread(&domain, &self.b)?)?;
        Ok(Level { domain, op_a, op_b })
    }

    /// Distinct `(A, B)` cell pairs.
    pub fn pairs(&self, level: &Level) -> Result<Vec<Pair>> {
        let mut out: Vec<Pair> = Vec::new();
        for (a, b) in level.op_a.field().cells().iter().zip(level.op_b.field().cells()) {
            if !out.iter().any(|p| &p.a == a && &p.b == b) {
                out.push(Pair::new(a.clone(), b.clone())?);
            }
        }
        Ok(out)
    }
}

fn extent(domain: &GridDomain) -> f64 {
    let xs = domain.unknown_coords();
    let span = |k: usize| {
        let (lo, hi) = xs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x[k]), hi.max(x[k])));
        hi - lo
    };
    span(0).max(span(1)).max(domain.h())
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::param("p", format!("must be > 1, got {p}")))
    }
}

/// Evolves states in chunks and maps every `(time index, state)` through `f`.
fn evolve_map<T, F>(op: &Operator, policy: StepPolicy, states: &[Vec<C64>], times: &[f64], exec: Exec, f: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(usize, &[C64]) -> T + Sync + Send,
{
    let chunks = states.len().div_ceil(CHUNK);
    let per_chunk = exec.map(chunks, |c| -> Result<Vec<Vec<T>>> {
        let part = &states[c * CHUNK..((c + 1) * CHUNK).min(states.len())];
        let mut prop = Propagator::new(op, policy)?;
        let mut batch = Batch::from_states(part)?;
        let mut now = 0.0;
        let mut rows: Vec<Vec<T>> = (0..part.len()).map(|_| Vec::with_capacity(times.len())).collect();
        for (k, &t) in times.iter().enumerate() {
            prop.advance(&mut batch, t - now)?;
            now = t;
            for (r, row) in rows.iter_mut().enumerate() {
                row.push(f(k, &batch.state(r)));
            }
        }
        Ok(rows)
    });
    let mut out = Vec::with_capacity(states.len());
    for chunk in per_chunk {
        out.extend(chunk?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractivityConfig {
    pub p: f64,
    #[serde(default = "default_contract_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Exponential states aligned with the worst direction of the field.
    #[serde(default = "default_adversarial")]
    pub adversarial: usize,
    #[serde(default = "default_contract_tol")]
    pub tolerance: f64,
    /// Constant `C` of the discretization allowance `C h`.
    #[serde(default)]
    pub allowance: f64,
    #[serde(default = "yes")]
    pub refine: bool,
    #[serde(default)]
    pub policy: StepPolicy,
}

fn default_contract_times() -> Vec<f64> {
    geometric_times(1e-4, 1e-2, 20)
}
fn default_samples() -> usize {
    50
}
fn default_adversarial() -> usize {
    4
}
fn default_contract_tol() -> f64 {
    1e-6
}
fn yes() -> bool {
    true
}

impl ContractivityConfig {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            times: default_contract_times(),
            samples: default_samples(),
            adversarial: default_adversarial(),
            tolerance: default_contract_tol(),
            allowance: 0.0,
            refine: true,
            policy: StepPolicy::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContractivityVerdict {
    Pass,
    Violation,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractivityReport {
    pub p: f64,
    pub delta_p: f64,
    pub h: f64,
    pub unknowns: usize,
    pub samples: usize,
    pub adversarial: usize,
    pub times: Vec<f64>,
    /// Largest `‖T_t f‖_p / ‖f‖_p` over all states, per time.
    pub max_ratio_by_time: Vec<f64>,
    pub max_ratio: f64,
    pub worst_time: f64,
    pub worst_state: usize,
    pub tolerance: f64,
    pub allowance: f64,
    /// Real generator with nonpositive off-diagonal entries and nonnegative row and
    /// column sums: the discrete flow is then an exact contraction on every `L^p`.
    pub positivity_preserving: bool,
    pub refined_max_ratio: Option<f64>,
    /// Richardson estimate of the time-stepping error for the worst state at the last time.
    pub step_error: Option<f64>,
    pub verdict: ContractivityVerdict,
}

fn positivity_preserving(op: &Operator) -> bool {
    let l = op.generator();
    let n = l.dim();
    let scale = l.max_diagonal().max(1.0);
    let mut col = vec![0.0; n];
    for i in 0..n {
        let mut row = 0.0;
        for (c, v) in l.row(i) {
            if v.im != 0.0 || (c != i && v.re > 0.0) {
                return false;
            }
            row += v.re;
            col[c] += v.re;
        }
        if row < -1e-12 * scale {
            return false;
        }
    }
    col.iter().all(|&c| c >= -1e-12 * scale)
}

/// Initial data for the contractivity run: random mixtures, then exponentials
/// `exp(s w·x)` with `w` the direction where `Δ_p` is attained.
fn contract_data(domain: &GridDomain, cfg: &ContractivityConfig, seed: u64, direction: &[f64]) -> Vec<InitialData> {
    let mut out: Vec<InitialData> = (0..cfg.samples)
        .map(|k| random_data(&mut batch_rng(seed, k), domain))
        .collect();
    let w = from_real_vec(direction);
    let ext = extent(domain);
    for k in 0..cfg.adversarial {
        let s = 2f64.powi(k as i32 + 1) / ext;
        let mut rate: Vec<[f64; 2]> = w.iter().map(|z| [s * z.re, s * z.im]).collect();
        rate.resize(2, [0.0, 0.0]);
        out.push(InitialData::Exponential { rate });
    }
    out
}

fn ratio_table(level: &Level, data: &[InitialData], cfg: &ContractivityConfig, exec: Exec) -> Result<Vec<Vec<f64>>> {
    let w = level.domain.node_weight();
    let states: Vec<Vec<C64>> = data.iter().map(|d| d.sample(&level.domain)).collect();
    let norms: Vec<f64> = states.iter().map(|s| lp_norm(s, cfg.p, w)).collect();
    let raw = evolve_map(&level.op_a, cfg.policy, &states, &cfg.times, exec, |_, u| lp_norm(u, cfg.p, w))?;
    Ok(raw
        .into_iter()
        .zip(norms)
        .map(|(row, n0)| row.into_iter().map(|n| if n0 > 0.0 { n / n0 } else { 0.0 }).collect())
        .collect())
}

fn worst(table: &[Vec<f64>]) -> (f64, usize, usize) {
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (s, row) in table.iter().enumerate() {
        for (k, &r) in row.iter().enumerate() {
            if r > best.0 {
                best = (r, k, s);
            }
        }
    }
    best
}

/// Largest `L^p` growth ratio of the discrete semigroup over random and adversarial data.
pub fn contractivity(setup: &Setup, cfg: &ContractivityConfig, seed: u64, exec: Exec) -> Result<ContractivityReport> {
    check_exponent(cfg.p)?;
    check_times(&cfg.times)?;
    let level = setup.level(0)?;
    let ell = delta_p_field(level.op_a.field(), cfg.p)?;
    let data = contract_data(&level.domain, cfg, seed, &ell.minimizer);
    let table = ratio_table(&level, &data, cfg, exec)?;
    let by_time: Vec<f64> = (0..cfg.times.len())
        .map(|k| table.iter().map(|r| r[k]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let (max_ratio, k, s) = worst(&table);
    let h = level.domain.h();
    let exceeds = |ratio: f64, h: f64| ratio > 1.0 + cfg.tolerance + cfg.allowance * h;
    let mut refined = None;
    let verdict = if !exceeds(max_ratio, h) {
        if ell.delta >= -ELLIPTICITY_FLOOR {
            ContractivityVerdict::Pass
        } else {
            ContractivityVerdict::Inconclusive
        }
    } else if cfg.refine {
        let fine = setup.level(1)?;
        let early = ContractivityConfig {
            times: cfg.times[..=k].to_vec(),
            ..cfg.clone()
        };
        let t = ratio_table(&fine, &data[s..=s], &early, exec)?;
        let r = t[0].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        refined = Some(r);
        if exceeds(r, fine.domain.h()) {
            ContractivityVerdict::Violation
        } else {
            ContractivityVerdict::Inconclusive
        }
    } else {
        ContractivityVerdict::Inconclusive
    };
    let step_error = if Propagator::new(&level.op_a, cfg.policy)?.is_dense() {
        None
    } else {
        Some(richardson_error(
            &level.op_a,
            cfg.policy,
            &data[s].sample(&level.domain),
            *cfg.times.last().unwrap_or(&0.0),
        )?)
    };
    Ok(ContractivityReport {
        p: cfg.p,
        delta_p: ell.delta,
        h,
        unknowns: level.op_a.dim(),
        samples: cfg.samples,
        adversarial: cfg.adversarial,
        times: cfg.times.clone(),
        max_ratio_by_time: by_time,
        max_ratio,
        worst_time: cfg.times[k],
        worst_state: s,
        tolerance: cfg.tolerance,
        allowance: cfg.allowance,
        positivity_preserving: positivity_preserving(&level.op_a),
        refined_max_ratio: refined,
        step_error,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilinearConfig {
    pub p: f64,
    #[serde(default = "default_samples")]
    pub pairs: usize,
    /// Integration horizon; defaults to `gap_multiple / spectral gap`.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_gap_multiple")]
    pub gap_multiple: f64,
    #[serde(default = "yes")]
    pub refine: bool,
    /// Upper bound the ratios must respect, when given.
    #[serde(default)]
    pub bound: Option<f64>,
    #[serde(default = "default_drift")]
    pub max_drift: f64,
}

fn default_gap_multiple() -> f64 {
    10.0
}
fn default_drift() -> f64 {
    0.1
}

impl BilinearConfig {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            pairs: default_samples(),
            t_max: None,
            gap_multiple: default_gap_multiple(),
            refine: true,
            bound: None,
            max_drift: default_drift(),
        }
    }
}

pub const SCALE_CHECK: f64 = 1e3;
pub const SCALE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearReport {
    pub p: f64,
    pub q: f64,
    pub h: f64,
    pub spectral_gap: f64,
    pub t_max: f64,
    pub steps: usize,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// Largest share of a ratio coming from the exponential tail beyond `t_max`.
    pub tail_share: f64,
    pub refined_ratios: Option<Vec<f64>>,
    pub drift: Option<f64>,
    /// Relative change of the first ratio under `(f, g) ↦ (s f, g / s)`.
    pub scale_error: f64,
    /// Means were subtracted from the data because the domain is pure Neumann.
    pub mean_free: bool,
    pub bound: Option<f64>,
    pub passed: bool,
}

/// Smallest real part of the spectrum of `L`, by shifted inverse iteration.
/// On pure Neumann domains constants are projected out, giving the gap on mean-free data.
pub fn spectral_gap(op: &Operator) -> Result<f64> {
    let shift = 1e6;
    let lu = super::sparse::BandLu::factor_shifted(op.generator(), shift)?;
    let n = op.dim();
    let neumann = op.domain().is_pure_neumann();
    let mut x: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.0))
        .collect();
    for _ in 0..60 {
        if neumann {
            remove_mean(&mut x);
        }
        lu.solve(&mut x);
        if neumann {
            remove_mean(&mut x);
        }
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Singular("inverse iteration collapsed"));
        }
        x.iter_mut().for_each(|z| *z /= norm);
    }
    let lx = op.generator().apply(&x);
    Ok(x.iter().zip(&lx).map(|(a, b)| (b * a.conj()).re).sum::<f64>())
}

fn remove_mean(x: &mut [C64]) {
    let mean = x.iter().sum::<C64>() / x.len() as f64;
    x.iter_mut().for_each(|z| *z -= mean);
}

struct Integrals {
    ratios: Vec<f64>,
    tail_share: f64,
    steps: usize,
}

fn integrate_pairs(level: &Level, f: &[Vec<C64>], g: &[Vec<C64>], p: f64, t_max: f64, exec: Exec) -> Result<Integrals> {
    let q = conjugate_exponent(p);
    let w = level.domain.node_weight();
    let probe = Propagator::new(&level.op_a, StepPolicy::crank_nicolson())?;
    let dt_max = probe.dt_max().min(Propagator::new(&level.op_b, StepPolicy::crank_nicolson())?.dt_max());
    let steps = (t_max / dt_max).ceil() as usize;
    let dt = t_max / steps as f64;
    let knee = (steps as f64 * 0.9).round() as usize;
    let chunks = f.len().div_ceil(CHUNK);
    let parts = exec.map(chunks, |c| -> Result<Vec<(f64, f64)>> {
        let range = c * CHUNK..((c + 1) * CHUNK).min(f.len());
        let policy = StepPolicy {
            dt_max: Some(dt_max),
            ..StepPolicy::crank_nicolson()
        };
        let mut pa = Propagator::new(&level.op_a, policy)?;
        let mut pb = Propagator::new(&level.op_b, policy)?;
        let mut bu = Batch::from_states(&f[range.clone()])?;
        let mut bv = Batch::from_states(&g[range.clone()])?;
        let m = range.len();
        let integrand = |bu: &Batch, bv: &Batch| -> Vec<f64> {
            (0..m)
                .map(|r| level.op_a.gradient_product_with(|i| bu.at(i, r), |i| bv.at(i, r)))
                .collect()
        };
        let mut prev = integrand(&bu, &bv);
        let mut total = vec![0.0; m];
        let mut at_knee = prev.clone();
        for step in 1..=steps {
            pa.advance(&mut bu, dt)?;
            pb.advance(&mut bv, dt)?;
            let cur = integrand(&bu, &bv);
            for r in 0..m {
                total[r] += 0.5 * dt * (prev[r] + cur[r]);
            }
            if step == knee {
                at_knee = cur.clone();
            }
            prev = cur;
        }
        let span = (steps - knee) as f64 * dt;
        Ok((0..m)
            .map(|r| {
                let rate = if prev[r] > 0.0 && at_knee[r] > prev[r] {
                    (at_knee[r] / prev[r]).ln() / span
                } else {
                    0.0
                };
                let tail = if rate > 0.0 { prev[r] / rate } else { 0.0 };
                (total[r] + tail, tail)
            })
            .collect())
    });
    let mut ratios = Vec::with_capacity(f.len());
    let mut tail_share = 0.0f64;
    let flat: Vec<(f64, f64)> = parts.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    for (k, (integral, tail)) in flat.into_iter().enumerate() {
        let denom = lp_norm(&f[k], p, w) * lp_norm(&g[k], q, w);
        ratios.push(if denom > 0.0 { integral / denom } else { 0.0 });
        if integral > 0.0 {
            tail_share = tail_share.max(tail / integral);
        }
    }
    Ok(Integrals {
        ratios,
        tail_share,
        steps,
    })
}

/// Random pairs; on pure Neumann domains the conserved means are subtracted.
fn pair_data(level: &Level, count: usize, seed: u64) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let width = ENVELOPE_FRACTION * extent(&level.domain);
    let neumann = level.domain.is_pure_neumann();
    (0..count)
        .map(|k| {
            let mut rng = batch_rng(seed, k);
            let f = random_data(&mut rng, &level.domain);
            let g = random_data(&mut rng, &level.domain);
            let mut f = sample_enveloped(&f, &level.domain, width);
            let mut g = sample_enveloped(&g, &level.domain, width);
            if neumann {
                remove_mean(&mut f);
                remove_mean(&mut g);
            }
            (f, g)
        })
        .unzip()
}

/// `∫₀^∞ Σ |∇T_t^A f| |∇T_t^B g| dt / (‖f‖_p ‖g‖_q)` over random pairs.
pub fn bilinear(setup: &Setup, cfg: &BilinearConfig, seed: u64, exec: Exec) -> Result<BilinearReport> {
    check_exponent(cfg.p)?;
    let level = setup.level(0)?;
    let gap = spectral_gap(&level.op_a)?.min(spectral_gap(&level.op_b)?);
    let t_max = match cfg.t_max {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(Error::param("t_max", format!("must be positive, got {t}"))),
        None if gap > 0.0 => cfg.gap_multiple / gap,
        None => return Err(Error::param("spectral gap", format!("decay rate {gap} is not positive"))),
    };
    let (f, g) = pair_data(&level, cfg.pairs, seed);
    let base = integrate_pairs(&level, &f, &g, cfg.p, t_max, exec)?;
    let scaled = integrate_pairs(
        &level,
        &[f[0].iter().map(|z| z * SCALE_CHECK).collect()],
        &[g[0].iter().map(|z| z / SCALE_CHECK).collect()],
        cfg.p,
        t_max,
        exec,
    )?;
    let scale_error = (scaled.ratios[0] - base.ratios[0]).abs() / base.ratios[0].abs().max(f64::MIN_POSITIVE);
    let (refined_ratios, drift) = if cfg.refine {
        let fine = setup.level(1)?;
        let (ff, gg) = pair_data(&fine, cfg.pairs, seed);
        let r = integrate_pairs(&fine, &ff, &gg, cfg.p, t_max, exec)?;
        let drift = base
            .ratios
            .iter()
            .zip(&r.ratios)
            .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        (Some(r.ratios), Some(drift))
    } else {
        (None, None)
    };
    let max_ratio = base.ratios.iter().copied().fold(0.0, f64::max);
    let mean_ratio = base.ratios.iter().sum::<f64>() / base.ratios.len() as f64;
    let passed = scale_error <= SCALE_TOL
        && drift.is_none_or(|d| d < cfg.max_drift)
        && cfg.bound.is_none_or(|b| max_ratio <= b)
        && max_ratio.is_finite();
    Ok(BilinearReport {
        p: cfg.p,
        q: conjugate_exponent(cfg.p),
        h: level.domain.h(),
        spectral_gap: gap,
        t_max,
        steps: base.steps,
        ratios: base.ratios,
        max_ratio,
        mean_ratio,
        tail_share: base.tail_share,
        refined_ratios,
        drift,
        scale_error,
        mean_free: level.domain.is_pure_neumann(),
        bound: cfg.bound,
        passed,
    })
}
