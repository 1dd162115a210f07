//! Bellman energy along the heat flow of a pair of operators.

use serde::{Deserialize, Serialize};

use super::data::{random_data, sample_enveloped};
use super::experiments::{Level, Setup};
use super::operator::lp_norm;
use super::stepping::{check_times, geometric_times, Batch, Propagator, StepPolicy};
use crate::algebra::{conjugate_exponent, to_real_vec};
use crate::bellman::certify::bellman_threshold;
use crate::bellman::{calibrate_delta, BellmanSpec, Pair, SamplingPlan};
use crate::exec::{batch_rng, Exec};
use crate::{Error, Result, C64};

/// Norms, energy and bilinear density of `(T_t^A f, T_t^B g)` at a list of times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub p: f64,
    pub q: f64,
    pub times: Vec<f64>,
    /// `Σ_i 𝒬(u_i, v_i) h^d`, when a Bellman function was supplied.
    pub energy: Vec<Option<f64>>,
    pub norm_p: Vec<f64>,
    pub norm_q: Vec<f64>,
    /// `Σ_cells |∇u| |∇v| h^d`.
    pub bilinear: Vec<f64>,
}

impl FlowTrace {
    fn new(p: f64) -> Self {
        Self {
            p,
            q: conjugate_exponent(p),
            times: vec![],
            energy: vec![],
            norm_p: vec![],
            norm_q: vec![],
            bilinear: vec![],
        }
    }

    fn record(&mut self, obs: &Observer<'_>, t: f64, u: &[C64], v: &[C64]) {
        let w = obs.level.domain.node_weight();
        self.times.push(t);
        self.energy.push(obs.spec.as_ref().map(|_| obs.energy(u, v)));
        self.norm_p.push(lp_norm(u, self.p, w));
        self.norm_q.push(lp_norm(v, self.q, w));
        self.bilinear.push(obs.level.op_a.gradient_product(u, v));
    }

    /// `(t, E, ‖u‖_p, ‖v‖_q, bilinear)` per recorded time.
    pub fn rows(&self) -> impl Iterator<Item = (f64, Option<f64>, f64, f64, f64)> + '_ {
        (0..self.times.len()).map(|k| (self.times[k], self.energy[k], self.norm_p[k], self.norm_q[k], self.bilinear[k]))
    }
}

struct Observer<'a> {
    level: &'a Level,
    spec: Option<BellmanSpec>,
    pairs: Vec<Pair>,
    thresholds: Vec<f64>,
    cell_pair: Vec<usize>,
}

fn point(u: C64, v: C64) -> [f64; 4] {
    [u.re, u.im, v.re, v.im]
}

impl<'a> Observer<'a> {
    fn new(level: &'a Level, spec: Option<BellmanSpec>, pairs: Vec<Pair>, p: f64) -> Self {
        let cell_pair = level
            .op_a
            .field()
            .cells()
            .iter()
            .zip(level.op_b.field().cells())
            .map(|(a, b)| pairs.iter().position(|pr| &pr.a == a && &pr.b == b).unwrap_or(0))
            .collect();
        let thresholds = pairs.iter().map(|pr| bellman_threshold(pr, p)).collect();
        Self {
            level,
            spec,
            pairs,
            thresholds,
            cell_pair,
        }
    }

    fn spec(&self) -> &BellmanSpec {
        self.spec.as_ref().expect("observer without Bellman function")
    }

    fn energy(&self, u: &[C64], v: &[C64]) -> f64 {
        let spec = self.spec();
        u.iter().zip(v).map(|(a, b)| spec.value(&point(*a, *b))).sum::<f64>() * self.level.domain.node_weight()
    }

    /// `-E'(t) = Σ_i 2 Re[∂_ζ𝒬 (L^A u)_i + ∂_η𝒬 (L^B v)_i] h^d`.
    fn dissipation(&self, u: &[C64], v: &[C64]) -> f64 {
        let spec = self.spec();
        let la = self.level.op_a.generator().apply(u);
        let lb = self.level.op_b.generator().apply(v);
        let mut total = 0.0;
        for i in 0..u.len() {
            let (dz, de) = spec.wirtinger(&point(u[i], v[i]));
            total += 2.0 * (dz * la[i] + de * lb[i]).re;
        }
        total * self.level.domain.node_weight()
    }

    /// Smallest `H_𝒬[(u,v); (∇u,∇v)] / (|∇u||∇v|) - threshold` over cells and corners
    /// away from the singular set, with the numbers of checked and skipped cells.
    fn cell_margin(&self, u: &[C64], v: &[C64]) -> (f64, usize, usize) {
        let spec = self.spec();
        let op = &self.level.op_a;
        let (cu, cv) = (op.cell_values(u), op.cell_values(v));
        let (gu, gv) = (op.cell_gradients(u), op.cell_gradients(v));
        let mut min = f64::INFINITY;
        let (mut checked, mut skipped) = (0, 0);
        for k in 0..cu.len() {
            let w = point(cu[k], cv[k]);
            let Some(hess) = spec.eval(&w).hessian else {
                skipped += 1;
                continue;
            };
            checked += 1;
            let pr = &self.pairs[self.cell_pair[k]];
            let g = pr.gen_hessian(&hess);
            for (x, y) in gu[k].iter().zip(&gv[k]) {
                let xi: Vec<f64> = to_real_vec(x).into_iter().chain(to_real_vec(y)).collect();
                let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let ny = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if nx * ny == 0.0 {
                    continue;
                }
                let mut form = 0.0;
                for i in 0..xi.len() {
                    for j in 0..xi.len() {
                        form += xi[i] * g[(i, j)] * xi[j];
                    }
                }
                min = min.min(form / (nx * ny) - self.thresholds[self.cell_pair[k]]);
            }
        }
        (min, checked, skipped)
    }
}

/// Records a [`FlowTrace`] for one pair of initial states.
pub fn flow_trace(
    level: &Level,
    u0: &[C64],
    v0: &[C64],
    times: &[f64],
    p: f64,
    delta: Option<f64>,
    policy: StepPolicy,
) -> Result<FlowTrace> {
    check_times(times)?;
    if u0.len() != level.op_a.dim() || v0.len() != level.op_b.dim() {
        return Err(Error::DimensionMismatch {
            expected: level.op_a.dim(),
            found: if u0.len() != level.op_a.dim() { u0.len() } else { v0.len() },
        });
    }
    let spec = delta.map(|d| BellmanSpec::new(p, d)).transpose()?;
    let obs = Observer::new(level, spec, vec![], p);
    let mut pa = Propagator::new(&level.op_a, policy)?;
    let mut pb = Propagator::new(&level.op_b, policy)?;
    let mut bu = Batch::from_states(&[u0.to_vec()])?;
    let mut bv = Batch::from_states(&[v0.to_vec()])?;
    let mut trace = FlowTrace::new(p);
    let mut now = 0.0;
    for &t in times {
        pa.advance(&mut bu, t - now)?;
        pb.advance(&mut bv, t - now)?;
        now = t;
        trace.record(&obs, t, &bu.state(0), &bv.state(0));
    }
    Ok(trace)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatFlowConfig {
    pub p: f64,
    /// Bellman parameter; calibrated over the cell pairs when absent.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Finite-difference step as a fraction of the time.
    #[serde(default = "default_fd")]
    pub fd_relative: f64,
    #[serde(default = "default_fd_tol")]
    pub fd_tolerance: f64,
    #[serde(default = "default_calibration")]
    pub calibration_samples: usize,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default)]
    pub policy: StepPolicy,
}

fn default_pairs() -> usize {
    4
}
fn default_times() -> Vec<f64> {
    geometric_times(1e-3, 1e-1, 12)
}
fn default_fd() -> f64 {
    1e-4
}
fn default_fd_tol() -> f64 {
    1e-4
}
fn default_calibration() -> usize {
    5000
}
fn default_tol() -> f64 {
    1e-9
}

impl HeatFlowConfig {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            delta: None,
            pairs: default_pairs(),
            times: default_times(),
            fd_relative: default_fd(),
            fd_tolerance: default_fd_tol(),
            calibration_samples: default_calibration(),
            tolerance: default_tol(),
            policy: StepPolicy::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatFlowReport {
    pub p: f64,
    pub delta: f64,
    pub pairs: usize,
    pub dense: bool,
    /// Trace of the first pair.
    pub trace: FlowTrace,
    /// Largest relative increase of `E` between consecutive evaluations.
    pub max_increase: f64,
    pub monotone: bool,
    /// Largest relative gap between a centred difference of `E` and the dissipation formula.
    pub dissipation_error: f64,
    /// Smallest cell margin of the strict convexity bound.
    pub cell_margin: f64,
    pub cells_checked: usize,
    pub cells_skipped: usize,
    pub passed: bool,
}

/// Tracks `E(t) = Σ 𝒬(T_t^A f, T_t^B g) h^d` for random pairs and checks its dissipation.
pub fn heat_flow(setup: &Setup, cfg: &HeatFlowConfig, seed: u64, exec: Exec) -> Result<HeatFlowReport> {
    check_times(&cfg.times)?;
    if !(cfg.fd_relative > 0.0 && cfg.fd_relative < 0.5) {
        return Err(Error::param("fd_relative", "must lie in (0, 0.5)"));
    }
    if cfg.times[0] == 0.0 || cfg.times.windows(2).any(|w| w[1] * (1.0 - cfg.fd_relative) <= w[0] * (1.0 + cfg.fd_relative)) {
        return Err(Error::param("times", "must be positive and separated by more than the difference steps"));
    }
    let level = setup.level(0)?;
    let pairs = setup.pairs(&level)?;
    let delta = match cfg.delta {
        Some(d) => d,
        None => {
            let plan = SamplingPlan {
                seed,
                count: cfg.calibration_samples,
                exec,
            };
            let mut d = f64::INFINITY;
            for pr in &pairs {
                d = d.min(calibrate_delta(cfg.p, pr, plan)?.delta);
            }
            d
        }
    };
    let spec = BellmanSpec::new(cfg.p, delta)?;
    let obs = Observer::new(&level, Some(spec), pairs, cfg.p);
    let width = 0.1 * level.domain.h() * level.domain.shape().0 as f64;
    let (f, g): (Vec<Vec<C64>>, Vec<Vec<C64>>) = (0..cfg.pairs)
        .map(|k| {
            let mut rng = batch_rng(seed, k);
            let f = random_data(&mut rng, &level.domain);
            let g = random_data(&mut rng, &level.domain);
            (sample_enveloped(&f, &level.domain, width), sample_enveloped(&g, &level.domain, width))
        })
        .unzip();
    let mut pa = Propagator::new(&level.op_a, cfg.policy)?;
    let mut pb = Propagator::new(&level.op_b, cfg.policy)?;
    let dense = pa.is_dense();
    let mut bu = Batch::from_states(&f)?;
    let mut bv = Batch::from_states(&g)?;
    let n = cfg.pairs;
    let energies = |bu: &Batch, bv: &Batch| -> Vec<f64> { (0..n).map(|r| obs.energy(&bu.state(r), &bv.state(r))).collect() };
    let mut trace = FlowTrace::new(cfg.p);
    trace.record(&obs, 0.0, &f[0], &g[0]);
    let mut last = energies(&bu, &bv);
    let mut max_increase = f64::NEG_INFINITY;
    let mut fd_err = 0.0f64;
    let mut margin = f64::INFINITY;
    let (mut checked, mut skipped) = (0, 0);
    let mut now = 0.0;
    let mut bump = |e: &[f64], last: &mut Vec<f64>| {
        for (a, b) in e.iter().zip(last.iter()) {
            max_increase = max_increase.max((a - b) / b.abs().max(f64::MIN_POSITIVE));
        }
        *last = e.to_vec();
    };
    for &t in &cfg.times {
        let tau = cfg.fd_relative * t;
        pa.advance(&mut bu, t - tau - now)?;
        pb.advance(&mut bv, t - tau - now)?;
        let before = energies(&bu, &bv);
        bump(&before, &mut last);
        pa.advance(&mut bu, tau)?;
        pb.advance(&mut bv, tau)?;
        let centre = energies(&bu, &bv);
        bump(&centre, &mut last);
        let formula: Vec<f64> = (0..n).map(|r| obs.dissipation(&bu.state(r), &bv.state(r))).collect();
        for r in 0..n {
            let (m, c, s) = obs.cell_margin(&bu.state(r), &bv.state(r));
            margin = margin.min(m);
            checked += c;
            skipped += s;
        }
        trace.record(&obs, t, &bu.state(0), &bv.state(0));
        pa.advance(&mut bu, tau)?;
        pb.advance(&mut bv, tau)?;
        now = t + tau;
        let after = energies(&bu, &bv);
        bump(&after, &mut last);
        for r in 0..n {
            let fd = -(after[r] - before[r]) / (2.0 * tau);
            fd_err = fd_err.max((fd - formula[r]).abs() / formula[r].abs().max(f64::MIN_POSITIVE));
        }
    }
    let monotone = max_increase <= 1e-12;
    let passed = monotone && fd_err <= cfg.fd_tolerance;
    Ok(HeatFlowReport {
        p: cfg.p,
        delta,
        pairs: cfg.pairs,
        dense,
        trace,
        max_increase,
        monotone,
        dissipation_error: fd_err,
        cell_margin: margin,
        cells_checked: checked,
        cells_skipped: skipped,
        passed,
    })
}
