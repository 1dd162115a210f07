//! Time stepping: dense matrix exponentials for small systems, Crank–Nicolson otherwise.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::operator::Operator;
use super::sparse::BandLu;
use crate::{Error, Result, C64};

/// Largest system stepped with a dense exponential under [`Method::Auto`].
pub const DENSE_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Auto,
    Dense,
    CrankNicolson,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepPolicy {
    pub method: Method,
    /// Upper bound on the Crank–Nicolson step; defaults to the stability rule.
    pub dt_max: Option<f64>,
    pub dense_limit: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            dt_max: None,
            dense_limit: DENSE_LIMIT,
        }
    }
}

impl StepPolicy {
    pub fn crank_nicolson() -> Self {
        Self {
            method: Method::CrankNicolson,
            ..Self::default()
        }
    }

    pub fn dense() -> Self {
        Self {
            method: Method::Dense,
            ..Self::default()
        }
    }
}

/// Several states of one system, stored interleaved: entry `i` of state `r`
/// sits at `i * count + r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    n: usize,
    count: usize,
    data: Vec<C64>,
}

impl Batch {
    pub fn from_states(states: &[Vec<C64>]) -> Result<Self> {
        let count = states.len();
        let n = states.first().map_or(0, Vec::len);
        if count == 0 || n == 0 {
            return Err(Error::param("states", "need at least one nonempty state"));
        }
        if let Some(bad) = states.iter().find(|s| s.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let mut data = vec![C64::new(0.0, 0.0); n * count];
        for (r, s) in states.iter().enumerate() {
            for (i, v) in s.iter().enumerate() {
                data[i * count + r] = *v;
            }
        }
        Ok(Self { n, count, data })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Entry `i` of state `r`.
    pub fn at(&self, i: usize, r: usize) -> C64 {
        self.data[i * self.count + r]
    }

    pub fn state(&self, r: usize) -> Vec<C64> {
        (0..self.n).map(|i| self.data[i * self.count + r]).collect()
    }

    pub fn states(&self) -> Vec<Vec<C64>> {
        (0..self.count).map(|r| self.state(r)).collect()
    }
}

enum Step {
    Dense(DMatrix<C64>),
    Cn(BandLu),
}

pub struct Propagator<'a> {
    op: &'a Operator,
    dense: bool,
    dt_max: f64,
    cache: HashMap<u64, Step>,
}

impl<'a> Propagator<'a> {
    pub fn new(op: &'a Operator, policy: StepPolicy) -> Result<Self> {
        let n = op.dim();
        let dense = match policy.method {
            Method::Dense => true,
            Method::CrankNicolson => false,
            Method::Auto => n <= policy.dense_limit,
        };
        let h = op.domain().h();
        let diag = op.generator().max_diagonal();
        let rule = (h * h / 4.0).min(if diag > 0.0 { 2.0 / diag } else { f64::INFINITY });
        let dt_max = match policy.dt_max {
            Some(dt) if dt > 0.0 => dt.min(rule),
            Some(dt) => return Err(Error::param("dt_max", format!("must be positive, got {dt}"))),
            None => rule,
        };
        Ok(Self {
            op,
            dense,
            dt_max,
            cache: HashMap::new(),
        })
    }

    pub fn is_dense(&self) -> bool {
        self.dense
    }

    pub fn dt_max(&self) -> f64 {
        self.dt_max
    }

    /// Number of Crank–Nicolson substeps used for an increment.
    pub fn substeps(&self, dt: f64) -> usize {
        (dt / self.dt_max * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    /// Advances every state by `dt`.
    pub fn advance(&mut self, batch: &mut Batch, dt: f64) -> Result<()> {
        if dt == 0.0 {
            return Ok(());
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        if self.dense {
            let step = self.step_for(dt)?;
            let Step::Dense(e) = step else { unreachable!() };
            let (n, count) = (batch.n, batch.count);
            let mut out = vec![C64::new(0.0, 0.0); n * count];
            for i in 0..n {
                let row = &mut out[i * count..(i + 1) * count];
                for k in 0..n {
                    let eik = e[(i, k)];
                    let src = &batch.data[k * count..(k + 1) * count];
                    row.iter_mut().zip(src).for_each(|(a, b)| *a += eik * b);
                }
            }
            batch.data = out;
            return Ok(());
        }
        let m = self.substeps(dt);
        let sub = dt / m as f64;
        let tau = sub / 2.0;
        self.step_for(sub)?;
        let Some(Step::Cn(lu)) = self.cache.get(&sub.to_bits()) else { unreachable!() };
        let l = self.op.generator();
        let count = batch.count;
        let mut rhs = vec![C64::new(0.0, 0.0); batch.data.len()];
        for _ in 0..m {
            for i in 0..batch.n {
                let out = &mut rhs[i * count..(i + 1) * count];
                out.copy_from_slice(&batch.data[i * count..(i + 1) * count]);
                for (c, v) in l.row(i) {
                    let f = -v * tau;
                    let src = &batch.data[c * count..(c + 1) * count];
                    out.iter_mut().zip(src).for_each(|(a, b)| *a += f * b);
                }
            }
            lu.solve_many(&mut rhs, count);
            std::mem::swap(&mut batch.data, &mut rhs);
        }
        Ok(())
    }

    fn step_for(&mut self, dt: f64) -> Result<&Step> {
        let key = dt.to_bits();
        if !self.cache.contains_key(&key) {
            let step = if self.dense {
                let l = self.op.generator().to_dense();
                Step::Dense((l * C64::new(-dt, 0.0)).exp())
            } else {
                let lu = BandLu::factor_shifted(self.op.generator(), dt / 2.0)?;
                check_residual(self.op, &lu, dt / 2.0)?;
                Step::Cn(lu)
            };
            self.cache.insert(key, step);
        }
        Ok(&self.cache[&key])
    }
}

/// Residual of a solve against a fixed right-hand side; large values mean the
/// unpivoted factorization broke down.
fn check_residual(op: &Operator, lu: &BandLu, shift: f64) -> Result<()> {
    let n = op.dim();
    let b: Vec<C64> = (0..n).map(|i| C64::new(1.0, (i % 7) as f64 * 0.1)).collect();
    let mut x = b.clone();
    lu.solve(&mut x);
    let lx = op.generator().apply(&x);
    let residual = x
        .iter()
        .zip(&lx)
        .zip(&b)
        .map(|((xi, li), bi)| (xi + li * shift - bi).norm())
        .fold(0.0, f64::max);
    if residual.is_finite() && residual <= RESIDUAL_TOL {
        Ok(())
    } else {
        Err(Error::SolverBreakdown { residual })
    }
}

/// Largest acceptable residual of the shifted solve.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Richardson estimate of the Crank–Nicolson error at time `t`: the largest
/// nodal difference between steps `Δt` and `Δt/2`, relative to the solution size.
pub fn richardson_error(op: &Operator, policy: StepPolicy, initial: &[C64], t: f64) -> Result<f64> {
    let coarse_policy = StepPolicy {
        method: Method::CrankNicolson,
        ..policy
    };
    let dt = Propagator::new(op, coarse_policy)?.dt_max();
    let fine_policy = StepPolicy {
        dt_max: Some(dt / 2.0),
        ..coarse_policy
    };
    let state = [initial.to_vec()];
    let a = evolve(op, coarse_policy, &state, &[t])?;
    let b = evolve(op, fine_policy, &state, &[t])?;
    let scale = b[0][0].iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    Ok(a[0][0].iter().zip(&b[0][0]).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale)
}

/// Evolves every initial state and returns `result[k][r]`, state `r` at `times[k]`.
pub fn evolve(op: &Operator, policy: StepPolicy, initial: &[Vec<C64>], times: &[f64]) -> Result<Vec<Vec<Vec<C64>>>> {
    check_times(times)?;
    let mut prop = Propagator::new(op, policy)?;
    let mut batch = Batch::from_states(initial)?;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        prop.advance(&mut batch, t - now)?;
        now = t;
        out.push(batch.states());
    }
    Ok(out)
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::param("times", "must not be empty"));
    }
    if times[0] < 0.0 || times.windows(2).any(|w| !(w[1] >= w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::param("times", "must be finite, nonnegative and nondecreasing"));
    }
    Ok(())
}

/// `count` times spaced geometrically on `[first, last]`.
pub fn geometric_times(first: f64, last: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![last];
    }
    let r = (last / first).ln() / (count - 1) as f64;
    (0..count).map(|k| first * (r * k as f64).exp()).collect()
}
