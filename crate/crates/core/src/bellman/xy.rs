//! Minimum of `⟨SΞ, Ξ⟩ / (|X||Y|)` over `Ξ = (X, Y)` with both blocks nonzero.
//!
//! For unit `x, y` and a positive scale between the blocks the ratio is
//! `t·a + 2c + b/t` with `a = ⟨Px,x⟩`, `b = ⟨Qy,y⟩`, `c = ⟨Ry,x⟩`, so the minimum over scales is
//! `2√(ab) + 2c` when both diagonal blocks are positive semidefinite and `-∞` otherwise.
//! The remaining problem on the product of spheres is solved by alternating exact
//! block updates, each a trust-region subproblem solved through the block's eigenbasis.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::sample::unit_vector;

/// Scale used to report a finite witness when a diagonal block is indefinite.
pub const UNBOUNDED_SCALE: f64 = 1e6;
const MAX_SWEEPS: usize = 50;
const STAGNATION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct XyMinimum {
    pub value: f64,
    /// Witness blocks, scaled so that the ratio at `(x, y)` equals `value`.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// A diagonal block is indefinite, so the true infimum is `-∞`.
    pub unbounded: bool,
}

struct Block {
    vals: DVector<f64>,
    vecs: DMatrix<f64>,
}

impl Block {
    fn new(m: DMatrix<f64>) -> Self {
        let e = SymmetricEigen::new(m);
        Self {
            vals: e.eigenvalues,
            vecs: e.eigenvectors,
        }
    }

    fn lowest(&self) -> (f64, DVector<f64>) {
        let i = self.vals.imin();
        (self.vals[i], self.vecs.column(i).into_owned())
    }
}

fn symmetric(h: &DMatrix<f64>) -> DMatrix<f64> {
    (h + h.transpose()) * 0.5
}

/// `⟨HΞ, Ξ⟩ / (|X||Y|)` for `Ξ = (x, y)`.
pub fn xy_ratio(h: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let xi = DVector::from_iterator(x.len() + y.len(), x.iter().chain(y).copied());
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    xi.dot(&(h * &xi)) / (nx * ny)
}

/// Minimizes `min scale·⟨Px,x⟩ + 2⟨x,r⟩` over the unit sphere.
fn trust_region(block: &Block, scale: f64, r: &DVector<f64>) -> DVector<f64> {
    let rt = block.vecs.transpose() * r;
    let lam: Vec<f64> = block.vals.iter().map(|v| scale * v).collect();
    let i1 = (0..lam.len())
        .min_by(|&a, &b| lam[a].total_cmp(&lam[b]))
        .expect("nonempty block");
    let l1 = lam[i1];
    let rn = rt.norm();
    if rn == 0.0 {
        return block.vecs.column(i1).into_owned();
    }
    let coef = |mu: f64| -> DVector<f64> {
        DVector::from_iterator(
            lam.len(),
            lam.iter().zip(rt.iter()).map(|(l, r)| {
                let d = l - mu;
                if d > 0.0 {
                    -r / d
                } else {
                    0.0
                }
            }),
        )
    };
    let (mut lo, mut hi) = (l1 - rn, l1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if coef(mid).norm_squared() > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut c = coef(lo);
    let n2 = c.norm_squared();
    if n2 < 1.0 {
        let fill = (1.0 - n2).sqrt();
        c[i1] += if rt[i1] > 0.0 { -fill } else { fill };
    }
    let x = &block.vecs * c;
    let n = x.norm();
    x / n
}

struct Problem {
    p: DMatrix<f64>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    pb: Block,
    qb: Block,
}

impl Problem {
    fn parts(&self, x: &DVector<f64>, y: &DVector<f64>) -> (f64, f64, f64) {
        (x.dot(&(&self.p * x)), y.dot(&(&self.q * y)), x.dot(&(&self.r * y)))
    }

    fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let (a, b, c) = self.parts(x, y);
        2.0 * (a.max(0.0) * b.max(0.0)).sqrt() + 2.0 * c
    }

    fn refine(&self, mut x: DVector<f64>, mut y: DVector<f64>) -> (f64, DVector<f64>, DVector<f64>) {
        let mut f = self.value(&x, &y);
        for _ in 0..MAX_SWEEPS {
            let (a, b, _) = self.parts(&x, &y);
            let rho = (b.max(0.0) / a.max(1e-300)).sqrt().clamp(1e-12, 1e12);
            let nx = trust_region(&self.pb, rho, &(&self.r * &y));
            let (a, b, _) = self.parts(&nx, &y);
            let rho = (b.max(0.0) / a.max(1e-300)).sqrt().clamp(1e-12, 1e12);
            let ny = trust_region(&self.qb, 1.0 / rho, &(self.r.transpose() * &nx));
            let g = self.value(&nx, &ny);
            if g <= f {
                let done = f - g < STAGNATION * (1.0 + f.abs());
                x = nx;
                y = ny;
                f = g;
                if done {
                    break;
                }
            } else {
                break;
            }
        }
        (f, x, y)
    }
}

fn halves(v: &DVector<f64>, m: usize) -> (DVector<f64>, DVector<f64>) {
    let fix = |w: DVector<f64>| {
        let n = w.norm();
        if n > 1e-8 {
            w / n
        } else {
            let mut e = DVector::zeros(w.len());
            e[0] = 1.0;
            e
        }
    };
    (fix(v.rows(0, m).into_owned()), fix(v.rows(m, v.len() - m).into_owned()))
}

/// Product-normalized minimum of the symmetric part of `h`, split after `split` coordinates.
pub fn min_product_normalized(h: &DMatrix<f64>, split: usize) -> XyMinimum {
    let s = symmetric(h);
    let n = s.nrows();
    let (m, k) = (split, n - split);
    let prob = Problem {
        p: s.view((0, 0), (m, m)).into_owned(),
        q: s.view((m, m), (k, k)).into_owned(),
        r: s.view((0, m), (m, k)).into_owned(),
        pb: Block::new(s.view((0, 0), (m, m)).into_owned()),
        qb: Block::new(s.view((m, m), (k, k)).into_owned()),
    };
    let tol = 1e-12 * (1.0 + s.amax());
    let (lp, vp) = prob.pb.lowest();
    let (lq, vq) = prob.qb.lowest();
    if lp < -tol || lq < -tol {
        let (x, y) = if lp <= lq {
            (vp * UNBOUNDED_SCALE, vq)
        } else {
            (vp, vq * UNBOUNDED_SCALE)
        };
        let (x, y): (Vec<f64>, Vec<f64>) = (x.iter().copied().collect(), y.iter().copied().collect());
        return XyMinimum {
            value: xy_ratio(h, &x, &y),
            x,
            y,
            unbounded: true,
        };
    }

    let mut starts = Vec::new();
    let full = Block::new(s.clone());
    starts.push(halves(&full.lowest().1, m));
    let tau = (prob.p.trace().max(1e-300) / prob.q.trace().max(1e-300)).sqrt();
    let mut st = s.clone();
    st.view_mut((0, 0), (m, m)).scale_mut(1.0 / tau);
    st.view_mut((m, m), (k, k)).scale_mut(tau);
    starts.push(halves(&Block::new(st).lowest().1, m));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..2 {
        starts.push((
            DVector::from_vec(unit_vector(&mut rng, m)),
            DVector::from_vec(unit_vector(&mut rng, k)),
        ));
    }

    let (mut best, mut bx, mut by) = (f64::INFINITY, DVector::zeros(m), DVector::zeros(k));
    for (x0, y0) in starts {
        let (f, x, y) = prob.refine(x0, y0);
        if f < best {
            best = f;
            bx = x;
            by = y;
        }
    }
    let (a, b, _) = prob.parts(&bx, &by);
    if a > 0.0 && b > 0.0 {
        let t = (b / a).powf(0.25);
        bx *= t;
        by /= t;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = (bx.iter().copied().collect(), by.iter().copied().collect());
    XyMinimum {
        value: xy_ratio(h, &x, &y),
        x,
        y,
        unbounded: false,
    }
}

/// Certified lower bound `2 max_τ λ_min([[P/τ, R], [Rᵀ, τQ]])`, or `-∞` when that maximum is negative.
pub fn dual_bound(h: &DMatrix<f64>, split: usize) -> f64 {
    let s = symmetric(h);
    // congruent scalings share the inertia of `s`
    if SymmetricEigen::new(s.clone()).eigenvalues.min() < 0.0 {
        return f64::NEG_INFINITY;
    }
    let (m, k) = (split, s.nrows() - split);
    let eval = |u: f64| {
        let tau = u.exp();
        let mut st = s.clone();
        st.view_mut((0, 0), (m, m)).scale_mut(1.0 / tau);
        st.view_mut((m, m), (k, k)).scale_mut(tau);
        SymmetricEigen::new(st).eigenvalues.min()
    };
    let grid: Vec<f64> = (0..=48).map(|i| -12.0 + 0.5 * i as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&u| eval(u)).collect();
    let i = (0..vals.len())
        .max_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .expect("nonempty grid");
    let (mut lo, mut hi) = (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if eval(m1) > eval(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    2.0 * eval(0.5 * (lo + hi)).max(vals[i]).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_psd_pair(rng: &mut ChaCha8Rng, m: usize, coupling: f64) -> DMatrix<f64> {
        let g = DMatrix::from_fn(2 * m, 2 * m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut s = &g * g.transpose() / (2 * m) as f64;
        for i in 0..m {
            for j in 0..m {
                s[(i, m + j)] *= coupling;
                s[(m + j, i)] *= coupling;
            }
        }
        s + DMatrix::from_fn(2 * m, 2 * m, |i, j| rng.random::<f64>() * 0.1 * (i as f64 - j as f64))
    }

    #[test]
    fn identity_blocks() {
        let h = DMatrix::identity(4, 4) * 3.0;
        let r = min_product_normalized(&h, 2);
        assert!((r.value - 6.0).abs() < 1e-12);
        assert!((dual_bound(&h, 2) - 6.0).abs() < 1e-9);
    }

    #[test]
    fn witness_reproduces_value_and_beats_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let m = 2 + trial % 3;
            let h = random_psd_pair(&mut rng, m, 0.7);
            let r = min_product_normalized(&h, m);
            if r.unbounded {
                continue;
            }
            assert!((xy_ratio(&h, &r.x, &r.y) - r.value).abs() < 1e-12 * (1.0 + r.value.abs()));
            let mut sampled = f64::INFINITY;
            for _ in 0..10_000 {
                let x = unit_vector(&mut rng, m);
                let y = unit_vector(&mut rng, m);
                let t: f64 = (rng.random::<f64>() * 8.0 - 4.0).exp();
                let xs: Vec<f64> = x.iter().map(|v| v * t).collect();
                sampled = sampled.min(xy_ratio(&h, &xs, &y));
            }
            assert!(r.value <= sampled + 1e-10, "{} > {}", r.value, sampled);
            let lb = dual_bound(&h, m);
            assert!(lb <= r.value + 1e-9, "{lb} {} {sampled}", r.value);
        }
    }

    #[test]
    fn indefinite_block_is_unbounded() {
        let mut h = DMatrix::identity(4, 4);
        h[(0, 0)] = -0.5;
        let r = min_product_normalized(&h, 2);
        assert!(r.unbounded);
        assert!(r.value < -1e5);
        assert_eq!(dual_bound(&h, 2), f64::NEG_INFINITY);
    }
}
