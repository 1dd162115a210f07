//! Power functions `F_r(ω) = |ω|^r`, generalized Hessians and the closed-form identities.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{delta_p_value, ComplexMatrix};
use crate::{Error, Result, C64};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn grad_power(r: f64, omega: &[f64]) -> Vec<f64> {
    let n = norm(omega);
    if n == 0.0 {
        return vec![0.0; omega.len()];
    }
    let f = r * n.powf(r - 2.0);
    omega.iter().map(|x| f * x).collect()
}

/// `D²F_r(ω) = r|ω|^{r-2} (I + (r-2) ω̂ ⊗ ω̂)`.
pub fn hess_power(r: f64, omega: &[f64]) -> Result<DMatrix<f64>> {
    if !(r > 1.0) {
        return Err(Error::param("r", format!("must be > 1, got {r}")));
    }
    let n = norm(omega);
    if n == 0.0 {
        return Err(Error::Singular("power function Hessian at the origin"));
    }
    let k = omega.len();
    let f = r * n.powf(r - 2.0);
    let u = DVector::from_iterator(k, omega.iter().map(|x| x / n));
    Ok((DMatrix::identity(k, k) + &u * u.transpose() * (r - 2.0)) * f)
}

/// Generalized Hessian `(⊕ ℳ(A_j*)) · (D²Φ ⊗ I_d)`, a `2kd × 2kd` matrix.
///
/// Coordinates of `Ξ = (X_1, …, X_k)` are ordered as `(2j + c)·d + i`, with `c = 0` for
/// real parts and `c = 1` for imaginary parts.
pub fn gen_hess_matrix(hess_phi: &DMatrix<f64>, mats: &[ComplexMatrix]) -> Result<DMatrix<f64>> {
    let k = mats.len();
    if k == 0 {
        return Err(Error::param("matrices", "need at least one matrix"));
    }
    if hess_phi.nrows() != 2 * k || hess_phi.ncols() != 2 * k {
        return Err(Error::DimensionMismatch {
            expected: 2 * k,
            found: hess_phi.nrows(),
        });
    }
    let d = mats[0].dim();
    if let Some(bad) = mats.iter().find(|a| a.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }
    let forms: Vec<DMatrix<f64>> = mats.iter().map(|a| a.real_form().0.transpose()).collect();
    let m = 2 * d;
    let mut h = DMatrix::zeros(k * m, k * m);
    for j in 0..k {
        for l in 0..k {
            let mut kron = DMatrix::zeros(m, m);
            for a in 0..2 {
                for b in 0..2 {
                    let v = hess_phi[(2 * j + a, 2 * l + b)];
                    for i in 0..d {
                        kron[(a * d + i, b * d + i)] = v;
                    }
                }
            }
            h.view_mut((j * m, l * m), (m, m)).copy_from(&(&forms[j] * kron));
        }
    }
    Ok(h)
}

/// `⟨HΞ, Ξ⟩` for the generalized Hessian `H` and `Ξ` the concatenation of `xs`.
pub fn gen_hess_form(hess_phi: &DMatrix<f64>, mats: &[ComplexMatrix], xs: &[Vec<f64>]) -> Result<f64> {
    let h = gen_hess_matrix(hess_phi, mats)?;
    let xi: Vec<f64> = xs.iter().flatten().copied().collect();
    if xi.len() != h.nrows() || xs.len() != mats.len() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: xi.len(),
        });
    }
    let v = DVector::from_vec(xi);
    Ok(v.dot(&(h * &v)))
}

fn split(omega: &[f64]) -> Vec<C64> {
    omega.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
}

fn re_inner(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum()
}

/// Rotated vectors `σ_j = e^{-i arg ω_j} ξ_j` and moduli `|ω_j|` for `ω` normalized to the sphere.
fn rotated(omega: &[f64], xs: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<C64>>) {
    let n = norm(omega);
    let w = split(omega);
    let mods: Vec<f64> = w.iter().map(|z| z.norm() / n).collect();
    let sig = w
        .iter()
        .zip(xs)
        .map(|(z, x)| {
            let rot = if z.norm() > 0.0 { z.conj() / z.norm() } else { C64::new(1.0, 0.0) };
            crate::algebra::from_real_vec(x).into_iter().map(|c| c * rot).collect()
        })
        .collect();
    (mods, sig)
}

/// `H_{F_p}` through the first closed form, valid for any `ω ≠ 0` by homogeneity.
pub fn formula_one(p: f64, mats: &[ComplexMatrix], omega: &[f64], xs: &[Vec<f64>]) -> f64 {
    let (mods, sig) = rotated(omega, xs);
    let scale = p * norm(omega).powf(p - 2.0);
    let re_parts: Vec<Vec<C64>> = sig
        .iter()
        .map(|s| s.iter().map(|z| C64::new(z.re, 0.0)).collect())
        .collect();
    let mut total = 0.0;
    for (j, a) in mats.iter().enumerate() {
        let asj = a.apply(&sig[j]);
        total += re_inner(&asj, &sig[j]);
        for k in 0..mats.len() {
            total += (p - 2.0) * mods[j] * mods[k] * re_inner(&asj, &re_parts[k]);
        }
    }
    scale * total
}

/// `H_{F_p}` through the second closed form, which isolates `Re⟨A σ, ℐ_p σ⟩`.
pub fn formula_two(p: f64, mats: &[ComplexMatrix], omega: &[f64], xs: &[Vec<f64>]) -> f64 {
    let (mods, sig) = rotated(omega, xs);
    let scale = p * norm(omega).powf(p - 2.0);
    let beta = 1.0 - 2.0 / p;
    let mut total = 0.0;
    for (j, a) in mats.iter().enumerate() {
        let asj = a.apply(&sig[j]);
        let ip: Vec<C64> = sig[j].iter().map(|z| z + z.conj() * beta).collect();
        total += (1.0 - mods[j] * mods[j]) * re_inner(&asj, &sig[j]);
        total += 0.5 * p * mods[j] * mods[j] * re_inner(&asj, &ip);
        for k in 0..mats.len() {
            if k != j {
                let re_k: Vec<C64> = sig[k].iter().map(|z| C64::new(z.re, 0.0)).collect();
                total += (p - 2.0) * mods[j] * mods[k] * re_inner(&asj, &re_k);
            }
        }
    }
    scale * total
}

/// Lower bound `p|ω|^{p-2}|X|²(Δ_p(𝐀) - (p-2)Λ(𝐀) Σ_{j<k} |ω_j||ω_k|)` for `p ≥ 2`.
pub fn corollary_bound(p: f64, mats: &[ComplexMatrix], omega: &[f64], xs: &[Vec<f64>]) -> f64 {
    let n = norm(omega);
    let delta = mats
        .iter()
        .map(|a| delta_p_value(a, p))
        .fold(f64::INFINITY, f64::min);
    let big = mats.iter().map(ComplexMatrix::big_lambda).fold(0.0, f64::max);
    let mods: Vec<f64> = split(omega).iter().map(|z| z.norm() / n).collect();
    let mut cross = 0.0;
    for j in 0..mods.len() {
        for k in j + 1..mods.len() {
            cross += mods[j] * mods[k];
        }
    }
    let x2: f64 = xs.iter().flatten().map(|x| x * x).sum();
    p * n.powf(p - 2.0) * x2 * (delta - (p - 2.0) * big * cross)
}
