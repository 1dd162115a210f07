//! Seeded generators of test matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{delta_p_value, ComplexMatrix};
use crate::C64;

/// Random complex matrix shifted so that `λ(A) ≥ floor`.
pub fn random_elliptic<R: Rng + ?Sized>(rng: &mut R, d: usize, floor: f64) -> ComplexMatrix {
    let m = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let a = ComplexMatrix::new(m).expect("square finite matrix");
    let shift = (floor - a.lambda()).max(0.0) + floor * rng.random::<f64>();
    ComplexMatrix::new(a.inner() + DMatrix::from_diagonal_element(d, d, C64::new(shift, 0.0)))
        .expect("square finite matrix")
}

pub fn random_real_elliptic<R: Rng + ?Sized>(rng: &mut R, d: usize, floor: f64) -> ComplexMatrix {
    let a = random_elliptic(rng, d, floor);
    ComplexMatrix::new(a.inner().map(|z| C64::new(z.re, 0.0))).expect("square finite matrix")
}

/// Random matrix with `Δ_p(A) ≥ margin · (1 - |1-2/p|) λ(Re A)`.
///
/// The imaginary part of an elliptic draw is shrunk by halving until the bound holds;
/// a real elliptic matrix always satisfies it with margin 1.
pub fn random_p_elliptic<R: Rng + ?Sized>(rng: &mut R, d: usize, p: f64, margin: f64) -> ComplexMatrix {
    let a = random_elliptic(rng, d, 0.5);
    let re = a.inner().map(|z| C64::new(z.re, 0.0));
    let im = a.inner().map(|z| C64::new(0.0, z.im));
    let re_m = ComplexMatrix::new(re.clone()).expect("square");
    let target = margin * (1.0 - (1.0 - 2.0 / p).abs()) * re_m.lambda();
    let mut t = 1.0;
    loop {
        let b = ComplexMatrix::new(&re + &im * C64::new(t, 0.0)).expect("square");
        if delta_p_value(&b, p) >= target || t < 1e-12 {
            return b;
        }
        t *= 0.5;
    }
}

/// Uniform point on the unit sphere of `ℝ^n`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
