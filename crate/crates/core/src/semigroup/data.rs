//! Initial data: continuum functions sampled at the unknowns of a grid.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::domain::GridDomain;
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// Gaussian bump with a complex amplitude.
    Bump {
        centre: [f64; 2],
        width: f64,
        #[serde(default = "one")]
        amplitude: [f64; 2],
    },
    /// `exp(w · x)` for a complex vector `w` given as `[re, im]` pairs.
    Exponential { rate: Vec<[f64; 2]> },
    /// Trigonometric sum with explicit complex coefficients, `modes[k] = [kx, ky, re, im]`.
    Trig { modes: Vec<[f64; 4]> },
    /// Nodal values on the unknowns, `[re, im]` per entry.
    Values { values: Vec<[f64; 2]> },
}

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

impl InitialData {
    pub fn eval(&self, x: [f64; 2]) -> C64 {
        match self {
            InitialData::Bump { centre, width, amplitude } => {
                let r2 = (x[0] - centre[0]).powi(2) + (x[1] - centre[1]).powi(2);
                C64::new(amplitude[0], amplitude[1]) * (-r2 / (width * width)).exp()
            }
            InitialData::Exponential { rate } => {
                let e: C64 = rate.iter().zip(x).map(|(w, xi)| C64::new(w[0], w[1]) * xi).sum();
                e.exp()
            }
            InitialData::Trig { modes } => modes
                .iter()
                .map(|m| C64::new(m[2], m[3]) * C64::from_polar(1.0, 2.0 * PI * (m[0] * x[0] + m[1] * x[1])))
                .sum(),
            InitialData::Values { .. } => C64::new(0.0, 0.0),
        }
    }

    /// Values at the unknowns of `domain`.
    pub fn sample(&self, domain: &GridDomain) -> Vec<C64> {
        if let InitialData::Values { values } = self {
            return values.iter().map(|v| C64::new(v[0], v[1])).collect();
        }
        domain.unknown_coords().into_iter().map(|x| self.eval(x)).collect()
    }
}

/// A random trigonometric sum with `modes` frequencies per axis and decaying amplitudes.
pub fn random_trig<R: Rng + ?Sized>(rng: &mut R, dim: usize, modes: usize, scale: f64) -> InitialData {
    let ky_max = if dim == 2 { modes } else { 0 };
    let mut out = Vec::new();
    for kx in 0..=modes {
        for ky in 0..=ky_max {
            let decay = 1.0 / (1.0 + (kx * kx + ky * ky) as f64);
            let sy = if rng.random::<bool>() { 1.0 } else { -1.0 };
            out.push([
                kx as f64 / scale,
                sy * ky as f64 / scale,
                decay * (rng.random::<f64>() - 0.5),
                decay * (rng.random::<f64>() - 0.5),
            ]);
        }
    }
    InitialData::Trig { modes: out }
}

/// Random mixture: trigonometric sums, localized bumps and occasionally a
/// nearly real positive profile.
pub fn random_data<R: Rng + ?Sized>(rng: &mut R, domain: &GridDomain) -> InitialData {
    let dim = domain.dim();
    let coords = domain.unknown_coords();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for x in &coords {
        for k in 0..2 {
            lo[k] = lo[k].min(x[k]);
            hi[k] = hi[k].max(x[k]);
        }
    }
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(domain.h());
    match rng.random_range(0..3) {
        0 => {
            let modes = rng.random_range(1..6);
            random_trig(rng, dim, modes, extent)
        }
        1 => {
            let centre = [
                lo[0] + rng.random::<f64>() * (hi[0] - lo[0]),
                if dim == 2 { lo[1] + rng.random::<f64>() * (hi[1] - lo[1]) } else { 0.0 },
            ];
            InitialData::Bump {
                centre,
                width: extent * (0.05 + 0.3 * rng.random::<f64>()),
                amplitude: [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5],
            }
        }
        _ => {
            let theta = rng.random::<f64>() * 2.0 * PI;
            let s = 3.0 * rng.random::<f64>() / extent;
            let mut rate = vec![[s * theta.cos(), s * theta.sin() * 0.3]];
            if dim == 2 {
                rate.push([s * theta.sin(), -s * theta.cos() * 0.3]);
            }
            InitialData::Exponential { rate }
        }
    }
}

/// Smooth factor vanishing on Dirichlet nodes and equal to one beyond `width`.
pub fn dirichlet_envelope(domain: &GridDomain, width: f64) -> Vec<f64> {
    let walls: Vec<[f64; 2]> = domain.dirichlet_nodes().iter().map(|&g| domain.node_coords(g)).collect();
    domain
        .unknown_coords()
        .into_iter()
        .map(|x| {
            let d = walls
                .iter()
                .map(|w| ((x[0] - w[0]).powi(2) + (x[1] - w[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            let t = (d / width).min(1.0);
            t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
        })
        .collect()
}

/// `data` sampled on `domain` and multiplied by the Dirichlet envelope.
pub fn sample_enveloped(data: &InitialData, domain: &GridDomain, width: f64) -> Vec<C64> {
    data.sample(domain)
        .into_iter()
        .zip(dirichlet_envelope(domain, width))
        .map(|(u, e)| u * e)
        .collect()
}
