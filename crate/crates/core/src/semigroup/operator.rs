//! Divergence-form operators assembled from corner-averaged cell gradients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::domain::GridDomain;
use super::sparse::Csr;
use crate::algebra::{ComplexMatrix, ComplexMatrixField};
use crate::{Error, Result, C64};

/// How a short list of matrices is laid out over the masked cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CellLayout {
    /// One matrix everywhere.
    Constant,
    /// First matrix where the cell centre has `x < split`, second elsewhere.
    Halves { split: f64 },
    /// Matrices cycle across vertical stripes of the given width.
    Stripes { width: f64 },
    /// Two matrices on a checkerboard of the given period.
    Checker { period: f64 },
}

impl CellLayout {
    fn pick(&self, centre: [f64; 2], count: usize) -> usize {
        match *self {
            CellLayout::Constant => 0,
            CellLayout::Halves { split } => usize::from(centre[0] >= split).min(count - 1),
            CellLayout::Stripes { width } => ((centre[0] / width).floor().max(0.0) as usize) % count,
            CellLayout::Checker { period } => {
                let a = (centre[0] / period).floor() as i64 + (centre[1] / period).floor() as i64;
                (a.rem_euclid(2) as usize).min(count - 1)
            }
        }
    }

    /// One matrix per masked cell, in mask order.
    pub fn spread(&self, domain: &GridDomain, mats: &[ComplexMatrix]) -> Result<ComplexMatrixField> {
        if mats.is_empty() {
            return Err(Error::EmptyField);
        }
        let cells = domain
            .masked_cells()
            .map(|c| {
                let nodes = domain.cell_nodes(c);
                let a = domain.node_coords(nodes[0]);
                let h = domain.h() / 2.0;
                let centre = [a[0] + h, if domain.dim() == 2 { a[1] + h } else { 0.0 }];
                mats[self.pick(centre, mats.len())].clone()
            })
            .collect();
        ComplexMatrixField::new(cells)
    }
}

/// Local corner gradients: for each corner, its `d` rows of difference weights
/// over the cell's nodes.
fn corner_stencils(dim: usize, h: f64) -> Vec<Vec<[f64; 4]>> {
    let s = 1.0 / h;
    if dim == 1 {
        return vec![vec![[-s, s, 0.0, 0.0]]];
    }
    let bottom = [-s, s, 0.0, 0.0];
    let top = [0.0, 0.0, -s, s];
    let left = [-s, 0.0, s, 0.0];
    let right = [0.0, -s, 0.0, s];
    vec![
        vec![bottom, left],
        vec![bottom, right],
        vec![top, left],
        vec![top, right],
    ]
}

#[derive(Clone, Debug)]
pub struct Operator {
    domain: GridDomain,
    field: ComplexMatrixField,
    stiffness: Csr,
    generator: Csr,
    // unknown index of each node of each masked cell
    cell_unknowns: Vec<[Option<usize>; 4]>,
    stencils: Vec<Vec<[f64; 4]>>,
}

impl Operator {
    /// `field` holds one matrix per masked cell, or a single matrix used everywhere.
    pub fn assemble(domain: &GridDomain, field: &ComplexMatrixField) -> Result<Self> {
        let masked: Vec<usize> = domain.masked_cells().collect();
        let d = domain.dim();
        if field.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: field.dim(),
            });
        }
        if field.len() != 1 && field.len() != masked.len() {
            return Err(Error::MisalignedField {
                expected: masked.len(),
                found: field.len(),
            });
        }
        let stencils = corner_stencils(d, domain.h());
        let weight = domain.node_weight() / stencils.len() as f64;
        let n = domain.unknown_count();
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); n];
        for (k, &cell) in masked.iter().enumerate() {
            let a = &field.cells()[if field.len() == 1 { 0 } else { k }];
            let nodes = domain.cell_nodes(cell);
            let local = local_stiffness(a, &stencils, nodes.len(), weight);
            for (i, &gi) in nodes.iter().enumerate() {
                let Some(ui) = domain.unknown_index(gi) else { continue };
                for (j, &gj) in nodes.iter().enumerate() {
                    let Some(uj) = domain.unknown_index(gj) else { continue };
                    *rows[ui].entry(uj).or_insert(C64::new(0.0, 0.0)) += local[i][j];
                }
            }
        }
        let stiffness = Csr::from_rows(rows);
        let generator = stiffness.scale(1.0 / domain.node_weight());
        let cell_unknowns = masked
            .iter()
            .map(|&c| {
                let mut out = [None; 4];
                for (slot, g) in out.iter_mut().zip(domain.cell_nodes(c)) {
                    *slot = domain.unknown_index(g);
                }
                out
            })
            .collect();
        Ok(Self {
            domain: domain.clone(),
            field: field.clone(),
            stiffness,
            generator,
            cell_unknowns,
            stencils,
        })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn field(&self) -> &ComplexMatrixField {
        &self.field
    }

    /// `K` with `a_h(u, v) = v^* K u`.
    pub fn stiffness(&self) -> &Csr {
        &self.stiffness
    }

    /// `L = K / h^d`, so that `<L u, v>_h = a_h(u, v)`.
    pub fn generator(&self) -> &Csr {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    fn cell_matrix(&self, k: usize) -> &ComplexMatrix {
        &self.field.cells()[if self.field.len() == 1 { 0 } else { k }]
    }

    /// Corner gradients of `u` on every masked cell, Dirichlet values taken as zero.
    pub fn cell_gradients(&self, u: &[C64]) -> Vec<Vec<Vec<C64>>> {
        let d = self.domain.dim();
        (0..self.cell_unknowns.len())
            .map(|k| {
                (0..self.stencils.len())
                    .map(|c| {
                        let mut g = [C64::new(0.0, 0.0); 2];
                        self.corner_gradient(k, c, |i| u[i], &mut g);
                        g[..d].to_vec()
                    })
                    .collect()
            })
            .collect()
    }

    /// Gradient of the nodal function `u` at corner `c` of masked cell `k`.
    pub fn corner_gradient<F: Fn(usize) -> C64>(&self, k: usize, c: usize, u: F, out: &mut [C64; 2]) {
        let nodes = &self.cell_unknowns[k];
        for (o, w) in out.iter_mut().zip(&self.stencils[c]) {
            let mut acc = C64::new(0.0, 0.0);
            for (node, wi) in nodes.iter().zip(w) {
                if let Some(i) = node {
                    if *wi != 0.0 {
                        acc += u(*i) * wi;
                    }
                }
            }
            *o = acc;
        }
    }

    pub fn masked_cells(&self) -> usize {
        self.cell_unknowns.len()
    }

    pub fn corners(&self) -> usize {
        self.stencils.len()
    }

    /// `a_h(u, v)`, summed cell by cell from gradients.
    pub fn form(&self, u: &[C64], v: &[C64]) -> C64 {
        let gu = self.cell_gradients(u);
        let gv = self.cell_gradients(v);
        let weight = self.domain.node_weight() / gu.first().map_or(1, Vec::len) as f64;
        let mut total = C64::new(0.0, 0.0);
        for (k, (cu, cv)) in gu.iter().zip(&gv).enumerate() {
            let a = self.cell_matrix(k);
            for (xu, xv) in cu.iter().zip(cv) {
                let ax = a.apply(xu);
                total += ax.iter().zip(xv).map(|(p, q)| p * q.conj()).sum::<C64>() * weight;
            }
        }
        total
    }

    /// Sum of `|∇u| |∇v|` over cells and corners, weighted by cell area.
    pub fn gradient_product(&self, u: &[C64], v: &[C64]) -> f64 {
        self.gradient_product_with(|i| u[i], |i| v[i])
    }

    /// [`Operator::gradient_product`] for states given by accessors.
    pub fn gradient_product_with<F, G>(&self, u: F, v: G) -> f64
    where
        F: Fn(usize) -> C64,
        G: Fn(usize) -> C64,
    {
        let w = self.domain.node_weight() / self.stencils.len() as f64;
        let mut total = 0.0;
        let (mut gu, mut gv) = ([C64::new(0.0, 0.0); 2], [C64::new(0.0, 0.0); 2]);
        for k in 0..self.cell_unknowns.len() {
            for c in 0..self.stencils.len() {
                self.corner_gradient(k, c, &u, &mut gu);
                self.corner_gradient(k, c, &v, &mut gv);
                let nu = (gu[0].norm_sqr() + gu[1].norm_sqr()).sqrt();
                let nv = (gv[0].norm_sqr() + gv[1].norm_sqr()).sqrt();
                total += nu * nv * w;
            }
        }
        total
    }

    /// Cell averages of nodal values, Dirichlet values taken as zero.
    pub fn cell_values(&self, u: &[C64]) -> Vec<C64> {
        self.cell_unknowns
            .iter()
            .map(|nodes| {
                let len = if self.domain.dim() == 1 { 2 } else { 4 };
                let s: C64 = nodes[..len].iter().flatten().map(|&i| u[i]).sum();
                s / len as f64
            })
            .collect()
    }

    /// `<u, v>_h`.
    pub fn inner(&self, u: &[C64], v: &[C64]) -> C64 {
        u.iter().zip(v).map(|(a, b)| a * b.conj()).sum::<C64>() * self.domain.node_weight()
    }

    /// Discrete `L^p` norm with node weight `h^d`.
    pub fn lp_norm(&self, u: &[C64], p: f64) -> f64 {
        lp_norm(u, p, self.domain.node_weight())
    }

    /// Operator of the adjoint field on the same domain.
    pub fn adjoint(&self) -> Result<Self> {
        Self::assemble(&self.domain, &self.field.adjoint())
    }
}

pub fn lp_norm(u: &[C64], p: f64, weight: f64) -> f64 {
    if p.is_infinite() {
        return u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let m = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = u.iter().map(|z| (z.norm() / m).powf(p)).sum();
    m * (s * weight).powf(1.0 / p)
}

/// `Σ_corners w G_cᵀ A G_c`, each entry summed as `(t00 + t11) + (t01 + t10)` so the
/// adjoint field produces the exact conjugate transpose.
fn local_stiffness(a: &ComplexMatrix, stencils: &[Vec<[f64; 4]>], nodes: usize, weight: f64) -> Vec<Vec<C64>> {
    let d = a.dim();
    let mut local = vec![vec![C64::new(0.0, 0.0); nodes]; nodes];
    for rows in stencils {
        for i in 0..nodes {
            for j in 0..nodes {
                let t = |k: usize, l: usize| a.get(k, l) * ((rows[k][i] * rows[l][j]) * weight);
                let entry = if d == 1 {
                    t(0, 0)
                } else {
                    (t(0, 0) + t(1, 1)) + (t(0, 1) + t(1, 0))
                };
                local[i][j] += entry;
            }
        }
    }
    local
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::domain::{DomainDescriptor, Side};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square(n: usize, dirichlet: Vec<Side>) -> GridDomain {
        GridDomain::build(&DomainDescriptor::Rectangle {
            nx: n,
            ny: n,
            width: 1.0,
            dirichlet,
        })
        .unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    #[test]
    fn identity_gives_five_point_laplacian() {
        let dom = square(4, vec![]);
        let op = Operator::assemble(&dom, &ComplexMatrixField::constant(ComplexMatrix::identity(2), 1).unwrap()).unwrap();
        let l = op.generator();
        let centre = dom.unknown_index(2 * 5 + 2).unwrap();
        assert!((l.get(centre, centre).re - 4.0 * 16.0).abs() < 1e-12);
        assert!((l.get(centre, centre + 1).re + 16.0).abs() < 1e-12);
        assert!(l.get(centre, centre + 6).norm() < 1e-12);
    }

    #[test]
    fn adjoint_is_exact_and_parts_integrate() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dom = square(6, vec![Side::Left]);
        let mats: Vec<ComplexMatrix> =
            (0..2).map(|_| crate::algebra::sample::random_elliptic(&mut rng, 2, 0.2)).collect();
        let field = CellLayout::Halves { split: 0.5 }.spread(&dom, &mats).unwrap();
        let op = Operator::assemble(&dom, &field).unwrap();
        let adj = op.adjoint().unwrap();
        assert_eq!(adj.generator().max_diff(&op.generator().adjoint()), 0.0);
        let u = random_vec(&mut rng, op.dim());
        let v = random_vec(&mut rng, op.dim());
        let lhs = op.inner(&op.generator().apply(&u), &v);
        let rhs = op.form(&u, &v);
        assert!((lhs - rhs).norm() <= 1e-13 * rhs.norm().max(1.0));
    }

    #[test]
    fn neumann_kernel_is_constant() {
        let dom = square(8, vec![]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = crate::algebra::sample::random_elliptic(&mut rng, 2, 0.2);
        let op = Operator::assemble(&dom, &ComplexMatrixField::constant(a, 1).unwrap()).unwrap();
        let ones = vec![C64::new(1.0, 0.0); op.dim()];
        let r = op.generator().apply(&ones);
        assert!(r.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn layouts() {
        let dom = square(4, vec![]);
        let mats = vec![ComplexMatrix::identity(2), ComplexMatrix::scalar(2, C64::new(2.0, 0.0))];
        let f = CellLayout::Checker { period: 0.25 }.spread(&dom, &mats).unwrap();
        assert_eq!(f.len(), 16);
        assert_eq!(f.cells()[0], mats[0]);
        assert_eq!(f.cells()[1], mats[1]);
        assert!(lp_norm(&[C64::new(3.0, 4.0)], 2.0, 1.0) - 5.0 < 1e-15);
    }
}
