//! Masked lattice domains with Dirichlet/Neumann boundary classification.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Omitted horn mass below which truncation is accepted.
pub const HORN_MASS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainDescriptor {
    Interval {
        cells: usize,
        #[serde(default = "unit")]
        length: f64,
        #[serde(default)]
        dirichlet: Vec<Side>,
    },
    Rectangle {
        nx: usize,
        ny: usize,
        #[serde(default = "unit")]
        width: f64,
        #[serde(default)]
        dirichlet: Vec<Side>,
    },
    /// Unit-scale square with its upper-right quarter removed, `n` cells per side.
    LShape {
        n: usize,
        #[serde(default = "unit")]
        size: f64,
        #[serde(default)]
        dirichlet: Vec<Side>,
    },
    /// Rows from top to bottom; `#` or `1` marks a cell of the domain.
    Bitmap {
        rows: Vec<String>,
        h: f64,
        #[serde(default)]
        dirichlet: Vec<Side>,
    },
    /// `{0 < x < X, |y| < c e^{-αx}}` on a uniform grid of fully contained cells.
    Horn {
        alpha: f64,
        c: f64,
        h: f64,
        truncation: Option<f64>,
        #[serde(default)]
        dirichlet: Vec<Side>,
    },
}

fn unit() -> f64 {
    1.0
}

impl DomainDescriptor {
    /// The same region at half the mesh width.
    pub fn refined(&self) -> Self {
        let mut out = self.clone();
        match &mut out {
            DomainDescriptor::Interval { cells, .. } => *cells *= 2,
            DomainDescriptor::Rectangle { nx, ny, .. } => {
                *nx *= 2;
                *ny *= 2;
            }
            DomainDescriptor::LShape { n, .. } => *n *= 2,
            DomainDescriptor::Bitmap { rows, h, .. } => {
                *rows = rows
                    .iter()
                    .flat_map(|r| {
                        let wide: String = r.chars().flat_map(|c| [c, c]).collect();
                        [wide.clone(), wide]
                    })
                    .collect();
                *h /= 2.0;
            }
            DomainDescriptor::Horn { h, .. } => *h /= 2.0,
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridDomain {
    dim: usize,
    nx: usize,
    ny: usize,
    h: f64,
    origin: [f64; 2],
    cell_mask: Vec<bool>,
    node_active: Vec<bool>,
    boundary: Vec<bool>,
    dirichlet: Vec<bool>,
    unknown: Vec<Option<usize>>,
    unknown_nodes: Vec<usize>,
}

impl GridDomain {
    /// Builds a domain from a cell mask of `nx × ny` cells (`ny = 0` for one dimension).
    pub fn from_mask(
        nx: usize,
        ny: usize,
        h: f64,
        origin: [f64; 2],
        cell_mask: Vec<bool>,
        dirichlet_sides: &[Side],
    ) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::param("h", format!("must be positive, got {h}")));
        }
        let dim = if ny == 0 { 1 } else { 2 };
        let ncells = nx * ny.max(1);
        if nx == 0 || cell_mask.len() != ncells {
            return Err(Error::DimensionMismatch {
                expected: ncells,
                found: cell_mask.len(),
            });
        }
        if !cell_mask.iter().any(|&m| m) {
            return Err(Error::EmptyMask);
        }
        let (wx, wy) = (nx + 1, if dim == 1 { 1 } else { ny + 1 });
        let mut node_active = vec![false; wx * wy];
        let mut full = vec![0u8; wx * wy];
        let adjacent = if dim == 1 { 2 } else { 4 };
        let mut dom = Self {
            dim,
            nx,
            ny,
            h,
            origin,
            cell_mask,
            node_active: vec![],
            boundary: vec![],
            dirichlet: vec![],
            unknown: vec![],
            unknown_nodes: vec![],
        };
        for c in dom.masked_cells() {
            for g in dom.cell_nodes(c) {
                node_active[g] = true;
                full[g] += 1;
            }
        }
        let boundary: Vec<bool> = (0..wx * wy)
            .map(|g| node_active[g] && (full[g] as usize) < adjacent)
            .collect();
        let active_ij: Vec<(usize, usize)> = (0..wx * wy)
            .filter(|&g| node_active[g])
            .map(|g| (g % wx, g / wx))
            .collect();
        let imin = active_ij.iter().map(|x| x.0).min().unwrap_or(0);
        let imax = active_ij.iter().map(|x| x.0).max().unwrap_or(0);
        let jmin = active_ij.iter().map(|x| x.1).min().unwrap_or(0);
        let jmax = active_ij.iter().map(|x| x.1).max().unwrap_or(0);
        let dirichlet: Vec<bool> = (0..wx * wy)
            .map(|g| {
                let (i, j) = (g % wx, g / wx);
                boundary[g]
                    && dirichlet_sides.iter().any(|s| match s {
                        Side::All => true,
                        Side::Left => i == imin,
                        Side::Right => i == imax,
                        Side::Bottom => dim == 2 && j == jmin,
                        Side::Top => dim == 2 && j == jmax,
                    })
            })
            .collect();
        let mut unknown = vec![None; wx * wy];
        let mut unknown_nodes = Vec::new();
        for g in 0..wx * wy {
            if node_active[g] && !dirichlet[g] {
                unknown[g] = Some(unknown_nodes.len());
                unknown_nodes.push(g);
            }
        }
        if unknown_nodes.is_empty() {
            return Err(Error::EmptyMask);
        }
        dom.node_active = node_active;
        dom.boundary = boundary;
        dom.dirichlet = dirichlet;
        dom.unknown = unknown;
        dom.unknown_nodes = unknown_nodes;
        Ok(dom)
    }

    pub fn build(desc: &DomainDescriptor) -> Result<Self> {
        match desc {
            DomainDescriptor::Interval { cells, length, dirichlet } => {
                if *cells == 0 {
                    return Err(Error::EmptyMask);
                }
                Self::from_mask(*cells, 0, length / *cells as f64, [0.0, 0.0], vec![true; *cells], dirichlet)
            }
            DomainDescriptor::Rectangle { nx, ny, width, dirichlet } => {
                if *nx == 0 || *ny == 0 {
                    return Err(Error::EmptyMask);
                }
                Self::from_mask(*nx, *ny, width / *nx as f64, [0.0, 0.0], vec![true; nx * ny], dirichlet)
            }
            DomainDescriptor::LShape { n, size, dirichlet } => {
                if *n < 2 || n % 2 != 0 {
                    return Err(Error::param("n", "must be an even number >= 2"));
                }
                let half = n / 2;
                let mask = (0..n * n).map(|c| !(c % n >= half && c / n >= half)).collect();
                Self::from_mask(*n, *n, size / *n as f64, [0.0, 0.0], mask, dirichlet)
            }
            DomainDescriptor::Bitmap { rows, h, dirichlet } => {
                let ny = rows.len();
                let nx = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
                if nx == 0 || ny == 0 {
                    return Err(Error::EmptyMask);
                }
                let mut mask = vec![false; nx * ny];
                for (r, row) in rows.iter().enumerate() {
                    let j = ny - 1 - r;
                    for (i, ch) in row.chars().enumerate() {
                        mask[j * nx + i] = ch == '#' || ch == '1';
                    }
                }
                Self::from_mask(nx, ny, *h, [0.0, 0.0], mask, dirichlet)
            }
            DomainDescriptor::Horn {
                alpha,
                c,
                h,
                truncation,
                dirichlet,
            } => {
                if !(*alpha > 0.0 && *c > 0.0) {
                    return Err(Error::param("horn", "alpha and c must be positive"));
                }
                let x_max = truncation.unwrap_or_else(|| (c / (alpha * HORN_MASS_TOL)).ln() / alpha);
                let nx = (x_max / h).round().max(1.0) as usize;
                let ny = (2.0 * c / h).ceil().max(1.0) as usize;
                let mask = (0..nx * ny)
                    .map(|k| {
                        let (i, j) = (k % nx, k / nx);
                        let x_right = (i + 1) as f64 * h;
                        let y0 = -c + j as f64 * h;
                        let half = c * (-alpha * x_right).exp();
                        y0.abs().max((y0 + h).abs()) <= half
                    })
                    .collect();
                Self::from_mask(nx, ny, *h, [0.0, -c], mask, dirichlet)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `h^d`, the weight of one node in discrete integrals.
    pub fn node_weight(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    fn row_width(&self) -> usize {
        self.nx + 1
    }

    /// Width of the node lattice row, which bounds the stiffness bandwidth.
    pub fn lattice_row(&self) -> usize {
        self.row_width()
    }

    pub fn cell_count(&self) -> usize {
        self.cell_mask.len()
    }

    pub fn is_masked(&self, cell: usize) -> bool {
        self.cell_mask[cell]
    }

    pub fn masked_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cell_mask.len()).filter(|&c| self.cell_mask[c])
    }

    /// Lattice nodes of a cell: `[left, right]` in one dimension, and
    /// `[(0,0), (1,0), (0,1), (1,1)]` corners in two.
    pub fn cell_nodes(&self, cell: usize) -> Vec<usize> {
        if self.dim == 1 {
            vec![cell, cell + 1]
        } else {
            let (i, j) = (cell % self.nx, cell / self.nx);
            let w = self.row_width();
            let g = j * w + i;
            vec![g, g + 1, g + w, g + w + 1]
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_active.len()
    }

    pub fn node_coords(&self, g: usize) -> [f64; 2] {
        let w = self.row_width();
        let (i, j) = (g % w, g / w);
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    pub fn unknown_index(&self, g: usize) -> Option<usize> {
        self.unknown[g]
    }

    pub fn unknown_nodes(&self) -> &[usize] {
        &self.unknown_nodes
    }

    pub fn unknown_count(&self) -> usize {
        self.unknown_nodes.len()
    }

    pub fn dirichlet_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&g| self.dirichlet[g]).collect()
    }

    pub fn neumann_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&g| self.boundary[g] && !self.dirichlet[g])
            .collect()
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&g| self.boundary[g]).collect()
    }

    pub fn is_pure_neumann(&self) -> bool {
        !self.dirichlet.iter().any(|&d| d)
    }

    /// Coordinates of every unknown.
    pub fn unknown_coords(&self) -> Vec<[f64; 2]> {
        self.unknown_nodes.iter().map(|&g| self.node_coords(g)).collect()
    }

    /// Number of masked cells in lattice column `i` (two dimensions).
    pub fn column_cells(&self, i: usize) -> usize {
        (0..self.ny.max(1)).filter(|j| self.cell_mask[j * self.nx + i]).count()
    }
}
