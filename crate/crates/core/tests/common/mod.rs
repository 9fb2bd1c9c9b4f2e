//! Dense matrices assembled entry by entry from the stencil definitions,
//! plus random test data. Shared by several test targets.
#![allow(dead_code)]

pub mod coupled;
pub mod fd;

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use savns::mac::{CellField, Grid, VelocityField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Index maps for the staggered unknowns.
///
/// "Full" vectors hold every stored entry (`u` then `v`, row-major).
/// "Interior" vectors drop the boundary-normal edges.
#[derive(Clone, Copy)]
pub struct Layout {
    pub g: Grid,
}

impl Layout {
    pub fn new(g: Grid) -> Self {
        Self { g }
    }

    pub fn cells(&self) -> usize {
        self.g.nx * self.g.ny
    }
    pub fn cell(&self, i: usize, j: usize) -> usize {
        i * self.g.ny + j
    }

    pub fn full_len(&self) -> usize {
        (self.g.nx + 1) * self.g.ny + self.g.nx * (self.g.ny + 1)
    }
    pub fn full_u(&self, i: usize, j: usize) -> usize {
        i * self.g.ny + j
    }
    pub fn full_v(&self, i: usize, j: usize) -> usize {
        (self.g.nx + 1) * self.g.ny + i * (self.g.ny + 1) + j
    }

    pub fn n_int_u(&self) -> usize {
        (self.g.nx - 1) * self.g.ny
    }
    pub fn int_len(&self) -> usize {
        self.n_int_u() + self.g.nx * (self.g.ny - 1)
    }
    /// `1 <= i <= nx-1`
    pub fn int_u(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.g.ny + j
    }
    /// `1 <= j <= ny-1`
    pub fn int_v(&self, i: usize, j: usize) -> usize {
        self.n_int_u() + i * (self.g.ny - 1) + (j - 1)
    }

    pub fn full_vec(&self, w: &VelocityField) -> DVector<f64> {
        DVector::from_iterator(self.full_len(), w.u.iter().chain(w.v.iter()).copied())
    }

    pub fn int_vec(&self, w: &VelocityField) -> DVector<f64> {
        let (nx, ny) = (self.g.nx, self.g.ny);
        let mut x = DVector::zeros(self.int_len());
        for i in 1..nx {
            for j in 0..ny {
                x[self.int_u(i, j)] = w.u[[i, j]];
            }
        }
        for i in 0..nx {
            for j in 1..ny {
                x[self.int_v(i, j)] = w.v[[i, j]];
            }
        }
        x
    }

    pub fn int_field(&self, x: &DVector<f64>) -> VelocityField {
        let (nx, ny) = (self.g.nx, self.g.ny);
        let mut w = VelocityField::zeros(self.g);
        for i in 1..nx {
            for j in 0..ny {
                w.u[[i, j]] = x[self.int_u(i, j)];
            }
        }
        for i in 0..nx {
            for j in 1..ny {
                w.v[[i, j]] = x[self.int_v(i, j)];
            }
        }
        w
    }

    pub fn cell_vec(&self, p: &CellField) -> DVector<f64> {
        DVector::from_iterator(self.cells(), p.values.iter().copied())
    }

    pub fn cell_field(&self, x: &DVector<f64>) -> CellField {
        let values = Array2::from_shape_vec((self.g.nx, self.g.ny), x.iter().copied().collect())
            .expect("cell vector length");
        CellField::from_array(self.g, values).expect("cell shape")
    }

    /// Divergence on full vectors: `(u[i+1,j]-u[i,j])/hx + (v[i,j+1]-v[i,j])/hy`.
    pub fn divergence_full(&self) -> DMatrix<f64> {
        let (nx, ny, hx, hy) = (self.g.nx, self.g.ny, self.g.hx, self.g.hy);
        let mut d = DMatrix::zeros(self.cells(), self.full_len());
        for i in 0..nx {
            for j in 0..ny {
                let r = self.cell(i, j);
                d[(r, self.full_u(i + 1, j))] += 1.0 / hx;
                d[(r, self.full_u(i, j))] -= 1.0 / hx;
                d[(r, self.full_v(i, j + 1))] += 1.0 / hy;
                d[(r, self.full_v(i, j))] -= 1.0 / hy;
            }
        }
        d
    }

    /// Divergence acting on interior vectors (walls carry zero flux).
    pub fn divergence_int(&self) -> DMatrix<f64> {
        let (nx, ny, hx, hy) = (self.g.nx, self.g.ny, self.g.hx, self.g.hy);
        let mut d = DMatrix::zeros(self.cells(), self.int_len());
        for i in 0..nx {
            for j in 0..ny {
                let r = self.cell(i, j);
                if i + 1 < nx {
                    d[(r, self.int_u(i + 1, j))] += 1.0 / hx;
                }
                if i > 0 {
                    d[(r, self.int_u(i, j))] -= 1.0 / hx;
                }
                if j + 1 < ny {
                    d[(r, self.int_v(i, j + 1))] += 1.0 / hy;
                }
                if j > 0 {
                    d[(r, self.int_v(i, j))] -= 1.0 / hy;
                }
            }
        }
        d
    }

    /// Gradient onto full vectors; boundary-normal rows stay zero.
    pub fn gradient_full(&self) -> DMatrix<f64> {
        let (nx, ny, hx, hy) = (self.g.nx, self.g.ny, self.g.hx, self.g.hy);
        let mut g = DMatrix::zeros(self.full_len(), self.cells());
        for i in 1..nx {
            for j in 0..ny {
                g[(self.full_u(i, j), self.cell(i, j))] = 1.0 / hx;
                g[(self.full_u(i, j), self.cell(i - 1, j))] = -1.0 / hx;
            }
        }
        for i in 0..nx {
            for j in 1..ny {
                g[(self.full_v(i, j), self.cell(i, j))] = 1.0 / hy;
                g[(self.full_v(i, j), self.cell(i, j - 1))] = -1.0 / hy;
            }
        }
        g
    }

    /// Gradient onto interior vectors.
    pub fn gradient_int(&self) -> DMatrix<f64> {
        let (nx, ny, hx, hy) = (self.g.nx, self.g.ny, self.g.hx, self.g.hy);
        let mut g = DMatrix::zeros(self.int_len(), self.cells());
        for i in 1..nx {
            for j in 0..ny {
                g[(self.int_u(i, j), self.cell(i, j))] = 1.0 / hx;
                g[(self.int_u(i, j), self.cell(i - 1, j))] = -1.0 / hx;
            }
        }
        for i in 0..nx {
            for j in 1..ny {
                g[(self.int_v(i, j), self.cell(i, j))] = 1.0 / hy;
                g[(self.int_v(i, j), self.cell(i, j - 1))] = -1.0 / hy;
            }
        }
        g
    }

    /// Five-point vector Laplacian on interior unknowns. Walls normal to
    /// the stencil direction contribute 0; tangential walls reflect oddly.
    pub fn laplacian_int(&self) -> DMatrix<f64> {
        let (nx, ny) = (self.g.nx, self.g.ny);
        let (cx, cy) = (1.0 / (self.g.hx * self.g.hx), 1.0 / (self.g.hy * self.g.hy));
        let n = self.int_len();
        let mut l = DMatrix::zeros(n, n);
        for i in 1..nx {
            for j in 0..ny {
                let r = self.int_u(i, j);
                l[(r, r)] -= 2.0 * cx + 2.0 * cy;
                if i > 1 {
                    l[(r, self.int_u(i - 1, j))] += cx;
                }
                if i + 1 < nx {
                    l[(r, self.int_u(i + 1, j))] += cx;
                }
                for jn in [j as isize - 1, j as isize + 1] {
                    if jn < 0 || jn >= ny as isize {
                        l[(r, r)] -= cy;
                    } else {
                        l[(r, self.int_u(i, jn as usize))] += cy;
                    }
                }
            }
        }
        for i in 0..nx {
            for j in 1..ny {
                let r = self.int_v(i, j);
                l[(r, r)] -= 2.0 * cx + 2.0 * cy;
                if j > 1 {
                    l[(r, self.int_v(i, j - 1))] += cy;
                }
                if j + 1 < ny {
                    l[(r, self.int_v(i, j + 1))] += cy;
                }
                for inb in [i as isize - 1, i as isize + 1] {
                    if inb < 0 || inb >= nx as isize {
                        l[(r, r)] -= cx;
                    } else {
                        l[(r, self.int_v(inb as usize, j))] += cx;
                    }
                }
            }
        }
        l
    }

    /// Standard five-point Neumann Laplacian at centers: sum over existing
    /// neighbours of `(p_nb - p)/h²`.
    pub fn neumann_laplacian(&self) -> DMatrix<f64> {
        let (nx, ny) = (self.g.nx, self.g.ny);
        let (cx, cy) = (1.0 / (self.g.hx * self.g.hx), 1.0 / (self.g.hy * self.g.hy));
        let mut a = DMatrix::zeros(self.cells(), self.cells());
        for i in 0..nx {
            for j in 0..ny {
                let r = self.cell(i, j);
                let nbs = [
                    (i.checked_sub(1).map(|k| (k, j)), cx),
                    ((i + 1 < nx).then_some((i + 1, j)), cx),
                    (j.checked_sub(1).map(|k| (i, k)), cy),
                    ((j + 1 < ny).then_some((i, j + 1)), cy),
                ];
                for (nb, c) in nbs {
                    if let Some((a_i, a_j)) = nb {
                        a[(r, self.cell(a_i, a_j))] += c;
                        a[(r, r)] -= c;
                    }
                }
            }
        }
        a
    }

    /// Solves `(-A) φ = b` for the singular Neumann matrix with the
    /// mean-zero constraint through a bordered system.
    pub fn solve_neumann_dense(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.cells();
        let a = -self.neumann_laplacian();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&a);
        for k in 0..n {
            m[(k, n)] = 1.0;
            m[(n, k)] = 1.0;
        }
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(b);
        let x = m
            .lu()
            .solve(&rhs)
            .expect("bordered Neumann system is regular");
        x.rows(0, n).into_owned()
    }
}

pub fn random_velocity(g: Grid, rng: &mut impl Rng, no_penetration: bool) -> VelocityField {
    let mut w = VelocityField::zeros(g);
    w.u.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
    w.v.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
    if no_penetration {
        w.pin_boundary();
    }
    w
}

pub fn random_cells(g: Grid, rng: &mut impl Rng) -> CellField {
    let mut p = CellField::zeros(g);
    p.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
    p
}

pub fn max_abs_diff_vel(a: &VelocityField, b: &VelocityField) -> f64 {
    a.u.iter()
        .zip(b.u.iter())
        .chain(a.v.iter().zip(b.v.iter()))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_cell(a: &CellField, b: &CellField) -> f64 {
    a.values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
