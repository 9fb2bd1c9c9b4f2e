use std::f64::consts::PI;

use ndarray::{s, Array1, Array2};

use super::{
    helmholtz_residual, neumann_compatible, neumann_residual, EllipticSolver, SolveReport,
    Tolerances,
};
use crate::error::{Error, Result};
use crate::mac::{norm_cell, norm_l2, CellField, Grid, VelocityField};

/// Residual-correction sweeps allowed when rounding in the transforms
/// leaves the first answer above tolerance.
const REFINE_PASSES: usize = 3;

/// Orthonormal eigenbasis of a 1D three-point stencil plus the magnitudes
/// of its eigenvalues (`-D2 q_k = lambda_k q_k`).
#[derive(Clone, Debug)]
struct Basis1d {
    /// `[point, mode]`
    q: Array2<f64>,
    lambda: Array1<f64>,
}

impl Basis1d {
    fn build(
        points: usize,
        cells: usize,
        h: f64,
        modes: impl Iterator<Item = usize>,
        f: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let modes: Vec<usize> = modes.collect();
        let mut q = Array2::from_shape_fn((points, modes.len()), |(i, m)| f(i, modes[m]));
        for mut col in q.columns_mut() {
            let norm = col.dot(&col).sqrt();
            col.mapv_inplace(|x| x / norm);
        }
        let lambda = modes
            .iter()
            .map(|&k| (2.0 / h * (k as f64 * PI / (2.0 * cells as f64)).sin()).powi(2))
            .collect();
        Self { q, lambda }
    }

    /// Interior edge points `1..n` between Dirichlet walls (sine, DST-I).
    fn dirichlet_edges(cells: usize, h: f64) -> Self {
        let n = cells as f64;
        Self::build(cells - 1, cells, h, 1..cells, |i, k| {
            (k as f64 * PI * (i + 1) as f64 / n).sin()
        })
    }

    /// Cell-centered points with odd ghosts across both walls (DST-II).
    fn dirichlet_cells(cells: usize, h: f64) -> Self {
        let n = cells as f64;
        Self::build(cells, cells, h, 1..=cells, |i, k| {
            (k as f64 * PI * (i as f64 + 0.5) / n).sin()
        })
    }

    /// Cell-centered points with even ghosts (DCT-II).
    fn neumann_cells(cells: usize, h: f64) -> Self {
        let n = cells as f64;
        Self::build(cells, cells, h, 0..cells, |i, k| {
            (k as f64 * PI * (i as f64 + 0.5) / n).cos()
        })
    }
}

/// Direct solver by separable eigen-decomposition of the constant
/// coefficient stencils. Transforms are dense orthonormal matrix products,
/// so results are bit-reproducible. `iterations` in the report counts
/// refinement sweeps.
#[derive(Clone, Debug)]
pub struct SpectralSolver {
    grid: Grid,
    tol: Tolerances,
    x_edges: Basis1d,
    x_cells_odd: Basis1d,
    x_cells_even: Basis1d,
    y_edges: Basis1d,
    y_cells_odd: Basis1d,
    y_cells_even: Basis1d,
}

impl SpectralSolver {
    pub fn new(grid: Grid, tol: Tolerances) -> Self {
        Self {
            grid,
            tol,
            x_edges: Basis1d::dirichlet_edges(grid.nx, grid.hx),
            x_cells_odd: Basis1d::dirichlet_cells(grid.nx, grid.hx),
            x_cells_even: Basis1d::neumann_cells(grid.nx, grid.hx),
            y_edges: Basis1d::dirichlet_edges(grid.ny, grid.hy),
            y_cells_odd: Basis1d::dirichlet_cells(grid.ny, grid.hy),
            y_cells_even: Basis1d::neumann_cells(grid.ny, grid.hy),
        }
    }

    /// `bx diag(1/shift(lx, ly)) bx^T` applied separably to `rhs`.
    fn separable_solve(
        rhs: &Array2<f64>,
        bx: &Basis1d,
        by: &Basis1d,
        shift: impl Fn(f64, f64) -> f64,
    ) -> Array2<f64> {
        let mut modal = bx.q.t().dot(rhs).dot(&by.q);
        for ((k, l), c) in modal.indexed_iter_mut() {
            let d = shift(bx.lambda[k], by.lambda[l]);
            *c = if d == 0.0 { 0.0 } else { *c / d };
        }
        bx.q.dot(&modal).dot(&by.q.t())
    }
}

impl EllipticSolver for SpectralSolver {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn tolerances(&self) -> Tolerances {
        self.tol
    }

    fn solve_helmholtz(
        &self,
        rhs: &VelocityField,
        alpha: f64,
        nu: f64,
    ) -> Result<(VelocityField, SolveReport)> {
        assert_eq!(rhs.grid, self.grid, "rhs lives on a different grid");
        assert!(alpha > 0.0 && nu >= 0.0, "need alpha > 0 and nu >= 0");
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let shift = |lx: f64, ly: f64| alpha + nu * (lx + ly);

        let solve = |r: &VelocityField| {
            let mut w = VelocityField::zeros(self.grid);
            let ru = r.u.slice(s![1..nx, ..]).to_owned();
            let wu = Self::separable_solve(&ru, &self.x_edges, &self.y_cells_odd, shift);
            w.u.slice_mut(s![1..nx, ..]).assign(&wu);
            let rv = r.v.slice(s![.., 1..ny]).to_owned();
            let wv = Self::separable_solve(&rv, &self.x_cells_odd, &self.y_edges, shift);
            w.v.slice_mut(s![.., 1..ny]).assign(&wv);
            w
        };

        let mut w = solve(rhs);
        let (mut r, bnorm) = helmholtz_residual(rhs, &w, alpha, nu);
        let mut res = norm_l2(&r);
        let threshold = self.tol.threshold(bnorm);
        let mut passes = 0;
        while res > threshold && passes < REFINE_PASSES {
            let mut next = w.clone();
            next.axpy(1.0, &solve(&r));
            let (r_next, _) = helmholtz_residual(rhs, &next, alpha, nu);
            let res_next = norm_l2(&r_next);
            passes += 1;
            if res_next >= res {
                break;
            }
            (w, r, res) = (next, r_next, res_next);
        }
        let report = SolveReport {
            iterations: passes,
            residual_l2: res,
            converged: res <= threshold,
        };
        if !report.converged {
            return Err(Error::NotConverged(report));
        }
        Ok((w, report))
    }

    fn solve_poisson_neumann(&self, rhs: &CellField) -> Result<(CellField, SolveReport)> {
        assert_eq!(rhs.grid, self.grid, "rhs lives on a different grid");
        let b = neumann_compatible(rhs, &self.tol)?;
        let solve = |r: &CellField| {
            let values = Self::separable_solve(
                &r.values,
                &self.x_cells_even,
                &self.y_cells_even,
                |lx, ly| lx + ly,
            );
            CellField {
                grid: self.grid,
                values,
            }
        };

        let mut phi = solve(&b);
        phi.recenter();
        let mut r = neumann_residual(&b, &phi);
        let mut res = norm_cell(&r);
        let threshold = self.tol.threshold(norm_cell(&b));
        let mut passes = 0;
        while res > threshold && passes < REFINE_PASSES {
            r.recenter();
            let mut next = phi.clone();
            next.axpy(1.0, &solve(&r));
            next.recenter();
            let r_next = neumann_residual(&b, &next);
            let res_next = norm_cell(&r_next);
            passes += 1;
            if res_next >= res {
                break;
            }
            (phi, r, res) = (next, r_next, res_next);
        }
        let report = SolveReport {
            iterations: passes,
            residual_l2: res,
            converged: res <= threshold,
        };
        if !report.converged {
            return Err(Error::NotConverged(report));
        }
        Ok((phi, report))
    }
}
