use super::{
    apply_helmholtz, apply_neg_neumann_laplacian, helmholtz_residual, neumann_compatible,
    neumann_residual, EllipticSolver, SolveReport, Tolerances,
};
use crate::error::{Error, Result};
use crate::mac::{norm_cell, norm_l2, CellField, Grid, VelocityField};

/// Jacobi-preconditioned conjugate gradient on flat interior unknowns.
///
/// `apply` must be symmetric positive (semi)definite under the plain dot
/// product; `project` maps iterates back into the solution space (identity
/// for Helmholtz, mean removal for Neumann).
fn pcg(
    b: &[f64],
    diag: &[f64],
    apply: impl Fn(&[f64]) -> Vec<f64>,
    project: impl Fn(&mut [f64]),
    threshold: f64,
    weight: f64,
    max_iter: usize,
) -> (Vec<f64>, usize) {
    let n = b.len();
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    let norm = |a: &[f64]| (weight * dot(a, a)).sqrt();

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    project(&mut r);
    if norm(&r) <= threshold {
        return (x, 0);
    }
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    project(&mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = apply(&p);
        let alpha = rz / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        project(&mut r);
        if norm(&r) <= threshold {
            project(&mut x);
            return (x, it);
        }
        z = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
        project(&mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    project(&mut x);
    (x, max_iter)
}

fn project_mean(x: &mut [f64]) {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= m);
}

/// Iterative backend; slower than [`super::SpectralSolver`] but shares no
/// code path with it beyond the stencil application.
#[derive(Clone, Debug)]
pub struct CgSolver {
    grid: Grid,
    tol: Tolerances,
}

impl CgSolver {
    pub fn new(grid: Grid, tol: Tolerances) -> Self {
        Self { grid, tol }
    }

    fn pack_velocity(&self, w: &VelocityField) -> Vec<f64> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = Vec::with_capacity(2 * nx * ny);
        for i in 1..nx {
            for j in 0..ny {
                out.push(w.u[[i, j]]);
            }
        }
        for i in 0..nx {
            for j in 1..ny {
                out.push(w.v[[i, j]]);
            }
        }
        out
    }

    fn unpack_velocity(&self, x: &[f64]) -> VelocityField {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut w = VelocityField::zeros(self.grid);
        let mut it = x.iter();
        for i in 1..nx {
            for j in 0..ny {
                w.u[[i, j]] = *it.next().unwrap();
            }
        }
        for i in 0..nx {
            for j in 1..ny {
                w.v[[i, j]] = *it.next().unwrap();
            }
        }
        w
    }

    fn helmholtz_diag(&self, alpha: f64, nu: f64) -> Vec<f64> {
        let g = self.grid;
        let (cx, cy) = (nu / (g.hx * g.hx), nu / (g.hy * g.hy));
        let mut d = VelocityField::zeros(g);
        for i in 1..g.nx {
            for j in 0..g.ny {
                let wall = (j == 0) as u8 + (j + 1 == g.ny) as u8;
                d.u[[i, j]] = alpha + 2.0 * cx + cy * (2.0 + wall as f64);
            }
        }
        for i in 0..g.nx {
            for j in 1..g.ny {
                let wall = (i == 0) as u8 + (i + 1 == g.nx) as u8;
                d.v[[i, j]] = alpha + cx * (2.0 + wall as f64) + 2.0 * cy;
            }
        }
        self.pack_velocity(&d)
    }

    fn neumann_diag(&self) -> Vec<f64> {
        let g = self.grid;
        let (cx, cy) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
        let mut d = Vec::with_capacity(g.nx * g.ny);
        for i in 0..g.nx {
            for j in 0..g.ny {
                let nbx = (i > 0) as u8 + (i + 1 < g.nx) as u8;
                let nby = (j > 0) as u8 + (j + 1 < g.ny) as u8;
                d.push(cx * nbx as f64 + cy * nby as f64);
            }
        }
        d
    }
}

impl EllipticSolver for CgSolver {
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
        let mut b = rhs.clone();
        b.pin_boundary();
        let bnorm = crate::mac::norm_l2(&b);
        let threshold = self.tol.threshold(bnorm);
        let apply =
            |x: &[f64]| self.pack_velocity(&apply_helmholtz(&self.unpack_velocity(x), alpha, nu));
        let (x, iterations) = pcg(
            &self.pack_velocity(&b),
            &self.helmholtz_diag(alpha, nu),
            apply,
            |_| {},
            threshold,
            self.grid.cell_area(),
            self.tol.max_iter,
        );
        let w = self.unpack_velocity(&x);
        let res = norm_l2(&helmholtz_residual(rhs, &w, alpha, nu).0);
        let report = SolveReport {
            iterations,
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
        let threshold = self.tol.threshold(norm_cell(&b));
        let shape = self.grid.cell_shape();
        let to_field = |x: &[f64]| {
            CellField::from_array(
                self.grid,
                ndarray::Array2::from_shape_vec(shape, x.to_vec()).expect("cell vector length"),
            )
            .expect("cell shape")
        };
        let apply = |x: &[f64]| {
            apply_neg_neumann_laplacian(&to_field(x))
                .values
                .iter()
                .copied()
                .collect()
        };
        let flat: Vec<f64> = b.values.iter().copied().collect();
        let (x, iterations) = pcg(
            &flat,
            &self.neumann_diag(),
            apply,
            project_mean,
            threshold,
            self.grid.cell_area(),
            self.tol.max_iter,
        );
        let mut phi = to_field(&x);
        phi.recenter();
        let res = norm_cell(&neumann_residual(&b, &phi));
        let report = SolveReport {
            iterations,
            residual_l2: res,
            converged: res <= threshold,
        };
        if !report.converged {
            return Err(Error::NotConverged(report));
        }
        Ok((phi, report))
    }
}
