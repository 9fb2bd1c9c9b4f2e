//! Discrete differential operators on the staggered grid.
//!
//! Boundary conventions shared by the velocity operators:
//! - boundary-normal edges (`u` at `i = 0, nx`, `v` at `j = 0, ny`) are read
//!   as the homogeneous Dirichlet value 0, except by [`divergence`], which
//!   uses the stored values;
//! - tangential neighbours outside the domain are odd ghosts
//!   (`ghost = -interior`), placing the wall value 0 halfway between.

use ndarray::Array2;

use super::field::{CellField, Grid, VelocityField};

#[inline]
fn u_val(w: &VelocityField, i: usize, j: isize) -> f64 {
    let g = &w.grid;
    if i == 0 || i >= g.nx {
        return 0.0;
    }
    if j < 0 {
        -w.u[[i, 0]]
    } else if j >= g.ny as isize {
        -w.u[[i, g.ny - 1]]
    } else {
        w.u[[i, j as usize]]
    }
}

#[inline]
fn v_val(w: &VelocityField, i: isize, j: usize) -> f64 {
    let g = &w.grid;
    if j == 0 || j >= g.ny {
        return 0.0;
    }
    if i < 0 {
        -w.v[[0, j]]
    } else if i >= g.nx as isize {
        -w.v[[g.nx - 1, j]]
    } else {
        w.v[[i as usize, j]]
    }
}

fn same_grid(a: &Grid, b: &Grid) {
    assert_eq!(a, b, "operands live on different grids");
}

/// Cell-centered divergence `(u[i+1]-u[i])/hx + (v[j+1]-v[j])/hy`.
pub fn divergence(w: &VelocityField) -> CellField {
    let g = w.grid;
    let values = Array2::from_shape_fn(g.cell_shape(), |(i, j)| {
        (w.u[[i + 1, j]] - w.u[[i, j]]) / g.hx + (w.v[[i, j + 1]] - w.v[[i, j]]) / g.hy
    });
    CellField { grid: g, values }
}

/// Centered difference of center values onto interior edges; zero on
/// boundary-normal edges.
pub fn gradient(p: &CellField) -> VelocityField {
    let g = p.grid;
    let mut out = VelocityField::zeros(g);
    for i in 1..g.nx {
        for j in 0..g.ny {
            out.u[[i, j]] = (p.values[[i, j]] - p.values[[i - 1, j]]) / g.hx;
        }
    }
    for i in 0..g.nx {
        for j in 1..g.ny {
            out.v[[i, j]] = (p.values[[i, j]] - p.values[[i, j - 1]]) / g.hy;
        }
    }
    out
}

/// `mu * Δ_h w` with homogeneous Dirichlet data.
pub fn laplacian_dirichlet(w: &VelocityField, mu: f64) -> VelocityField {
    let g = w.grid;
    let (cx, cy) = (mu / (g.hx * g.hx), mu / (g.hy * g.hy));
    let mut out = VelocityField::zeros(g);
    for i in 1..g.nx {
        for j in 0..g.ny {
            let c = w.u[[i, j]];
            let jj = j as isize;
            out.u[[i, j]] = cx * (u_val(w, i + 1, jj) - 2.0 * c + u_val(w, i - 1, jj))
                + cy * (u_val(w, i, jj + 1) - 2.0 * c + u_val(w, i, jj - 1));
        }
    }
    for i in 0..g.nx {
        for j in 1..g.ny {
            let c = w.v[[i, j]];
            let ii = i as isize;
            out.v[[i, j]] = cx * (v_val(w, ii + 1, j) - 2.0 * c + v_val(w, ii - 1, j))
                + cy * (v_val(w, ii, j + 1) - 2.0 * c + v_val(w, ii, j - 1));
        }
    }
    out
}

/// Advective form `(a·∇)b` at the velocity points.
///
/// The cross-component of `a` is the 4-point average of the nearest
/// samples; derivatives of `b` are centered, using the ghost convention
/// next to walls.
pub fn convect(a: &VelocityField, b: &VelocityField) -> VelocityField {
    same_grid(&a.grid, &b.grid);
    let g = a.grid;
    let (r2x, r2y) = (0.5 / g.hx, 0.5 / g.hy);
    let mut out = VelocityField::zeros(g);
    for i in 1..g.nx {
        for j in 0..g.ny {
            let jj = j as isize;
            let au = u_val(a, i, jj);
            let av = 0.25
                * (v_val(a, i as isize - 1, j)
                    + v_val(a, i as isize, j)
                    + v_val(a, i as isize - 1, j + 1)
                    + v_val(a, i as isize, j + 1));
            let dbx = (u_val(b, i + 1, jj) - u_val(b, i - 1, jj)) * r2x;
            let dby = (u_val(b, i, jj + 1) - u_val(b, i, jj - 1)) * r2y;
            out.u[[i, j]] = au * dbx + av * dby;
        }
    }
    for i in 0..g.nx {
        for j in 1..g.ny {
            let ii = i as isize;
            let jj = j as isize;
            let au = 0.25
                * (u_val(a, i, jj - 1)
                    + u_val(a, i + 1, jj - 1)
                    + u_val(a, i, jj)
                    + u_val(a, i + 1, jj));
            let av = v_val(a, ii, j);
            let dbx = (v_val(b, ii + 1, j) - v_val(b, ii - 1, j)) * r2x;
            let dby = (v_val(b, ii, j + 1) - v_val(b, ii, j - 1)) * r2y;
            out.v[[i, j]] = au * dbx + av * dby;
        }
    }
    out
}

/// Discrete L² pairing of velocity fields; boundary-normal edges carry
/// half weight.
pub fn inner(a: &VelocityField, b: &VelocityField) -> f64 {
    same_grid(&a.grid, &b.grid);
    let g = a.grid;
    let mut su = 0.0;
    for i in 0..=g.nx {
        let w = if i == 0 || i == g.nx { 0.5 } else { 1.0 };
        let row: f64 = (0..g.ny).map(|j| a.u[[i, j]] * b.u[[i, j]]).sum();
        su += w * row;
    }
    let mut sv = 0.0;
    for i in 0..g.nx {
        for j in 0..=g.ny {
            let w = if j == 0 || j == g.ny { 0.5 } else { 1.0 };
            sv += w * a.v[[i, j]] * b.v[[i, j]];
        }
    }
    g.cell_area() * (su + sv)
}

pub fn inner_cell(p: &CellField, q: &CellField) -> f64 {
    same_grid(&p.grid, &q.grid);
    p.grid.cell_area()
        * p.values
            .iter()
            .zip(q.values.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
}

pub fn norm_l2(w: &VelocityField) -> f64 {
    inner(w, w).sqrt()
}

pub fn norm_cell(p: &CellField) -> f64 {
    inner_cell(p, p).sqrt()
}

/// Discrete H¹ seminorm built from edge differences, so that
/// `norm_h1_semi(w)^2 == -inner(laplacian_dirichlet(w, 1), w)`.
pub fn norm_h1_semi(w: &VelocityField) -> f64 {
    let g = w.grid;
    let (ix2, iy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    let mut s = 0.0;
    // u: x-differences across all cells, y-differences between rows plus
    // the half-weighted wall differences against the odd ghosts
    for i in 1..g.nx {
        for j in 0..g.ny {
            let jj = j as isize;
            let c = u_val(w, i, jj);
            let dx = u_val(w, i + 1, jj) - c;
            s += dx * dx * ix2;
            if j + 1 < g.ny {
                let dy = u_val(w, i, jj + 1) - c;
                s += dy * dy * iy2;
            }
        }
        let (b0, b1) = (u_val(w, i, 0), u_val(w, i, g.ny as isize - 1));
        s += 2.0 * (b0 * b0 + b1 * b1) * iy2;
    }
    for j in 0..g.ny {
        let d = u_val(w, 1, j as isize);
        s += d * d * ix2;
    }
    for i in 0..g.nx {
        let ii = i as isize;
        for j in 1..g.ny {
            let c = v_val(w, ii, j);
            let dy = v_val(w, ii, j + 1) - c;
            s += dy * dy * iy2;
            if i + 1 < g.nx {
                let dx = v_val(w, ii + 1, j) - c;
                s += dx * dx * ix2;
            }
        }
    }
    for i in 0..g.nx {
        let d = v_val(w, i as isize, 1);
        s += d * d * iy2;
    }
    for j in 1..g.ny {
        let (b0, b1) = (v_val(w, 0, j), v_val(w, g.nx as isize - 1, j));
        s += 2.0 * (b0 * b0 + b1 * b1) * ix2;
    }
    (g.cell_area() * s).sqrt()
}
