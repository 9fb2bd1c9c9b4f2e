//! Manufactured solutions on the unit square with closed-form forcing.
//!
//! Both velocity fields are divergence free and vanish on the boundary; both
//! pressures have zero mean.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mac::{CellField, Grid, VelocityField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseId {
    /// `u = sin t (sin²πx sin2πy, -sin2πx sin²πy)`, `p = sin t (sin πy - 2/π)`
    Example1,
    /// Polynomial velocity with `t²` growth, `p = t²(x - 1/2)`.
    Example2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactValues {
    pub u1: f64,
    pub u2: f64,
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedCase {
    pub id: CaseId,
    pub nu: f64,
}

// Example 2 building blocks: A(s) = s²(s-1)², B(s) = s(s-1)(2s-1), A' = 2B.
fn a2(s: f64) -> f64 {
    s * s * (s - 1.0) * (s - 1.0)
}
fn b2(s: f64) -> f64 {
    s * (s - 1.0) * (2.0 * s - 1.0)
}
fn db2(s: f64) -> f64 {
    6.0 * s * s - 6.0 * s + 1.0
}
fn ddb2(s: f64) -> f64 {
    12.0 * s - 6.0
}

impl ManufacturedCase {
    pub fn new(id: CaseId, nu: f64) -> Self {
        Self { id, nu }
    }

    pub fn exact(&self, x: f64, y: f64, t: f64) -> ExactValues {
        match self.id {
            CaseId::Example1 => {
                let s = t.sin();
                let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
                ExactValues {
                    u1: s * sx * sx * (2.0 * PI * y).sin(),
                    u2: -s * (2.0 * PI * x).sin() * sy * sy,
                    p: s * (sy - 2.0 / PI),
                }
            }
            CaseId::Example2 => {
                let t2 = t * t;
                ExactValues {
                    u1: -128.0 * t2 * a2(x) * b2(y),
                    u2: 128.0 * t2 * a2(y) * b2(x),
                    p: t2 * (x - 0.5),
                }
            }
        }
    }

    /// `f = u_t + (u·∇)u - nu Δu + ∇p` from hand-derived partial derivatives.
    pub fn forcing(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let nu = self.nu;
        match self.id {
            CaseId::Example1 => {
                let (s, c) = (t.sin(), t.cos());
                let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
                let (s2x, s2y) = ((2.0 * PI * x).sin(), (2.0 * PI * y).sin());
                let (c2x, c2y) = ((2.0 * PI * x).cos(), (2.0 * PI * y).cos());
                let pi2 = PI * PI;

                let u1 = s * sx * sx * s2y;
                let u2 = -s * s2x * sy * sy;

                let u1_t = c * sx * sx * s2y;
                let u1_x = s * PI * s2x * s2y;
                let u1_y = 2.0 * PI * s * sx * sx * c2y;
                let u1_xx = 2.0 * pi2 * s * c2x * s2y;
                let u1_yy = -4.0 * pi2 * s * sx * sx * s2y;

                let u2_t = -c * s2x * sy * sy;
                let u2_x = -2.0 * PI * s * c2x * sy * sy;
                let u2_y = -PI * s * s2x * s2y;
                let u2_xx = 4.0 * pi2 * s * s2x * sy * sy;
                let u2_yy = -2.0 * pi2 * s * s2x * c2y;

                let p_y = PI * s * (PI * y).cos();

                (
                    u1_t + u1 * u1_x + u2 * u1_y - nu * (u1_xx + u1_yy),
                    u2_t + u1 * u2_x + u2 * u2_y - nu * (u2_xx + u2_yy) + p_y,
                )
            }
            CaseId::Example2 => {
                let t2 = t * t;
                let k = 128.0;
                let u1 = -k * t2 * a2(x) * b2(y);
                let u2 = k * t2 * a2(y) * b2(x);

                let u1_t = -2.0 * k * t * a2(x) * b2(y);
                let u1_x = -2.0 * k * t2 * b2(x) * b2(y);
                let u1_y = -k * t2 * a2(x) * db2(y);
                let u1_xx = -2.0 * k * t2 * db2(x) * b2(y);
                let u1_yy = -k * t2 * a2(x) * ddb2(y);

                let u2_t = 2.0 * k * t * a2(y) * b2(x);
                let u2_x = k * t2 * a2(y) * db2(x);
                let u2_y = 2.0 * k * t2 * b2(y) * b2(x);
                let u2_xx = k * t2 * a2(y) * ddb2(x);
                let u2_yy = 2.0 * k * t2 * db2(y) * b2(x);

                let p_x = t2;

                (
                    u1_t + u1 * u1_x + u2 * u1_y - nu * (u1_xx + u1_yy) + p_x,
                    u2_t + u1 * u2_x + u2 * u2_y - nu * (u2_xx + u2_yy),
                )
            }
        }
    }

    /// Exact velocity at the staggered points and exact pressure at the
    /// centers with its discrete mean removed.
    pub fn sample_on_grid(&self, grid: Grid, t: f64) -> (VelocityField, CellField) {
        let u = VelocityField::from_fn(grid, |x, y| {
            let e = self.exact(x, y, t);
            (e.u1, e.u2)
        });
        let mut p = CellField::from_fn(grid, |x, y| self.exact(x, y, t).p);
        p.recenter();
        (u, p)
    }

    pub fn sample_forcing(&self, grid: Grid, t: f64) -> VelocityField {
        VelocityField::from_fn(grid, |x, y| self.forcing(x, y, t))
    }
}

/// Smooth, discretely divergence-free velocity with no penetration, built
/// from a random streamfunction on the grid nodes. Scaled to unit L² norm.
pub fn random_divergence_free(grid: Grid, seed: u64, modes: usize) -> VelocityField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = Vec::new();
    for k in 1..=modes {
        for l in 1..=modes {
            let c: f64 = rng.gen_range(-1.0..1.0);
            coeffs.push((k as f64, l as f64, c / (k * k + l * l) as f64));
        }
    }
    let (lx, ly) = (grid.x1 - grid.x0, grid.y1 - grid.y0);
    let psi = |i: usize, j: usize| -> f64 {
        let (x, y) = (i as f64 * grid.hx / lx, j as f64 * grid.hy / ly);
        coeffs
            .iter()
            .map(|&(k, l, c)| c * (k * PI * x).sin() * (l * PI * y).sin())
            .sum()
    };
    let mut w = VelocityField::zeros(grid);
    for i in 0..=grid.nx {
        for j in 0..grid.ny {
            w.u[[i, j]] = (psi(i, j + 1) - psi(i, j)) / grid.hy;
        }
    }
    for i in 0..grid.nx {
        for j in 0..=grid.ny {
            w.v[[i, j]] = -(psi(i + 1, j) - psi(i, j)) / grid.hx;
        }
    }
    // sin(kπ·0) and sin(kπ·1) leave rounding residue on the walls
    w.pin_boundary();
    let n = crate::mac::norm_l2(&w);
    if n > 0.0 {
        w = w.scaled(1.0 / n);
    }
    w
}
