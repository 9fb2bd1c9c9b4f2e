//! Constant-coefficient elliptic solves used by every time step: the
//! velocity Helmholtz problem `(alpha I - nu Δ_h) w = rhs` with homogeneous
//! Dirichlet data and the pure-Neumann pressure Poisson problem
//! `-Δ_h φ = rhs`.
//!
//! Two interchangeable backends sit behind [`EllipticSolver`]: a direct
//! solver that diagonalises the separable stencils with sine/cosine bases,
//! and a Jacobi-preconditioned conjugate gradient.

mod cg;
mod spectral;

use serde::{Deserialize, Serialize};

pub use cg::CgSolver;
pub use spectral::SpectralSolver;

use crate::error::{Error, Result};
use crate::mac::{self, CellField, Grid, VelocityField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    /// Allowed mean component of a Neumann right-hand side, relative to its norm.
    pub compat: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: 1e-11,
            abs: 1e-14,
            compat: 1e-10,
            max_iter: 20_000,
        }
    }
}

impl Tolerances {
    pub fn threshold(&self, rhs_norm: f64) -> f64 {
        self.abs + self.rel * rhs_norm
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_l2: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Direct,
    Cg,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Backend::Direct),
            "cg" => Ok(Backend::Cg),
            other => Err(Error::Config(format!("unknown backend {other:?}"))),
        }
    }
}

pub trait EllipticSolver: Send + Sync {
    fn grid(&self) -> Grid;

    fn tolerances(&self) -> Tolerances;

    /// Solves `(alpha I - nu Δ_h) w = rhs`; boundary-normal entries of
    /// `rhs` are ignored and those of `w` are zero.
    fn solve_helmholtz(
        &self,
        rhs: &VelocityField,
        alpha: f64,
        nu: f64,
    ) -> Result<(VelocityField, SolveReport)>;

    /// Solves `-Δ_h φ = rhs` with homogeneous Neumann data and returns the
    /// mean-zero solution.
    fn solve_poisson_neumann(&self, rhs: &CellField) -> Result<(CellField, SolveReport)>;
}

pub fn make_solver(backend: Backend, grid: Grid, tol: Tolerances) -> Box<dyn EllipticSolver> {
    match backend {
        Backend::Direct => Box::new(SpectralSolver::new(grid, tol)),
        Backend::Cg => Box::new(CgSolver::new(grid, tol)),
    }
}

/// `alpha w - nu Δ_h w` on interior unknowns, zero on boundary-normal edges.
pub fn apply_helmholtz(w: &VelocityField, alpha: f64, nu: f64) -> VelocityField {
    let mut pinned = w.clone();
    pinned.pin_boundary();
    let mut out = mac::laplacian_dirichlet(&pinned, -nu);
    out.axpy(alpha, &pinned);
    out
}

/// `-Δ_h φ`, the Neumann Laplacian at centers (`-div grad`).
pub fn apply_neg_neumann_laplacian(p: &CellField) -> CellField {
    mac::divergence(&mac::gradient(p)).scaled(-1.0)
}

/// Residual field of the Helmholtz problem and the norm of the pinned rhs.
pub(crate) fn helmholtz_residual(
    rhs: &VelocityField,
    w: &VelocityField,
    alpha: f64,
    nu: f64,
) -> (VelocityField, f64) {
    let mut b = rhs.clone();
    b.pin_boundary();
    let mut r = b.clone();
    r.axpy(-1.0, &apply_helmholtz(w, alpha, nu));
    (r, mac::norm_l2(&b))
}

/// Validates solvability of the pure-Neumann problem and returns the
/// mean-free right-hand side.
pub(crate) fn neumann_compatible(rhs: &CellField, tol: &Tolerances) -> Result<CellField> {
    let norm = mac::norm_cell(rhs);
    let mean_part = rhs.mean().abs() * rhs.grid.area().sqrt();
    let limit = tol.compat * norm;
    if mean_part > limit {
        return Err(Error::IncompatibleRhs { mean_part, limit });
    }
    let mut b = rhs.clone();
    b.recenter();
    Ok(b)
}

pub(crate) fn neumann_residual(rhs: &CellField, phi: &CellField) -> CellField {
    let mut r = rhs.clone();
    r.axpy(-1.0, &apply_neg_neumann_laplacian(phi));
    r
}
