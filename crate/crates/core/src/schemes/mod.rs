//! SAV pressure-correction time integrators.
//!
//! All three schemes treat the convection term explicitly and split each
//! step into two Helmholtz solves that share one operator: `ũ₁` carries the
//! known data (history, old pressure gradient, forcing) and `ũ₂` the
//! convection term. A scalar equation then fixes the weight of `ũ₂`, and a
//! Neumann Poisson solve projects the combination onto discretely
//! divergence-free fields.
//!
//! - [`SchemeKind::First`]: backward Euler, standard pressure correction.
//! - [`SchemeKind::SecondRotational`]: BDF2 with rotational pressure
//!   correction; the first step is taken with the first-order scheme.
//! - [`SchemeKind::NonlinearScalar`]: first-order scheme whose scalar is
//!   normalised by `sqrt(E(u^n) + C0)` and solves a quadratic every step.

mod energy;
mod scalar;

use serde::{Deserialize, Serialize};

pub use energy::{modified_energy1, modified_energy2};
pub use scalar::{select_root, solve_sav_scalar, solve_sav_scalar_bdf2};

use crate::error::{Error, Result};
use crate::linsolve::{EllipticSolver, Tolerances};
use crate::mac::{
    convect, divergence, gradient, inner, norm_h1_semi, CellField, Grid, VelocityField,
};
use crate::mms::ManufacturedCase;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "sav1")]
    First,
    #[serde(rename = "sav2")]
    SecondRotational,
    #[serde(rename = "sav3")]
    NonlinearScalar,
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sav1" => Ok(SchemeKind::First),
            "sav2" => Ok(SchemeKind::SecondRotational),
            "sav3" => Ok(SchemeKind::NonlinearScalar),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SchemeKind::First => "sav1",
            SchemeKind::SecondRotational => "sav2",
            SchemeKind::NonlinearScalar => "sav3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeParams {
    pub nu: f64,
    /// Final time; also the decay constant of the reference scalar `exp(-t/T)`.
    pub t_final: f64,
    pub dt: f64,
    pub scheme: SchemeKind,
    /// Shift under the square root of the nonlinear-scalar scheme.
    pub c0: f64,
    pub tol: Tolerances,
}

impl SchemeParams {
    pub fn new(scheme: SchemeKind, nu: f64, t_final: f64, dt: f64) -> Self {
        Self {
            nu,
            t_final,
            dt,
            scheme,
            c0: 1.0,
            tol: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.t_final > 0.0 && self.dt > 0.0 && self.c0 > 0.0) {
            return Err(Error::Config(format!(
                "nu, tfinal, dt and c0 must be positive (nu={}, tfinal={}, dt={}, c0={})",
                self.nu, self.t_final, self.dt, self.c0
            )));
        }
        if self.dt > self.t_final {
            return Err(Error::Config(format!(
                "dt = {} exceeds tfinal = {}",
                self.dt, self.t_final
            )));
        }
        Ok(())
    }

    /// Number of steps `T/dt`, if it is an integer to within rounding.
    pub fn steps(&self) -> Option<usize> {
        let n = self.t_final / self.dt;
        let r = n.round();
        ((n - r).abs() <= 1e-9 * r.max(1.0)).then_some(r as usize)
    }

    /// Largest divergence accepted after a projection.
    pub fn divergence_bound(&self) -> f64 {
        10.0 * self.tol.rel
    }
}

/// Right-hand side `f` of the momentum equation.
pub trait Forcing: Sync {
    /// `None` means `f ≡ 0`.
    fn sample(&self, grid: Grid, t: f64) -> Option<VelocityField>;
}

pub struct Unforced;

impl Forcing for Unforced {
    fn sample(&self, _grid: Grid, _t: f64) -> Option<VelocityField> {
        None
    }
}

impl Forcing for ManufacturedCase {
    fn sample(&self, grid: Grid, t: f64) -> Option<VelocityField> {
        Some(self.sample_forcing(grid, t))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub step: usize,
    pub t: f64,
    pub u: VelocityField,
    pub u_prev: Option<VelocityField>,
    pub p: CellField,
    pub q: f64,
    pub q_prev: Option<f64>,
    /// Rotational accumulator, `g^{n+1} = g^n + nu div ũ^{n+1}`.
    pub g: CellField,
}

impl SolverState {
    pub fn initial(u: VelocityField, mut p: CellField, q: f64) -> Self {
        p.recenter();
        let g = CellField::zeros(u.grid);
        Self {
            step: 0,
            t: 0.0,
            u,
            u_prev: None,
            p,
            q,
            q_prev: None,
            g,
        }
    }

    pub fn grid(&self) -> Grid {
        self.u.grid
    }
}

#[derive(Clone, Debug)]
pub struct StepDiagnostics {
    /// `S^{n+1} = e^{t/T} q^{n+1}`, or `θ = q^{n+1}/sqrt(E(u^n)+C0)` for the
    /// nonlinear-scalar scheme.
    pub s: f64,
    pub grad_tilde_norm_sq: f64,
    /// The scheme's modified energy after the step.
    pub energy: f64,
    pub div_max: f64,
    pub u_tilde: VelocityField,
}

/// Steps a state with one elliptic backend.
pub struct Integrator<'a> {
    pub params: SchemeParams,
    solver: &'a dyn EllipticSolver,
}

impl<'a> Integrator<'a> {
    pub fn new(params: SchemeParams, solver: &'a dyn EllipticSolver) -> Self {
        Self { params, solver }
    }

    pub fn solver(&self) -> &dyn EllipticSolver {
        self.solver
    }

    /// Solves `Δ_h φ = scale · div ũ` (Neumann) and returns
    /// `(ũ - ∇φ/scale, φ)`.
    pub fn project(
        &self,
        u_tilde: &VelocityField,
        scale: f64,
    ) -> Result<(VelocityField, CellField)> {
        let mut u = u_tilde.clone();
        u.pin_boundary();
        let mut rhs = divergence(&u).scaled(-scale);
        // with zero normal flux the divergence sums to zero; only rounding is left
        rhs.recenter();
        let (phi, _) = self.solver.solve_poisson_neumann(&rhs)?;
        u.axpy(-1.0 / scale, &gradient(&phi));
        Ok((u, phi))
    }

    /// Advances by one step with the configured scheme. The second-order
    /// scheme bootstraps its first step with the first-order one.
    pub fn step(
        &self,
        state: &SolverState,
        force: &dyn Forcing,
    ) -> Result<(SolverState, StepDiagnostics)> {
        let out = match self.params.scheme {
            SchemeKind::First => self.step_scheme1(state, force),
            SchemeKind::SecondRotational if state.u_prev.is_none() => {
                self.step_scheme1(state, force)
            }
            SchemeKind::SecondRotational => self.step_scheme2(state, force),
            SchemeKind::NonlinearScalar => self.step_scheme3(state, force),
        };
        out.map_err(|e| Error::Step {
            step: state.step + 1,
            source: Box::new(e),
        })
    }

    fn momentum_rhs(
        &self,
        history: VelocityField,
        p: &CellField,
        force: &dyn Forcing,
        t_next: f64,
    ) -> VelocityField {
        let mut rhs = history;
        rhs.axpy(-1.0, &gradient(p));
        if let Some(f) = force.sample(rhs.grid, t_next) {
            rhs.axpy(1.0, &f);
        }
        rhs
    }

    pub fn step_scheme1(
        &self,
        state: &SolverState,
        force: &dyn Forcing,
    ) -> Result<(SolverState, StepDiagnostics)> {
        let SchemeParams {
            nu, dt, t_final, ..
        } = self.params;
        let t_next = (state.step + 1) as f64 * dt;
        let alpha = 1.0 / dt;

        let n = convect(&state.u, &state.u);
        let rhs1 = self.momentum_rhs(state.u.scaled(alpha), &state.p, force, t_next);
        let (ut1, _) = self.solver.solve_helmholtz(&rhs1, alpha, nu)?;
        let (ut2, _) = self.solver.solve_helmholtz(&n.scaled(-1.0), alpha, nu)?;

        let s = solve_sav_scalar(
            state.q,
            t_next,
            dt,
            t_final,
            inner(&n, &ut1),
            inner(&n, &ut2),
        )?;
        let u_tilde = VelocityField::lin_comb(1.0, &ut1, s, &ut2);
        let (u, phi) = self.project(&u_tilde, alpha)?;

        let mut p = state.p.clone();
        p.axpy(1.0, &phi);
        p.recenter();

        let next = SolverState {
            step: state.step + 1,
            t: t_next,
            u,
            u_prev: Some(state.u.clone()),
            p,
            q: (-t_next / t_final).exp() * s,
            q_prev: Some(state.q),
            g: state.g.clone(),
        };
        let energy = match self.params.scheme {
            SchemeKind::SecondRotational => modified_energy2(&next, &self.params)?,
            _ => modified_energy1(&next, &self.params),
        };
        let diag = self.diagnostics(s, &next, energy, u_tilde);
        Ok((next, diag))
    }

    pub fn step_scheme2(
        &self,
        state: &SolverState,
        force: &dyn Forcing,
    ) -> Result<(SolverState, StepDiagnostics)> {
        let SchemeParams {
            nu, dt, t_final, ..
        } = self.params;
        let u_prev = state.u_prev.as_ref().ok_or(Error::MissingHistory)?;
        let q_prev = state.q_prev.ok_or(Error::MissingHistory)?;
        let t_next = (state.step + 1) as f64 * dt;
        let alpha = 1.5 / dt;

        let extrap = VelocityField::lin_comb(2.0, &state.u, -1.0, u_prev);
        let n = convect(&extrap, &extrap);
        let history = VelocityField::lin_comb(2.0 / dt, &state.u, -0.5 / dt, u_prev);
        let rhs1 = self.momentum_rhs(history, &state.p, force, t_next);
        let (ut1, _) = self.solver.solve_helmholtz(&rhs1, alpha, nu)?;
        let (ut2, _) = self.solver.solve_helmholtz(&n.scaled(-1.0), alpha, nu)?;

        let s = solve_sav_scalar_bdf2(
            state.q,
            q_prev,
            t_next,
            dt,
            t_final,
            inner(&n, &ut1),
            inner(&n, &ut2),
        )?;
        let u_tilde = VelocityField::lin_comb(1.0, &ut1, s, &ut2);
        let (u, psi) = self.project(&u_tilde, alpha)?;

        let div_tilde = divergence(&u_tilde);
        let mut p = state.p.clone();
        p.axpy(1.0, &psi);
        p.axpy(-nu, &div_tilde);
        p.recenter();
        let mut g = state.g.clone();
        g.axpy(nu, &div_tilde);

        let next = SolverState {
            step: state.step + 1,
            t: t_next,
            u,
            u_prev: Some(state.u.clone()),
            p,
            q: (-t_next / t_final).exp() * s,
            q_prev: Some(state.q),
            g,
        };
        let energy = modified_energy2(&next, &self.params)?;
        let diag = self.diagnostics(s, &next, energy, u_tilde);
        Ok((next, diag))
    }

    pub fn step_scheme3(
        &self,
        state: &SolverState,
        force: &dyn Forcing,
    ) -> Result<(SolverState, StepDiagnostics)> {
        let SchemeParams { nu, dt, c0, .. } = self.params;
        let t_next = (state.step + 1) as f64 * dt;
        let alpha = 1.0 / dt;
        let norm = (0.5 * inner(&state.u, &state.u) + c0).sqrt();

        let n = convect(&state.u, &state.u);
        let rhs1 = self.momentum_rhs(state.u.scaled(alpha), &state.p, force, t_next);
        let (ut1, _) = self.solver.solve_helmholtz(&rhs1, alpha, nu)?;
        let (ut2, _) = self.solver.solve_helmholtz(&n.scaled(-1.0), alpha, nu)?;
        let (u1, phi1) = self.project(&ut1, alpha)?;
        let (u2, phi2) = self.project(&ut2, alpha)?;

        // 2q(q - q^n)/dt = (A + θB, ũ₁ + θũ₂), θ = q/norm,
        // A = (u₁ - u^n)/dt, B = u₂/dt + N
        let a_field = VelocityField::lin_comb(alpha, &u1, -alpha, &state.u);
        let b_field = VelocityField::lin_comb(alpha, &u2, 1.0, &n);
        let qa = 2.0 / dt - inner(&b_field, &ut2) / (norm * norm);
        let qb = -2.0 * state.q / dt - (inner(&a_field, &ut2) + inner(&b_field, &ut1)) / norm;
        let qc = -inner(&a_field, &ut1);
        let q = select_root(qa, qb, qc, state.q)?;
        let theta = q / norm;

        let u_tilde = VelocityField::lin_comb(1.0, &ut1, theta, &ut2);
        let mut u = VelocityField::lin_comb(1.0, &u1, theta, &u2);
        u.pin_boundary();
        let mut p = state.p.clone();
        p.axpy(1.0, &phi1);
        p.axpy(theta, &phi2);
        p.recenter();

        let next = SolverState {
            step: state.step + 1,
            t: t_next,
            u,
            u_prev: Some(state.u.clone()),
            p,
            q,
            q_prev: Some(state.q),
            g: state.g.clone(),
        };
        let diag = self.diagnostics(theta, &next, q * q, u_tilde);
        Ok((next, diag))
    }

    fn diagnostics(
        &self,
        s: f64,
        next: &SolverState,
        energy: f64,
        u_tilde: VelocityField,
    ) -> StepDiagnostics {
        StepDiagnostics {
            s,
            grad_tilde_norm_sq: norm_h1_semi(&u_tilde).powi(2),
            energy,
            div_max: divergence(&next.u).max_abs(),
            u_tilde,
        }
    }
}
