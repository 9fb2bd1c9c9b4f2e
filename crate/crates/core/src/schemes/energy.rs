//! Modified energies whose per-step decay the first- and second-order
//! schemes guarantee in the unforced case.

use super::{SchemeParams, SolverState};
use crate::error::{Error, Result};
use crate::mac::{gradient, inner, inner_cell, VelocityField};

/// `‖u‖² + |q|² + dt²‖∇p‖²`
pub fn modified_energy1(state: &SolverState, params: &SchemeParams) -> f64 {
    let gp = gradient(&state.p);
    inner(&state.u, &state.u) + state.q * state.q + params.dt * params.dt * inner(&gp, &gp)
}

/// `‖u‖² + ‖2u - u_prev‖² + (4/3)dt²‖∇(p+g)‖² + (2dt/nu)‖g‖² + |q|² + |2q - q_prev|²`
pub fn modified_energy2(state: &SolverState, params: &SchemeParams) -> Result<f64> {
    let u_prev = state.u_prev.as_ref().ok_or(Error::MissingHistory)?;
    let q_prev = state.q_prev.ok_or(Error::MissingHistory)?;
    let dt = params.dt;

    let extrap = VelocityField::lin_comb(2.0, &state.u, -1.0, u_prev);
    let mut h = state.p.clone();
    h.axpy(1.0, &state.g);
    let gh = gradient(&h);
    let q2 = 2.0 * state.q - q_prev;

    Ok(inner(&state.u, &state.u)
        + inner(&extrap, &extrap)
        + 4.0 / 3.0 * dt * dt * inner(&gh, &gh)
        + 2.0 * dt / params.nu * inner_cell(&state.g, &state.g)
        + state.q * state.q
        + q2 * q2)
}
