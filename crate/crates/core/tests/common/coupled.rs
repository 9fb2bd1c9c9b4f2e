//! One time step of each scheme assembled as a single dense linear system
//! in `(ũ, u, φ, S, λ)`, where `λ` is the multiplier that makes the
//! singular divergence constraint square. The nonlinear-scalar scheme is
//! linear for a fixed `q`, so a secant iteration on its scalar equation
//! wraps the dense solve.

use nalgebra::{DMatrix, DVector};
use savns::mac::{convect, CellField, Grid, VelocityField};
use savns::mms::{random_divergence_free, CaseId, ManufacturedCase};
use savns::schemes::{SchemeParams, SolverState};

use super::{random_cells, rng, Layout};

/// Signature shared by the three dense steps.
pub type DenseFn = fn(&SolverState, &SchemeParams, &ManufacturedCase) -> DenseStep;

#[derive(Debug)]
pub struct DenseStep {
    pub u_tilde: VelocityField,
    pub u: VelocityField,
    pub p: CellField,
    pub q: f64,
    pub g: CellField,
}

/// Random consistent history at step 3 with Example 1 forcing.
pub fn random_state(g: Grid, seed: u64) -> SolverState {
    let mut r = rng(seed);
    let u = random_divergence_free(g, seed, 3).scaled(0.8);
    let u_prev = random_divergence_free(g, seed + 1, 3).scaled(0.7);
    let mut p = random_cells(g, &mut r);
    p.recenter();
    let mut gg = random_cells(g, &mut r).scaled(0.05);
    gg.recenter();
    let mut s = SolverState::initial(u, p, 0.93);
    s.step = 3;
    s.u_prev = Some(u_prev);
    s.q_prev = Some(0.97);
    s.g = gg;
    s
}

pub fn forcing_case(nu: f64) -> ManufacturedCase {
    ManufacturedCase::new(CaseId::Example1, nu)
}

struct Blocks {
    lay: Layout,
    n: usize,
    c: usize,
    helm: DMatrix<f64>,
    grad: DMatrix<f64>,
    div: DMatrix<f64>,
}

impl Blocks {
    fn new(g: Grid, alpha: f64, nu: f64) -> Self {
        let lay = Layout::new(g);
        let n = lay.int_len();
        let helm = DMatrix::<f64>::identity(n, n) * alpha - lay.laplacian_int() * nu;
        Self {
            lay,
            n,
            c: lay.cells(),
            helm,
            grad: lay.gradient_int(),
            div: lay.divergence_int(),
        }
    }

    /// Rows: momentum (n), projection (n), divergence (c), mean of φ (1),
    /// scalar (1). Columns: ũ, u, φ, S, λ. `scalar_row` is the momentum
    /// coefficient of `S` and `(coef_s, coef_u)` the scalar row.
    fn system(
        &self,
        alpha_proj: f64,
        n_vec: &DVector<f64>,
        coef_s: f64,
        coef_u: &DVector<f64>,
    ) -> DMatrix<f64> {
        let (n, c) = (self.n, self.c);
        let size = 2 * n + c + 2;
        let (iu, iphi, is, il) = (n, 2 * n, 2 * n + c, 2 * n + c + 1);
        let mut m = DMatrix::zeros(size, size);
        m.view_mut((0, 0), (n, n)).copy_from(&self.helm);
        m.view_mut((0, is), (n, 1)).copy_from(n_vec);
        m.view_mut((n, 0), (n, n))
            .copy_from(&(-DMatrix::<f64>::identity(n, n)));
        m.view_mut((n, iu), (n, n))
            .copy_from(&DMatrix::<f64>::identity(n, n));
        m.view_mut((n, iphi), (n, c))
            .copy_from(&(&self.grad / alpha_proj));
        m.view_mut((2 * n, iu), (c, n)).copy_from(&self.div);
        for k in 0..c {
            m[(2 * n + k, il)] = 1.0;
            m[(is, iphi + k)] = 1.0;
        }
        let ir = il;
        m[(ir, is)] = coef_s;
        for k in 0..n {
            m[(ir, k)] = coef_u[k];
        }
        m
    }

    fn unpack(&self, z: &DVector<f64>) -> (VelocityField, VelocityField, CellField, f64) {
        let (n, c) = (self.n, self.c);
        let ut = self.lay.int_field(&z.rows(0, n).into_owned());
        let u = self.lay.int_field(&z.rows(n, n).into_owned());
        let phi = self.lay.cell_field(&z.rows(2 * n, c).into_owned());
        (ut, u, phi, z[2 * n + c])
    }
}

fn rhs(blocks: &Blocks, momentum: &DVector<f64>, scalar: f64) -> DVector<f64> {
    let (n, c) = (blocks.n, blocks.c);
    let mut b = DVector::zeros(2 * n + c + 2);
    b.rows_mut(0, n).copy_from(momentum);
    b[2 * n + c + 1] = scalar;
    b
}

/// First-order scheme: backward Euler, pressure increment φ.
pub fn scheme1(state: &SolverState, params: &SchemeParams, case: &ManufacturedCase) -> DenseStep {
    let g = state.grid();
    let (dt, nu, tt) = (params.dt, params.nu, params.t_final);
    let t = (state.step + 1) as f64 * dt;
    let alpha = 1.0 / dt;
    let bl = Blocks::new(g, alpha, nu);
    let lay = bl.lay;
    let w = g.cell_area();

    let nv = lay.int_vec(&convect(&state.u, &state.u));
    let f = lay.int_vec(&case.sample_forcing(g, t));
    let mom = lay.int_vec(&state.u) * alpha - &bl.grad * lay.cell_vec(&state.p) + f;
    // (e^{-t/T}S - q^n)/dt = -e^{-t/T}S/T + e^{t/T}(N, ũ)
    let coef_s = (-t / tt).exp() * (1.0 / dt + 1.0 / tt);
    let coef_u = &nv * (-(t / tt).exp() * w);
    let m = bl.system(alpha, &nv, coef_s, &coef_u);
    let z = m
        .lu()
        .solve(&rhs(&bl, &mom, state.q / dt))
        .expect("regular system");
    let (u_tilde, u, phi, s) = bl.unpack(&z);
    let mut p = state.p.clone();
    p.axpy(1.0, &phi);
    p.recenter();
    DenseStep {
        u_tilde,
        u,
        p,
        q: (-t / tt).exp() * s,
        g: state.g.clone(),
    }
}

/// BDF2 rotational scheme from a state with history.
pub fn scheme2(state: &SolverState, params: &SchemeParams, case: &ManufacturedCase) -> DenseStep {
    let g = state.grid();
    let (dt, nu, tt) = (params.dt, params.nu, params.t_final);
    let t = (state.step + 1) as f64 * dt;
    let alpha = 1.5 / dt;
    let bl = Blocks::new(g, alpha, nu);
    let lay = bl.lay;
    let w = g.cell_area();
    let u_prev = state.u_prev.as_ref().unwrap();
    let q_prev = state.q_prev.unwrap();

    let bar = VelocityField::lin_comb(2.0, &state.u, -1.0, u_prev);
    let nv = lay.int_vec(&convect(&bar, &bar));
    let f = lay.int_vec(&case.sample_forcing(g, t));
    let mom = lay.int_vec(&state.u) * (2.0 / dt)
        - lay.int_vec(u_prev) * (0.5 / dt)
        - &bl.grad * lay.cell_vec(&state.p)
        + f;
    let coef_s = (-t / tt).exp() * (1.5 / dt + 1.0 / tt);
    let coef_u = &nv * (-(t / tt).exp() * w);
    let m = bl.system(alpha, &nv, coef_s, &coef_u);
    let scalar = (4.0 * state.q - q_prev) / (2.0 * dt);
    let z = m
        .lu()
        .solve(&rhs(&bl, &mom, scalar))
        .expect("regular system");
    let (u_tilde, u, psi, s) = bl.unpack(&z);

    let div_t = lay.cell_field(&(&bl.div * lay.int_vec(&u_tilde)));
    let mut p = state.p.clone();
    p.axpy(1.0, &psi);
    p.axpy(-nu, &div_t);
    p.recenter();
    let mut gg = state.g.clone();
    gg.axpy(nu, &div_t);
    DenseStep {
        u_tilde,
        u,
        p,
        q: (-t / tt).exp() * s,
        g: gg,
    }
}

/// Nonlinear-scalar scheme: dense linear step for a given θ, secant on
/// `2q(q - q^n)/dt = ((u - u^n)/dt + θN, ũ)`.
pub fn scheme3(state: &SolverState, params: &SchemeParams, case: &ManufacturedCase) -> DenseStep {
    let g = state.grid();
    let (dt, nu) = (params.dt, params.nu);
    let t = (state.step + 1) as f64 * dt;
    let alpha = 1.0 / dt;
    let bl = Blocks::new(g, alpha, nu);
    let lay = bl.lay;
    let w = g.cell_area();
    let un = lay.int_vec(&state.u);
    let norm = (0.5 * w * un.dot(&un) + params.c0).sqrt();

    let nv = lay.int_vec(&convect(&state.u, &state.u));
    let f = lay.int_vec(&case.sample_forcing(g, t));
    let base = &un * alpha - &bl.grad * lay.cell_vec(&state.p) + f;
    // the S column and scalar row are unused: pin S = 0 with a unit row
    let mut m = bl.system(alpha, &DVector::zeros(bl.n), 1.0, &DVector::zeros(bl.n));
    let lu = {
        let ir = 2 * bl.n + bl.c + 1;
        m[(ir, ir - 1)] = 1.0;
        m.lu()
    };
    let solve = |q: f64| {
        let theta = q / norm;
        let z = lu
            .solve(&rhs(&bl, &(&base - &nv * theta), 0.0))
            .expect("regular system");
        let (ut, u, phi, _) = bl.unpack(&z);
        let x = (lay.int_vec(&u) - &un) / dt + &nv * theta;
        let resid = 2.0 * q * (q - state.q) / dt - w * x.dot(&lay.int_vec(&ut));
        (resid, ut, u, phi)
    };

    let (mut q0, mut q1) = (state.q, state.q * 1.001 + 1e-3);
    let (mut r0, mut r1) = (solve(q0).0, solve(q1).0);
    for _ in 0..100 {
        if r1 == 0.0 || (q1 - q0).abs() < 1e-15 * q1.abs().max(1.0) {
            break;
        }
        let q2 = q1 - r1 * (q1 - q0) / (r1 - r0);
        (q0, r0) = (q1, r1);
        q1 = q2;
        r1 = solve(q1).0;
    }
    let (_, u_tilde, u, phi) = solve(q1);
    let mut p = state.p.clone();
    p.axpy(1.0, &phi);
    p.recenter();
    DenseStep {
        u_tilde,
        u,
        p,
        q: q1,
        g: state.g.clone(),
    }
}
