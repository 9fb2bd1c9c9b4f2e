//! Closed-form scalar updates for the auxiliary variable.

use crate::error::{Error, Result};

fn checked_divide(coefficient: f64, rhs: f64, b2: f64, t: f64) -> Result<f64> {
    if coefficient.abs() < 1e-14 * rhs.abs().max(1.0) || !coefficient.is_finite() {
        return Err(Error::SingularScalar { coefficient, b2, t });
    }
    Ok(rhs / coefficient)
}

/// `S^{n+1}` of the first-order scheme from the linear equation
///
/// `[(T+dt)/(T dt) - e^{2t/T} b2] e^{-t/T} S = e^{t/T} b1 + q^n/dt`
///
/// where `b1 = (N, ũ₁)`, `b2 = (N, ũ₂)` and `t` is the new time level.
pub fn solve_sav_scalar(
    q_n: f64,
    t_next: f64,
    dt: f64,
    horizon: f64,
    b1: f64,
    b2: f64,
) -> Result<f64> {
    let grow = (t_next / horizon).exp();
    let coefficient = ((horizon + dt) / (horizon * dt) - grow * grow * b2) / grow;
    let rhs = grow * b1 + q_n / dt;
    checked_divide(coefficient, rhs, b2, t_next)
}

/// BDF2 counterpart:
///
/// `S [(3/(2dt) + 1/T) e^{-t/T} - e^{t/T} b2] = e^{t/T} b1 + (4q^n - q^{n-1})/(2dt)`
pub fn solve_sav_scalar_bdf2(
    q_n: f64,
    q_prev: f64,
    t_next: f64,
    dt: f64,
    horizon: f64,
    b1: f64,
    b2: f64,
) -> Result<f64> {
    let grow = (t_next / horizon).exp();
    let coefficient = (1.5 / dt + 1.0 / horizon) / grow - grow * b2;
    let rhs = grow * b1 + (4.0 * q_n - q_prev) / (2.0 * dt);
    checked_divide(coefficient, rhs, b2, t_next)
}

/// Real roots of `a q² + b q + c = 0`, the one closest to `reference`
/// first (ties go to the positive root).
pub fn select_root(a: f64, b: f64, c: f64, reference: f64) -> Result<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Ok(reference);
    }
    let roots: Vec<f64> = if a.abs() <= 1e-14 * scale {
        if b.abs() <= 1e-14 * scale {
            return Err(Error::NoRealRoot { a, b, c });
        }
        vec![-c / b]
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::NoRealRoot { a, b, c });
        }
        let half = -0.5 * (b + b.signum() * disc.sqrt());
        if half == 0.0 {
            vec![0.0]
        } else {
            vec![half / a, c / half]
        }
    };
    let best = roots
        .into_iter()
        .min_by(|x, y| {
            let (dx, dy) = ((x - reference).abs(), (y - reference).abs());
            dx.partial_cmp(&dy)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal))
        })
        .expect("at least one root");
    Ok(best)
}
