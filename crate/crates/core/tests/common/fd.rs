//! Finite-difference residual of the manufactured solutions.

use savns::mms::ManufacturedCase;

const H: f64 = 1e-3;

/// Fourth-order central first derivative.
fn d1(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (-f(x + 2.0 * H) + 8.0 * f(x + H) - 8.0 * f(x - H) + f(x - 2.0 * H)) / (12.0 * H)
}

/// Fourth-order central second derivative.
fn d2(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (-f(x + 2.0 * H) + 16.0 * f(x + H) - 30.0 * f(x) + 16.0 * f(x - H) - f(x - 2.0 * H))
        / (12.0 * H * H)
}

/// Momentum residual `u_t + (u·∇)u - nu Δu + ∇p - f` and divergence.
pub fn residual(case: &ManufacturedCase, x: f64, y: f64, t: f64) -> (f64, f64, f64) {
    let u1 = |x: f64, y: f64, t: f64| case.exact(x, y, t).u1;
    let u2 = |x: f64, y: f64, t: f64| case.exact(x, y, t).u2;
    let p = |x: f64, y: f64, t: f64| case.exact(x, y, t).p;
    let e = case.exact(x, y, t);
    let (f1, f2) = case.forcing(x, y, t);

    let mut out = [0.0; 2];
    for (k, comp) in [&u1 as &dyn Fn(f64, f64, f64) -> f64, &u2]
        .into_iter()
        .enumerate()
    {
        let dt = d1(|s| comp(x, y, s), t);
        let dx = d1(|s| comp(s, y, t), x);
        let dy = d1(|s| comp(x, s, t), y);
        let lap = d2(|s| comp(s, y, t), x) + d2(|s| comp(x, s, t), y);
        let dp = if k == 0 {
            d1(|s| p(s, y, t), x)
        } else {
            d1(|s| p(x, s, t), y)
        };
        let f = if k == 0 { f1 } else { f2 };
        out[k] = dt + e.u1 * dx + e.u2 * dy - case.nu * lap + dp - f;
    }
    let div = d1(|s| u1(s, y, t), x) + d1(|s| u2(x, s, t), y);
    (out[0], out[1], div)
}
