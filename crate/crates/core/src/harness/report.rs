use std::io::Write;

use super::ErrorNorm;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub dt: f64,
    /// Max over steps of the discrete L² velocity error.
    pub e_u_linf: f64,
    /// `sqrt(dt · Σ ‖e_p‖²)` with both pressures mean-free.
    pub e_p_l2: f64,
    /// Max over steps of `|q^n - q_ref(t^n)|`.
    pub e_q_linf: f64,
    /// Velocity error at the final time.
    pub e_u_final: f64,
    /// Scalar error at the final time.
    pub e_q_final: f64,
    /// Largest `|div u|` seen at any step.
    pub div_max: f64,
}

impl ErrorReport {
    /// `(e_u, e_p, e_q)` under the chosen time sampling.
    pub fn columns(&self, norm: ErrorNorm) -> (f64, f64, f64) {
        match norm {
            ErrorNorm::Max => (self.e_u_linf, self.e_p_l2, self.e_q_linf),
            ErrorNorm::Final => (self.e_u_final, self.e_p_l2, self.e_q_final),
        }
    }
}

/// `log(e_{k-1}/e_k) / log(dt_{k-1}/dt_k)` for consecutive pairs.
pub fn rates(errors: &[f64], dts: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != dts.len() || errors.len() < 2 {
        return Err(Error::UndefinedRate(format!(
            "need matching lists of length >= 2, got {} errors and {} dts",
            errors.len(),
            dts.len()
        )));
    }
    if let Some(bad) = errors
        .iter()
        .chain(dts)
        .find(|v| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::UndefinedRate(format!("non-positive entry {bad}")));
    }
    Ok(errors
        .windows(2)
        .zip(dts.windows(2))
        .map(|(e, d)| (e[0] / e[1]).ln() / (d[0] / d[1]).ln())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub e_u: f64,
    pub rate_u: Option<f64>,
    pub e_p: f64,
    pub rate_p: Option<f64>,
    pub e_q: f64,
    pub rate_q: Option<f64>,
}

impl ConvergenceRow {
    pub fn table(reports: &[ErrorReport], norm: ErrorNorm) -> Result<Vec<ConvergenceRow>> {
        let cols: Vec<(f64, f64, f64)> = reports.iter().map(|r| r.columns(norm)).collect();
        let mut rows: Vec<ConvergenceRow> = reports
            .iter()
            .zip(&cols)
            .map(|(r, &(e_u, e_p, e_q))| ConvergenceRow {
                dt: r.dt,
                e_u,
                rate_u: None,
                e_p,
                rate_p: None,
                e_q,
                rate_q: None,
            })
            .collect();
        if reports.len() < 2 {
            return Ok(rows);
        }
        let dts: Vec<f64> = reports.iter().map(|r| r.dt).collect();
        let ru = rates(&cols.iter().map(|c| c.0).collect::<Vec<_>>(), &dts)?;
        let rp = rates(&cols.iter().map(|c| c.1).collect::<Vec<_>>(), &dts)?;
        let rq = rates(&cols.iter().map(|c| c.2).collect::<Vec<_>>(), &dts)?;
        for (k, row) in rows.iter_mut().enumerate().skip(1) {
            row.rate_u = Some(ru[k - 1]);
            row.rate_p = Some(rp[k - 1]);
            row.rate_q = Some(rq[k - 1]);
        }
        Ok(rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyRow {
    pub n: usize,
    pub t: f64,
    pub energy: f64,
    /// `2 nu dt ‖∇ũ‖²`
    pub dissipation: f64,
    /// `E^{n+1} - E^n + dissipation`; non-positive when the energy law holds.
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyTrace {
    pub e0: f64,
    /// Largest violation a passing row may have.
    pub bound: f64,
    pub rows: Vec<EnergyRow>,
}

impl EnergyTrace {
    pub fn new(e0: f64, bound: f64) -> Self {
        Self {
            e0,
            bound,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: EnergyRow) {
        self.rows.push(row);
    }

    pub fn max_violation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.violation)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.violation <= self.bound)
    }
}

fn opt_rate(r: Option<f64>) -> String {
    r.map(|v| format!("{v:.4}")).unwrap_or_default()
}

pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dt", "e_u", "rate_u", "e_p", "rate_p", "e_q", "rate_q"])?;
    for row in rows {
        w.write_record([
            format!("{}", row.dt),
            format!("{:.6e}", row.e_u),
            opt_rate(row.rate_u),
            format!("{:.6e}", row.e_p),
            opt_rate(row.rate_p),
            format!("{:.6e}", row.e_q),
            opt_rate(row.rate_q),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_energy_csv<W: Write>(trace: &EnergyTrace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "t", "energy", "dissipation", "violation"])?;
    for row in &trace.rows {
        w.write_record([
            row.n.to_string(),
            format!("{}", row.t),
            format!("{:.15e}", row.energy),
            format!("{:.15e}", row.dissipation),
            format!("{:.6e}", row.violation),
        ])?;
    }
    w.flush()?;
    Ok(())
}
