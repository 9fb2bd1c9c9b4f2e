use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsolve::{Backend, Tolerances};
use crate::mac::Grid;
use crate::schemes::{SchemeKind, SchemeParams};

/// Grid size used by `--paper-mode`.
pub const PAPER_GRID: usize = 250;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Converge,
    Stability,
    Single,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converge" => Ok(Mode::Converge),
            "stability" => Ok(Mode::Stability),
            "single" => Ok(Mode::Single),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseKind {
    #[serde(rename = "1")]
    Example1,
    #[serde(rename = "2")]
    Example2,
    /// Unforced flow from a smooth random divergence-free field.
    #[serde(rename = "stability")]
    StabilityIc,
}

impl std::str::FromStr for CaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(CaseKind::Example1),
            "2" => Ok(CaseKind::Example2),
            "stability" => Ok(CaseKind::StabilityIc),
            other => Err(Error::Config(format!("unknown example {other:?}"))),
        }
    }
}

/// Which time sampling fills the `e_u` and `e_q` table columns. The pressure
/// column is always `sqrt(dt · Σ ‖e_p‖²)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorNorm {
    /// Largest error over all steps.
    #[default]
    Max,
    /// Error at the final time.
    Final,
}

impl std::str::FromStr for ErrorNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(ErrorNorm::Max),
            "final" => Ok(ErrorNorm::Final),
            other => Err(Error::Config(format!("unknown error norm {other:?}"))),
        }
    }
}

/// Run configuration. Every key can be given in a flat TOML file and
/// overridden on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub scheme: SchemeKind,
    pub example: CaseKind,
    pub nx: usize,
    /// Defaults to `nx`.
    pub ny: Option<usize>,
    pub dt: Vec<f64>,
    pub nu: f64,
    pub tfinal: f64,
    pub c0: f64,
    pub backend: Backend,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub compat_tol: f64,
    pub max_iter: usize,
    /// Seed of the random initial field for stability runs.
    pub seed: u64,
    /// L² norm of the random initial field; 0 starts from rest.
    pub ic_scale: f64,
    pub error_norm: ErrorNorm,
    pub out: Option<PathBuf>,
    pub paper_mode: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tol = Tolerances::default();
        Self {
            mode: Mode::Converge,
            scheme: SchemeKind::First,
            example: CaseKind::Example1,
            nx: 128,
            ny: None,
            dt: vec![1.0 / 10.0, 1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0],
            nu: 0.1,
            tfinal: 1.0,
            c0: 1.0,
            backend: Backend::Direct,
            tol_rel: tol.rel,
            tol_abs: tol.abs,
            compat_tol: tol.compat,
            max_iter: tol.max_iter,
            seed: 2020,
            ic_scale: 1.0,
            error_norm: ErrorNorm::Max,
            out: None,
            paper_mode: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn grid(&self) -> Result<Grid> {
        let (nx, ny) = if self.paper_mode {
            (PAPER_GRID, PAPER_GRID)
        } else {
            (self.nx, self.ny.unwrap_or(self.nx))
        };
        Grid::new(nx, ny, 0.0, 0.0, 1.0, 1.0)
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel: self.tol_rel,
            abs: self.tol_abs,
            compat: self.compat_tol,
            max_iter: self.max_iter,
        }
    }

    pub fn params(&self, dt: f64) -> SchemeParams {
        SchemeParams {
            nu: self.nu,
            t_final: self.tfinal,
            dt,
            scheme: self.scheme,
            c0: self.c0,
            tol: self.tolerances(),
        }
    }

    /// Checks everything that can be checked before any compute.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if self.dt.is_empty() {
            return Err(Error::Config("at least one dt is required".into()));
        }
        for &dt in &self.dt {
            let p = self.params(dt);
            p.validate()?;
            if p.steps().is_none() {
                return Err(Error::Config(format!(
                    "tfinal / dt = {} / {} is not an integer",
                    self.tfinal, dt
                )));
            }
        }
        if !(self.tol_rel > 0.0 && self.tol_abs >= 0.0 && self.compat_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        match self.mode {
            Mode::Converge => {
                if self.dt.len() < 2 {
                    return Err(Error::Config(
                        "converge mode needs at least two dt values".into(),
                    ));
                }
                if self.dt.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(Error::Config("dt list must be strictly decreasing".into()));
                }
            }
            Mode::Stability => {
                if self.example != CaseKind::StabilityIc {
                    return Err(Error::Config(
                        "stability mode runs the unforced case (--example stability)".into(),
                    ));
                }
                if self.scheme == SchemeKind::NonlinearScalar {
                    return Err(Error::Config(
                        "stability mode checks the sav1 and sav2 energy laws".into(),
                    ));
                }
                if self.ic_scale < 0.0 {
                    return Err(Error::Config("ic_scale must be non-negative".into()));
                }
            }
            Mode::Single => {}
        }
        if self.mode != Mode::Stability && self.example == CaseKind::StabilityIc {
            return Err(Error::Config(
                "error norms need a manufactured case (--example 1 or 2)".into(),
            ));
        }
        Ok(())
    }
}

/// Parses `0.0125` or `1/80`.
pub fn parse_dt(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse dt {s:?}"));
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            num / den
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if !(v.is_finite() && v > 0.0) {
        return Err(bad());
    }
    Ok(v)
}
