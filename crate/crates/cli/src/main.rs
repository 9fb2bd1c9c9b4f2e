use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use savns::harness::{
    self, parse_dt, write_convergence_csv, write_energy_csv, CaseKind, ConvergenceRow, ErrorNorm,
    Mode, RunConfig, RunReport,
};
use savns::linsolve::Backend;
use savns::schemes::SchemeKind;
use savns::Error;

/// SAV pressure-correction Navier-Stokes solver on a MAC grid.
///
/// Every option can also be set as a flat key in a TOML file passed with
/// --config (keys: scheme, example, nx, ny, dt, nu, tfinal, c0, backend,
/// tol_rel, tol_abs, compat_tol, max_iter, seed, ic_scale, error_norm,
/// out, paper_mode). Command-line flags override file values.
#[derive(Parser, Debug)]
#[command(name = "savns", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Error norms and observed rates over a decreasing dt sweep.
    Converge(Opts),
    /// Per-step modified-energy trace of an unforced run.
    Stability(Opts),
    /// Error norms of one run.
    Single(Opts),
}

#[derive(Args, Debug)]
struct Opts {
    /// TOML file with run settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// sav1, sav2 or sav3.
    #[arg(long)]
    scheme: Option<String>,
    /// 1, 2 or stability.
    #[arg(long)]
    example: Option<String>,
    /// Cells per direction (also sets ny unless --ny is given).
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// Time step, as a decimal or a fraction like 1/80. Repeatable.
    #[arg(long, value_parser = parse_dt_arg)]
    dt: Vec<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    /// direct or cg.
    #[arg(long)]
    backend: Option<String>,
    /// Seed of the random initial field (stability).
    #[arg(long)]
    seed: Option<u64>,
    /// L² norm of the random initial field (stability); 0 starts from rest.
    #[arg(long)]
    ic_scale: Option<f64>,
    /// Time sampling of the e_u and e_q columns: max (over all steps) or
    /// final (at tfinal).
    #[arg(long)]
    error_norm: Option<String>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the 250 x 250 grid.
    #[arg(long)]
    paper_mode: bool,
}

fn parse_dt_arg(s: &str) -> Result<f64, String> {
    parse_dt(s).map_err(|e| e.to_string())
}

impl Opts {
    fn into_config(self, mode: Mode) -> savns::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => {
                let mut c = RunConfig::default();
                if mode == Mode::Stability {
                    c.example = CaseKind::StabilityIc;
                }
                c
            }
        };
        cfg.mode = mode;
        if let Some(s) = self.scheme {
            cfg.scheme = s.parse::<SchemeKind>()?;
        }
        if let Some(s) = self.example {
            cfg.example = s.parse::<CaseKind>()?;
        }
        if let Some(n) = self.nx {
            cfg.nx = n;
        }
        if self.ny.is_some() {
            cfg.ny = self.ny;
        }
        if !self.dt.is_empty() {
            cfg.dt = self.dt;
        }
        if let Some(v) = self.nu {
            cfg.nu = v;
        }
        if let Some(v) = self.tfinal {
            cfg.tfinal = v;
        }
        if let Some(v) = self.c0 {
            cfg.c0 = v;
        }
        if let Some(s) = self.backend {
            cfg.backend = s.parse::<Backend>()?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.ic_scale {
            cfg.ic_scale = v;
        }
        if let Some(s) = self.error_norm {
            cfg.error_norm = s.parse::<ErrorNorm>()?;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        cfg.paper_mode |= self.paper_mode;
        if mode == Mode::Single {
            cfg.dt.truncate(1);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn sink(path: Option<&Path>) -> savns::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// `out.csv` becomes `out-dt2.csv` for the third dt of a multi-dt trace.
fn indexed_path(path: &Path, k: usize) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-dt{k}.{ext}"),
        None => format!("{stem}-dt{k}"),
    };
    path.with_file_name(name)
}

/// Returns whether every checked invariant held.
fn run(cfg: &RunConfig) -> savns::Result<bool> {
    match cfg.mode {
        Mode::Converge => {
            let rows = harness::convergence_study(cfg)?;
            write_convergence_csv(&rows, sink(cfg.out.as_deref())?)?;
            Ok(true)
        }
        Mode::Single => {
            let outcome = harness::run_simulation(cfg)?;
            let RunReport::Errors(report) = outcome.report else {
                return Err(Error::Config(
                    "single mode needs a manufactured case".into(),
                ));
            };
            write_convergence_csv(
                &ConvergenceRow::table(&[report], cfg.error_norm)?,
                sink(cfg.out.as_deref())?,
            )?;
            Ok(true)
        }
        Mode::Stability => {
            let traces = harness::stability_study(cfg)?;
            let mut ok = true;
            for (k, (dt, trace)) in traces.iter().enumerate() {
                let path = match &cfg.out {
                    Some(p) if traces.len() > 1 => Some(indexed_path(p, k)),
                    other => other.clone(),
                };
                write_energy_csv(trace, sink(path.as_deref())?)?;
                let passed = trace.passed();
                eprintln!(
                    "dt = {dt}: max violation {:e} (bound {:e}) {}",
                    trace.max_violation(),
                    trace.bound,
                    if passed { "PASS" } else { "FAIL" }
                );
                ok &= passed;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, opts) = match cli.command {
        Command::Converge(o) => (Mode::Converge, o),
        Command::Stability(o) => (Mode::Stability, o),
        Command::Single(o) => (Mode::Single, o),
    };
    let result = opts.into_config(mode).and_then(|cfg| run(&cfg));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("savns: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("savns: {e}");
            ExitCode::from(1)
        }
    }
}
