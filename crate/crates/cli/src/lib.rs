//! Command-line front end: configuration, dispatch and output files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use clap::{Args, Parser, Subcommand};
use config::*;
use error::CliError;
use output::RunWriter;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "ncilw", version, about = "Elliptic functions, soliton PDEs and Calogero–Sutherland models")]
pub struct Cli {
    /// Output directory (default: $NCILW_OUT_DIR, then ./out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file; omitted fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub ell: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an elliptic function.
    Eval {
        /// wp1, wp1-prime, zeta1, wp1-shifted or c-const.
        function: Option<String>,
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x_im: Option<f64>,
    },
    /// Compare quadrature-fitted multipliers with closed forms and check the δ → ∞ limit.
    OperatorTest {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m_points: Option<usize>,
    },
    /// Integrate KdV, BO, ILW or the non-chiral system.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Classical Calogero–Moser–Sutherland dynamics.
    Cms {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_steps: Option<usize>,
    },
    /// Pole-ansatz solutions against the Benjamin–Ono solver.
    PoleCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Grid eigenvalues of the (generalized) elliptic Calogero–Sutherland Hamiltonian.
    Quantum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g: Option<f64>,
    },
}

fn load<T: DeserializeOwned + Validate>(path: Option<&Path>, patch: impl FnOnce(&mut toml::Table)) -> Result<T, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Io { path: p.display().to_string(), source: e })?,
        None => String::new(),
    };
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Schema {
        path: "<root>".into(),
        message: e.message().to_string(),
    })?;
    patch(&mut table);
    parse_config_str(&table.to_string())
}

fn set<V: Into<toml::Value>>(table: &mut toml::Table, key: &str, value: Option<V>) {
    if let Some(v) = value {
        table.insert(key.into(), v.into());
    }
}

fn set_common(t: &mut toml::Table, c: &Common) {
    set(t, "ell", c.ell);
    set(t, "delta", c.delta);
}

fn execute<T: Serialize>(
    dir: PathBuf,
    name: &str,
    cfg: &T,
    f: impl FnOnce(&T, &mut RunWriter) -> Result<(), CliError>,
) -> Result<PathBuf, CliError> {
    println!("ncilw {name} → {}", dir.display());
    let mut w = RunWriter::new(dir, name, cfg)?;
    match f(cfg, &mut w) {
        Ok(()) => {
            for c in &w.checks {
                println!("  [{}] {} = {:.3e} (tol {:.1e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
            }
            let failed = w.failed();
            let manifest = w.finish(None)?;
            if failed > 0 {
                return Err(CliError::ChecksFailed(failed));
            }
            Ok(manifest)
        }
        Err(e) => {
            // Config errors are raised before any output; numerical failures leave a partial manifest.
            if e.exit_code() == 3 {
                w.finish(Some(&e))?;
            }
            Err(e)
        }
    }
}

/// Runs one subcommand; returns the manifest path.
pub fn dispatch(cli: Cli) -> Result<PathBuf, CliError> {
    let dir = output::out_dir(cli.out.as_deref());
    match cli.command {
        Command::Eval { function, common, x, x_im } => {
            let cfg: EvalConfig = load(common.config.as_deref(), |t| {
                set_common(t, &common);
                set(t, "function", function);
                set(t, "x", x);
                set(t, "x_im", x_im);
            })?;
            execute(dir, "eval", &cfg, commands::eval)
        }
        Command::OperatorTest { common, m_points } => {
            let cfg: OperatorTestConfig = load(common.config.as_deref(), |t| {
                set_common(t, &common);
                set(t, "m_points", m_points.map(|m| m as i64));
            })?;
            execute(dir, "operator-test", &cfg, commands::operator_test)
        }
        Command::Simulate { common, dt, t_end } => {
            let cfg: SimulateConfig = load(common.config.as_deref(), |t| {
                set_common(t, &common);
                set(t, "dt", dt);
                set(t, "t_end", t_end);
            })?;
            execute(dir, "simulate", &cfg, commands::simulate)
        }
        Command::Cms { common, n_steps } => {
            let cfg: CmsConfig = load(common.config.as_deref(), |t| {
                set_common(t, &common);
                set(t, "n_steps", n_steps.map(|n| n as i64));
            })?;
            execute(dir, "cms", &cfg, commands::cms)
        }
        Command::PoleCheck { common } => {
            let cfg: PoleCheckConfig = load(common.config.as_deref(), |t| {
                set(t, "ell", common.ell);
                if common.delta.is_some() {
                    eprintln!("note: --delta does not enter pole-check and is ignored");
                }
            })?;
            execute(dir, "pole-check", &cfg, commands::pole_check)
        }
        Command::Quantum { common, g } => {
            let cfg: QuantumConfig = load(common.config.as_deref(), |t| {
                set_common(t, &common);
                set(t, "g", g);
            })?;
            execute(dir, "quantum", &cfg, commands::quantum)
        }
    }
}
