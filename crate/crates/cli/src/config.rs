//! TOML experiment configuration and the `start:stop:count` grid syntax.
//!
//! A config file mirrors [`ExperimentConfig`]; every key is optional and
//! unknown keys are rejected:
//!
//! ```toml
//! seed = 42
//! n_range = [-8, 8]            # or "-8:8"
//! format = "json"
//! output = "report.json"
//! lambda_grid = "0:6.2:64"     # or an explicit array
//! epsilon_grid = [1.0, 2.0]
//! l_grid = [0.0, 0.5]
//! time_grid = "0:12.566370614359172:256"
//! sigma_sq_grid = "0.05:2:40"
//! hamiltonian_scale = 1.0
//!
//! [optimizer]
//! restarts = 32
//! max_iters = 40000
//! step_tol = 1e-12
//! ```

use std::path::{Path, PathBuf};

use qcircle_core::experiments::{linspace, ExperimentConfig};
use qcircle_core::LatticeRange;
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::format::Format;

/// Parses `start:stop:count` into an inclusive, evenly spaced grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(format!("expected start:stop:count, got `{text}`"));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number"))
    };
    let (start, stop) = (num(start)?, num(stop)?);
    if !start.is_finite() || !stop.is_finite() {
        return Err("grid endpoints must be finite".into());
    }
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| format!("`{count}` is not a point count"))?;
    if count == 0 {
        return Err("grid needs at least one point".into());
    }
    if count == 1 && start != stop {
        return Err("a one-point grid needs start == stop".into());
    }
    Ok(linspace(start, stop, count))
}

/// Parses `MIN:MAX` into a lattice range.
pub fn parse_range(text: &str) -> Result<LatticeRange, String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("expected MIN:MAX, got `{text}`"))?;
    let int = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|_| format!("`{s}` is not an integer"))
    };
    LatticeRange::new(int(lo)?, int(hi)?).map_err(|e| e.to_string())
}

/// Clap-friendly wrapper so a grid is one argument rather than many.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn grid_arg(text: &str) -> Result<Grid, String> {
    parse_grid(text).map(Grid)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridSpec {
    Points(Vec<f64>),
    Range(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RangeSpec {
    Pair([i64; 2]),
    Text(String),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OptimizerFile {
    restarts: Option<usize>,
    max_iters: Option<usize>,
    step_tol: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    n_range: Option<RangeSpec>,
    format: Option<Format>,
    output: Option<PathBuf>,
    lambda_grid: Option<GridSpec>,
    epsilon_grid: Option<GridSpec>,
    l_grid: Option<GridSpec>,
    time_grid: Option<GridSpec>,
    sigma_sq_grid: Option<GridSpec>,
    hamiltonian_scale: Option<f64>,
    optimizer: Option<OptimizerFile>,
}

/// Resolved settings: library config plus CLI-only choices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub experiment: ExperimentConfig,
    /// Whether the lattice window was chosen explicitly (file or flag).
    pub n_range_set: bool,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl Settings {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::from_toml(&text).map_err(|message| CliError::Config {
            path: path.to_owned(),
            message,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| e.to_string())?;
        let mut s = Settings::default();
        let cfg = &mut s.experiment;
        let grid = |g: Option<GridSpec>, key: &str, dst: &mut Vec<f64>| -> Result<(), String> {
            match g {
                Some(GridSpec::Points(p)) if p.is_empty() => Err(format!("{key}: grid is empty")),
                Some(GridSpec::Points(p)) => {
                    *dst = p;
                    Ok(())
                }
                Some(GridSpec::Range(r)) => {
                    *dst = parse_grid(&r).map_err(|e| format!("{key}: {e}"))?;
                    Ok(())
                }
                None => Ok(()),
            }
        };
        grid(file.lambda_grid, "lambda_grid", &mut cfg.lambda_grid)?;
        grid(file.epsilon_grid, "epsilon_grid", &mut cfg.epsilon_grid)?;
        grid(file.l_grid, "l_grid", &mut cfg.l_grid)?;
        grid(file.time_grid, "time_grid", &mut cfg.time_grid)?;
        grid(file.sigma_sq_grid, "sigma_sq_grid", &mut cfg.sigma_sq_grid)?;
        if let Some(r) = file.n_range {
            cfg.n_range = match r {
                RangeSpec::Pair([lo, hi]) => {
                    LatticeRange::new(lo, hi).map_err(|e| format!("n_range: {e}"))?
                }
                RangeSpec::Text(t) => parse_range(&t).map_err(|e| format!("n_range: {e}"))?,
            };
            s.n_range_set = true;
        }
        if let Some(seed) = file.seed {
            cfg.optimizer.seed = seed;
        }
        if let Some(h) = file.hamiltonian_scale {
            cfg.hamiltonian_scale = h;
        }
        let opt = file.optimizer.unwrap_or_default();
        if let Some(v) = opt.restarts {
            cfg.optimizer.restarts = v;
        }
        if let Some(v) = opt.max_iters {
            cfg.optimizer.max_iters = v;
        }
        if let Some(v) = opt.step_tol {
            cfg.optimizer.step_tol = v;
        }
        s.format = file.format;
        s.output = file.output;
        Ok(s)
    }
}
