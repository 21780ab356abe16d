use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcircle_core::LatticeRange;

use crate::config::{grid_arg, parse_range, Grid};
use crate::format::Format;

/// Uncertainty measures for a particle on a circle.
#[derive(Parser, Debug)]
#[command(name = "qcircle", version, propagate_version = true)]
pub struct Cli {
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Seed for random restarts.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Angular-momentum lattice window.
    #[arg(long, global = true, value_name = "MIN:MAX", allow_hyphen_values = true, value_parser = parse_range)]
    pub n_range: Option<LatticeRange>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML experiment configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate every measure on one state.
    Measure(MeasureArgs),
    /// Sweep the window origin for a packet.
    Sweep(SweepArgs),
    /// Minimize the uncertainty sum over lattice states.
    Minimize(MinimizeArgs),
    /// Free evolution under H = scale * J^2 / 2.
    Evolve(EvolveArgs),
    /// Box and split-box packets on the line.
    DemoLine(DemoLineArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Coherent,
    Cat,
    Squeezed,
    Eigen,
    Char,
    Uniform,
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    /// Mean angular momentum of the Gaussian families.
    #[arg(long, default_value_t = 0.0)]
    pub l: f64,
    /// Mean angle (radians).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Width parameter of the squeezed family.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Relative phase of the cat superposition (radians).
    #[arg(long, default_value_t = 0.0)]
    pub phase: f64,
    /// Eigenvalue of the angular-momentum eigenstate.
    #[arg(long, default_value_t = 0)]
    pub n: i64,
    /// Arc length of the characteristic packet (radians).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Read the state from a file written by `--dump-state`.
    #[arg(long, value_name = "PATH", conflicts_with = "state")]
    pub load_state: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Window origin for the windowed variance.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Also write the constructed state to PATH.
    #[arg(long, value_name = "PATH")]
    pub dump_state: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PacketKind {
    Char,
    Uniform,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = PacketKind::Char)]
    pub packet: PacketKind,
    /// Single arc length; without it the epsilon grid is swept.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_name = "START:STOP:COUNT", value_parser = grid_arg, allow_hyphen_values = true)]
    pub epsilon_grid: Option<Grid>,
    #[arg(long, value_name = "START:STOP:COUNT", value_parser = grid_arg, allow_hyphen_values = true)]
    pub lambda_grid: Option<Grid>,
}

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Stop a restart once a rebuilt simplex improves by no more than this.
    #[arg(long)]
    pub step_tol: Option<f64>,
    /// Centroids scanned for the coherent and cat reference values.
    #[arg(long, value_name = "START:STOP:COUNT", value_parser = grid_arg, allow_hyphen_values = true)]
    pub l_grid: Option<Grid>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_name = "START:STOP:COUNT", value_parser = grid_arg, allow_hyphen_values = true)]
    pub time_grid: Option<Grid>,
    /// Hamiltonian prefactor.
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Args, Debug)]
pub struct DemoLineArgs {
    /// Box length.
    #[arg(long = "L", value_name = "LENGTH", default_value_t = 1.0)]
    pub length: f64,
    /// Position variances for the Gaussian curve.
    #[arg(long, value_name = "START:STOP:COUNT", value_parser = grid_arg, allow_hyphen_values = true)]
    pub sigma_grid: Option<Grid>,
}
