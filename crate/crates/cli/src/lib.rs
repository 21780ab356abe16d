//! Command-line front end for `qcircle-core`.
//!
//! ```text
//! qcircle [--output PATH] [--seed N] [--n-range MIN:MAX] [--format csv|json] [--config PATH] <verb> ...
//! ```
//!
//! Verbs: `measure`, `sweep`, `minimize`, `evolve`, `demo-line`. Exit status is
//! 0 on success, 2 for usage or input errors, 3 when an internal consistency
//! identity fails and 1 for I/O failures.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod state_file;

use args::{Cli, Command};
use config::Settings;
pub use error::{CliError, CliResult};

/// Parses `argv` (program name first), runs the verb and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

/// [`run`] with explicit output and diagnostic streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Merges defaults, the config file and command-line flags, in that order.
pub fn resolve_settings(cli: &Cli) -> CliResult<Settings> {
    let mut s = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    if let Some(seed) = cli.seed {
        s.experiment.optimizer.seed = seed;
    }
    if let Some(r) = cli.n_range {
        s.experiment.n_range = r;
        s.n_range_set = true;
    }
    if cli.format.is_some() {
        s.format = cli.format;
    }
    if cli.output.is_some() {
        s.output = cli.output.clone();
    }
    s.experiment.output_path = s.output.as_ref().map(|p| p.display().to_string());
    Ok(s)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let settings = resolve_settings(cli)?;
    let bytes = match &cli.command {
        Command::Measure(a) => commands::measure(a, &settings)?,
        Command::Sweep(a) => commands::sweep(a, &settings)?,
        Command::Minimize(a) => commands::minimize(a, &settings)?,
        Command::Evolve(a) => commands::evolve(a, &settings)?,
        Command::DemoLine(a) => commands::demo_line(a, &settings)?,
    };
    match &settings.output {
        Some(path) => std::fs::write(path, &bytes).map_err(CliError::io(path)),
        None => out.write_all(&bytes).map_err(CliError::io("<stdout>")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("qcircle").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn coherent_measure_json() {
        let (code, out, _) =
            run_capture(&["measure", "--state", "coherent", "--l", "0", "--alpha", "0"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert!((v["kr_angle"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(v["state"]["family"], "coherent");
    }

    #[test]
    fn usage_errors_exit_two() {
        for args in [
            &["frobnicate"][..],
            &["measure", "--state", "coherent", "--bogus", "1"],
            &["measure"],
            &["measure", "--state", "char"],
            &["--n-range", "5:1", "measure", "--state", "coherent"],
            &["sweep", "--lambda-grid", "0:1"],
            &["demo-line", "--L", "-1"],
        ] {
            let (code, _, err) = run_capture(args);
            assert_eq!(code, 2, "{args:?}: {err}");
            assert!(!err.is_empty());
        }
    }

    #[test]
    fn help_exits_zero_on_stdout() {
        let (code, out, err) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("demo-line") && err.is_empty());
    }

    #[test]
    fn negative_values_parse() {
        let (code, out, err) = run_capture(&[
            "--n-range",
            "-40:40",
            "measure",
            "--state",
            "coherent",
            "--l",
            "-2.5",
            "--alpha",
            "-1",
        ]);
        assert_eq!(code, 0, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["state"]["n_min"], -40);
        assert!((v["kr_angle"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lambda_outside_window_domain_is_usage_error() {
        let (code, _, err) = run_capture(&["sweep", "--epsilon", "1", "--lambda-grid", "0:7:3"]);
        assert_eq!(code, 2);
        assert!(err.contains("lambda"));
    }

    #[test]
    fn consistency_failure_exits_three_naming_identity() {
        let e = CliError::from(qcircle_core::Error::Consistency {
            identity: "origin-shift variance identity",
            lhs: 1.0,
            rhs: 2.0,
        });
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("origin-shift variance identity"));
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from(["qcircle", "--seed", "9", "minimize"]).unwrap();
        let s = resolve_settings(&cli).unwrap();
        assert_eq!(s.experiment.optimizer.seed, 9);
        assert!(!s.n_range_set);
    }
}
