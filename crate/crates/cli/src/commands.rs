//! Verb implementations. Each returns the artifact bytes; writing is done by the caller.

use qcircle_core::experiments::{
    free_evolution, lambda_sweep, line_demo, minimize_uncertainty_sum, StartKind,
};
use qcircle_core::families::{
    cat_state, char_packet, coherent_state, squeezed_state, uniform_packet, CoherentParams,
};
use qcircle_core::{FourierState, LatticeRange, UncertaintyReport};
use serde::Serialize;

use crate::args::{
    DemoLineArgs, EvolveArgs, MeasureArgs, MinimizeArgs, PacketKind, StateArgs, StateKind,
    SweepArgs,
};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::format::{cell, fmt_num, to_json, Format, Num, Table, SCHEMA_VERSION};
use crate::state_file::{self, AnyState};

/// Column order of every CSV artifact.
pub mod headers {
    pub const MEASURE: &[&str] = &[
        "lambda",
        "circ_variance",
        "kr_angle",
        "j_variance",
        "sum_kr",
        "u2_magnitude",
    ];
    pub const SWEEP: &[&str] = &[
        "epsilon",
        "lambda",
        "circ_variance",
        "difference",
        "origin_shift_rhs",
        "closed_form_difference",
        "kr_angle",
    ];
    pub const MINIMIZE: &[&str] = &[
        "index",
        "start",
        "start_value",
        "final_value",
        "iterations",
        "evaluations",
        "converged",
    ];
    pub const EVOLVE: &[&str] = &[
        "t",
        "phase_estimate",
        "u1_magnitude",
        "windowed_mean",
        "norm",
        "circ_variance",
        "kr_angle",
        "j_variance",
        "sum_kr",
    ];
    pub const DEMO_LINE: &[&str] = &["sigma_sq", "heisenberg_sum"];
}

/// Lattice window for single-state verbs when none is configured.
pub const STATE_N_RANGE: LatticeRange = LatticeRange {
    n_min: -64,
    n_max: 64,
};

#[derive(Serialize, Default)]
struct StateDesc {
    family: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_min: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
}

#[derive(Serialize)]
struct ReportJson {
    lambda: Num,
    circ_variance: Num,
    kr_angle: Num,
    j_variance: Num,
    sum_kr: Num,
    u2_magnitude: Num,
}

impl From<&UncertaintyReport> for ReportJson {
    fn from(r: &UncertaintyReport) -> Self {
        Self {
            lambda: r.lambda.into(),
            circ_variance: r.circ_variance.into(),
            kr_angle: r.kr_angle.into(),
            j_variance: r.j_variance.into(),
            sum_kr: r.sum_kr.into(),
            u2_magnitude: r.u2_magnitude.into(),
        }
    }
}

fn report_cells(r: &UncertaintyReport) -> Vec<String> {
    [
        r.lambda,
        r.circ_variance,
        r.kr_angle,
        r.j_variance,
        r.sum_kr,
        r.u2_magnitude,
    ]
    .map(fmt_num)
    .to_vec()
}

#[derive(Serialize)]
struct CoeffsJson {
    n_min: i64,
    n_max: i64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<&FourierState> for CoeffsJson {
    fn from(s: &FourierState) -> Self {
        Self {
            n_min: s.n_min(),
            n_max: s.n_max(),
            re: s.coeffs().iter().map(|c| c.re).collect(),
            im: s.coeffs().iter().map(|c| c.im).collect(),
        }
    }
}

fn state_range(settings: &Settings) -> LatticeRange {
    if settings.n_range_set {
        settings.experiment.n_range
    } else {
        STATE_N_RANGE
    }
}

fn build_state(args: &StateArgs, range: LatticeRange) -> CliResult<(AnyState, StateDesc)> {
    if let Some(path) = &args.load_state {
        let state = state_file::load(path)?;
        let desc = match &state {
            AnyState::Fourier(s) => StateDesc {
                family: "fourier_state",
                n_min: Some(s.n_min()),
                n_max: Some(s.n_max()),
                source: Some(path.display().to_string()),
                ..Default::default()
            },
            AnyState::Packet(_) => StateDesc {
                family: "piecewise_packet",
                source: Some(path.display().to_string()),
                ..Default::default()
            },
        };
        return Ok((state, desc));
    }
    let kind = args
        .state
        .ok_or_else(|| CliError::Usage("one of --state or --load-state is required".into()))?;
    let lattice = |family, desc: StateDesc| StateDesc {
        family,
        n_min: Some(range.n_min),
        n_max: Some(range.n_max),
        ..desc
    };
    let gaussian = StateDesc {
        l: Some(Num(args.l)),
        alpha: Some(Num(args.alpha)),
        ..Default::default()
    };
    Ok(match kind {
        StateKind::Coherent => (
            AnyState::Fourier(coherent_state(args.l, args.alpha, range)?),
            lattice("coherent", gaussian),
        ),
        StateKind::Squeezed => {
            let p = CoherentParams::new(args.l, args.alpha, args.s)?;
            (
                AnyState::Fourier(squeezed_state(&p, range)?),
                lattice(
                    "squeezed",
                    StateDesc {
                        s: Some(Num(args.s)),
                        ..gaussian
                    },
                ),
            )
        }
        StateKind::Cat => {
            let p = CoherentParams::coherent(args.l, args.alpha)?;
            let desc = StateDesc {
                phase: Some(Num(args.phase)),
                ..gaussian
            };
            (
                AnyState::Fourier(cat_state(&p, args.phase, range)?),
                lattice("cat", desc),
            )
        }
        StateKind::Eigen => (
            AnyState::Fourier(FourierState::basis(args.n, range.n_min, range.n_max)?),
            lattice(
                "eigen",
                StateDesc {
                    n: Some(args.n),
                    ..Default::default()
                },
            ),
        ),
        StateKind::Char => {
            let eps = args
                .epsilon
                .ok_or_else(|| CliError::Usage("--state char requires --epsilon".into()))?;
            (
                AnyState::Packet(char_packet(eps)?),
                StateDesc {
                    family: "char",
                    epsilon: Some(Num(eps)),
                    ..Default::default()
                },
            )
        }
        StateKind::Uniform => (
            AnyState::Packet(uniform_packet()),
            StateDesc {
                family: "uniform",
                ..Default::default()
            },
        ),
    })
}

pub fn measure(args: &MeasureArgs, settings: &Settings) -> CliResult<Vec<u8>> {
    let (state, desc) = build_state(&args.state, state_range(settings))?;
    if let Some(path) = &args.dump_state {
        std::fs::write(path, state_file::encode(&state)).map_err(CliError::io(path))?;
    }
    let report = match &state {
        AnyState::Fourier(s) => UncertaintyReport::of_fourier(s, args.lambda)?,
        AnyState::Packet(p) => UncertaintyReport::of_packet(p, args.lambda)?,
    };
    Ok(match settings.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut t = Table::new(headers::MEASURE);
            t.push(report_cells(&report));
            t.to_bytes()
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                schema_version: u32,
                kind: &'static str,
                state: StateDesc,
                #[serde(flatten)]
                report: ReportJson,
            }
            to_json(&Doc {
                schema_version: SCHEMA_VERSION,
                kind: "uncertainty_report",
                state: desc,
                report: (&report).into(),
            })
        }
    })
}

#[derive(Serialize)]
struct SweepRowJson {
    lambda: Num,
    circ_variance: Num,
    difference: Num,
    origin_shift_rhs: Num,
    closed_form_difference: Option<Num>,
    kr_angle: Num,
}

#[derive(Serialize)]
struct SweepJson {
    epsilon: Option<Num>,
    kr_spread: Num,
    rows: Vec<SweepRowJson>,
}

pub fn sweep(args: &SweepArgs, settings: &Settings) -> CliResult<Vec<u8>> {
    let mut cfg = settings.experiment.clone();
    if let Some(g) = &args.lambda_grid {
        cfg.lambda_grid = g.0.clone();
    }
    let packets = match args.packet {
        PacketKind::Uniform => vec![(None, uniform_packet())],
        PacketKind::Char => {
            let eps = match (args.epsilon, &args.epsilon_grid) {
                (Some(e), None) => vec![e],
                (None, Some(g)) => g.0.clone(),
                (None, None) => cfg.epsilon_grid.clone(),
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage(
                        "--epsilon and --epsilon-grid are exclusive".into(),
                    ))
                }
            };
            eps.into_iter()
                .map(|e| char_packet(e).map(|p| (Some(e), p)))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let sweeps = packets
        .iter()
        .map(|(eps, p)| lambda_sweep(p, &cfg).map(|s| (*eps, s)))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(match settings.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(headers::SWEEP);
            for (eps, s) in &sweeps {
                for r in &s.rows {
                    t.push(vec![
                        cell(*eps),
                        fmt_num(r.lambda),
                        fmt_num(r.circ_variance),
                        fmt_num(r.difference),
                        fmt_num(r.origin_shift_rhs),
                        cell(r.closed_form),
                        fmt_num(r.kr_angle),
                    ]);
                }
            }
            t.to_bytes()
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                schema_version: u32,
                kind: &'static str,
                packet: &'static str,
                sweeps: Vec<SweepJson>,
            }
            let sweeps = sweeps
                .iter()
                .map(|(eps, s)| SweepJson {
                    epsilon: eps.map(Num),
                    kr_spread: Num(s.kr_spread),
                    rows: s
                        .rows
                        .iter()
                        .map(|r| SweepRowJson {
                            lambda: r.lambda.into(),
                            circ_variance: r.circ_variance.into(),
                            difference: r.difference.into(),
                            origin_shift_rhs: r.origin_shift_rhs.into(),
                            closed_form_difference: r.closed_form.map(Num),
                            kr_angle: r.kr_angle.into(),
                        })
                        .collect(),
                })
                .collect();
            let packet = match args.packet {
                PacketKind::Char => "char",
                PacketKind::Uniform => "uniform",
            };
            to_json(&Doc {
                schema_version: SCHEMA_VERSION,
                kind: "lambda_sweep",
                packet,
                sweeps,
            })
        }
    })
}

fn start_label(s: &StartKind) -> String {
    match s {
        StartKind::Coherent { l } => format!("coherent(l={})", fmt_num(*l)),
        StartKind::Eigen { n } => format!("eigen(n={n})"),
        StartKind::Cat { l } => format!("cat(l={})", fmt_num(*l)),
        StartKind::Random => "random".into(),
    }
}

pub fn minimize(args: &MinimizeArgs, settings: &Settings) -> CliResult<Vec<u8>> {
    let mut cfg = settings.experiment.clone();
    if let Some(v) = args.restarts {
        cfg.optimizer.restarts = v;
    }
    if let Some(v) = args.max_iters {
        cfg.optimizer.max_iters = v;
    }
    if let Some(v) = args.step_tol {
        cfg.optimizer.step_tol = v;
    }
    if let Some(g) = &args.l_grid {
        cfg.l_grid = g.0.clone();
    }
    let rep = minimize_uncertainty_sum(&cfg)?;

    Ok(match settings.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut t = Table::new(headers::MINIMIZE);
            for r in &rep.restarts {
                t.push(vec![
                    r.index.to_string(),
                    start_label(&r.start),
                    fmt_num(r.start_value),
                    fmt_num(r.final_value),
                    r.iterations.to_string(),
                    r.evaluations.to_string(),
                    r.converged.to_string(),
                ]);
            }
            t.to_bytes()
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Family {
                value: Num,
                l: Num,
            }
            #[derive(Serialize)]
            struct Alignment {
                l: Num,
                alpha: Num,
                phase: Num,
                overlap: Num,
            }
            #[derive(Serialize)]
            struct Restart {
                index: usize,
                start: String,
                start_value: Num,
                final_value: Num,
                iterations: usize,
                evaluations: usize,
                converged: bool,
            }
            #[derive(Serialize)]
            struct Doc {
                schema_version: u32,
                kind: &'static str,
                method: &'static str,
                n_range: [i64; 2],
                seed: u64,
                max_iters: usize,
                step_tol: Num,
                best_value: Num,
                below_one: bool,
                best_restart: usize,
                all_converged: bool,
                best_report: ReportJson,
                coherent: Family,
                cat: Family,
                cat_overlap: Num,
                cat_alignment: Alignment,
                best_state: CoeffsJson,
                restarts: Vec<Restart>,
            }
            let a = rep.cat_alignment;
            to_json(&Doc {
                schema_version: SCHEMA_VERSION,
                kind: "minimization_report",
                method: rep.method,
                n_range: [rep.n_range.n_min, rep.n_range.n_max],
                seed: rep.seed,
                max_iters: cfg.optimizer.max_iters,
                step_tol: Num(cfg.optimizer.step_tol),
                best_value: Num(rep.best_value),
                below_one: rep.below_one,
                best_restart: rep.best_restart,
                all_converged: rep.all_converged,
                best_report: (&rep.best_report).into(),
                coherent: Family {
                    value: Num(rep.coherent_value),
                    l: Num(rep.coherent_l),
                },
                cat: Family {
                    value: Num(rep.cat_value),
                    l: Num(rep.cat_l),
                },
                cat_overlap: Num(rep.cat_overlap),
                cat_alignment: Alignment {
                    l: Num(a.l),
                    alpha: Num(a.alpha),
                    phase: Num(a.phase),
                    overlap: Num(a.overlap),
                },
                best_state: (&rep.best_state).into(),
                restarts: rep
                    .restarts
                    .iter()
                    .map(|r| Restart {
                        index: r.index,
                        start: start_label(&r.start),
                        start_value: Num(r.start_value),
                        final_value: Num(r.final_value),
                        iterations: r.iterations,
                        evaluations: r.evaluations,
                        converged: r.converged,
                    })
                    .collect(),
            })
        }
    })
}

fn span(values: impl Iterator<Item = f64>) -> Option<[Num; 2]> {
    values.fold(None, |acc, v| match acc {
        None => Some([Num(v), Num(v)]),
        Some([lo, hi]) => Some([Num(lo.0.min(v)), Num(hi.0.max(v))]),
    })
}

pub fn evolve(args: &EvolveArgs, settings: &Settings) -> CliResult<Vec<u8>> {
    let mut cfg = settings.experiment.clone();
    if let Some(g) = &args.time_grid {
        cfg.time_grid = g.0.clone();
    }
    if let Some(v) = args.scale {
        cfg.hamiltonian_scale = v;
    }
    if !cfg.hamiltonian_scale.is_finite() {
        return Err(CliError::Usage("Hamiltonian scale must be finite".into()));
    }
    let (state, desc) = build_state(&args.state, state_range(settings))?;
    let AnyState::Fourier(state) = state else {
        return Err(CliError::Usage(
            "evolve needs a lattice state (coherent, cat, squeezed, eigen or a fourier_state file)"
                .into(),
        ));
    };
    let traj = free_evolution(&state, &cfg)?;

    Ok(match settings.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(headers::EVOLVE);
            for (i, r) in traj.reports.iter().enumerate() {
                t.push(vec![
                    fmt_num(traj.times[i]),
                    cell(traj.phase_estimate[i]),
                    fmt_num(traj.u1_magnitude[i]),
                    fmt_num(traj.windowed_mean[i]),
                    fmt_num(traj.norm[i]),
                    fmt_num(r.circ_variance),
                    fmt_num(r.kr_angle),
                    fmt_num(r.j_variance),
                    fmt_num(r.sum_kr),
                ]);
            }
            t.to_bytes()
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Sample {
                t: Num,
                phase_estimate: Option<Num>,
                u1_magnitude: Num,
                windowed_mean: Num,
                norm: Num,
                circ_variance: Num,
                kr_angle: Num,
                j_variance: Num,
                sum_kr: Num,
            }
            #[derive(Serialize)]
            struct Doc {
                schema_version: u32,
                kind: &'static str,
                state: StateDesc,
                hamiltonian_scale: Num,
                phase_estimate_span: Option<[Num; 2]>,
                windowed_mean_span: Option<[Num; 2]>,
                samples: Vec<Sample>,
            }
            let samples = traj
                .reports
                .iter()
                .enumerate()
                .map(|(i, r)| Sample {
                    t: Num(traj.times[i]),
                    phase_estimate: traj.phase_estimate[i].map(Num),
                    u1_magnitude: Num(traj.u1_magnitude[i]),
                    windowed_mean: Num(traj.windowed_mean[i]),
                    norm: Num(traj.norm[i]),
                    circ_variance: Num(r.circ_variance),
                    kr_angle: Num(r.kr_angle),
                    j_variance: Num(r.j_variance),
                    sum_kr: Num(r.sum_kr),
                })
                .collect();
            to_json(&Doc {
                schema_version: SCHEMA_VERSION,
                kind: "trajectory",
                state: desc,
                hamiltonian_scale: Num(cfg.hamiltonian_scale),
                phase_estimate_span: span(traj.phase_estimate.iter().flatten().copied()),
                windowed_mean_span: span(traj.windowed_mean.iter().copied()),
                samples,
            })
        }
    })
}

pub fn demo_line(args: &DemoLineArgs, settings: &Settings) -> CliResult<Vec<u8>> {
    let mut cfg = settings.experiment.clone();
    if let Some(g) = &args.sigma_grid {
        cfg.sigma_sq_grid = g.0.clone();
    }
    let demo = line_demo(args.length, &cfg)?;
    Ok(match settings.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut t = Table::new(headers::DEMO_LINE);
            for &(v, s) in &demo.heisenberg_curve {
                t.push(vec![fmt_num(v), fmt_num(s)]);
            }
            t.to_bytes()
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Point {
                sigma_sq: Num,
                sum: Num,
            }
            #[derive(Serialize)]
            struct Doc {
                schema_version: u32,
                kind: &'static str,
                length: Num,
                box_variance: Num,
                split_box_variance: Num,
                ratio: Num,
                curve_min: Point,
                heisenberg_curve: Vec<Point>,
            }
            to_json(&Doc {
                schema_version: SCHEMA_VERSION,
                kind: "line_demo",
                length: Num(demo.length),
                box_variance: Num(demo.box_variance),
                split_box_variance: Num(demo.split_box_variance),
                ratio: Num(demo.ratio),
                curve_min: Point {
                    sigma_sq: Num(demo.curve_min.0),
                    sum: Num(demo.curve_min.1),
                },
                heisenberg_curve: demo
                    .heisenberg_curve
                    .iter()
                    .map(|&(v, s)| Point {
                        sigma_sq: Num(v),
                        sum: Num(s),
                    })
                    .collect(),
            })
        }
    })
}
