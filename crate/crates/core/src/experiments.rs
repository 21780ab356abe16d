//! Experiment drivers: origin sweeps, uncertainty-sum minimization, free
//! evolution and the real-line comparison.
//!
//! Every driver is deterministic for a given [`ExperimentConfig`]; random
//! restarts draw from a ChaCha stream keyed by `(seed, restart index)`.

use alloc::string::String;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::families::{
    box_packet, cat_state, coherent_state, reduce_angle, split_box_packet, CoherentParams,
    LatticeRange,
};
use crate::measures::{
    char_packet_difference_closed_form, circular_variance, circular_variance_difference,
    kr_angle_uncertainty, line_heisenberg_sum, line_position_variance, origin_shift_identity_rhs,
    uncertainty_sum, UncertaintyReport,
};
use crate::optimize::{project_unit_sphere, NelderMead};
use crate::prelude::*;
use crate::state::{CircleState, FourierState, Normalize, PiecewisePacket};
use crate::{Error, Result, U2_ZERO_TOL};

/// Spread allowed in the origin-invariant measure across an origin sweep.
pub const KR_SPREAD_TOL: f64 = 1e-12;
/// Agreement between the closed-form and direct variance differences.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
const LINE_RATIO_TOL: f64 = 1e-12;

/// `count` evenly spaced points from `start` to `stop`, both included.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 40_000,
            step_tol: 1e-12,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub lambda_grid: Vec<f64>,
    pub epsilon_grid: Vec<f64>,
    pub l_grid: Vec<f64>,
    pub time_grid: Vec<f64>,
    /// Position variances for the Gaussian line curve.
    pub sigma_sq_grid: Vec<f64>,
    pub n_range: LatticeRange,
    pub optimizer: OptimizerSettings,
    /// `H = hamiltonian_scale * J^2 / 2`.
    pub hamiltonian_scale: f64,
    pub output_path: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lambda_grid: (0..64).map(|i| TAU * i as f64 / 64.0).collect(),
            epsilon_grid: (0..16).map(|i| TAU * (i as f64 + 0.5) / 16.0).collect(),
            l_grid: vec![0.0, 0.25, 0.5, 0.75],
            time_grid: linspace(0.0, 4.0 * PI, 256),
            sigma_sq_grid: linspace(0.05, 2.0, 40),
            n_range: LatticeRange {
                n_min: -8,
                n_max: 8,
            },
            optimizer: OptimizerSettings::default(),
            hamiltonian_scale: 1.0,
            output_path: None,
        }
    }
}

fn non_empty(grid: &[f64], what: &'static str) -> Result<()> {
    if grid.is_empty() {
        Err(Error::Config(what))
    } else if grid.iter().any(|v| !v.is_finite()) {
        Err(Error::Config("grid values must be finite"))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// origin sweep

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub circ_variance: f64,
    pub difference: f64,
    pub origin_shift_rhs: f64,
    /// Closed-form difference, present for characteristic packets.
    pub closed_form: Option<f64>,
    pub kr_angle: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaSweep {
    pub char_epsilon: Option<f64>,
    pub rows: Vec<SweepRow>,
    /// Max minus min of the finite origin-invariant values; zero when all are infinite.
    pub kr_spread: f64,
}

/// One row per origin in `config.lambda_grid`, sorted by origin.
pub fn lambda_sweep(packet: &PiecewisePacket, config: &ExperimentConfig) -> Result<LambdaSweep> {
    non_empty(&config.lambda_grid, "lambda grid is empty")?;
    packet.ensure_normalized()?;
    let char_epsilon = packet.char_epsilon();
    let mut lambdas = config.lambda_grid.clone();
    lambdas.sort_by(f64::total_cmp);

    let mut rows = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let difference = circular_variance_difference(packet, lambda)?;
        let closed_form = match char_epsilon {
            Some(eps) => {
                let cf = char_packet_difference_closed_form(eps, lambda)?;
                if !((cf - difference).abs() <= CLOSED_FORM_TOL) {
                    return Err(Error::Consistency {
                        identity: "characteristic-packet closed form",
                        lhs: difference,
                        rhs: cf,
                    });
                }
                Some(cf)
            }
            None => None,
        };
        rows.push(SweepRow {
            lambda,
            circ_variance: circular_variance(packet, lambda),
            difference,
            origin_shift_rhs: origin_shift_identity_rhs(packet, lambda),
            closed_form,
            kr_angle: kr_angle_uncertainty(packet, lambda),
        });
    }

    let kr_spread = spread(rows.iter().map(|r| r.kr_angle))?;
    if kr_spread > KR_SPREAD_TOL {
        return Err(Error::Consistency {
            identity: "origin invariance of the logarithmic measure",
            lhs: kr_spread,
            rhs: 0.0,
        });
    }
    Ok(LambdaSweep {
        char_epsilon,
        rows,
        kr_spread,
    })
}

fn spread(values: impl Iterator<Item = f64>) -> Result<f64> {
    let (mut lo, mut hi, mut n_inf, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0, 0);
    for v in values {
        n += 1;
        if v.is_infinite() {
            n_inf += 1;
        } else {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if n_inf == n {
        Ok(0.0)
    } else if n_inf > 0 {
        Err(Error::Consistency {
            identity: "origin invariance of the logarithmic measure",
            lhs: lo,
            rhs: f64::INFINITY,
        })
    } else {
        Ok(hi - lo)
    }
}

// ---------------------------------------------------------------------------
// minimization

/// Where a restart begins.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StartKind {
    Coherent { l: f64 },
    Eigen { n: i64 },
    Cat { l: f64 },
    Random,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    pub start: StartKind,
    pub start_value: f64,
    pub final_value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Best cat state found by scanning `alpha`, the relative phase `{0, pi}` and the
/// integer centroid nearest the state's mean `J`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatAlignment {
    pub l: f64,
    pub alpha: f64,
    pub phase: f64,
    pub overlap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizationReport {
    pub method: &'static str,
    pub n_range: LatticeRange,
    pub seed: u64,
    pub restarts: Vec<RestartOutcome>,
    pub best_restart: usize,
    /// Gauge-fixed: the largest amplitude is real and positive.
    pub best_state: FourierState,
    pub best_value: f64,
    pub below_one: bool,
    pub best_report: UncertaintyReport,
    /// Smallest coherent-state sum over `config.l_grid`, and where it occurs.
    pub coherent_value: f64,
    pub coherent_l: f64,
    pub cat_value: f64,
    pub cat_l: f64,
    /// `|<best|cat(l = 0, alpha = 0, phase = 0)>|^2`.
    pub cat_overlap: f64,
    pub cat_alignment: CatAlignment,
    pub all_converged: bool,
}

pub const MINIMIZER_METHOD: &str =
    "adaptive Nelder-Mead on real/imaginary parts, projected to the unit sphere after every step";

fn pack(state: &FourierState) -> Vec<f64> {
    state.coeffs().iter().flat_map(|c| [c.re, c.im]).collect()
}

fn unpack(x: &[f64], n_min: i64) -> Result<FourierState> {
    FourierState::new(
        n_min,
        x.chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect(),
    )
}

fn objective(x: &[f64], n_min: i64) -> f64 {
    unpack(x, n_min)
        .map(|s| uncertainty_sum(&s))
        .unwrap_or(f64::INFINITY)
}

/// Deterministic Gaussian sample on the unit sphere of states for stream `stream`.
pub fn random_state(range: LatticeRange, seed: u64, stream: u64) -> FourierState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let coeffs: Vec<Complex64> = (0..range.len())
        .map(|_| {
            Complex64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    // a Gaussian vector of length >= 1 is nonzero with probability one
    FourierState::new(range.n_min, coeffs).expect("Gaussian sample has nonzero norm")
}

fn family_min(
    l_grid: &[f64],
    mut build: impl FnMut(f64) -> Result<FourierState>,
) -> Result<(f64, f64, FourierState)> {
    let mut best: Option<(f64, f64, FourierState)> = None;
    for &l in l_grid {
        let state = build(l)?;
        let v = uncertainty_sum(&state);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, l, state));
        }
    }
    best.ok_or(Error::Config("l grid is empty"))
}

/// Scans cat states for the largest squared overlap with `state`.
pub fn align_cat(state: &FourierState, range: LatticeRange) -> CatAlignment {
    let (mean, _) = state.j_moments();
    let mut best = CatAlignment {
        l: 0.0,
        alpha: 0.0,
        phase: 0.0,
        overlap: -1.0,
    };
    let centres = [mean.floor(), mean.ceil()];
    for &l in centres.iter() {
        for phase in [0.0, PI] {
            let Ok(base) = cat_state(
                &CoherentParams {
                    l,
                    alpha: 0.0,
                    s: 1.0,
                },
                phase,
                range,
            ) else {
                continue;
            };
            for i in 0..720 {
                let alpha = TAU * i as f64 / 720.0;
                // alpha enters as the phase rotation e^{-i n alpha}
                let rotated = base.with_phases(|n| n as f64 * alpha);
                let overlap = rotated.inner_product(state).norm_sqr();
                if overlap > best.overlap {
                    best = CatAlignment {
                        l,
                        alpha,
                        phase,
                        overlap,
                    };
                }
            }
        }
    }
    best
}

pub fn minimize_uncertainty_sum(config: &ExperimentConfig) -> Result<MinimizationReport> {
    let settings = config.optimizer;
    if settings.restarts == 0 {
        return Err(Error::Config("at least one restart is required"));
    }
    if !(settings.step_tol >= 0.0) {
        return Err(Error::Config("step_tol must be non-negative"));
    }
    non_empty(&config.l_grid, "l grid is empty")?;
    let range = config.n_range;

    let (coherent_value, coherent_l, coherent) =
        family_min(&config.l_grid, |l| coherent_state(l, 0.0, range))?;
    let (cat_value, cat_l, cat) = family_min(&config.l_grid, |l| {
        cat_state(&CoherentParams::coherent(l, 0.0)?, 0.0, range)
    })?;
    let eigen_n = 0i64.clamp(range.n_min, range.n_max);
    let seeded = [
        (StartKind::Coherent { l: coherent_l }, coherent),
        (
            StartKind::Eigen { n: eigen_n },
            FourierState::basis(eigen_n, range.n_min, range.n_max)?,
        ),
        (StartKind::Cat { l: cat_l }, cat),
    ];

    let nm = NelderMead {
        max_iters: settings.max_iters,
        f_tol: settings.step_tol,
        initial_step: 0.1,
    };
    let mut restarts = Vec::with_capacity(settings.restarts);
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for index in 0..settings.restarts {
        let (start, start_state) = match seeded.get(index) {
            Some((kind, s)) => (*kind, s.clone()),
            None => (
                StartKind::Random,
                random_state(range, settings.seed, index as u64),
            ),
        };
        let start_value = uncertainty_sum(&start_state);
        let found = nm.minimize(
            |x| objective(x, range.n_min),
            project_unit_sphere,
            &pack(&start_state),
        );
        if best.as_ref().is_none_or(|b| found.value < b.0) {
            best = Some((found.value, index, found.x.clone()));
        }
        restarts.push(RestartOutcome {
            index,
            start,
            start_value,
            final_value: found.value,
            iterations: found.iterations,
            evaluations: found.evaluations,
            converged: found.converged,
        });
    }

    let (best_value, best_restart, best_x) = best.expect("at least one restart ran");
    let best_state = unpack(&best_x, range.n_min)?.gauge_fixed();
    let best_report = UncertaintyReport::of_fourier(&best_state, 0.0)?;
    let reference_cat = cat_state(&CoherentParams::coherent(0.0, 0.0)?, 0.0, range)?;
    Ok(MinimizationReport {
        method: MINIMIZER_METHOD,
        n_range: range,
        seed: settings.seed,
        all_converged: restarts.iter().all(|r| r.converged),
        restarts,
        best_restart,
        cat_overlap: reference_cat.inner_product(&best_state).norm_sqr(),
        cat_alignment: align_cat(&best_state, range),
        best_state,
        best_value,
        below_one: best_value < 1.0,
        best_report,
        coherent_value,
        coherent_l,
        cat_value,
        cat_l,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomSweep {
    pub count: usize,
    pub n_range: LatticeRange,
    pub seed: u64,
    pub min_value: f64,
    pub min_index: usize,
    pub below_one: bool,
}

/// Minimum uncertainty sum over `count` random states.
pub fn random_state_sweep(count: usize, range: LatticeRange, seed: u64) -> Result<RandomSweep> {
    if count == 0 {
        return Err(Error::Config("random sweep needs at least one state"));
    }
    let (min_value, min_index) = (0..count)
        .map(|i| (uncertainty_sum(&random_state(range, seed, i as u64)), i))
        .fold(
            (f64::INFINITY, 0),
            |acc, cur| if cur.0 < acc.0 { cur } else { acc },
        );
    Ok(RandomSweep {
        count,
        n_range: range,
        seed,
        min_value,
        min_index,
        below_one: min_value < 1.0,
    })
}

// ---------------------------------------------------------------------------
// free evolution

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `arg <U>` in `[0, 2pi)`; `None` when `|<U>|` is below the zero tolerance.
    pub phase_estimate: Vec<Option<f64>>,
    pub u1_magnitude: Vec<f64>,
    /// Windowed mean angle for the window `[0, 2pi)`.
    pub windowed_mean: Vec<f64>,
    pub norm: Vec<f64>,
    pub reports: Vec<UncertaintyReport>,
}

/// Evolves `c_n(t) = c_n exp(-i scale n^2 t / 2)` over `config.time_grid`.
pub fn free_evolution(state: &FourierState, config: &ExperimentConfig) -> Result<Trajectory> {
    non_empty(&config.time_grid, "time grid is empty")?;
    state.ensure_normalized()?;
    let mut times = config.time_grid.clone();
    times.sort_by(f64::total_cmp);
    let n = times.len();
    let mut traj = Trajectory {
        times: Vec::with_capacity(n),
        phase_estimate: Vec::with_capacity(n),
        u1_magnitude: Vec::with_capacity(n),
        windowed_mean: Vec::with_capacity(n),
        norm: Vec::with_capacity(n),
        reports: Vec::with_capacity(n),
    };
    for t in times {
        let s = state.evolved(t, config.hamiltonian_scale);
        let u1 = s.u_power(1, 0.0)?;
        let mag = u1.norm();
        traj.times.push(t);
        traj.phase_estimate
            .push((mag > U2_ZERO_TOL).then(|| reduce_angle(u1.arg())));
        traj.u1_magnitude.push(mag);
        traj.windowed_mean.push(s.windowed_moments(0.0).0);
        traj.norm.push(s.norm_sqr());
        traj.reports.push(UncertaintyReport::of_fourier(&s, 0.0)?);
    }
    Ok(traj)
}

// ---------------------------------------------------------------------------
// line demo

#[derive(Clone, Debug, PartialEq)]
pub struct LineDemo {
    pub length: f64,
    pub box_variance: f64,
    pub split_box_variance: f64,
    pub ratio: f64,
    /// `(sigma^2, sigma^2 + 1/(4 sigma^2))`.
    pub heisenberg_curve: Vec<(f64, f64)>,
    pub curve_min: (f64, f64),
}

pub fn line_demo(length: f64, config: &ExperimentConfig) -> Result<LineDemo> {
    non_empty(&config.sigma_sq_grid, "sigma^2 grid is empty")?;
    let box_variance = line_position_variance(&box_packet(length)?);
    let split_box_variance = line_position_variance(&split_box_packet(length)?);
    let ratio = split_box_variance / box_variance;
    if !((ratio - 1.75).abs() <= LINE_RATIO_TOL) {
        return Err(Error::Consistency {
            identity: "split-box to box variance ratio 7/4",
            lhs: ratio,
            rhs: 1.75,
        });
    }
    let mut grid = config.sigma_sq_grid.clone();
    grid.sort_by(f64::total_cmp);
    let heisenberg_curve = grid
        .iter()
        .map(|&v| line_heisenberg_sum(v).map(|s| (v, s)))
        .collect::<Result<Vec<_>>>()?;
    let curve_min = heisenberg_curve
        .iter()
        .copied()
        .fold(
            (f64::NAN, f64::INFINITY),
            |a, b| if b.1 < a.1 { b } else { a },
        );
    Ok(LineDemo {
        length,
        box_variance,
        split_box_variance,
        ratio,
        heisenberg_curve,
        curve_min,
    })
}
