//! State representations on the circle and on the line.
//!
//! A [`FourierState`] stores amplitudes `c_n` for `n` in `[n_min, n_max]`, so
//! that `f(phi) = sum_n c_n e^{i n phi}`. A [`PiecewisePacket`] stores the same
//! kind of `2pi`-periodic wavefunction as a list of constant-amplitude arcs,
//! which admits closed-form integrals for every quantity used here.

use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::domain;
use crate::prelude::*;
use crate::{Error, Result, NORM_TOL};

const ZERO_NORM: f64 = 1e-300;
const ARC_TOL: f64 = 1e-12;

/// Rescaling to unit norm by a positive factor.
pub trait Normalize: Sized {
    /// Squared norm in the type's own measure (`dphi/2pi` on the circle, `dx` on the line).
    fn norm_sqr(&self) -> f64;

    /// Returns `self / ||self||`. Amplitude directions are unchanged.
    fn normalized(&self) -> Result<Self>;

    fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }
}

/// Quantities every circle representation can evaluate.
pub trait CircleState {
    /// `<U^k>_lambda = (1/2pi) int_lambda^{lambda+2pi} e^{ik phi} |f|^2 dphi` for `k > 0`.
    fn u_power(&self, k: i64, lambda: f64) -> Result<Complex64>;

    /// First and second angle moments `(<phi>_lambda, <phi^2>_lambda)` using the
    /// representative of each point in the window `[lambda, lambda + 2pi)`.
    fn windowed_moments(&self, lambda: f64) -> (f64, f64);

    /// Position density `|f(phi)|^2`.
    fn density(&self, phi: f64) -> f64;
}

/// Reduces an angle to `[0, 2pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta - TAU * (theta / TAU).floor();
    if (0.0..TAU).contains(&r) {
        r
    } else {
        0.0
    }
}

fn check_power(k: i64) -> Result<()> {
    if k <= 0 {
        Err(Error::BadPower(k))
    } else {
        Ok(())
    }
}

/// `int_a^b e^{i k phi} dphi`, written to stay accurate for short intervals.
fn exp_segment_integral(k: f64, a: f64, b: f64) -> Complex64 {
    if k == 0.0 {
        return Complex64::new(b - a, 0.0);
    }
    let half = 0.5 * k * (b - a);
    Complex64::from_polar(2.0 * half.sin() / k, 0.5 * k * (a + b))
}

// ---------------------------------------------------------------------------
// Fourier representation

/// Normalized amplitudes on the integer lattice `[n_min, n_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierState {
    n_min: i64,
    coeffs: Vec<Complex64>,
}

impl FourierState {
    /// Wraps amplitudes as given, without rescaling.
    pub fn from_raw(n_min: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::BadRange {
                n_min,
                n_max: n_min - 1,
            });
        }
        Ok(Self { n_min, coeffs })
    }

    /// Builds a state from amplitudes and normalizes it.
    pub fn new(n_min: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::from_raw(n_min, coeffs)?.normalized()
    }

    /// Raw amplitudes `f(n)` for every `n` in `[n_min, n_max]`.
    pub fn from_fn(n_min: i64, n_max: i64, f: impl FnMut(i64) -> Complex64) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::BadRange { n_min, n_max });
        }
        Self::from_raw(n_min, (n_min..=n_max).map(f).collect())
    }

    /// Angular-momentum eigenstate `c_n = delta_{n,m}`.
    pub fn basis(m: i64, n_min: i64, n_max: i64) -> Result<Self> {
        if !(n_min..=n_max).contains(&m) {
            return Err(Error::BadRange { n_min, n_max });
        }
        Self::from_fn(n_min, n_max, |n| {
            if n == m {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Amplitude at lattice site `n`; zero outside the stored range.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let idx = n - self.n_min;
        if idx < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs.get(idx as usize).copied().unwrap_or_default()
    }

    /// `(n, c_n)` pairs in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.n_min + i as i64, *c))
    }

    /// Mass on the two boundary sites of the lattice.
    pub fn tail_mass(&self) -> f64 {
        let first = self.coeffs[0].norm_sqr();
        if self.coeffs.len() == 1 {
            first
        } else {
            first + self.coeffs[self.coeffs.len() - 1].norm_sqr()
        }
    }

    /// `sum_n conj(a_n) b_n`; sites outside either lattice contribute zero.
    pub fn inner_product(&self, other: &FourierState) -> Complex64 {
        let lo = self.n_min.max(other.n_min);
        let hi = self.n_max().min(other.n_max());
        (lo..=hi)
            .map(|n| self.coeff(n).conj() * other.coeff(n))
            .sum()
    }

    /// `sum_n conj(c_{n+k}) c_n` for any integer `k`. Equals `<U^k>`.
    pub(crate) fn shift_overlap(&self, k: i64) -> Complex64 {
        let len = self.coeffs.len() as i64;
        if k.abs() >= len {
            return Complex64::new(0.0, 0.0);
        }
        let (lo, hi) = if k >= 0 { (0, len - k) } else { (-k, len) };
        (lo..hi)
            .map(|i| self.coeffs[(i + k) as usize].conj() * self.coeffs[i as usize])
            .sum()
    }

    /// `(sum n |c_n|^2, sum n^2 |c_n|^2)`.
    pub fn j_moments(&self) -> (f64, f64) {
        self.iter().fold((0.0, 0.0), |(m1, m2), (n, c)| {
            let p = c.norm_sqr();
            let n = n as f64;
            (m1 + n * p, m2 + n * n * p)
        })
    }

    /// Second central moment of `J`, accumulated around the mean.
    pub fn j_variance(&self) -> f64 {
        let (mean, _) = self.j_moments();
        self.iter()
            .map(|(n, c)| (n as f64 - mean).powi(2) * c.norm_sqr())
            .sum()
    }

    /// Multiplies every amplitude by `e^{-i theta(n)}`.
    pub fn with_phases(&self, mut theta: impl FnMut(i64) -> f64) -> Self {
        let coeffs = self
            .iter()
            .map(|(n, c)| c * Complex64::cis(-theta(n)))
            .collect();
        Self {
            n_min: self.n_min,
            coeffs,
        }
    }

    /// Free evolution under `H = scale * J^2 / 2` for time `t`.
    pub fn evolved(&self, t: f64, scale: f64) -> Self {
        self.with_phases(|n| 0.5 * scale * (n * n) as f64 * t)
    }

    /// Rotates the global phase so the largest-magnitude amplitude is real and positive.
    pub fn gauge_fixed(&self) -> Self {
        let mut best = 0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm_sqr() > self.coeffs[best].norm_sqr() {
                best = i;
            }
        }
        let anchor = self.coeffs[best];
        if anchor.norm() == 0.0 {
            return self.clone();
        }
        let rot = anchor.conj() / anchor.norm();
        let mut coeffs: Vec<_> = self.coeffs.iter().map(|c| c * rot).collect();
        coeffs[best] = Complex64::new(anchor.norm(), 0.0);
        Self {
            n_min: self.n_min,
            coeffs,
        }
    }

    pub(crate) fn ensure_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            Err(Error::NotNormalized { norm_sqr })
        } else {
            Ok(())
        }
    }
}

impl Normalize for FourierState {
    fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm >= ZERO_NORM) {
            return Err(Error::ZeroNorm);
        }
        let coeffs = self.coeffs.iter().map(|c| c / norm).collect();
        Ok(Self {
            n_min: self.n_min,
            coeffs,
        })
    }
}

impl CircleState for FourierState {
    fn u_power(&self, k: i64, _lambda: f64) -> Result<Complex64> {
        check_power(k)?;
        Ok(self.shift_overlap(k))
    }

    fn windowed_moments(&self, lambda: f64) -> (f64, f64) {
        // |f|^2 = sum_j d_j e^{i j phi} with d_j = conj(<U^j>); pair j with -j.
        let d0 = self.norm_sqr();
        let shift = lambda + PI;
        let mut m1 = d0 * shift;
        let mut m2 = d0 * (lambda * lambda + TAU * lambda + 4.0 * PI * PI / 3.0);
        for j in 1..self.coeffs.len() as i64 {
            let d = self.shift_overlap(j).conj() * Complex64::cis(j as f64 * lambda);
            let jf = j as f64;
            let i_over_j = Complex64::new(0.0, -1.0 / jf);
            m1 += 2.0 * (d * i_over_j).re;
            let w2 = Complex64::new(2.0 / (jf * jf), -2.0 * shift / jf);
            m2 += 2.0 * (d * w2).re;
        }
        (m1, m2)
    }

    fn density(&self, phi: f64) -> f64 {
        self.iter()
            .map(|(n, c)| c * Complex64::cis(n as f64 * phi))
            .sum::<Complex64>()
            .norm_sqr()
    }
}

// ---------------------------------------------------------------------------
// Piecewise-constant packets on the circle

/// Constant amplitude on `[start, end)`, interpreted modulo `2pi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
    pub amplitude: Complex64,
}

impl Arc {
    pub fn new(start: f64, end: f64, amplitude: Complex64) -> Self {
        Self {
            start,
            end,
            amplitude,
        }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

/// Removed Parseval mass when a packet is projected onto a finite lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationWarning {
    pub removed_mass: f64,
}

/// A `2pi`-periodic wavefunction made of constant-amplitude arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePacket {
    arcs: Vec<Arc>,
}

impl PiecewisePacket {
    /// Validates arcs: finite, positive length, non-overlapping modulo `2pi`.
    pub fn new(arcs: Vec<Arc>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::InvalidPacket("no arcs"));
        }
        let mut spans = Vec::with_capacity(arcs.len());
        let mut total = 0.0;
        for arc in &arcs {
            if !(arc.start.is_finite() && arc.end.is_finite()) {
                return Err(Error::InvalidPacket("non-finite arc endpoint"));
            }
            if !(arc.end > arc.start) {
                return Err(Error::InvalidPacket("arc end must exceed start"));
            }
            if !(arc.amplitude.re.is_finite() && arc.amplitude.im.is_finite()) {
                return Err(Error::InvalidPacket("non-finite amplitude"));
            }
            total += arc.len();
            let s = wrap_angle(arc.start);
            spans.push((s, s + arc.len()));
        }
        if total > TAU + ARC_TOL {
            return Err(Error::InvalidPacket("arcs cover more than 2pi"));
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in spans.windows(2) {
            if w[0].1 > w[1].0 + ARC_TOL {
                return Err(Error::InvalidPacket("arcs overlap"));
            }
        }
        let (first, last) = (spans[0], spans[spans.len() - 1]);
        if spans.len() > 1 && last.1 - TAU > first.0 + ARC_TOL {
            return Err(Error::InvalidPacket("arcs overlap"));
        }
        Ok(Self { arcs })
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// `Some(eps)` when this is a single arc on `[0, eps)` with `0 < eps < 2pi`.
    pub fn char_epsilon(&self) -> Option<f64> {
        match self.arcs.as_slice() {
            [arc] if arc.start == 0.0 && arc.end < TAU => Some(arc.end),
            _ => None,
        }
    }

    /// True when `|f|` is continuous on the circle (one amplitude covering all of it).
    pub fn is_continuous(&self) -> bool {
        let total: f64 = self.arcs.iter().map(Arc::len).sum();
        let a0 = self.arcs[0].amplitude;
        (total - TAU).abs() <= ARC_TOL && self.arcs.iter().all(|a| a.amplitude == a0)
    }

    /// Pieces `(a, b, |amplitude|^2)` of the arcs inside `[lambda, lambda + 2pi)`,
    /// expressed in window coordinates.
    pub fn window_pieces(&self, lambda: f64) -> Vec<(f64, f64, f64)> {
        let hi = lambda + TAU;
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        for arc in &self.arcs {
            let m_lo = ((lambda - arc.end) / TAU).floor() as i64;
            let m_hi = ((hi - arc.start) / TAU).ceil() as i64;
            for m in m_lo..=m_hi {
                let off = TAU * m as f64;
                let a = (arc.start + off).max(lambda);
                let b = (arc.end + off).min(hi);
                if b > a {
                    out.push((a, b, arc.amplitude.norm_sqr()));
                }
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    fn u_power_any(&self, k: i64, lambda: f64) -> Complex64 {
        self.window_pieces(lambda)
            .into_iter()
            .map(|(a, b, rho)| rho * exp_segment_integral(k as f64, a, b))
            .sum::<Complex64>()
            / TAU
    }

    /// Exact `c_n = (1/2pi) int f(phi) e^{-i n phi} dphi` for one site.
    pub fn fourier_coefficient(&self, n: i64) -> Complex64 {
        self.arcs
            .iter()
            .map(|arc| arc.amplitude * exp_segment_integral(-(n as f64), arc.start, arc.end))
            .sum::<Complex64>()
            / TAU
    }

    /// Fourier amplitudes `c_n = (1/2pi) int f(phi) e^{-i n phi} dphi` on `[n_min, n_max]`.
    ///
    /// The result is rescaled to unit norm. When the discarded Parseval mass
    /// exceeds [`TAIL_TOL`](crate::TAIL_TOL) a [`TruncationWarning`] is returned alongside.
    pub fn to_fourier(
        &self,
        n_min: i64,
        n_max: i64,
    ) -> Result<(FourierState, Option<TruncationWarning>)> {
        if n_min > n_max {
            return Err(Error::BadRange { n_min, n_max });
        }
        let packet_norm = self.norm_sqr();
        if !(packet_norm.sqrt() >= ZERO_NORM) {
            return Err(Error::ZeroNorm);
        }
        let raw = FourierState::from_fn(n_min, n_max, |n| self.fourier_coefficient(n))?;
        let removed_mass = 1.0 - raw.norm_sqr() / packet_norm;
        let warning =
            (removed_mass > crate::TAIL_TOL).then_some(TruncationWarning { removed_mass });
        let state = if warning.is_some() {
            raw.normalized()?
        } else {
            let scale = packet_norm.sqrt();
            FourierState {
                n_min,
                coeffs: raw.coeffs.iter().map(|c| c / scale).collect(),
            }
        };
        Ok((state, warning))
    }

    pub(crate) fn ensure_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            Err(Error::NotNormalized { norm_sqr })
        } else {
            Ok(())
        }
    }
}

impl Normalize for PiecewisePacket {
    fn norm_sqr(&self) -> f64 {
        self.arcs
            .iter()
            .map(|a| a.amplitude.norm_sqr() * a.len())
            .sum::<f64>()
            / TAU
    }

    fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm >= ZERO_NORM) {
            return Err(Error::ZeroNorm);
        }
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc {
                amplitude: a.amplitude / norm,
                ..*a
            })
            .collect();
        Ok(Self { arcs })
    }
}

impl CircleState for PiecewisePacket {
    fn u_power(&self, k: i64, lambda: f64) -> Result<Complex64> {
        check_power(k)?;
        Ok(self.u_power_any(k, lambda))
    }

    fn windowed_moments(&self, lambda: f64) -> (f64, f64) {
        let (m1, m2) =
            self.window_pieces(lambda)
                .into_iter()
                .fold((0.0, 0.0), |(m1, m2), (a, b, rho)| {
                    (
                        m1 + rho * (b * b - a * a) / 2.0,
                        m2 + rho * (b * b * b - a * a * a) / 3.0,
                    )
                });
        (m1 / TAU, m2 / TAU)
    }

    fn density(&self, phi: f64) -> f64 {
        let p = wrap_angle(phi);
        self.arcs
            .iter()
            .filter(|arc| {
                let s = wrap_angle(arc.start);
                let e = s + arc.len();
                (s <= p && p < e) || (s <= p + TAU && p + TAU < e)
            })
            .map(|arc| arc.amplitude.norm_sqr())
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Line packets

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSegment {
    pub start: f64,
    pub end: f64,
    pub amplitude: f64,
}

/// Piecewise-constant wavefunction on the real line, normalized in `dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineBoxPacket {
    segments: Vec<LineSegment>,
}

impl LineBoxPacket {
    pub fn new(mut segments: Vec<LineSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidPacket("no segments"));
        }
        for s in &segments {
            if !(s.start.is_finite() && s.end.is_finite() && s.amplitude.is_finite()) {
                return Err(Error::InvalidPacket("non-finite segment"));
            }
            if !(s.end > s.start) {
                return Err(domain("segment width", s.end - s.start));
            }
        }
        segments.sort_by(|a, b| a.start.total_cmp(&b.start));
        if segments.windows(2).any(|w| w[0].end > w[1].start) {
            return Err(Error::InvalidPacket("segments overlap"));
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[LineSegment] {
        &self.segments
    }

    /// `|psi(x)|^2`.
    pub fn density(&self, x: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| s.start < x && x < s.end)
            .map_or(0.0, |s| s.amplitude * s.amplitude)
    }
}

impl Normalize for LineBoxPacket {
    fn norm_sqr(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.amplitude * s.amplitude * (s.end - s.start))
            .sum()
    }

    fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm >= ZERO_NORM) {
            return Err(Error::ZeroNorm);
        }
        let segments = self
            .segments
            .iter()
            .map(|s| LineSegment {
                amplitude: s.amplitude / norm,
                ..*s
            })
            .collect();
        Ok(Self { segments })
    }
}
