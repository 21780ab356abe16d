//! Constructors for the named state families.
//!
//! Coherent states use the lattice-Gaussian profile
//! `c_n ~ exp(-s (n - l)^2 / 2) e^{-i n alpha}` with `s = 1`; other `s` give the
//! squeezed family. Cat states superpose two antipodal coherent states.

use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::domain;
use crate::prelude::*;
pub use crate::state::wrap_angle as reduce_angle;
use crate::state::{Arc, FourierState, LineBoxPacket, LineSegment, Normalize, PiecewisePacket};
use crate::{Error, Result, TAIL_TOL};

/// Inclusive lattice window `[n_min, n_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeRange {
    pub n_min: i64,
    pub n_max: i64,
}

impl LatticeRange {
    pub fn new(n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::BadRange { n_min, n_max });
        }
        Ok(Self { n_min, n_max })
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for LatticeRange {
    fn default() -> Self {
        Self {
            n_min: -64,
            n_max: 64,
        }
    }
}

/// Centroid `(l, alpha)` and width `s` of a lattice Gaussian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentParams {
    pub l: f64,
    pub alpha: f64,
    pub s: f64,
}

impl CoherentParams {
    pub fn new(l: f64, alpha: f64, s: f64) -> Result<Self> {
        if !l.is_finite() {
            return Err(domain("l", l));
        }
        if !alpha.is_finite() {
            return Err(domain("alpha", alpha));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(domain("s", s));
        }
        Ok(Self {
            l,
            alpha: reduce_angle(alpha),
            s,
        })
    }

    pub fn coherent(l: f64, alpha: f64) -> Result<Self> {
        Self::new(l, alpha, 1.0)
    }
}

fn lattice_gaussian(
    params: &CoherentParams,
    range: LatticeRange,
    weight: impl Fn(i64) -> Complex64,
) -> Result<FourierState> {
    let CoherentParams { l, alpha, s } = *params;
    let raw = FourierState::from_fn(range.n_min, range.n_max, |n| {
        let x = n as f64 - l;
        Complex64::from_polar((-0.5 * s * x * x).exp(), -(n as f64) * alpha) * weight(n)
    })?;
    let state = raw.normalized()?;
    let tail_mass = state.tail_mass();
    if tail_mass > TAIL_TOL {
        return Err(Error::Truncation {
            tail_mass,
            tol: TAIL_TOL,
        });
    }
    Ok(state)
}

/// Coherent state centred at `(l, alpha)`.
pub fn coherent_state(l: f64, alpha: f64, range: LatticeRange) -> Result<FourierState> {
    lattice_gaussian(&CoherentParams::coherent(l, alpha)?, range, |_| {
        Complex64::new(1.0, 0.0)
    })
}

/// Lattice Gaussian of width parameter `s`; `s = 1` is the coherent state.
pub fn squeezed_state(params: &CoherentParams, range: LatticeRange) -> Result<FourierState> {
    let params = CoherentParams::new(params.l, params.alpha, params.s)?;
    lattice_gaussian(&params, range, |_| Complex64::new(1.0, 0.0))
}

/// Normalized `|l, alpha> + e^{i phase} |l, alpha + pi>`.
///
/// The antipodal component differs only by `(-1)^n`, applied as an exact sign so
/// that `phase = 0` leaves odd sites at exactly zero.
pub fn cat_state(params: &CoherentParams, phase: f64, range: LatticeRange) -> Result<FourierState> {
    if !phase.is_finite() {
        return Err(domain("phase", phase));
    }
    let params = CoherentParams::new(params.l, params.alpha, params.s)?;
    let rel = Complex64::cis(phase);
    lattice_gaussian(&params, range, |n| {
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Complex64::new(1.0, 0.0) + rel * sign
    })
}

/// `1/sqrt(L)` on `(-L/2, L/2)`.
pub fn box_packet(length: f64) -> Result<LineBoxPacket> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(domain("L", length));
    }
    LineBoxPacket::new(vec![LineSegment {
        start: -length / 2.0,
        end: length / 2.0,
        amplitude: length.sqrt().recip(),
    }])
}

/// `sqrt(2/L)` on `(-L/2, -L/4)` and `(L/4, L/2)`, zero in between.
pub fn split_box_packet(length: f64) -> Result<LineBoxPacket> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(domain("L", length));
    }
    let a = (2.0 / length).sqrt();
    LineBoxPacket::new(vec![
        LineSegment {
            start: -length / 2.0,
            end: -length / 4.0,
            amplitude: a,
        },
        LineSegment {
            start: length / 4.0,
            end: length / 2.0,
            amplitude: a,
        },
    ])
}

/// `sqrt(2pi/eps)` on the arc `[0, eps]`.
pub fn char_packet(eps: f64) -> Result<PiecewisePacket> {
    if !(eps > 0.0 && eps < TAU) {
        return Err(domain("epsilon", eps));
    }
    PiecewisePacket::new(vec![Arc::new(
        0.0,
        eps,
        Complex64::new((TAU / eps).sqrt(), 0.0),
    )])
}

/// Unit amplitude on the whole circle.
pub fn uniform_packet() -> PiecewisePacket {
    PiecewisePacket::new(vec![Arc::new(0.0, TAU, Complex64::new(1.0, 0.0))])
        .expect("full circle is a valid packet")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{angular_momentum_variance, kr_angle_uncertainty};
    use crate::state::CircleState;
    use core::f64::consts::PI;

    #[test]
    fn box_shapes() {
        let b = box_packet(1.0).unwrap();
        assert_eq!(
            b.segments(),
            &[LineSegment {
                start: -0.5,
                end: 0.5,
                amplitude: 1.0
            }]
        );
        let s = split_box_packet(2.0).unwrap();
        assert_eq!(s.density(0.0), 0.0);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!((box_packet(3.0).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
        assert!(box_packet(0.0).is_err());
        assert!(split_box_packet(-1.0).is_err());
    }

    #[test]
    fn char_amplitude() {
        let p = char_packet(PI).unwrap();
        assert!((p.arcs()[0].amplitude.re - 2f64.sqrt()).abs() < 1e-15);
        for eps in [0.1, 1.0, 3.0, 6.0] {
            assert!((char_packet(eps).unwrap().norm_sqr() - 1.0).abs() < 1e-14);
        }
        assert!(char_packet(0.0).is_err());
        assert!(char_packet(TAU).is_err());
    }

    #[test]
    fn coherent_symmetric_real() {
        let s = coherent_state(0.0, 0.0, LatticeRange::default()).unwrap();
        for n in 1..=64 {
            assert_eq!(s.coeff(n), s.coeff(-n));
            assert_eq!(s.coeff(n).im, 0.0);
            assert!(s.coeff(0).re > s.coeff(n).re || s.coeff(n).re == 0.0);
        }
    }

    #[test]
    fn coherent_peak_at_round_l() {
        let s = coherent_state(3.4, 1.0, LatticeRange::default()).unwrap();
        let peak = s
            .iter()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert_eq!(peak, 3);
    }

    #[test]
    fn coherent_truncation_guard() {
        let err = coherent_state(0.0, 0.0, LatticeRange::new(-3, 3).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn cat_odd_sites_exactly_zero() {
        let cat = cat_state(
            &CoherentParams::coherent(0.0, 0.0).unwrap(),
            0.0,
            LatticeRange::default(),
        )
        .unwrap();
        for (n, c) in cat.iter() {
            if n % 2 != 0 {
                assert_eq!(c, Complex64::new(0.0, 0.0), "n = {n}");
            }
        }
    }

    #[test]
    fn cat_antipodal_peaks() {
        let alpha = 0.8;
        let cat = cat_state(
            &CoherentParams::coherent(0.0, alpha).unwrap(),
            0.0,
            LatticeRange::default(),
        )
        .unwrap();
        let grid: Vec<f64> = (0..256).map(|i| TAU * i as f64 / 256.0).collect();
        let dens: Vec<f64> = grid.iter().map(|&p| cat.density(p)).collect();
        let mut peaks: Vec<f64> = (0..256)
            .filter(|&i| dens[i] > dens[(i + 255) % 256] && dens[i] >= dens[(i + 1) % 256])
            .map(|i| grid[i])
            .collect();
        peaks.sort_by(f64::total_cmp);
        assert_eq!(peaks.len(), 2);
        let step = TAU / 256.0;
        assert!((peaks[0] - alpha).abs() <= step);
        assert!((peaks[1] - (alpha + PI)).abs() <= step);
    }

    #[test]
    fn squeezed_reduces_to_coherent() {
        let range = LatticeRange::default();
        let sq = squeezed_state(&CoherentParams::new(0.3, 1.1, 1.0).unwrap(), range).unwrap();
        let co = coherent_state(0.3, 1.1, range).unwrap();
        for (a, b) in sq.coeffs().iter().zip(co.coeffs()) {
            assert!((a - b).norm() <= 1e-15);
        }
    }

    #[test]
    fn squeezed_limits() {
        let range = LatticeRange::default();
        let narrow = squeezed_state(&CoherentParams::new(0.0, 0.0, 100.0).unwrap(), range).unwrap();
        let wide = squeezed_state(&CoherentParams::new(0.0, 0.0, 0.01).unwrap(), range).unwrap();
        let coh = coherent_state(0.0, 0.0, range).unwrap();
        assert!(angular_momentum_variance(&narrow) < 1e-20);
        assert!(kr_angle_uncertainty(&narrow, 0.0) > 10.0);
        assert!(angular_momentum_variance(&wide) > 10.0);
        assert!(kr_angle_uncertainty(&wide, 0.0) < 0.02);
        assert!(kr_angle_uncertainty(&coh, 0.0) < kr_angle_uncertainty(&narrow, 0.0));
        assert!(squeezed_state(
            &CoherentParams {
                l: 0.0,
                alpha: 0.0,
                s: -1.0
            },
            range
        )
        .is_err());
    }

    #[test]
    fn alpha_reduction() {
        let p = CoherentParams::coherent(0.0, -0.5).unwrap();
        assert!((p.alpha - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(CoherentParams::coherent(0.0, -1e-18).unwrap().alpha, 0.0);
        assert!(CoherentParams::new(0.0, 0.0, 0.0).is_err());
    }
}
