//! Uncertainty functionals on the circle and on the line.

use core::f64::consts::{PI, TAU};

use crate::error::domain;
#[allow(unused_imports)]
use crate::prelude::*;
use crate::state::{CircleState, FourierState, LineBoxPacket, Normalize, PiecewisePacket};
use crate::{Error, Result, U2_ZERO_TOL};

/// Absolute agreement required between the direct window-variance difference
/// and the origin-shift identity.
pub const ORIGIN_SHIFT_TOL: f64 = 1e-9;

/// Every measure evaluated on one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UncertaintyReport {
    pub lambda: f64,
    /// Windowed variance of the angle for the window `[lambda, lambda + 2pi)`.
    pub circ_variance: f64,
    /// `-1/4 ln |<U^2>|^2`, possibly `+inf`.
    pub kr_angle: f64,
    /// Variance of `J`; `+inf` for packets whose Fourier tail is not square-summable against `n^2`.
    pub j_variance: f64,
    pub sum_kr: f64,
    pub u2_magnitude: f64,
}

impl UncertaintyReport {
    pub fn of_fourier(state: &FourierState, lambda: f64) -> Result<Self> {
        state.ensure_normalized()?;
        let u2_magnitude = u2_magnitude(state, lambda);
        let kr_angle = kr_from_magnitude(u2_magnitude);
        let j_variance = angular_momentum_variance(state);
        Ok(Self {
            lambda,
            circ_variance: circular_variance(state, lambda),
            kr_angle,
            j_variance,
            sum_kr: kr_angle + j_variance,
            u2_magnitude,
        })
    }

    /// Report for a packet. A discontinuous packet has `sum n^2 |c_n|^2 = inf`,
    /// so its `j_variance` is reported as infinite.
    pub fn of_packet(packet: &PiecewisePacket, lambda: f64) -> Result<Self> {
        packet.ensure_normalized()?;
        let u2_magnitude = u2_magnitude(packet, lambda);
        let kr_angle = kr_from_magnitude(u2_magnitude);
        let j_variance = if packet.is_continuous() {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(Self {
            lambda,
            circ_variance: circular_variance(packet, lambda),
            kr_angle,
            j_variance,
            sum_kr: kr_angle + j_variance,
            u2_magnitude,
        })
    }
}

fn u2_magnitude<S: CircleState + ?Sized>(state: &S, lambda: f64) -> f64 {
    // k = 2 is always a valid power
    state.u_power(2, lambda).map(|z| z.norm()).unwrap_or(0.0)
}

/// Maps `|<U^2>|` to `-1/2 ln |<U^2>|`, with exact zeros sent to `+inf`.
pub fn kr_from_magnitude(m: f64) -> f64 {
    if m < U2_ZERO_TOL {
        f64::INFINITY
    } else if m >= 1.0 {
        0.0
    } else {
        -0.5 * m.ln()
    }
}

/// Position variance `<x^2> - <x>^2` of a box packet on the line.
pub fn line_position_variance(packet: &LineBoxPacket) -> f64 {
    let norm = packet.norm_sqr();
    let mean = packet
        .segments()
        .iter()
        .map(|s| s.amplitude * s.amplitude * (s.end * s.end - s.start * s.start) / 2.0)
        .sum::<f64>()
        / norm;
    packet
        .segments()
        .iter()
        .map(|s| {
            s.amplitude * s.amplitude * ((s.end - mean).powi(3) - (s.start - mean).powi(3)) / 3.0
        })
        .sum::<f64>()
        / norm
}

/// `<phi^2>_lambda - <phi>_lambda^2` over the window `[lambda, lambda + 2pi)`.
pub fn circular_variance<S: CircleState + ?Sized>(state: &S, lambda: f64) -> f64 {
    let (m1, m2) = state.windowed_moments(lambda);
    m2 - m1 * m1
}

fn check_origin(lambda: f64) -> Result<()> {
    if (0.0..TAU).contains(&lambda) {
        Ok(())
    } else {
        Err(domain("lambda", lambda))
    }
}

/// Right-hand side of the origin-shift identity
/// `2 int_0^lambda (phi + pi - <phi>_0) |f|^2 dphi - (int_0^lambda |f|^2 dphi)^2`.
///
/// The integrals are plain `dphi` integrals of `|f|^2`, where `f` is normalized
/// in `dphi/2pi`; with that reading the identity is exact.
pub fn origin_shift_identity_rhs(packet: &PiecewisePacket, lambda: f64) -> f64 {
    let (mean0, _) = packet.windowed_moments(0.0);
    let (mass, first) = packet
        .window_pieces(0.0)
        .into_iter()
        .filter_map(|(a, b, rho)| {
            let b = b.min(lambda);
            (b > a).then_some((a, b, rho))
        })
        .fold((0.0, 0.0), |(i0, i1), (a, b, rho)| {
            (i0 + rho * (b - a), i1 + rho * (b * b - a * a) / 2.0)
        });
    2.0 * (first + (PI - mean0) * mass) - mass * mass
}

/// `Delta^2_lambda - Delta^2_0` for `0 <= lambda < 2pi`, cross-checked against
/// [`origin_shift_identity_rhs`].
pub fn circular_variance_difference(packet: &PiecewisePacket, lambda: f64) -> Result<f64> {
    check_origin(lambda)?;
    let direct = circular_variance(packet, lambda) - circular_variance(packet, 0.0);
    let rhs = origin_shift_identity_rhs(packet, lambda);
    if !((direct - rhs).abs() <= ORIGIN_SHIFT_TOL) {
        return Err(Error::Consistency {
            identity: "origin-shift variance identity",
            lhs: direct,
            rhs,
        });
    }
    Ok(direct)
}

/// Closed-form `Delta^2_lambda - Delta^2_0` for the characteristic packet on `[0, eps]`.
pub fn char_packet_difference_closed_form(eps: f64, lambda: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < TAU) {
        return Err(domain("epsilon", eps));
    }
    check_origin(lambda)?;
    if eps <= lambda {
        return Ok(0.0);
    }
    let r = TAU / eps;
    Ok(r * lambda * ((1.0 - r) * lambda + 2.0 * (PI - eps / 2.0)))
}

/// Origin-invariant angle uncertainty `-1/4 ln |<U^2>_lambda|^2`.
pub fn kr_angle_uncertainty<S: CircleState + ?Sized>(state: &S, lambda: f64) -> f64 {
    kr_from_magnitude(u2_magnitude(state, lambda))
}

pub fn angular_momentum_variance(state: &FourierState) -> f64 {
    state.j_variance()
}

/// `Delta^2(phi) + Delta^2(J)`.
pub fn uncertainty_sum(state: &FourierState) -> f64 {
    kr_angle_uncertainty(state, 0.0) + angular_momentum_variance(state)
}

/// `sigma^2 + 1/(4 sigma^2)`: position plus momentum variance of a
/// minimum-uncertainty Gaussian on the line (`hbar = 1`).
pub fn line_heisenberg_sum(position_variance: f64) -> Result<f64> {
    if !(position_variance > 0.0 && position_variance.is_finite()) {
        return Err(domain("position variance", position_variance));
    }
    Ok(position_variance + 0.25 / position_variance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{box_packet, char_packet, split_box_packet, uniform_packet};
    use crate::Complex64;

    #[test]
    fn box_variances() {
        for l in [0.5, 1.0, 2.0, 3.7] {
            let b = line_position_variance(&box_packet(l).unwrap());
            let s = line_position_variance(&split_box_packet(l).unwrap());
            assert!((b - l * l / 12.0).abs() < 1e-14 * l * l);
            assert!((s - 1.75 * l * l / 12.0).abs() < 1e-14 * l * l);
        }
    }

    #[test]
    fn box_variance_translation_invariant() {
        use crate::state::LineSegment;
        let shifted = LineBoxPacket::new(vec![LineSegment {
            start: 9.5,
            end: 10.5,
            amplitude: 1.0,
        }])
        .unwrap();
        assert!((line_position_variance(&shifted) - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn char_packet_base_variance() {
        let eps = 1.3;
        let v = circular_variance(&char_packet(eps).unwrap(), 0.0);
        assert!((v - eps * eps / 12.0).abs() < 1e-13);
    }

    #[test]
    fn uniform_variance_any_origin() {
        let u = uniform_packet();
        for lambda in [0.0, 0.4, 3.0, 6.0] {
            assert!((circular_variance(&u, lambda) - PI * PI / 3.0).abs() < 1e-12);
            assert!(circular_variance_difference(&u, lambda).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn difference_spot_value() {
        let p = char_packet(PI).unwrap();
        let d = circular_variance_difference(&p, PI / 2.0).unwrap();
        assert!((d - PI * PI / 2.0).abs() < 1e-12);
        let v = circular_variance(&p, PI / 2.0);
        assert!((v - (PI * PI / 12.0 + PI * PI / 2.0)).abs() < 1e-12);
        assert_eq!(circular_variance_difference(&p, 0.0).unwrap(), 0.0);
        assert!(circular_variance_difference(&p, 4.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn difference_rejects_bad_origin() {
        let p = char_packet(1.0).unwrap();
        assert!(matches!(
            circular_variance_difference(&p, -0.1),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            circular_variance_difference(&p, TAU),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn closed_form_values_and_domain() {
        let v = char_packet_difference_closed_form(PI, PI / 2.0).unwrap();
        assert!((v - PI * PI / 2.0).abs() < 1e-12);
        assert_eq!(
            char_packet_difference_closed_form(PI / 2.0, PI).unwrap(),
            0.0
        );
        let small = char_packet_difference_closed_form(2.0, 1e-12).unwrap();
        assert!(small.abs() < 1e-10);
        assert!(char_packet_difference_closed_form(0.0, 0.0).is_err());
        assert!(char_packet_difference_closed_form(TAU, 0.0).is_err());
    }

    #[test]
    fn kr_infinite_for_eigenstate_and_half_circle() {
        let e = FourierState::basis(2, -4, 4).unwrap();
        assert_eq!(kr_angle_uncertainty(&e, 0.0), f64::INFINITY);
        assert_eq!(uncertainty_sum(&e), f64::INFINITY);
        assert_eq!(angular_momentum_variance(&e), 0.0);
        assert_eq!(
            kr_angle_uncertainty(&char_packet(PI).unwrap(), 0.3),
            f64::INFINITY
        );
    }

    #[test]
    fn two_point_j_variance() {
        let s = FourierState::new(0, vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        assert!((angular_momentum_variance(&s) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn heisenberg_line_sum() {
        assert_eq!(line_heisenberg_sum(0.5).unwrap(), 1.0);
        assert_eq!(line_heisenberg_sum(1.0).unwrap(), 1.25);
        assert_eq!(line_heisenberg_sum(0.125).unwrap(), 2.125);
        assert!(line_heisenberg_sum(0.0).is_err());
        assert!(line_heisenberg_sum(-1.0).is_err());
    }

    #[test]
    fn packet_report_flags_infinite_j() {
        let r = UncertaintyReport::of_packet(&char_packet(1.0).unwrap(), 0.0).unwrap();
        assert_eq!(r.j_variance, f64::INFINITY);
        let u = UncertaintyReport::of_packet(&uniform_packet(), 0.0).unwrap();
        assert_eq!(u.j_variance, 0.0);
        assert_eq!(u.kr_angle, f64::INFINITY);
    }

    #[test]
    fn unnormalized_report_rejected() {
        let s = FourierState::from_raw(0, vec![Complex64::new(2.0, 0.0)]).unwrap();
        assert!(matches!(
            UncertaintyReport::of_fourier(&s, 0.0),
            Err(Error::NotNormalized { .. })
        ));
    }
}
