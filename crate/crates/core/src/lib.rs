//! Uncertainty measures for a quantum particle on a circle.
//!
//! States live in two representations: Fourier amplitudes `c_n` on a truncated
//! angular-momentum lattice ([`FourierState`]) and piecewise-constant position
//! packets ([`PiecewisePacket`]). On top of them the crate evaluates the
//! origin-dependent windowed variance of the angle, the origin-invariant
//! logarithmic measure `-1/4 ln |<U^2>|^2`, the angular-momentum variance, and
//! their sum, together with the experiment drivers built from those pieces.
//!
//! All averages on the circle use the measure `dphi / 2pi`; the basis functions
//! `e^{i n phi}` are orthonormal with respect to it.
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is off.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod experiments;
pub mod families;
pub mod measures;
pub mod optimize;
pub mod state;

pub use error::{Error, Result};
pub use families::{CoherentParams, LatticeRange};
pub use measures::UncertaintyReport;
pub use state::{
    Arc, CircleState, FourierState, LineBoxPacket, LineSegment, Normalize, PiecewisePacket,
    TruncationWarning,
};

pub use num_complex::Complex64;

/// Absolute tolerance on unit norm.
pub const NORM_TOL: f64 = 1e-12;
/// Largest boundary-site mass accepted for family constructors.
pub const TAIL_TOL: f64 = 1e-12;
/// `|<U^2>|` below this is treated as an exact zero (infinite angle uncertainty).
pub const U2_ZERO_TOL: f64 = 1e-14;

pub(crate) mod prelude {
    pub use alloc::vec;
    pub use alloc::vec::Vec;
    #[cfg(not(feature = "std"))]
    pub use num_traits::Float;
}
