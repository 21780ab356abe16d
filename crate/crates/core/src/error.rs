use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("invalid lattice range [{n_min}, {n_max}]")]
    BadRange { n_min: i64, n_max: i64 },
    #[error("U power must be positive, got {0}")]
    BadPower(i64),
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid packet: {0}")]
    InvalidPacket(&'static str),
    #[error("truncation too tight: boundary mass {tail_mass:e} exceeds {tol:e}")]
    Truncation { tail_mass: f64, tol: f64 },
    #[error("consistency check `{identity}` failed: {lhs} vs {rhs}")]
    Consistency {
        identity: &'static str,
        lhs: f64,
        rhs: f64,
    },
    #[error("invalid configuration: {0}")]
    Config(&'static str),
}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
