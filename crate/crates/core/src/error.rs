use thiserror::Error;

/// Errors raised by field construction, time stepping and level-set measurement.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error(
        "domain too small: boundary value {max:e} at node ({i}, {j}) exceeds tolerance {tol:e} at t = {t}"
    )]
    BoundaryGuard {
        t: f64,
        max: f64,
        i: usize,
        j: usize,
        tol: f64,
    },

    #[error("point ({x}, {y}) lies outside the domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical blow-up: non-finite value at t = {t}")]
    Blowup { t: f64 },

    #[error("upper level set is empty")]
    EmptyLevelSet,

    #[error("level {theta} not invaded at the reference point at t = {t}")]
    LevelNotInvaded { theta: f64, t: f64 },

    #[error("polar profile undefined: level set is not star-shaped")]
    ProfileUndefined,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
