use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("invalid chart point: {0}")]
    InvalidPoint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state has no nonzero amplitude")]
    ZeroState,

    #[error("mode {mode} does not belong to a {surface} basis")]
    SurfaceMismatch { mode: String, surface: &'static str },

    #[error("von Mises packet with kappa={kappa} needs j_max >= {required} (cap was {cap})")]
    TailNotMet { kappa: f64, cap: usize, required: usize },

    #[error("fisher ratio undefined: quantum Fisher information is {qfi:e}")]
    UndefinedRatio { qfi: f64 },

    #[error("cannot build a rejection envelope: density vanishes on the grid")]
    Envelope,

    #[error("likelihood maximum at interval boundary (lambda = {lambda})")]
    BoundaryHit { lambda: f64 },

    #[error("near-degenerate unperturbed levels {a} and {b}: gap {gap:e}")]
    DegenerateLevels { a: String, b: String, gap: f64 },

    #[error("finite-difference QFI did not converge: h -> {coarse:e}, h/2 -> {fine:e}")]
    NonConvergent { coarse: f64, fine: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
