//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("projection onto the boundary did not converge after {iters} iterations (level {level:.3e})")]
    NoConvergence { iters: usize, level: f64 },

    #[error("point outside the C2 shell: rho = {rho:.6e}, shell thickness {shell:.6e}")]
    OutsideShell { rho: f64, shell: f64 },

    #[error("jet violates |d rho| = 1: deviation {dev:.3e} exceeds tolerance {tol:.3e}")]
    BadJet { dev: f64, tol: f64 },

    #[error("mollification radius 1/{j} too large for shell thickness {shell:.6e}")]
    ShellTooThin { j: u32, shell: f64 },

    #[error("hole is not compactly contained in the envelope (rho_envelope = {rho:.3e} at a hole boundary sample)")]
    HoleNotContained { rho: f64 },

    #[error("tangential projection is degenerate: |d rho| = {norm:.3e}")]
    DegenerateTangent { norm: f64 },

    #[error("form degrees do not match: ({p1},{q1}) vs ({p2},{q2})")]
    DegreeMismatch { p1: usize, q1: usize, p2: usize, q2: usize },

    #[error("wedge degree overflow: ({p},{q}) exceeds ambient dimension {n}")]
    DegreeOverflow { p: usize, q: usize, n: usize },

    #[error("test form violates its support declaration: {what}")]
    UnsupportedSupport { what: String },

    #[error("boundary condition violated: {what} = {value:.3e}")]
    BoundaryConditionViolated { what: String, value: f64 },

    #[error("form is not closed: |dbar g| = {norm:.3e} exceeds {tol:.3e}")]
    NotClosed { norm: f64, tol: f64 },

    #[error("cutoff margins out of order: inner {inner}, outer {outer}, shell {shell}")]
    MarginOrder { inner: f64, outer: f64, shell: f64 },

    #[error("mixed solvability requires q >= 2, got q = {q}")]
    QTooSmall { q: usize },

    #[error("missing inputs: {what}")]
    MissingInputs { what: String },

    #[error("operator too large: estimated {nnz} nonzeros exceeds guard {guard}")]
    MemoryGuard { nnz: usize, guard: usize },

    #[error("right-hand side appears to lie outside the discrete range (relative residual {residual:.3e})")]
    NotInRange { residual: f64 },

    #[error("spectral iteration stagnated after {iters} iterations (last change {change:.3e})")]
    SpectralStagnation { iters: usize, change: f64 },

    #[error("resolution too coarse: no spectral gap at the rank cutoff ({detail})")]
    ResolutionTooCoarse { detail: String },

    #[error("config error: field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config { field: field.to_string(), message: message.into() }
    }
}
