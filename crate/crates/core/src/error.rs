//! Error types.

use thiserror::Error;

/// Parameter validation failure; names the violated inequality.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameters must be finite (a={a}, b={b}, x={x})")]
    NotFinite { a: f64, b: f64, x: f64 },
    #[error("violated 0 < a (a={a})")]
    ANotPositive { a: f64 },
    #[error("violated a < b (a={a}, b={b})")]
    ANotBelowB { a: f64, b: f64 },
    #[error("violated b < 1 (b={b})")]
    BNotBelowOne { b: f64 },
    #[error("violated 0 < x < 1 (x={x})")]
    XOutOfRange { x: f64 },
}

/// Branch-tracking failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BranchError {
    #[error("step too large: factor {factor} argument jumped by {jump:.3} rad")]
    StepTooLarge { factor: usize, jump: f64 },
    #[error("point ({re}, {im}) lies within {radius:e} of a branch point")]
    SingularPoint { re: f64, im: f64, radius: f64 },
    #[error("path continuation exceeded {max} subdivisions")]
    SubdivisionLimit { max: usize },
}

/// Quadrature failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integrand returned a non-finite value at t={t}")]
    NonFinite { t: f64 },
    #[error("tolerance not met: best estimate {value} with error estimate {error:e}")]
    Accuracy { value: f64, error: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
}

/// Root-finding and continuation failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("no sign change on [{lo}, {hi}]: f(lo)={f_lo:e}, f(hi)={f_hi:e}")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("continuation stalled at a={a}, x={x}: {reason}")]
    Stalled { a: f64, x: f64, reason: String },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Params(#[from] ParamError),
}

/// Surface assembly failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("boundary segment {segment} is not planar: residual {residual:e} (scale {scale:e})")]
    NotPlanar { segment: String, residual: f64, scale: f64 },
    #[error("period closure fault: seam mismatch {mismatch:e} exceeds {tolerance:e}")]
    ClosureFault { mismatch: f64, tolerance: f64 },
    #[error("lattice degenerate: Gram determinant {det:e}")]
    DegenerateLattice { det: f64 },
    #[error("period {index} is not an integer combination of the lattice basis (residual {residual:e})")]
    NotInLattice { index: usize, residual: f64 },
    #[error("grid cell {cell} at z = {re}{im:+}i does not close: circulation {residual:e}")]
    CellClosure { cell: usize, re: f64, im: f64, residual: f64 },
    #[error("invalid mesh request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Branch(#[from] BranchError),
}

/// Crate-level error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Branch(#[from] BranchError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Limit(#[from] crate::limits::LimitError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse: {0}")]
    Parse(String),
}
