//! Period problem, continuation and meshing for a one-parameter family of
//! genus-7 triply periodic minimal surfaces of Costa–Hoffman–Meeks type.

// `!(x <= tol)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod limits;
pub mod period;
pub mod quadrature;
pub mod scalar;
pub mod surface;
pub mod weierstrass;

pub use error::{BranchError, Error, GeometryError, ParamError, QuadError, SolveError};
pub use scalar::Real;

/// Double-precision parameters.
pub type Params = weierstrass::SurfaceParams<f64>;
/// Double-precision domain point.
pub type Point = weierstrass::ZPoint<f64>;
/// Double-precision continuation state of the Gauss map.
pub type Branch = weierstrass::BranchState<f64>;
/// Double-precision boundary curve of the domain.
pub type Curve = weierstrass::CurveSpec<f64>;
/// Double-precision solution of the period problem at fixed `a`.
pub type Solution = period::CurveSolution<f64>;
/// Double-precision traced solution curve.
pub type Family = period::FamilyCurve<f64>;
