//! Period integrals, the two-parameter period problem and its solution curve.
//!
//! The horizontal period conditions reduce to two real integrals,
//! `I_gamma` over the unit semicircle and `I_delta` over `(a, b)`. A third
//! integral `I_sigma` over `(-x, 0) ∪ (0, a)` satisfies
//! `I_delta - I_gamma = I_sigma` by Cauchy's theorem on the domain.

mod identities;
mod roots;
mod trace;

pub use identities::{circle_identities_check, CircleIdentityReport};
pub use roots::{alpha, bracket_root, solve_b, solve_b_closure, x_a};
pub use trace::{curve_point_at_a, curve_point_at_x, trace_family_curve, CurveSolution, FamilyCurve, FamilyCurvePoint, TraceOptions, A_MIN};

use crate::error::QuadError;
use crate::quadrature::{integrate_general, Abscissa, Endpoints, Tolerance};
use crate::scalar::Real;
use crate::weierstrass::{gamma_dh_abs, gamma_phase, CurveName, CurveSpec, SurfaceParams};

/// Default absolute quadrature tolerance for period integrals.
pub const QUAD_TOL: f64 = 1e-13;

fn tol_of<T: Real>(abs: T) -> Tolerance<T> {
    Tolerance { abs, rel: T::zero(), max_intervals: 6000 }
}

/// `I_gamma` on the closure `0 < a <= b <= 1`, `0 <= x <= 1`.
pub fn i_gamma_closure<T: Real>(a: T, b: T, x: T, tol: T) -> Result<T, QuadError> {
    let f = |p: Abscissa<T>| gamma_phase(a, b, x, p.t).cos() * gamma_dh_abs(a, p.t);
    Ok(integrate_general(f, T::zero(), T::PI(), Endpoints::regular(), tol_of(tol))?.value)
}

/// `I_gamma = ∫_0^π Re g(e^{it}) |dh|`.
pub fn i_gamma<T: Real>(p: &SurfaceParams<T>, tol: T) -> Result<T, QuadError> {
    i_gamma_closure(p.a(), p.b(), p.x(), tol)
}

/// `I_gamma` in the limit `b -> a`.
pub fn i_gamma_limit_ba<T: Real>(a: T, x: T, tol: T) -> Result<T, QuadError> {
    i_gamma_closure(a, a, x, tol)
}

/// `I_gamma` in the limit `b -> 1`.
pub fn i_gamma_limit_b1<T: Real>(a: T, x: T, tol: T) -> Result<T, QuadError> {
    i_gamma_closure(a, T::one(), x, tol)
}

/// `∫_0^π |dh| = ∫_0^π dt / sqrt(a + 1/a - 2 cos t)`, the natural scale of `I_gamma`.
pub fn gamma_scale<T: Real>(a: T, tol: T) -> Result<T, QuadError> {
    Ok(integrate_general(|p: Abscissa<T>| gamma_dh_abs(a, p.t), T::zero(), T::PI(), Endpoints::regular(), tol_of(tol))?.value)
}

fn curve_integral<T: Real>(c: CurveSpec<T>, plus: bool, ends: Endpoints<T>, tol: T) -> Result<T, QuadError> {
    let (lo, hi) = c.t_range;
    let f = |p: Abscissa<T>| {
        let g = c.abs_g_at(p.t, p.from_lo, p.to_hi);
        let dh = c.abs_dh_at(p.t, p.from_lo, p.to_hi);
        if plus {
            (g.recip() + g) * dh
        } else {
            (g.recip() - g) * dh
        }
    };
    Ok(integrate_general(f, lo, hi, ends, tol_of(tol))?.value)
}

/// `I_delta` on the closure `0 < a < b <= 1`, `0 <= x <= 1`.
pub fn i_delta_closure<T: Real>(a: T, b: T, x: T, tol: T) -> Result<T, QuadError> {
    let c = CurveSpec::with_closure(CurveName::Delta, a, b, x);
    let hi = if b < T::one() { T::lit(-0.5) } else { T::zero() };
    Ok(T::lit(0.5) * curve_integral(c, false, Endpoints::power_law(T::lit(-0.75), hi), tol)?)
}

/// `I_delta = ½ ∫_a^b (1/|g| - |g|) |dh|` along `(a, b)`.
pub fn i_delta<T: Real>(p: &SurfaceParams<T>, tol: T) -> Result<T, QuadError> {
    i_delta_closure(p.a(), p.b(), p.x(), tol)
}

/// The two pieces `(J1, J2)` of `I_sigma = J1 - J2`:
/// `J1 = ½ ∫_0^x (1/|g| - |g|) |dh|` on `(-x, 0)` and
/// `J2 = (√2/4) ∫_0^a (1/|g| + |g|) |dh|` on `(0, a)`.
pub fn i_sigma_parts<T: Real>(p: &SurfaceParams<T>, tol: T) -> Result<(T, T), QuadError> {
    let q = T::lit(-0.75);
    let c1 = CurveSpec::new(CurveName::Sigma1, p);
    let j1 = T::lit(0.5) * curve_integral(c1, false, Endpoints::power_law(q, T::lit(-0.5)), tol)?;
    let c2 = CurveSpec::new(CurveName::Sigma2, p);
    let j2 = T::SQRT_2() * T::lit(0.25) * curve_integral(c2, true, Endpoints::power_law(q, q), tol)?;
    Ok((j1, j2))
}

/// `I_sigma = J1 - J2`.
pub fn i_sigma<T: Real>(p: &SurfaceParams<T>, tol: T) -> Result<T, QuadError> {
    let (j1, j2) = i_sigma_parts(p, tol)?;
    Ok(j1 - j2)
}

/// All three period integrals and the additivity defect at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodResidual<T> {
    pub i_gamma: T,
    pub i_delta: T,
    pub i_sigma: T,
    /// `I_delta - I_gamma - I_sigma`; zero up to quadrature error.
    pub additivity: T,
}

pub fn period_residual<T: Real>(p: &SurfaceParams<T>, tol: T) -> Result<PeriodResidual<T>, QuadError> {
    let i_gamma = i_gamma(p, tol)?;
    let i_delta = i_delta(p, tol)?;
    let i_sigma = i_sigma(p, tol)?;
    Ok(PeriodResidual { i_gamma, i_delta, i_sigma, additivity: i_delta - i_gamma - i_sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weierstrass::make_params;

    #[test]
    fn additivity_at_sample() {
        let p = make_params(0.3f64, 0.81, 0.5).unwrap();
        let r = period_residual(&p, 1e-13).unwrap();
        assert!(r.additivity.abs() < 1e-11, "{r:?}");
    }

    #[test]
    fn limits_are_closure_endpoints() {
        let a = 0.5f64;
        let x = 0.5f64;
        let near_a = i_gamma(&make_params(a, a + 1e-9, x).unwrap(), 1e-13).unwrap();
        assert!((near_a - i_gamma_limit_ba(a, x, 1e-13).unwrap()).abs() < 1e-6);
        let near_1 = i_gamma(&make_params(a, 1.0 - 1e-9, x).unwrap(), 1e-13).unwrap();
        assert!((near_1 - i_gamma_limit_b1(a, x, 1e-13).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn f32_generic() {
        let p = make_params(0.3f32, 0.81, 0.5).unwrap();
        let r = period_residual(&p, 1e-5).unwrap();
        assert!(r.additivity.abs() < 1e-4);
    }
}
