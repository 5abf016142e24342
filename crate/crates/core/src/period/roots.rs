//! Bracketing root finders for `b(a, x)`, `alpha` and `x_a`.

use super::{i_gamma_closure, i_gamma_limit_b1};
use crate::error::SolveError;
use crate::scalar::Real;

/// Root of `f` on `[lo, hi]` given endpoint values of opposite sign.
///
/// Bisection accelerated by Illinois (modified regula falsi) steps; a plain
/// bisection step is forced whenever the bracket failed to halve over the
/// last two iterations, so the bracket shrinks at least geometrically.
/// Stops when `|f| <= f_tol` or the bracket is narrower than `x_tol`.
pub fn bracket_root<T, F>(mut f: F, mut lo: T, mut hi: T, mut f_lo: T, mut f_hi: T, x_tol: T, f_tol: T) -> Result<T, SolveError>
where
    T: Real,
    F: FnMut(T) -> Result<T, SolveError>,
{
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if (f_lo > T::zero()) == (f_hi > T::zero()) || f_lo.is_nan() || f_hi.is_nan() {
        return Err(SolveError::NoRoot { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy(), f_lo: f_lo.to_f64_lossy(), f_hi: f_hi.to_f64_lossy() });
    }
    let half = T::lit(0.5);
    let mut width_two_ago = hi - lo;
    let mut width_prev = hi - lo;
    let mut side = 0i8;
    let mut best = if f_lo.abs() < f_hi.abs() { lo } else { hi };
    for _ in 0..200 {
        let width = hi - lo;
        if width <= x_tol {
            break;
        }
        let bisect = width > half * width_two_ago;
        let mut m = if bisect { lo + half * width } else { (lo * f_hi - hi * f_lo) / (f_hi - f_lo) };
        if !(m > lo && m < hi) {
            m = lo + half * width;
        }
        let fm = f(m)?;
        best = m;
        if fm.abs() <= f_tol || fm == T::zero() {
            return Ok(m);
        }
        if (fm > T::zero()) == (f_lo > T::zero()) {
            lo = m;
            f_lo = fm;
            if side == -1 {
                f_hi *= half;
            }
            side = -1;
        } else {
            hi = m;
            f_hi = fm;
            if side == 1 {
                f_lo *= half;
            }
            side = 1;
        }
        width_two_ago = width_prev;
        width_prev = width;
    }
    Ok(best)
}

/// Solves `I_gamma(a, b, x) = 0` for `b in (a, 1)` with `(a, x)` on the closure `0 <= x <= 1`.
///
/// The bracket is the full interval: `I_gamma > 0` as `b -> a` and the sign at
/// `b = 1` decides existence.
pub fn solve_b_closure<T: Real>(a: T, x: T, tol: T) -> Result<T, SolveError> {
    let qt = quad_tol(tol);
    let f_lo = i_gamma_closure(a, a, x, qt)?;
    let f_hi = i_gamma_limit_b1(a, x, qt)?;
    if f_hi >= T::zero() || f_lo <= T::zero() {
        return Err(SolveError::NoRoot { lo: a.to_f64_lossy(), hi: 1.0, f_lo: f_lo.to_f64_lossy(), f_hi: f_hi.to_f64_lossy() });
    }
    bracket_root(|b| Ok(i_gamma_closure(a, b, x, qt)?), a, T::one(), f_lo, f_hi, T::lit(4.0) * T::epsilon(), tol * T::lit(0.01))
}

/// `b(a, x)` with `I_gamma(a, b, x) = 0`; errors if `(a, x)` lies outside the solvable region.
pub fn solve_b<T: Real>(a: T, x: T, tol: T) -> Result<T, SolveError> {
    if !(a > T::zero() && a < T::one()) {
        return Err(SolveError::Domain(format!("violated 0 < a < 1 (a={a})")));
    }
    if !(x > T::zero() && x < T::one()) {
        return Err(SolveError::Domain(format!("violated 0 < x < 1 (x={x})")));
    }
    solve_b_closure(a, x, tol)
}

fn quad_tol<T: Real>(tol: T) -> T {
    (tol * T::lit(1e-3)).max(T::lit(super::QUAD_TOL))
}

/// The unique root of `I_gamma(a, 1, 0)` in `(0, 1)`; for `a >= alpha` no `b` exists at any `x`.
pub fn alpha<T: Real>(tol: T) -> Result<T, SolveError> {
    let qt = quad_tol(tol);
    let f = |a: T| -> Result<T, SolveError> { Ok(i_gamma_limit_b1(a, T::zero(), qt)?) };
    let (lo, hi) = (T::lit(0.05), T::lit(0.999));
    bracket_root(f, lo, hi, f(lo)?, f(hi)?, tol, T::zero())
}

/// For `a < alpha`, the `x` where `I_gamma(a, 1, x) = 0`: the solvable region at fixed `a` is `x < x_a`.
pub fn x_a<T: Real>(a: T, tol: T) -> Result<T, SolveError> {
    if !(a > T::zero() && a < T::one()) {
        return Err(SolveError::Domain(format!("violated 0 < a < 1 (a={a})")));
    }
    let qt = quad_tol(tol);
    let f = |x: T| -> Result<T, SolveError> { Ok(i_gamma_limit_b1(a, x, qt)?) };
    let f0 = f(T::zero())?;
    if f0 >= T::zero() {
        return Err(SolveError::Domain(format!("a={a} is not below alpha")));
    }
    bracket_root(f, T::zero(), T::one(), f0, f(T::one())?, tol, T::zero())
}
