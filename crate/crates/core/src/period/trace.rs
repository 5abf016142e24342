//! Continuation of the solution curve of `I_gamma = I_delta = 0`.
//!
//! The curve runs from the Scherk end near `(a, b, x) = (0, 1, 1)` to the
//! terminal point on `x = 0`. A coarse pass steps in `a` (geometric at small
//! `a`) while `x` changes slowly and switches to stepping in `x` once `x`
//! changes faster than `a`; the output points are then placed at uniform
//! chord spacing along the coarse polyline and corrected independently.

use rayon::prelude::*;

use super::{i_delta_closure, i_gamma_closure, solve_b_closure, x_a};
use crate::error::SolveError;
use crate::scalar::Real;
use crate::weierstrass::{make_params, SurfaceParams};

/// Smallest `a` reached at the Scherk end.
pub const A_MIN: f64 = 1e-3;

/// Continuation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub n_points: usize,
    /// Residual tolerance on `|I_gamma|` and `|I_delta|`.
    pub tol: f64,
    pub a_min: f64,
    /// Maximum number of step halvings before giving up.
    pub max_halvings: u32,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { n_points: 64, tol: 1e-10, a_min: A_MIN, max_halvings: 20 }
    }
}

/// One point of the solution curve; `s` is the normalised chord length from the Scherk end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyCurvePoint<T> {
    pub s: T,
    pub params: SurfaceParams<T>,
    pub i_gamma: T,
    pub i_delta: T,
}

/// Traced curve with its end data.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyCurve<T> {
    pub points: Vec<FamilyCurvePoint<T>>,
    /// Terminal parameters solved exactly at `x = 0`.
    pub a_star: T,
    pub b_star: T,
    /// Linear extrapolation of `(b, x)` to `a = 0` from the two first points.
    pub scherk_extrapolation: (T, T, T),
}

/// `F(a, x) = I_delta(a, b(a, x), x)` together with `b` and the residual `I_gamma`.
fn eval_f<T: Real>(a: T, x: T, tol: T) -> Result<(T, T, T), SolveError> {
    let b = solve_b_closure(a, x, tol)?;
    let qt = (tol * T::lit(1e-3)).max(T::lit(super::QUAD_TOL));
    let ig = i_gamma_closure(a, b, x, qt)?;
    let id = i_delta_closure(a, b, x, qt)?;
    Ok((id, b, ig))
}

#[derive(Debug, Clone, Copy)]
struct Node<T> {
    a: T,
    b: T,
    x: T,
    ig: T,
    id: T,
}

/// Corrects at fixed `a`, solving `F(a, ·) = 0` in `x` near `guess`.
fn correct_at_a<T: Real>(a: T, guess: T, tol: T) -> Result<Node<T>, SolveError> {
    let x_hi = x_a(a, T::lit(1e-14))? * (T::one() - T::lit(1e-12));
    let f = |x: T| eval_f(a, x, tol).map(|r| r.0);
    let mut w = T::lit(0.02);
    loop {
        let lo = (guess - w).max(T::zero());
        let hi = (guess + w).min(x_hi);
        let (f_lo, f_hi) = (f(lo)?, f(hi)?);
        if (f_lo > T::zero()) != (f_hi > T::zero()) {
            let x = super::bracket_root(f, lo, hi, f_lo, f_hi, T::lit(1e-15), tol * T::lit(0.5))?;
            let (id, b, ig) = eval_f(a, x, tol)?;
            return Ok(Node { a, b, x, ig, id });
        }
        if lo == T::zero() && hi == x_hi {
            return Err(SolveError::NoRoot { lo: 0.0, hi: x_hi.to_f64_lossy(), f_lo: f_lo.to_f64_lossy(), f_hi: f_hi.to_f64_lossy() });
        }
        w *= T::lit(4.0);
    }
}

/// Corrects at fixed `x`, solving `F(·, x) = 0` in `a` within `guess ± width`.
fn correct_at_x<T: Real>(x: T, guess: T, width: T, tol: T) -> Result<Node<T>, SolveError> {
    let f = |a: T| eval_f(a, x, tol).map(|r| r.0);
    let (lo, hi) = (guess - width, guess + width);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    let a = super::bracket_root(f, lo, hi, f_lo, f_hi, T::lit(1e-15), tol * T::lit(0.5))?;
    let (id, b, ig) = eval_f(a, x, tol)?;
    Ok(Node { a, b, x, ig, id })
}

/// A point of the solution curve found by a single correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSolution<T> {
    pub params: SurfaceParams<T>,
    pub i_gamma: T,
    pub i_delta: T,
}

impl<T: Real> Node<T> {
    fn solution(&self) -> Result<CurveSolution<T>, SolveError> {
        Ok(CurveSolution { params: make_params(self.a, self.b, self.x)?, i_gamma: self.ig, i_delta: self.id })
    }
}

/// The curve point with the given `a`, searching `x` outward from `guess`.
pub fn curve_point_at_a<T: Real>(a: T, guess: T, tol: T) -> Result<CurveSolution<T>, SolveError> {
    if !(a > T::zero() && a < T::one()) {
        return Err(SolveError::Domain(format!("a = {a} outside (0, 1)")));
    }
    correct_at_a(a, guess.max(T::zero()), tol)?.solution()
}

/// The curve point with the given `x`, searching `a` within `guess ± width`.
pub fn curve_point_at_x<T: Real>(x: T, guess: T, width: T, tol: T) -> Result<CurveSolution<T>, SolveError> {
    if !(x > T::zero() && x < T::one()) {
        return Err(SolveError::Domain(format!("x = {x} outside (0, 1)")));
    }
    let lo = (guess - width).max(T::lit(1e-12));
    let hi = (guess + width).min(T::one() - T::lit(1e-12));
    let mid = T::lit(0.5) * (lo + hi);
    correct_at_x(x, mid, T::lit(0.5) * (hi - lo), tol)?.solution()
}

fn stalled<T: Real>(n: &Node<T>, e: SolveError) -> SolveError {
    SolveError::Stalled { a: n.a.to_f64_lossy(), x: n.x.to_f64_lossy(), reason: e.to_string() }
}

/// Coarse pass: returns the polyline from `a_min` to the terminal point.
fn coarse_pass<T: Real>(opts: &TraceOptions) -> Result<(Vec<Node<T>>, T, T), SolveError> {
    let tol = T::lit(opts.tol);
    let a0 = T::lit(opts.a_min);
    let first = correct_at_a(a0, T::lit(0.9), tol)?;
    let mut nodes = vec![first];
    // Phase 1: march in a (geometric steps at small a) while |dx/da| < 1.
    let mut step = T::lit(0.25);
    loop {
        let n = *nodes.last().unwrap();
        if nodes.len() >= 2 {
            let p = nodes[nodes.len() - 2];
            if (n.x - p.x).abs() > (n.a - p.a).abs() {
                break;
            }
        }
        let mut halvings = 0;
        let next = loop {
            let a_new = (n.a * (T::one() + step)).min(n.a + T::lit(0.02));
            let guess = if nodes.len() >= 2 {
                let p = nodes[nodes.len() - 2];
                n.x + (n.x - p.x) / (n.a - p.a) * (a_new - n.a)
            } else {
                n.x
            };
            match correct_at_a(a_new, guess.max(T::zero()), tol) {
                Ok(node) if (node.x - n.x).abs() < T::lit(0.05) => break node,
                Ok(_) | Err(_) if halvings < opts.max_halvings => {
                    step *= T::lit(0.5);
                    halvings += 1;
                }
                Ok(node) => return Err(stalled(&n, SolveError::Domain(format!("jump to x={}", node.x)))),
                Err(e) => return Err(stalled(&n, e)),
            }
        };
        nodes.push(next);
        if next.x < T::lit(0.05) {
            break;
        }
    }
    // Phase 2: march in x down to zero.
    let dx = T::lit(0.01);
    loop {
        let n = *nodes.last().unwrap();
        let p = nodes[nodes.len() - 2];
        let slope = (n.a - p.a) / (n.x - p.x);
        let mut h = dx.min(n.x);
        let mut halvings = 0;
        let next = loop {
            let x_new = (n.x - h).max(T::zero());
            let guess = n.a + slope * (x_new - n.x);
            match correct_at_x(x_new, guess, (slope.abs() * h * T::lit(0.5)).max(T::lit(1e-4)), tol) {
                Ok(node) => break node,
                Err(e) => {
                    if halvings >= opts.max_halvings {
                        return Err(stalled(&n, e));
                    }
                    h *= T::lit(0.5);
                    halvings += 1;
                }
            }
        };
        nodes.push(next);
        if next.x == T::zero() {
            break;
        }
    }
    let last = *nodes.last().unwrap();
    Ok((nodes, last.a, last.b))
}

fn chord<T: Real>(p: &Node<T>, q: &Node<T>) -> T {
    ((p.a - q.a).powi(2) + (p.b - q.b).powi(2) + (p.x - q.x).powi(2)).sqrt()
}

/// Traces the solution curve and returns `n_points` corrected points at
/// approximately uniform chord spacing, the last one at `x <= tol`.
pub fn trace_family_curve<T: Real>(opts: &TraceOptions) -> Result<FamilyCurve<T>, SolveError> {
    if opts.n_points < 2 {
        return Err(SolveError::Domain("need at least two points".into()));
    }
    let tol = T::lit(opts.tol);
    let (coarse, a_star, b_star) = coarse_pass::<T>(opts)?;
    let mut cum = vec![T::zero()];
    for w in coarse.windows(2) {
        let c = *cum.last().unwrap() + chord(&w[0], &w[1]);
        cum.push(c);
    }
    let total = *cum.last().unwrap();
    let x_end = tol * T::lit(0.5);
    let n = opts.n_points;
    let targets: Vec<usize> = (0..n).collect();
    let corrected: Result<Vec<Node<T>>, SolveError> = targets
        .par_iter()
        .map(|&k| {
            if k == 0 {
                return Ok(coarse[0]);
            }
            let s = total * T::from_usize(k).unwrap() / T::from_usize(n - 1).unwrap();
            let j = cum.partition_point(|&c| c <= s).clamp(1, coarse.len() - 1);
            let (p, q) = (coarse[j - 1], coarse[j]);
            let u = if cum[j] > cum[j - 1] { (s - cum[j - 1]) / (cum[j] - cum[j - 1]) } else { T::one() };
            let a = p.a + (q.a - p.a) * u;
            let x = p.x + (q.x - p.x) * u;
            if k == n - 1 {
                let w = (q.a - p.a).abs().max(T::lit(1e-6));
                return correct_at_x(x_end, a_star, w, tol);
            }
            if (q.x - p.x).abs() > (q.a - p.a).abs() {
                let w = ((q.a - p.a).abs() * T::lit(2.0)).max(T::lit(1e-6));
                correct_at_x(x, a, w, tol)
            } else {
                correct_at_a(a, x, tol)
            }
        })
        .collect();
    let nodes = corrected?;
    let mut cum = vec![T::zero()];
    for w in nodes.windows(2) {
        let c = *cum.last().unwrap() + chord(&w[0], &w[1]);
        cum.push(c);
    }
    let total = *cum.last().unwrap();
    let mut points = Vec::with_capacity(n);
    for (k, node) in nodes.iter().enumerate() {
        let params = make_params(node.a, node.b, node.x)?;
        points.push(FamilyCurvePoint { s: cum[k] / total, params, i_gamma: node.ig, i_delta: node.id });
    }
    let (p0, p1) = (nodes[0], nodes[1]);
    let extrap = |v0: T, v1: T| v0 - (v1 - v0) / (p1.a - p0.a) * p0.a;
    Ok(FamilyCurve { points, a_star, b_star, scherk_extrapolation: (T::zero(), extrap(p0.b, p1.b), extrap(p0.x, p1.x)) })
}
