//! Brute-force reference values built from the raw Weierstrass data, sharing no
//! code with the library's quadrature or closed forms.

#![allow(dead_code)]

use num_complex::Complex;
use std::f64::consts::PI;

/// Midpoint rule with `n` nodes.
pub fn midpoint(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    let mut comp = 0.0;
    for k in 0..n {
        // Kahan summation keeps 1e7-term sums at rounding level.
        let y = f(lo + (k as f64 + 0.5) * h) - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    acc * h
}

/// `|dh/dt|` on the unit circle.
pub fn circle_dh(a: f64, t: f64) -> f64 {
    1.0 / (a + 1.0 / a - 2.0 * t.cos()).sqrt()
}

/// `Re g(e^{it})` from the four factors of `g^4`, each taken with its principal
/// argument (continuous on the open upper arc) and `g(1) = 1`. `b = 1` takes
/// the one-sided limit `arg((b - z)/(b z - 1)) -> pi`.
pub fn circle_re_g(a: f64, b: f64, x: f64, t: f64) -> f64 {
    let z = Complex::from_polar(1.0, t);
    let f1 = (1.0 - a * z) / (z - a);
    let arg2 = if b >= 1.0 { PI } else { ((b - z) / (b * z - 1.0)).arg() };
    let f3 = (z + x) / (x * z + 1.0);
    (0.25 * t + 0.25 * f1.arg() + 0.5 * arg2 + 0.5 * f3.arg()).cos()
}

/// `I_gamma` on the closure by an `n`-point midpoint rule.
pub fn i_gamma_oracle(a: f64, b: f64, x: f64, n: usize) -> f64 {
    midpoint(|t| circle_re_g(a, b, x, t) * circle_dh(a, t), 0.0, PI, n)
}

/// `½ ∫_a^b (1/|g| - |g|) |dh|` as a midpoint sum on the graded nodes
/// `t = a + (b - a) w(u)`, `w = 5u^4 - 4u^5`, which cluster like `u^4` at `a`
/// and `(1 - u)^2` at `b`.
pub fn i_delta_oracle(a: f64, b: f64, x: f64, n: usize) -> f64 {
    let len = b - a;
    let f = |u: f64| {
        let v = 1.0 - u;
        let w = u.powi(4) * (5.0 - 4.0 * u);
        let wc = v * v * (10.0 - 20.0 * v + 15.0 * v * v - 4.0 * v.powi(3));
        let dw = 20.0 * u.powi(3) * v;
        let (lo, hi) = (len * w, len * wc);
        let t = a + lo;
        let g4 = t * (1.0 - a * t) / lo * (hi / (1.0 - b * t)).powi(2) * ((t + x) / (x * t + 1.0)).powi(2);
        let g = g4.powf(0.25);
        // a + 1/a - t - 1/t = (t - a)(1 - a t)/(a t)
        let dh = 1.0 / (t * (lo * (1.0 - a * t) / (a * t)).sqrt());
        0.5 * (1.0 / g - g) * dh * len * dw
    };
    midpoint(f, 0.0, 1.0, n)
}

/// Root of a monotone sign change of `f` in `[lo, hi]` by plain bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let s_lo = f(lo) > 0.0;
    assert_ne!(s_lo, f(hi) > 0.0, "no sign change on [{lo}, {hi}]");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scans `f` on `samples` equal steps of `[lo, hi]` with a cheap evaluator,
/// then bisects the first sign change with an accurate one.
pub fn scan_root(coarse: impl Fn(f64) -> f64, fine: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize, tol: f64) -> f64 {
    let h = (hi - lo) / samples as f64;
    let mut prev = coarse(lo + 0.5 * h);
    for k in 1..samples {
        let t = lo + (k as f64 + 0.5) * h;
        let cur = coarse(t);
        if (cur > 0.0) != (prev > 0.0) {
            return bisect(&fine, (t - 2.0 * h).max(lo), (t + h).min(hi), tol);
        }
        prev = cur;
    }
    panic!("no sign change found on [{lo}, {hi}]");
}
