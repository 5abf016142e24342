//! Trigonometric identities used to analyse the sign of `Re g` on the circle.

use num_complex::Complex;

use crate::scalar::Real;

/// Worst residuals of the circle identities on a sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleIdentityReport {
    /// `sin Arg{e^{it}(1 - a e^{it})/(e^{it} - a)} = 2 sin t (a cos t - 1)/(a + 1/a - 2 cos t)`.
    pub arg_sine: f64,
    /// `Im{z^3 (1/a - z)/(z/a - 1)}` against its expansion over `(cos t/a - 1)^2 + sin^2 t/a^2`.
    pub im_cubic: f64,
    /// At `a = 1/2` the numerator factorises as `4 sin t (1 - cos t)(2 cos t - cos 2t)`.
    pub half_factorisation: f64,
    /// Number of zeros of `2 cos t - cos 2t` on `(0, pi)`; must be one.
    pub half_zero_count: usize,
    /// The zero `t0 = arccos((1 - sqrt 3)/2)`.
    pub t0: f64,
    /// `|2 cos t0 - cos 2 t0|`.
    pub t0_residual: f64,
    /// Largest deviation of the tangent form `tan Arg = 2 sin t (a cos t - 1)/(a + 1/a - 2 cos t)`;
    /// kept for reference, that form does not hold.
    pub tangent_form_deviation: f64,
}

impl CircleIdentityReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.arg_sine <= tol && self.im_cubic <= tol && self.half_factorisation <= tol && self.half_zero_count == 1 && self.t0_residual <= tol
    }
}

/// Evaluates the identities on an `n_a × n_t` grid with `a in (0, 1)`, `t in (0, pi)`.
pub fn circle_identities_check<T: Real>(n_a: usize, n_t: usize) -> CircleIdentityReport {
    let one = T::one();
    let two = T::lit(2.0);
    let mut r = CircleIdentityReport {
        arg_sine: 0.0,
        im_cubic: 0.0,
        half_factorisation: 0.0,
        half_zero_count: 0,
        t0: 0.0,
        t0_residual: 0.0,
        tangent_form_deviation: 0.0,
    };
    let grid = |i: usize, n: usize| (T::from_usize(i).unwrap() + T::lit(0.5)) / T::from_usize(n).unwrap();
    for ia in 0..n_a {
        let a = grid(ia, n_a);
        for it in 0..n_t {
            let t = T::PI() * grid(it, n_t);
            let (s, c) = t.sin_cos();
            let z = Complex::from_polar(one, t);
            let w = z * (-z * a + one) / (z - a);
            let denom = a + a.recip() - two * c;
            let rhs = two * s * (a * c - one) / denom;
            let lhs = w.arg().sin();
            r.arg_sine = r.arg_sine.max((lhs - rhs).abs().to_f64_lossy());
            let tan_dev = (w.arg().tan() - rhs).abs() / (one + rhs.abs());
            r.tangent_form_deviation = r.tangent_form_deviation.max(tan_dev.to_f64_lossy());

            let v = z.powu(3) * (-z + a.recip()) / (z / a - one);
            let num = (two * t).sin() / (a * a) - two * (T::lit(3.0) * t).sin() / a + (T::lit(4.0) * t).sin();
            let den = (c / a - one).powi(2) + s * s / (a * a);
            let dev = (v.im - num / den).abs() / (one + v.im.abs());
            r.im_cubic = r.im_cubic.max(dev.to_f64_lossy());
        }
    }
    let a = T::lit(0.5);
    let mut sign_changes = 0;
    let mut prev: Option<T> = None;
    for it in 0..n_t.max(2) {
        let t = T::PI() * grid(it, n_t.max(2));
        let (s, c) = t.sin_cos();
        let num = (two * t).sin() / (a * a) - two * (T::lit(3.0) * t).sin() / a + (T::lit(4.0) * t).sin();
        let fact = T::lit(4.0) * s * (one - c) * (two * c - (two * t).cos());
        r.half_factorisation = r.half_factorisation.max(((num - fact).abs() / (one + num.abs())).to_f64_lossy());
        let q = two * c - (two * t).cos();
        if let Some(p) = prev {
            if (p > T::zero()) != (q > T::zero()) {
                sign_changes += 1;
            }
        }
        prev = Some(q);
    }
    r.half_zero_count = sign_changes;
    let t0 = ((one - T::lit(3.0).sqrt()) / two).acos();
    r.t0 = t0.to_f64_lossy();
    r.t0_residual = (two * t0.cos() - (two * t0).cos()).abs().to_f64_lossy();
    r
}
