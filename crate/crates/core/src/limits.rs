//! Numerical checks of the two degenerations of the family: the doubly
//! periodic Scherk surface at the `a -> 0` end and the genus-5 terminal data
//! at `x -> 0`.

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::error::SolveError;
use crate::period::{curve_point_at_a, CurveSolution, FamilyCurve};
use crate::weierstrass::SurfaceParams;

/// Smallest admissible distance of a Scherk-chart sample from `u = 1`.
pub const SCHERK_EXCLUSION: f64 = 0.05;

/// Errors of the limit checks.
#[derive(Debug, Error)]
pub enum LimitError {
    #[error("sample u = {re}{im:+}i lies within {radius} of u = 1")]
    SampleNearPole { re: f64, im: f64, radius: f64 },
    #[error("sample z = {re}{im:+}i is not in the open upper half disk minus 0")]
    SampleOutsideDomain { re: f64, im: f64 },
    #[error("terminal parameters of the traced curve are unavailable")]
    MissingTerminal,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Which end of the curve a probe examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Scherk,
    HoffmanWohlgemuth,
}

/// Gap of one parameter triple against a limit, with its per-sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbe {
    pub which: LimitKind,
    pub params: SurfaceParams<f64>,
    pub samples: Vec<Complex<f64>>,
    pub gaps: Vec<f64>,
}

impl LimitProbe {
    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }
}

/// `g^4` as a rational function of `z`.
pub fn g4(p: &SurfaceParams<f64>, z: Complex<f64>) -> Complex<f64> {
    let (a, b, x) = (p.a(), p.b(), p.x());
    let f2 = (b - z) / (b * z - 1.0);
    let f3 = (z + x) / (x * z + 1.0);
    z * (1.0 - a * z) / (z - a) * f2 * f2 * f3 * f3
}

/// `dh/dz = i / (z sqrt(z + 1/z - a - 1/a))` with the principal root.
pub fn dh_density(a: f64, z: Complex<f64>) -> Complex<f64> {
    let s = (z + z.inv() - a - 1.0 / a).sqrt();
    Complex::<f64>::i() / (z * s)
}

/// Default Scherk-chart samples: `|u| <= 2`, `|u - 1| >= 0.3`, on a polar grid.
pub fn scherk_samples() -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0)];
    for i in 1..=8 {
        let r = 0.25 * i as f64;
        for k in 0..16 {
            let u = Complex::from_polar(r, std::f64::consts::PI * (k as f64 + 0.5) / 8.0);
            if (u - 1.0).norm() >= 0.3 {
                out.push(u);
            }
        }
    }
    out
}

/// Default samples for the terminal limit: `|z| = 1/2`, `Im z >= 0.1`.
pub fn hw_samples() -> Vec<Complex<f64>> {
    (0..=32)
        .map(|k| Complex::from_polar(0.5, std::f64::consts::PI * k as f64 / 32.0))
        .filter(|z| z.im >= 0.1)
        .collect()
}

/// Per-sample deviation from the Scherk data in the chart `z = a u/(u - 1)`:
/// `|g^4 - u|` plus, away from `u = 0`, the smaller of `|dh/(sqrt(a) du) ∓ 1/(sqrt(u)(u - 1))|`.
pub fn scherk_sample_gap(p: &SurfaceParams<f64>, u: Complex<f64>) -> Result<f64, LimitError> {
    if (u - 1.0).norm() < SCHERK_EXCLUSION {
        return Err(LimitError::SampleNearPole { re: u.re, im: u.im, radius: SCHERK_EXCLUSION });
    }
    let a = p.a();
    if u.norm() == 0.0 {
        return Ok(g4(p, Complex::new(0.0, 0.0)).norm());
    }
    let z = u * a / (u - 1.0);
    let g_gap = (g4(p, z) - u).norm();
    let dz_du = -a / ((u - 1.0) * (u - 1.0));
    let d = dh_density(a, z) * dz_du / a.sqrt();
    let t = (u.sqrt() * (u - 1.0)).inv();
    Ok(g_gap + (d - t).norm().min((d + t).norm()))
}

/// Largest Scherk-chart gap over `samples`.
pub fn scherk_gap(p: &SurfaceParams<f64>, samples: &[Complex<f64>]) -> Result<LimitProbe, LimitError> {
    let gaps = samples.par_iter().map(|&u| scherk_sample_gap(p, u)).collect::<Result<Vec<_>, _>>()?;
    Ok(LimitProbe { which: LimitKind::Scherk, params: *p, samples: samples.to_vec(), gaps })
}

/// Per-sample deviation from the terminal data `(a*, b*)`: `|g^4 - z^3 (1 - a* z)/(z - a*) ((b* - z)/(b* z - 1))^2|`
/// plus `|dh(a) - dh(a*)|`.
pub fn hw_sample_gap(p: &SurfaceParams<f64>, terminal: (f64, f64), z: Complex<f64>) -> Result<f64, LimitError> {
    if !(z.im > 0.0 && z.norm() < 1.0) {
        return Err(LimitError::SampleOutsideDomain { re: z.re, im: z.im });
    }
    let (a0, b0) = terminal;
    let f2 = (b0 - z) / (b0 * z - 1.0);
    let limit = z * z * z * (1.0 - a0 * z) / (z - a0) * f2 * f2;
    Ok((g4(p, z) - limit).norm() + (dh_density(p.a(), z) - dh_density(a0, z)).norm())
}

/// Largest terminal-limit gap over `samples`.
pub fn hw_gap(p: &SurfaceParams<f64>, terminal: Option<(f64, f64)>, samples: &[Complex<f64>]) -> Result<LimitProbe, LimitError> {
    let terminal = terminal.ok_or(LimitError::MissingTerminal)?;
    let gaps = samples.par_iter().map(|&z| hw_sample_gap(p, terminal, z)).collect::<Result<Vec<_>, _>>()?;
    Ok(LimitProbe { which: LimitKind::HoffmanWohlgemuth, params: *p, samples: samples.to_vec(), gaps })
}

/// Curve points at `n` geometrically spaced `a` from `a_hi` down to `a_lo`.
pub fn scherk_schedule(a_hi: f64, a_lo: f64, n: usize, tol: f64) -> Result<Vec<CurveSolution<f64>>, LimitError> {
    let mut out: Vec<CurveSolution<f64>> = Vec::with_capacity(n);
    let mut guess = 0.7;
    for k in 0..n {
        let t = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
        let a = a_hi * (a_lo / a_hi).powf(t);
        let pt = curve_point_at_a(a, guess, tol)?;
        guess = pt.params.x();
        out.push(pt);
    }
    Ok(out)
}

/// The last `n` points of a traced curve (approaching `x = 0`).
pub fn hw_schedule(curve: &FamilyCurve<f64>, n: usize) -> Vec<SurfaceParams<f64>> {
    let k = curve.points.len().saturating_sub(n);
    curve.points[k..].iter().map(|p| p.params).collect()
}

/// Whether `v` is strictly decreasing.
pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}
