//! Weierstrass data `(g, dh)` of the family and branch bookkeeping.
//!
//! On the Riemann sphere the surface is the 4-sheeted cover
//! `g^4 = z (1 - a z)/(z - a) · ((b - z)/(b z - 1))^2 · ((z + x)/(x z + 1))^2`
//! with height differential `dh = i dz / (z s)`, `s = i sqrt(a + 1/a - z - 1/z)`.
//! The fundamental domain is the closed upper half disk `D`; its branch of
//! `g` is anchored at `g(1) = 1` and `dh` is anchored positive on `(b, 1)`.

use num_complex::Complex;

use crate::error::{BranchError, ParamError};
use crate::scalar::Real;

/// Validated parameters `0 < a < b < 1`, `0 < x < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceParams<T> {
    a: T,
    b: T,
    x: T,
}

impl<T: Real> SurfaceParams<T> {
    pub fn new(a: T, b: T, x: T) -> Result<Self, ParamError> {
        make_params(a, b, x)
    }

    pub fn a(&self) -> T {
        self.a
    }
    pub fn b(&self) -> T {
        self.b
    }
    pub fn x(&self) -> T {
        self.x
    }

    /// Real branch loci of `g` and `dh` on the sphere (excluding infinity).
    pub fn branch_loci(&self) -> [(Locus, T); 7] {
        Locus::ALL.map(|l| (l, l.value(self.a, self.b, self.x)))
    }
}

/// Validates `0 < a < b < 1`, `0 < x < 1`.
pub fn make_params<T: Real>(a: T, b: T, x: T) -> Result<SurfaceParams<T>, ParamError> {
    let (fa, fb, fx) = (a.to_f64_lossy(), b.to_f64_lossy(), x.to_f64_lossy());
    if !(a.is_finite() && b.is_finite() && x.is_finite()) {
        return Err(ParamError::NotFinite { a: fa, b: fb, x: fx });
    }
    if a <= T::zero() {
        return Err(ParamError::ANotPositive { a: fa });
    }
    if a >= b {
        return Err(ParamError::ANotBelowB { a: fa, b: fb });
    }
    if b >= T::one() {
        return Err(ParamError::BNotBelowOne { b: fb });
    }
    if x <= T::zero() || x >= T::one() {
        return Err(ParamError::XOutOfRange { x: fx });
    }
    Ok(SurfaceParams { a, b, x })
}

/// Real points where a factor of `g^4` or of the `dh` radicand vanishes or blows up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Locus {
    Zero,
    A,
    InvA,
    B,
    InvB,
    MinusX,
    MinusInvX,
}

impl Locus {
    pub const ALL: [Locus; 7] = [Locus::Zero, Locus::A, Locus::InvA, Locus::B, Locus::InvB, Locus::MinusX, Locus::MinusInvX];

    fn index(self) -> usize {
        self as usize
    }

    pub fn value<T: Real>(self, a: T, b: T, x: T) -> T {
        match self {
            Locus::Zero => T::zero(),
            Locus::A => a,
            Locus::InvA => a.recip(),
            Locus::B => b,
            Locus::InvB => b.recip(),
            Locus::MinusX => -x,
            Locus::MinusInvX => -x.recip(),
        }
    }
}

/// A point of the plane, optionally with its exact offset from a nearby locus.
///
/// Supplying the offset keeps `z - p` accurate when `z` is closer to `p` than
/// the rounding error of `z` itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZPoint<T> {
    pub z: Complex<T>,
    pub near: Option<(Locus, Complex<T>)>,
}

impl<T: Real> ZPoint<T> {
    pub fn new(z: Complex<T>) -> Self {
        Self { z, near: None }
    }

    pub fn near(locus: Locus, offset: Complex<T>, params: &SurfaceParams<T>) -> Self {
        let p = locus.value(params.a, params.b, params.x);
        Self { z: Complex::new(p, T::zero()) + offset, near: Some((locus, offset)) }
    }

    fn diffs(&self, p: &SurfaceParams<T>) -> [Complex<T>; 7] {
        let mut d = [Complex::new(T::zero(), T::zero()); 7];
        for l in Locus::ALL {
            d[l.index()] = match self.near {
                Some((nl, off)) if nl == l => off,
                _ => self.z - Complex::new(l.value(p.a, p.b, p.x), T::zero()),
            };
        }
        d
    }
}

impl<T: Real> From<Complex<T>> for ZPoint<T> {
    fn from(z: Complex<T>) -> Self {
        Self::new(z)
    }
}

/// Argument in `[0, pi]` for points of the closed upper half plane; `-0` imaginary parts count as `+0`.
#[inline]
fn upper_arg<T: Real>(d: Complex<T>) -> T {
    let im = if d.im <= T::zero() { T::zero() } else { d.im };
    im.atan2(d.re)
}

/// `(log|g|, arg g)` of the domain branch on the closed upper half plane.
fn domain_log_g<T: Real>(p: &SurfaceParams<T>, d: &[Complex<T>; 7]) -> (T, T) {
    let l = |i: Locus| d[i.index()].norm().ln();
    let ar = |i: Locus| upper_arg(d[i.index()]);
    let two = T::lit(2.0);
    let q = T::lit(0.25);
    let log_mod = q
        * (l(Locus::Zero) + l(Locus::InvA) - l(Locus::A) + two * (l(Locus::B) - l(Locus::InvB)) + two * (l(Locus::MinusX) - l(Locus::MinusInvX))
            + p.a.ln()
            - two * p.b.ln()
            - two * p.x.ln());
    let arg = q
        * (ar(Locus::Zero) + ar(Locus::InvA) - ar(Locus::A)
            + two * (ar(Locus::B) - ar(Locus::InvB))
            + two * (ar(Locus::MinusX) - ar(Locus::MinusInvX))
            + T::PI());
    (log_mod, arg)
}

/// Gauss map on the domain branch over the closed upper half plane, `g(1) = 1`.
pub fn domain_g<T: Real>(p: &SurfaceParams<T>, pt: &ZPoint<T>) -> Complex<T> {
    let (lm, th) = domain_log_g(p, &pt.diffs(p));
    Complex::from_polar(lm.exp(), th)
}

/// `dh/dz` on the domain branch over the closed upper half plane (positive on `(b, 1)`).
pub fn domain_dh<T: Real>(p: &SurfaceParams<T>, pt: &ZPoint<T>) -> Complex<T> {
    let d = pt.diffs(p);
    let beta = upper_arg(d[Locus::A.index()]) + upper_arg(d[Locus::InvA.index()]) - upper_arg(d[0]) - T::PI();
    dh_from(d, beta)
}

/// `dh/dz = e^{-i beta/2} / (z |W|^{1/2})` with `W = a + 1/a - z - 1/z` and `beta` its tracked argument.
fn dh_from<T: Real>(d: [Complex<T>; 7], beta: T) -> Complex<T> {
    let w_abs = d[Locus::A.index()].norm() * d[Locus::InvA.index()].norm() / d[0].norm();
    Complex::from_polar(w_abs.sqrt().recip(), -beta * T::lit(0.5)) / d[0]
}

/// Sheet selector for the height differential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    fn sign<T: Real>(self) -> T {
        match self {
            Sheet::Plus => T::one(),
            Sheet::Minus => -T::one(),
        }
    }
}

/// `dh/dz` on the principal sheet (cuts along `[0, a]` and `[1/a, inf)`), positive on `(b, 1)`;
/// `Sheet::Minus` selects the other sheet.
pub fn eval_dh<T: Real>(p: &SurfaceParams<T>, pt: &ZPoint<T>, sheet: Sheet) -> Complex<T> {
    let d = pt.diffs(p);
    let lower = pt.z.im < T::zero();
    let sarg = |c: Complex<T>| if lower { c.im.atan2(c.re) } else { upper_arg(c) };
    let s = if lower { T::one() } else { -T::one() };
    let beta = sarg(d[Locus::A.index()]) + sarg(d[Locus::InvA.index()]) - sarg(d[0]) + s * T::PI();
    dh_from(d, beta) * sheet.sign::<T>()
}

/// Continuously tracked branch of `g` and of the `dh` radicand along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchState<T> {
    pub z: Complex<T>,
    /// Continuous arguments of `z`, `(1 - a z)/(z - a)`, `(b - z)/(b z - 1)`, `(z + x)/(x z + 1)`.
    pub args: [T; 4],
    /// Continuous argument of `W = a + 1/a - z - 1/z`.
    pub radicand_arg: T,
    pub g: Complex<T>,
}

/// Largest per-step change of any tracked argument.
pub const MAX_ARG_STEP: f64 = std::f64::consts::FRAC_PI_2;
/// Exclusion radius around branch loci.
pub const EXCLUSION_RADIUS: f64 = 1e-9;

fn factors<T: Real>(p: &SurfaceParams<T>, d: &[Complex<T>; 7]) -> ([Complex<T>; 4], Complex<T>) {
    let f0 = d[0];
    let f1 = -d[Locus::InvA.index()] * p.a / d[Locus::A.index()];
    let f2 = -d[Locus::B.index()] / (d[Locus::InvB.index()] * p.b);
    let f3 = d[Locus::MinusX.index()] / (d[Locus::MinusInvX.index()] * p.x);
    let w = -d[Locus::A.index()] * d[Locus::InvA.index()] / d[0];
    ([f0, f1, f2, f3], w)
}

fn g_from<T: Real>(f: &[Complex<T>; 4], args: &[T; 4]) -> Complex<T> {
    let q = T::lit(0.25);
    let h = T::lit(0.5);
    let m = f[0].norm().powf(q) * f[1].norm().powf(q) * f[2].norm().sqrt() * f[3].norm().sqrt();
    Complex::from_polar(m, q * (args[0] + args[1]) + h * (args[2] + args[3]))
}

impl<T: Real> BranchState<T> {
    /// State at `z = 1` with `g = 1` and the radicand argument `0`.
    pub fn anchor(p: &SurfaceParams<T>) -> Self {
        let z = Complex::new(T::one(), T::zero());
        let (f, _) = factors(p, &ZPoint::new(z).diffs(p));
        let args = [T::zero(); 4];
        Self { z, args, radicand_arg: T::zero(), g: g_from(&f, &args) }
    }

    /// `dh/dz` on the tracked sheet.
    pub fn dh(&self, p: &SurfaceParams<T>) -> Complex<T> {
        dh_from(ZPoint::new(self.z).diffs(p), self.radicand_arg)
    }
}

/// Continues `state` to `z_next` in one step.
pub fn eval_g<T: Real>(p: &SurfaceParams<T>, state: &BranchState<T>, z_next: Complex<T>) -> Result<BranchState<T>, BranchError> {
    let rad = T::lit(EXCLUSION_RADIUS);
    for (_, v) in p.branch_loci() {
        if (z_next - Complex::new(v, T::zero())).norm() < rad {
            return Err(BranchError::SingularPoint { re: z_next.re.to_f64_lossy(), im: z_next.im.to_f64_lossy(), radius: EXCLUSION_RADIUS });
        }
    }
    let (f_old, w_old) = factors(p, &ZPoint::new(state.z).diffs(p));
    let (f_new, w_new) = factors(p, &ZPoint::new(z_next).diffs(p));
    let lim = T::lit(MAX_ARG_STEP);
    let mut args = state.args;
    for i in 0..4 {
        let jump = (f_new[i] / f_old[i]).arg();
        if jump.abs() > lim {
            return Err(BranchError::StepTooLarge { factor: i, jump: jump.to_f64_lossy() });
        }
        args[i] += jump;
    }
    let jump = (w_new / w_old).arg();
    if jump.abs() > lim {
        return Err(BranchError::StepTooLarge { factor: 4, jump: jump.to_f64_lossy() });
    }
    Ok(BranchState { z: z_next, args, radicand_arg: state.radicand_arg + jump, g: g_from(&f_new, &args) })
}

/// Continues `state` along the straight segment to `target`, bisecting steps as needed.
pub fn continue_to<T: Real>(p: &SurfaceParams<T>, state: &BranchState<T>, target: Complex<T>) -> Result<BranchState<T>, BranchError> {
    const MAX_STEPS: usize = 1 << 16;
    let start = state.z;
    let mut cur = *state;
    let mut s = T::zero();
    let mut ds = T::one();
    let mut steps = 0;
    while s < T::one() {
        let s_next = (s + ds).min(T::one());
        let z = start + (target - start) * s_next;
        match eval_g(p, &cur, z) {
            Ok(next) => {
                cur = next;
                s = s_next;
                ds *= T::lit(2.0);
            }
            Err(BranchError::StepTooLarge { .. }) => ds *= T::lit(0.5),
            Err(e) => return Err(e),
        }
        steps += 1;
        if steps > MAX_STEPS {
            return Err(BranchError::SubdivisionLimit { max: MAX_STEPS });
        }
    }
    Ok(cur)
}

/// The three holomorphic densities `phi_k / dz` of the immersion.
pub fn phi_from<T: Real>(g: Complex<T>, dh: Complex<T>) -> [Complex<T>; 3] {
    let h = T::lit(0.5);
    let gi = g.inv();
    let i = Complex::new(T::zero(), T::one());
    [(gi - g) * dh * h, i * (gi + g) * dh * h, dh]
}

/// `phi` at the tracked state; `Sheet::Minus` flips the height differential.
pub fn phi_forms<T: Real>(p: &SurfaceParams<T>, state: &BranchState<T>, sheet: Sheet) -> [Complex<T>; 3] {
    phi_from(state.g, state.dh(p) * sheet.sign::<T>())
}

/// `(g, dh/dz)` on the domain branch, sharing the factor evaluations.
pub fn domain_g_dh<T: Real>(p: &SurfaceParams<T>, pt: &ZPoint<T>) -> (Complex<T>, Complex<T>) {
    let d = pt.diffs(p);
    let (lm, th) = domain_log_g(p, &d);
    let beta = upper_arg(d[Locus::A.index()]) + upper_arg(d[Locus::InvA.index()]) - upper_arg(d[0]) - T::PI();
    (Complex::from_polar(lm.exp(), th), dh_from(d, beta))
}

/// `phi` on the domain branch over the closed upper half plane.
pub fn domain_phi<T: Real>(p: &SurfaceParams<T>, pt: &ZPoint<T>) -> [Complex<T>; 3] {
    let (g, dh) = domain_g_dh(p, pt);
    phi_from(g, dh)
}

/// Named boundary curves of `D` used by the period integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveName {
    /// Upper unit semicircle `z = e^{it}`, `t in [0, pi]`.
    Gamma,
    /// Segment `z = t`, `t in [a, b]`.
    Delta,
    /// Segment `z = -t`, `t in [0, x]`.
    Sigma1,
    /// Segment `z = t`, `t in [0, a]`.
    Sigma2,
}

/// Closed-form restriction of `(g, dh)` to a boundary curve, parametrised by `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSpec<T> {
    pub name: CurveName,
    pub t_range: (T, T),
    a: T,
    b: T,
    x: T,
}

/// `theta(t) = arg g(e^{it})` on the domain branch, for `a <= b <= 1`, `0 <= x <= 1`.
///
/// `theta = -t/2 - A/2 + B + C` with `A, B, C` the arguments of `e^{it} - a`,
/// `e^{it} - b`, `e^{it} + x` in `[0, pi]`. At `b = a` and `b = 1` this reduces
/// to the two limiting forms of the Gauss map on the circle.
pub fn gamma_phase<T: Real>(a: T, b: T, x: T, t: T) -> T {
    let h = T::lit(0.5);
    let two = T::lit(2.0);
    let (sh, ch) = (t * h).sin_cos();
    let sin_t = two * sh * ch;
    let s2 = two * sh * sh;
    let c2 = two * ch * ch;
    let ang_a = sin_t.atan2((T::one() - a) - s2);
    let ang_b = if b >= T::one() { (t + T::PI()) * h } else { sin_t.atan2((T::one() - b) - s2) };
    let ang_c = sin_t.atan2(c2 - (T::one() - x));
    -t * h - ang_a * h + ang_b + ang_c
}

/// `|dh/dt|` on the unit circle: `1/sqrt(a + 1/a - 2 cos t)`.
pub fn gamma_dh_abs<T: Real>(a: T, t: T) -> T {
    let s = (t * T::lit(0.5)).sin();
    let one_a = T::one() - a;
    (one_a * one_a / a + T::lit(4.0) * s * s).sqrt().recip()
}

impl<T: Real> CurveSpec<T> {
    pub fn new(name: CurveName, p: &SurfaceParams<T>) -> Self {
        Self::with_closure(name, p.a, p.b, p.x)
    }

    /// Unvalidated constructor allowing the closure `a <= b <= 1`, `0 <= x <= 1`.
    pub fn with_closure(name: CurveName, a: T, b: T, x: T) -> Self {
        let t_range = match name {
            CurveName::Gamma => (T::zero(), T::PI()),
            CurveName::Delta => (a, b),
            CurveName::Sigma1 => (T::zero(), x),
            CurveName::Sigma2 => (T::zero(), a),
        };
        Self { name, t_range, a, b, x }
    }

    pub fn z_of_t(&self, t: T) -> Complex<T> {
        match self.name {
            CurveName::Gamma => Complex::from_polar(T::one(), t),
            CurveName::Delta | CurveName::Sigma2 => Complex::new(t, T::zero()),
            CurveName::Sigma1 => Complex::new(-t, T::zero()),
        }
    }

    /// Unit phase of `g` (constant except on `Gamma`).
    pub fn g_phase(&self, t: T) -> Complex<T> {
        let i = Complex::new(T::zero(), T::one());
        match self.name {
            CurveName::Gamma => Complex::from_polar(T::one(), gamma_phase(self.a, self.b, self.x, t)),
            CurveName::Delta | CurveName::Sigma1 => i,
            CurveName::Sigma2 => Complex::from_polar(T::one(), T::FRAC_PI_4()),
        }
    }

    /// Unit phase of `dh` relative to `dt` in the direction of increasing `t`.
    pub fn dh_phase(&self) -> Complex<T> {
        let i = Complex::new(T::zero(), T::one());
        match self.name {
            CurveName::Gamma => i,
            CurveName::Delta | CurveName::Sigma1 => Complex::new(T::one(), T::zero()),
            CurveName::Sigma2 => -i,
        }
    }

    /// `|g|` with `lo`/`hi` the exact distances of `t` from the ends of `t_range`.
    pub fn abs_g_at(&self, t: T, lo: T, hi: T) -> T {
        let (a, b, x) = (self.a, self.b, self.x);
        let one = T::one();
        let q = T::lit(0.25);
        match self.name {
            CurveName::Gamma => one,
            CurveName::Delta => {
                (t * (one - a * t) / lo).powf(q) * (hi / (one - b * t)).sqrt() * ((t + x) / (x * t + one)).sqrt()
            }
            CurveName::Sigma1 => {
                (lo * (one + a * t) / (a + t)).powf(q) * ((b + t) / (one + b * t)).sqrt() * (hi / (one - x * t)).sqrt()
            }
            CurveName::Sigma2 => {
                (lo * (one - a * t) / hi).powf(q) * ((b - t) / (one - b * t)).sqrt() * ((x + t) / (one + x * t)).sqrt()
            }
        }
    }

    /// `|dh/dt|` with exact end distances.
    pub fn abs_dh_at(&self, t: T, lo: T, hi: T) -> T {
        let a = self.a;
        let one = T::one();
        match self.name {
            CurveName::Gamma => gamma_dh_abs(a, t),
            CurveName::Delta => a.sqrt() / (t.sqrt() * (lo * (one - a * t)).sqrt()),
            CurveName::Sigma1 => one / (lo.sqrt() * ((one + a * t) * (one + t / a)).sqrt()),
            CurveName::Sigma2 => a.sqrt() / (lo.sqrt() * (hi * (one - a * t)).sqrt()),
        }
    }

    pub fn abs_g(&self, t: T) -> T {
        self.abs_g_at(t, t - self.t_range.0, self.t_range.1 - t)
    }

    pub fn abs_dh(&self, t: T) -> T {
        self.abs_dh_at(t, t - self.t_range.0, self.t_range.1 - t)
    }

    pub fn g(&self, t: T) -> Complex<T> {
        self.g_phase(t) * self.abs_g(t)
    }

    /// `dh/dt` including its phase.
    pub fn dh(&self, t: T) -> Complex<T> {
        self.dh_phase() * self.abs_dh(t)
    }
}

/// Expected class of a value on a boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineClass {
    Real,
    Imaginary,
    /// `e^{i pi/4} R` or `e^{-i pi/4} R`.
    Diagonal,
    UnitCircle,
}

impl LineClass {
    fn residual<T: Real>(self, v: Complex<T>) -> T {
        let n = v.norm();
        match self {
            LineClass::Real => v.im.abs() / n,
            LineClass::Imaginary => v.re.abs() / n,
            LineClass::Diagonal => (v.re.abs() - v.im.abs()).abs() / n,
            LineClass::UnitCircle => (n - T::one()).abs(),
        }
    }
}

/// One row of the boundary-involution table.
#[derive(Debug, Clone, PartialEq)]
pub struct InvolutionRow {
    pub row: usize,
    pub segment: &'static str,
    pub g_class: LineClass,
    pub dh_class: LineClass,
    pub worst_g: f64,
    pub worst_dh: f64,
    pub passed: bool,
    /// Worst sample point.
    pub worst_z: (f64, f64),
    /// Observed unit phase of `g` at the first sample.
    pub g_phase: (f64, f64),
    /// Observed unit phase of `dh` (tangential) at the first sample.
    pub dh_phase: (f64, f64),
}

/// Results of [`involution_table_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct InvolutionReport {
    pub rows: Vec<InvolutionRow>,
    /// `+1` if `g in e^{i pi/4} R` on `(0, a)`, `-1` for `e^{-i pi/4} R`.
    pub row3_sign: i32,
}

impl InvolutionReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

/// Samples each boundary segment of `D` and checks the value classes of `g` and
/// of the tangential `dh` (rows: `(-1,-x)`, `(-x,0)`, `(0,a)`, `(a,b)`, `(b,1)`, unit circle).
pub fn involution_table_check<T: Real>(p: &SurfaceParams<T>, samples: usize, tol: T) -> InvolutionReport {
    use LineClass::*;
    let (a, b, x) = (p.a, p.b, p.x);
    let one = T::one();
    let zero = T::zero();
    let rows: [(&'static str, T, T, LineClass, LineClass); 6] = [
        ("(-1,-x)", -one, -x, Real, Real),
        ("(-x,0)", -x, zero, Imaginary, Real),
        ("(0,a)", zero, a, Diagonal, Imaginary),
        ("(a,b)", a, b, Imaginary, Real),
        ("(b,1)", b, one, Real, Real),
        ("S1", zero, T::PI(), UnitCircle, Imaginary),
    ];
    let n = samples.max(2);
    let mut out = Vec::new();
    let mut row3_sign = 0;
    for (k, (name, lo, hi, gc, dc)) in rows.into_iter().enumerate() {
        let mut worst = (0.0f64, 0.0f64, (0.0, 0.0));
        let mut first = None;
        for j in 0..n {
            let s = (T::from_usize(j).unwrap() + T::lit(0.5)) / T::from_usize(n).unwrap();
            let t = lo + (hi - lo) * s;
            let (z, tangent) = if k == 5 {
                let z = Complex::from_polar(one, t);
                (z, Complex::new(zero, one) * z)
            } else {
                (Complex::new(t, zero), Complex::new(one, zero))
            };
            let pt = ZPoint::new(z);
            let g = domain_g(p, &pt);
            let dh = domain_dh(p, &pt) * tangent;
            let rg = gc.residual(g).to_f64_lossy();
            let rd = dc.residual(dh).to_f64_lossy();
            if first.is_none() {
                first = Some((g / g.norm(), dh / dh.norm()));
                if k == 2 {
                    row3_sign = if (g.re > zero) == (g.im > zero) { 1 } else { -1 };
                }
            }
            if rg.max(rd) > worst.0.max(worst.1) {
                worst = (rg, rd, (z.re.to_f64_lossy(), z.im.to_f64_lossy()));
            }
        }
        let (gp, dp) = first.unwrap();
        let tolf = tol.to_f64_lossy();
        out.push(InvolutionRow {
            row: k + 1,
            segment: name,
            g_class: gc,
            dh_class: dc,
            worst_g: worst.0,
            worst_dh: worst.1,
            passed: worst.0 <= tolf && worst.1 <= tolf,
            worst_z: worst.2,
            g_phase: (gp.re.to_f64_lossy(), gp.im.to_f64_lossy()),
            dh_phase: (dp.re.to_f64_lossy(), dp.im.to_f64_lossy()),
        });
    }
    InvolutionReport { rows: out, row3_sign }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SurfaceParams<f64> {
        make_params(0.3, 0.81, 0.5).unwrap()
    }

    #[test]
    fn validation_names_inequality() {
        assert!(matches!(make_params(0.9, 0.5, 0.5), Err(ParamError::ANotBelowB { .. })));
        assert!(matches!(make_params(0.5, 1.0, 0.5), Err(ParamError::BNotBelowOne { .. })));
        assert!(matches!(make_params(0.0, 0.5, 0.5), Err(ParamError::ANotPositive { .. })));
        assert!(matches!(make_params(0.3, 0.5, 1.0), Err(ParamError::XOutOfRange { .. })));
        assert!(matches!(make_params(f64::NAN, 0.5, 0.5), Err(ParamError::NotFinite { .. })));
    }

    #[test]
    fn anchor_values() {
        let p = params();
        let one = ZPoint::new(Complex::new(1.0, 0.0));
        assert!((domain_g(&p, &one) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let dh = domain_dh(&p, &one);
        assert!(dh.im.abs() < 1e-15 && dh.re > 0.0);
        let st = BranchState::anchor(&p);
        assert!((st.g - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!((st.dh(&p) - dh).norm() < 1e-15);
    }

    #[test]
    fn closed_form_satisfies_quartic() {
        let p = params();
        for &z in &[Complex::new(0.1, 0.2), Complex::new(-0.7, 0.1), Complex::new(0.85, 0.4), Complex::new(0.0, 0.99)] {
            let g = domain_g(&p, &ZPoint::new(z));
            let (a, b, x) = (0.3, 0.81, 0.5);
            let one = Complex::new(1.0, 0.0);
            let rhs = z * (one - z * a) / (z - a) * ((-z + b) / (z * b - 1.0)).powu(2) * ((z + x) / (z * x + 1.0)).powu(2);
            assert!((g.powu(4) - rhs).norm() < 1e-12 * rhs.norm());
            let dh = domain_dh(&p, &ZPoint::new(z));
            let w = -z - z.inv() + a + 1.0 / a;
            let s = Complex::new(0.0, 1.0) / (z * dh);
            assert!((s * s + w).norm() < 1e-12 * w.norm());
        }
    }

    #[test]
    fn continuation_matches_closed_form() {
        let p = params();
        let st = BranchState::anchor(&p);
        let mut cur = st;
        for &z in &[Complex::new(0.9, 0.3), Complex::new(0.2, 0.6), Complex::new(-0.5, 0.3), Complex::new(0.15, 0.05)] {
            cur = continue_to(&p, &cur, z).unwrap();
            let g = domain_g(&p, &ZPoint::new(z));
            assert!((cur.g - g).norm() < 1e-12, "{z}: {} vs {}", cur.g, g);
            assert!((cur.dh(&p) - domain_dh(&p, &ZPoint::new(z))).norm() < 1e-12 * cur.dh(&p).norm());
        }
    }

    #[test]
    fn principal_dh_agrees_in_upper_half() {
        let p = params();
        let pt = ZPoint::new(Complex::new(0.4, 0.5));
        assert!((eval_dh(&p, &pt, Sheet::Plus) - domain_dh(&p, &pt)).norm() < 1e-14);
        assert!((eval_dh(&p, &pt, Sheet::Minus) + domain_dh(&p, &pt)).norm() < 1e-14);
        let below = ZPoint::new(Complex::new(0.9, -1e-12));
        let above = ZPoint::new(Complex::new(0.9, 1e-12));
        assert!((eval_dh(&p, &below, Sheet::Plus) - eval_dh(&p, &above, Sheet::Plus)).norm() < 1e-9);
    }

    #[test]
    fn step_too_large_and_singular() {
        let p = params();
        let st = BranchState::anchor(&p);
        assert!(matches!(eval_g(&p, &st, Complex::new(-0.9, 0.0)), Err(BranchError::StepTooLarge { .. })));
        let near = continue_to(&p, &st, Complex::new(0.3, 0.01)).unwrap();
        assert!(matches!(eval_g(&p, &near, Complex::new(0.3, 1e-12)), Err(BranchError::SingularPoint { .. })));
    }

    #[test]
    fn curve_specs_match_domain_branch() {
        let p = params();
        for name in [CurveName::Gamma, CurveName::Delta, CurveName::Sigma1, CurveName::Sigma2] {
            let c = CurveSpec::new(name, &p);
            let (lo, hi) = c.t_range;
            for s in [0.2, 0.5, 0.8] {
                let t = lo + (hi - lo) * s;
                let z = c.z_of_t(t);
                let pt = ZPoint::new(z);
                let g = domain_g(&p, &pt);
                assert!((c.g(t) - g).norm() < 1e-12 * g.norm(), "{name:?} g at {t}: {} vs {g}", c.g(t));
                let dzdt = match name {
                    CurveName::Gamma => Complex::new(0.0, 1.0) * z,
                    CurveName::Sigma1 => Complex::new(-1.0, 0.0),
                    _ => Complex::new(1.0, 0.0),
                };
                let dh = domain_dh(&p, &pt) * dzdt;
                assert!((c.dh(t) - dh).norm() < 1e-12 * dh.norm(), "{name:?} dh at {t}: {} vs {dh}", c.dh(t));
            }
        }
    }

    #[test]
    fn involution_table_passes() {
        let r = involution_table_check(&params(), 64, 1e-10);
        assert!(r.passed(), "{:#?}", r.rows);
        assert_eq!(r.row3_sign, 1);
    }
}
