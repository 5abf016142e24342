//! Translation lattice of the periodic surface and its cross-validation by loop periods.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex;

use super::assembly::FundamentalPiece;
use super::grid::Segment;
use super::symmetry::{Isometry, SymmetryElement, Vec3};
use crate::error::GeometryError;
use crate::quadrature::{integrate_general, Abscissa, Components, Endpoints, Tolerance};
use crate::weierstrass::{continue_to, phi_forms, BranchState, Sheet, SurfaceParams};

/// Relative tolerance for lattice membership.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

/// Three generators of the translation lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub basis: [Vec3; 3],
    /// Determinant of the Gram matrix.
    pub gram_det: f64,
}

/// Integer decomposition of a vector in the lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub coefficients: [i64; 3],
    /// Distance to the nearest lattice point relative to the shortest generator.
    pub residual: f64,
}

impl Lattice {
    fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&self.basis)
    }

    pub fn shortest(&self) -> f64 {
        self.basis.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Nearest lattice point to `v` by rounding the real coordinates.
    pub fn membership(&self, v: &Vec3) -> Membership {
        let m = self.matrix();
        let c = m.try_inverse().map(|inv| inv * v).unwrap_or_else(Vector3::zeros);
        let k = c.map(|t| t.round());
        let residual = (m * k - v).norm() / self.shortest();
        Membership { coefficients: [k.x as i64, k.y as i64, k.z as i64], residual }
    }
}

fn plane(piece: &FundamentalPiece, s: Segment) -> Result<(Vec3, f64), GeometryError> {
    match piece.fits[s.index()].element {
        SymmetryElement::Plane { normal, offset } => Ok((normal, offset)),
        SymmetryElement::Line { .. } => Err(GeometryError::Invalid(format!("segment {} is not planar", s.label()))),
    }
}

/// Generators: two horizontal ones from the parallel vertical mirrors through
/// `(a,b)` and `(-x,0)` (and their half-turn image), one vertical from the
/// horizontal mirror through `gamma` and its half-turn image.
pub fn lattice_vectors(piece: &FundamentalPiece) -> Result<Lattice, GeometryError> {
    let sigma_l = piece.fits[Segment::AB.index()].element.isometry();
    let sigma_r = piece.fits[Segment::MinusXZero.index()].element.isometry();
    let rho = piece.fits[Segment::ZeroA.index()].element.isometry();
    let (nl, _) = plane(piece, Segment::AB)?;
    let (nr, _) = plane(piece, Segment::MinusXZero)?;
    if nl.cross(&nr).norm() > 1e-6 {
        return Err(GeometryError::Invalid("vertical mirrors are not parallel".into()));
    }
    let v1 = sigma_r.compose(&sigma_l).t;
    let v2 = rho.m * v1;
    let top = piece.fits[Segment::Gamma.index()].element.isometry();
    let bottom = rho.compose(&top).compose(&rho);
    let v3 = top.compose(&bottom).t;
    let basis = [v1, v2, v3];
    let m = Matrix3::from_columns(&basis);
    let gram_det = (m.transpose() * m).determinant();
    let scale = piece.scale;
    if !(gram_det > 1e-12 * scale.powi(6)) {
        return Err(GeometryError::DegenerateLattice { det: gram_det });
    }
    Ok(Lattice { basis, gram_det })
}

/// A closed loop in the `z` plane, traversed `laps` times until its lift closes.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopProbe {
    pub name: String,
    pub center: Complex<f64>,
    pub radius: f64,
}

/// Period of a probe loop in normalised coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPeriod {
    pub name: String,
    pub laps: usize,
    pub period: Vec3,
    pub membership: Membership,
}

fn circle_around(name: &str, lo: f64, hi: f64, loci: &[f64]) -> LoopProbe {
    let gap = loci.iter().filter(|&&v| v < lo - 1e-12 || v > hi + 1e-12).map(|&v| if v < lo { lo - v } else { v - hi }).fold(f64::INFINITY, f64::min);
    let margin = if gap.is_finite() { 0.5 * gap } else { 0.5 };
    LoopProbe { name: name.into(), center: Complex::new(0.5 * (lo + hi), 0.0), radius: 0.5 * (hi - lo) + margin }
}

/// Representative loops: circles around pairs of branch points, the unit
/// circle, a circle separating `1` from `1/b`, and contractible loops around
/// single branch points.
pub fn probe_loops(p: &SurfaceParams<f64>) -> Vec<LoopProbe> {
    let loci: Vec<f64> = p.branch_loci().iter().map(|l| l.1).collect();
    let (a, b, x) = (p.a(), p.b(), p.x());
    let r_mid = (1.0f64 / b).min(1.0 / x).sqrt();
    vec![
        circle_around("around_0_a", 0.0, a, &loci),
        circle_around("around_b_1/b", b, 1.0 / b, &loci),
        circle_around("around_-1/x_-x", -1.0 / x, -x, &loci),
        circle_around("around_-x_0", -x, 0.0, &loci),
        circle_around("around_a_b", a, b, &loci),
        circle_around("around_-x_a", -x, a, &loci),
        LoopProbe { name: "unit_circle".into(), center: Complex::new(0.0, 0.0), radius: 1.0 },
        LoopProbe { name: "circle_between_1_and_1/b".into(), center: Complex::new(0.0, 0.0), radius: r_mid },
        circle_around("contractible_b", b, b, &loci),
        circle_around("contractible_0", 0.0, 0.0, &loci),
    ]
}

const LOOP_EDGES: usize = 256;
const MAX_LAPS: usize = 8;

fn loop_tolerance() -> Tolerance<f64> {
    Tolerance { abs: 1e-14, rel: 1e-13, max_intervals: 200 }
}

/// `∫ phi` along `z0 -> z1` starting from the tracked state at `z0`.
fn tracked_segment(p: &SurfaceParams<f64>, state: &BranchState<f64>, z1: Complex<f64>) -> Result<([Complex<f64>; 3], BranchState<f64>), GeometryError> {
    let z0 = state.z;
    let dz = z1 - z0;
    let err = std::cell::RefCell::new(None);
    let f = |s: Abscissa<f64>| {
        match continue_to(p, state, z0 + dz * s.t) {
            Ok(st) => {
                let phi = phi_forms(p, &st, Sheet::Plus);
                Components([phi[0] * dz, phi[1] * dz, phi[2] * dz])
            }
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                Components([Complex::new(0.0, 0.0); 3])
            }
        }
    };
    let r = integrate_general(f, 0.0, 1.0, Endpoints::regular(), loop_tolerance())?;
    if let Some(e) = err.into_inner() {
        return Err(e.into());
    }
    Ok((r.value.0, continue_to(p, state, z1)?))
}

fn same_sheet(s: &BranchState<f64>, t: &BranchState<f64>) -> bool {
    let two_pi = 2.0 * std::f64::consts::PI;
    let wrap = |d: f64| (d - two_pi * (d / two_pi).round()).abs();
    (s.g - t.g).norm() < 1e-9 * s.g.norm() && wrap(0.5 * (s.radicand_arg - t.radicand_arg)) < 1e-9
}

/// Raw `Re ∮ phi` along the lift of `probe`, with the number of laps needed to close it.
pub fn loop_period(p: &SurfaceParams<f64>, probe: &LoopProbe) -> Result<(Vec3, usize), GeometryError> {
    let start = probe.center + Complex::new(0.0, probe.radius);
    // Reach the loop from the anchor through the upper half plane.
    let anchor = BranchState::anchor(p);
    let lift = continue_to(p, &anchor, Complex::new(1.0, probe.radius))?;
    let first = continue_to(p, &lift, start)?;
    let mut state = first;
    let mut total = Vec3::zeros();
    for lap in 1..=MAX_LAPS {
        for k in 1..=LOOP_EDGES {
            let theta = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / LOOP_EDGES as f64;
            let z1 = if k == LOOP_EDGES { start } else { probe.center + Complex::from_polar(probe.radius, theta) };
            let (phi, next) = tracked_segment(p, &state, z1)?;
            total += Vec3::new(phi[0].re, phi[1].re, phi[2].re);
            state = next;
        }
        if same_sheet(&state, &first) {
            return Ok((total, lap));
        }
    }
    Err(GeometryError::Invalid(format!("lift of {} does not close in {MAX_LAPS} laps", probe.name)))
}

/// Periods of all probe loops in normalised coordinates, each checked against the lattice.
pub fn check_loop_periods(p: &SurfaceParams<f64>, frame: &Isometry, lattice: &Lattice) -> Result<Vec<LoopPeriod>, GeometryError> {
    use rayon::prelude::*;
    let probes = probe_loops(p);
    let raw: Vec<(Vec3, usize)> = probes.par_iter().map(|pr| loop_period(p, pr)).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(probes.len());
    for (k, (probe, (period, laps))) in probes.iter().zip(raw).enumerate() {
        let period = frame.m * period;
        let membership = lattice.membership(&period);
        if membership.residual > MEMBERSHIP_TOL {
            return Err(GeometryError::NotInLattice { index: k, residual: membership.residual });
        }
        out.push(LoopPeriod { name: probe.name.clone(), laps, period, membership });
    }
    Ok(out)
}

/// Checks that every translation between glued copies lies in the lattice.
pub fn check_seam_translations(piece: &FundamentalPiece, lattice: &Lattice) -> Result<f64, GeometryError> {
    let mut worst = 0.0f64;
    for (k, t) in piece.seam_translations().iter().enumerate() {
        let m = lattice.membership(t);
        if m.residual > MEMBERSHIP_TOL {
            return Err(GeometryError::NotInLattice { index: k, residual: m.residual });
        }
        worst = worst.max(m.residual);
    }
    Ok(worst)
}
