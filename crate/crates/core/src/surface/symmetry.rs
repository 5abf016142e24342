//! Euclidean isometries, least-squares symmetry elements and the sheet group.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::grid::Segment;

pub type Vec3 = Vector3<f64>;

/// Affine isometry `p -> m p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub m: Matrix3<f64>,
    pub t: Vec3,
}

impl Isometry {
    pub fn identity() -> Self {
        Self { m: Matrix3::identity(), t: Vec3::zeros() }
    }

    pub fn translation(t: Vec3) -> Self {
        Self { m: Matrix3::identity(), t }
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.m * p + self.t
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry { m: self.m * other.m, t: self.m * other.t + self.t }
    }

    pub fn inverse(&self) -> Isometry {
        let mt = self.m.transpose();
        Isometry { m: mt, t: -(mt * self.t) }
    }

    /// Reflection in the plane `n · p = offset` (`n` unit).
    pub fn reflection(n: &Vec3, offset: f64) -> Self {
        let m = Matrix3::identity() - 2.0 * n * n.transpose();
        Isometry { m, t: 2.0 * offset * n }
    }

    /// Rotation by `pi` about the line through `p` with unit direction `d`.
    pub fn half_turn(p: &Vec3, d: &Vec3) -> Self {
        let m = 2.0 * d * d.transpose() - Matrix3::identity();
        Isometry { m, t: p - m * p }
    }

    /// Largest entry of the difference of the linear parts.
    pub fn linear_distance(&self, other: &Isometry) -> f64 {
        (self.m - other.m).abs().max()
    }
}

/// Fitted symmetry element of a boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryElement {
    /// Planar curve: mirror plane `normal · p = offset`.
    Plane { normal: Vec3, offset: f64 },
    /// Straight line: half-turn axis.
    Line { point: Vec3, direction: Vec3 },
}

impl SymmetryElement {
    pub fn isometry(&self) -> Isometry {
        match self {
            SymmetryElement::Plane { normal, offset } => Isometry::reflection(normal, *offset),
            SymmetryElement::Line { point, direction } => Isometry::half_turn(point, direction),
        }
    }
}

/// A fit with its worst point distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub element: SymmetryElement,
    pub residual: f64,
}

fn centroid_cov(points: &[Vec3]) -> (Vec3, Matrix3<f64>) {
    let n = points.len().max(1) as f64;
    let c = points.iter().fold(Vec3::zeros(), |s, p| s + p) / n;
    let cov = points.iter().fold(Matrix3::zeros(), |s, p| {
        let d = p - c;
        s + d * d.transpose()
    });
    (c, cov)
}

/// Least-squares plane through `points`.
pub fn fit_plane(points: &[Vec3]) -> Fit {
    let (c, cov) = centroid_cov(points);
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imin();
    let mut n: Vec3 = eig.eigenvectors.column(k).into();
    n /= n.norm();
    // Canonical sign: largest component positive.
    if n[n.iamax()] < 0.0 {
        n = -n;
    }
    let offset = n.dot(&c);
    let residual = points.iter().map(|p| (n.dot(p) - offset).abs()).fold(0.0, f64::max);
    Fit { element: SymmetryElement::Plane { normal: n, offset }, residual }
}

/// Least-squares line through `points`.
pub fn fit_line(points: &[Vec3]) -> Fit {
    let (c, cov) = centroid_cov(points);
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imax();
    let mut d: Vec3 = eig.eigenvectors.column(k).into();
    d /= d.norm();
    if d[d.iamax()] < 0.0 {
        d = -d;
    }
    let residual = points
        .iter()
        .map(|p| {
            let v = p - c;
            (v - d * d.dot(&v)).norm()
        })
        .fold(0.0, f64::max);
    Fit { element: SymmetryElement::Line { point: c, direction: d }, residual }
}

/// Element `(m, u)` of the 16-element group generated by the boundary
/// involutions, acting as `z -> m(z)`, `g -> u · m*(g)` with
/// `m in {z, conj z, 1/z, 1/conj z}` and `u = i^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SheetElement {
    /// Bit 0: complex conjugation; bit 1: inversion.
    pub m: u8,
    pub k: u8,
}

impl SheetElement {
    pub const IDENTITY: SheetElement = SheetElement { m: 0, k: 0 };

    fn reverses(self) -> bool {
        // conj and inversion send i^k to i^{-k}; their product fixes it.
        self.m == 1 || self.m == 2
    }

    /// `self ∘ other`.
    pub fn compose(self, other: SheetElement) -> SheetElement {
        let k = if self.reverses() { (self.k + 4 - other.k) % 4 } else { (self.k + other.k) % 4 };
        SheetElement { m: self.m ^ other.m, k }
    }

    /// Index in `0..16`.
    pub fn index(self) -> usize {
        (self.m as usize) * 4 + self.k as usize
    }

    pub fn from_index(i: usize) -> Self {
        SheetElement { m: (i / 4) as u8, k: (i % 4) as u8 }
    }

    /// Whether the sheet lies over the unit disk (`m in {z, conj z}`).
    pub fn over_disk(self) -> bool {
        self.m & 2 == 0
    }

    /// Acts on `g`.
    pub fn act_g(self, g: num_complex::Complex<f64>) -> num_complex::Complex<f64> {
        let h = match self.m {
            0 => g,
            1 => g.conj(),
            2 => g.inv(),
            _ => g.conj().inv(),
        };
        num_complex::Complex::<f64>::i().powu(self.k as u32) * h
    }

    /// Acts on `z`.
    pub fn act_z(self, z: num_complex::Complex<f64>) -> num_complex::Complex<f64> {
        match self.m {
            0 => z,
            1 => z.conj(),
            2 => z.inv(),
            _ => z.conj().inv(),
        }
    }
}

/// The involution of the sheet group fixing each boundary segment of the domain pointwise.
pub fn segment_involution(s: Segment) -> SheetElement {
    match s {
        Segment::MinusOneMinusX => SheetElement { m: 1, k: 0 },
        Segment::MinusXZero => SheetElement { m: 1, k: 2 },
        Segment::ZeroA => SheetElement { m: 1, k: 1 },
        Segment::AB => SheetElement { m: 1, k: 2 },
        Segment::BOne => SheetElement { m: 1, k: 0 },
        Segment::Gamma => SheetElement { m: 3, k: 0 },
    }
}
