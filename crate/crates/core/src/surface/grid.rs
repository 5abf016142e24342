//! Polar triangulation of the closed upper half disk.

use num_complex::Complex;

use crate::weierstrass::{Locus, SurfaceParams};

/// The six boundary pieces of the domain, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    /// `(-1, -x)`
    MinusOneMinusX,
    /// `(-x, 0)`
    MinusXZero,
    /// `(0, a)`
    ZeroA,
    /// `(a, b)`
    AB,
    /// `(b, 1)`
    BOne,
    /// Upper unit semicircle.
    Gamma,
}

impl Segment {
    pub const ALL: [Segment; 6] = [Segment::MinusOneMinusX, Segment::MinusXZero, Segment::ZeroA, Segment::AB, Segment::BOne, Segment::Gamma];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn bit(self) -> u8 {
        1 << self.index()
    }

    pub fn label(self) -> &'static str {
        match self {
            Segment::MinusOneMinusX => "(-1,-x)",
            Segment::MinusXZero => "(-x,0)",
            Segment::ZeroA => "(0,a)",
            Segment::AB => "(a,b)",
            Segment::BOne => "(b,1)",
            Segment::Gamma => "gamma",
        }
    }
}

/// Grading ratio of neighbouring cells towards singular points.
pub const GRADING_RATIO: f64 = 0.7;
/// Smallest cell size relative to the base spacing.
const MIN_FRACTION: f64 = 1.0 / 16.0;

/// Triangulated closed upper half disk.
#[derive(Debug, Clone)]
pub struct DomainPatch {
    pub params: SurfaceParams<f64>,
    pub resolution: usize,
    pub r_nodes: Vec<f64>,
    pub theta_nodes: Vec<f64>,
    pub z: Vec<Complex<f64>>,
    /// Counter-clockwise triangles in the `z` plane.
    pub triangles: Vec<[usize; 3]>,
    /// Sorted unique undirected edges `(i, j)`, `i < j`.
    pub edges: Vec<[usize; 2]>,
    /// Bit mask of the boundary segments containing each vertex.
    pub seg_mask: Vec<u8>,
    /// Branch locus at the vertex, if any.
    pub singular: Vec<Option<Locus>>,
    /// Vertex at `z = i/2`, the base point of the immersion.
    pub base: usize,
    /// Vertices of each segment ordered along the boundary (counter-clockwise).
    pub segments: [Vec<usize>; 6],
}

/// Nodes on `[lo, hi)` with spacing `min(h, h_min + grow·d)`, `d` the distance to a singular end.
fn graded(lo: f64, hi: f64, h: f64, sing_lo: bool, sing_hi: bool) -> Vec<f64> {
    let h_min = h * MIN_FRACTION;
    // Equidistributing a linear size law gives neighbour ratio exp(grow).
    let grow = (1.0 / GRADING_RATIO).ln();
    let size = |t: f64| {
        let mut d = f64::INFINITY;
        if sing_lo {
            d = d.min(t - lo);
        }
        if sing_hi {
            d = d.min(hi - t);
        }
        if d.is_finite() {
            h.min(h_min + grow * d)
        } else {
            h
        }
    };
    const SUB: usize = 4096;
    let dt = (hi - lo) / SUB as f64;
    let mut cum = Vec::with_capacity(SUB + 1);
    cum.push(0.0);
    for k in 0..SUB {
        let t = lo + (k as f64 + 0.5) * dt;
        cum.push(cum[k] + dt / size(t));
    }
    let total = cum[SUB];
    let n = (total.ceil() as usize).max(1);
    let mut out = vec![lo];
    let mut j = 0;
    for k in 1..n {
        let target = total * k as f64 / n as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
        out.push(lo + (j as f64 + frac) * dt);
    }
    out
}

fn nodes(specials: &[(f64, bool)], h: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for w in specials.windows(2) {
        out.extend(graded(w[0].0, w[1].0, h, w[0].1, w[1].1));
    }
    out.push(specials.last().unwrap().0);
    out
}

impl DomainPatch {
    /// Builds the grid; `resolution >= 8` is the number of base cells along the half circle.
    pub fn new(params: SurfaceParams<f64>, resolution: usize) -> Self {
        let (a, b, x) = (params.a(), params.b(), params.x());
        let h = std::f64::consts::PI / resolution as f64;
        let mut rs: Vec<(f64, bool)> = vec![(0.0, true), (a, true), (b, true), (x, true), (0.5, false), (1.0, false)];
        rs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        rs.dedup_by(|p, q| {
            if (p.0 - q.0).abs() < 1e-12 {
                q.1 |= p.1;
                true
            } else {
                false
            }
        });
        let r_nodes = nodes(&rs, h);
        let pi = std::f64::consts::PI;
        let theta_nodes = nodes(&[(0.0, true), (pi / 2.0, false), (pi, true)], h);
        let nt = theta_nodes.len();

        let vid = |i: usize, j: usize| if i == 0 { 0 } else { 1 + (i - 1) * nt + j };
        let mut z = vec![Complex::new(0.0, 0.0)];
        for &r in &r_nodes[1..] {
            for (j, &t) in theta_nodes.iter().enumerate() {
                // Exact boundary values on the rays.
                let p = if j == 0 {
                    Complex::new(r, 0.0)
                } else if j == nt - 1 {
                    Complex::new(-r, 0.0)
                } else if t == pi / 2.0 {
                    Complex::new(0.0, r)
                } else {
                    Complex::from_polar(r, t)
                };
                z.push(p);
            }
        }
        let nr = r_nodes.len();
        let mut triangles = Vec::new();
        for j in 0..nt - 1 {
            triangles.push([0, vid(1, j), vid(1, j + 1)]);
        }
        for i in 1..nr - 1 {
            for j in 0..nt - 1 {
                let (p00, p10, p11, p01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                if (z[p00] - z[p11]).norm() <= (z[p10] - z[p01]).norm() {
                    triangles.push([p00, p10, p11]);
                    triangles.push([p00, p11, p01]);
                } else {
                    triangles.push([p00, p10, p01]);
                    triangles.push([p10, p11, p01]);
                }
            }
        }
        let mut edges: Vec<[usize; 2]> = triangles
            .iter()
            .flat_map(|t| [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]])
            .map(|[u, v]| if u < v { [u, v] } else { [v, u] })
            .collect();
        edges.sort_unstable();
        edges.dedup();

        let nv = z.len();
        let mut seg_mask = vec![0u8; nv];
        let mut singular = vec![None; nv];
        let close = |u: f64, v: f64| (u - v).abs() < 1e-13;
        let mut segments: [Vec<usize>; 6] = Default::default();
        seg_mask[0] = Segment::MinusXZero.bit() | Segment::ZeroA.bit();
        singular[0] = Some(Locus::Zero);
        for (i, &r) in r_nodes.iter().enumerate().skip(1) {
            // theta = 0 ray
            let v = vid(i, 0);
            let m = if close(r, a) {
                singular[v] = Some(Locus::A);
                Segment::ZeroA.bit() | Segment::AB.bit()
            } else if close(r, b) {
                singular[v] = Some(Locus::B);
                Segment::AB.bit() | Segment::BOne.bit()
            } else if close(r, 1.0) {
                Segment::BOne.bit() | Segment::Gamma.bit()
            } else if r < a {
                Segment::ZeroA.bit()
            } else if r < b {
                Segment::AB.bit()
            } else {
                Segment::BOne.bit()
            };
            seg_mask[v] |= m;
            // theta = pi ray
            let v = vid(i, nt - 1);
            let m = if close(r, x) {
                singular[v] = Some(Locus::MinusX);
                Segment::MinusXZero.bit() | Segment::MinusOneMinusX.bit()
            } else if close(r, 1.0) {
                Segment::MinusOneMinusX.bit() | Segment::Gamma.bit()
            } else if r < x {
                Segment::MinusXZero.bit()
            } else {
                Segment::MinusOneMinusX.bit()
            };
            seg_mask[v] |= m;
        }
        for j in 0..nt {
            seg_mask[vid(nr - 1, j)] |= Segment::Gamma.bit();
        }
        // Ordered vertex lists (counter-clockwise around the domain boundary).
        let pos_ray: Vec<usize> = std::iter::once(0).chain((1..nr).map(|i| vid(i, 0))).collect();
        let neg_ray: Vec<usize> = (1..nr).rev().map(|i| vid(i, nt - 1)).chain(std::iter::once(0)).collect();
        for s in [Segment::ZeroA, Segment::AB, Segment::BOne] {
            segments[s.index()] = pos_ray.iter().copied().filter(|&v| seg_mask[v] & s.bit() != 0).collect();
        }
        segments[Segment::Gamma.index()] = (0..nt).map(|j| vid(nr - 1, j)).collect();
        for s in [Segment::MinusOneMinusX, Segment::MinusXZero] {
            segments[s.index()] = neg_ray.iter().copied().filter(|&v| seg_mask[v] & s.bit() != 0).collect();
        }
        let ir = r_nodes.iter().position(|&r| close(r, 0.5)).expect("r = 1/2 node");
        let jt = theta_nodes.iter().position(|&t| (t - pi / 2.0).abs() < 1e-13).expect("theta = pi/2 node");
        let base = vid(ir, jt);
        DomainPatch { params, resolution, r_nodes, theta_nodes, z, triangles, edges, seg_mask, singular, base, segments }
    }

    pub fn vertex_count(&self) -> usize {
        self.z.len()
    }

    /// Whether the vertex lies on the domain boundary.
    pub fn on_boundary(&self, v: usize) -> bool {
        self.seg_mask[v] != 0
    }
}
