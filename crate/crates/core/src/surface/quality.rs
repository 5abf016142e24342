//! Numerical diagnostics: planarity, discrete mean curvature, normal
//! continuity, reflection consistency and the topology of the closed quotient.

use num_complex::Complex;
use rayon::prelude::*;

use super::assembly::{gauss_normal, FundamentalPiece, PieceMesh};
use super::grid::{DomainPatch, Segment};
use super::patch::{edge_tolerance, MeshPatch};
use super::symmetry::{segment_involution, SheetElement, Vec3};
use crate::error::GeometryError;
use crate::quadrature::{integrate_general, Abscissa, Components, Endpoints};
use crate::weierstrass::{domain_g_dh, phi_from, ZPoint};

/// Summary of the diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    /// Largest boundary-curve plane residual relative to the diameter.
    pub planarity: f64,
    /// Largest internal seam mismatch relative to the diameter.
    pub seam_mismatch: f64,
    /// Cell circulation of `phi` relative to the edge integrals.
    pub path_residual: f64,
    pub conformality: f64,
    pub mean_curvature_median: f64,
    pub mean_curvature_max: f64,
    pub interior_vertices: usize,
    /// Largest `1 - |n1 · n2|` between the normals of glued copies.
    pub normal_continuity: f64,
    /// Euler characteristic of the closed quotient surface.
    pub euler_characteristic: i64,
    pub vertical_curves: usize,
    pub horizontal_curves: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
}

/// Euler characteristic of the closed surface obtained by gluing the 16
/// sheets of the domain along every boundary segment, using the sheet
/// labels only.
pub fn quotient_euler_characteristic(d: &DomainPatch) -> i64 {
    let nv = d.vertex_count();
    let mut uf = UnionFind((0..16 * nv).collect());
    for h in 0..16 {
        for s in Segment::ALL {
            let n = SheetElement::from_index(h).compose(segment_involution(s)).index();
            for &v in &d.segments[s.index()] {
                let (r1, r2) = (uf.find(h * nv + v), uf.find(n * nv + v));
                uf.0[r1.max(r2)] = r1.min(r2);
            }
        }
    }
    let vertices = (0..16 * nv).filter(|&i| uf.find(i) == i).count() as i64;
    let boundary_edges: i64 = d.segments.iter().map(|s| s.len() as i64 - 1).sum();
    let edges = 16 * d.edges.len() as i64 - 8 * boundary_edges;
    let faces = 16 * d.triangles.len() as i64;
    vertices - edges + faces
}

/// Per-vertex `|H|` from the cotangent Laplacian with barycentric areas, for
/// vertices whose one-ring is closed.
pub fn mean_curvature(mesh: &PieceMesh) -> Vec<f64> {
    let n = mesh.vertices.len();
    let mut lap = vec![Vec3::zeros(); n];
    let mut area = vec![0.0f64; n];
    let mut edge_faces = std::collections::HashMap::new();
    for t in &mesh.triangles {
        let p = t.map(|i| mesh.vertices[i]);
        let a = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
        for k in 0..3 {
            let (i, j, o) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let (u, v) = (mesh.vertices[i] - mesh.vertices[o], mesh.vertices[j] - mesh.vertices[o]);
            let cot = u.dot(&v) / u.cross(&v).norm();
            let e = mesh.vertices[j] - mesh.vertices[i];
            lap[i] += cot * e;
            lap[j] -= cot * e;
            area[t[k]] += a / 3.0;
            *edge_faces.entry((i.min(j), i.max(j))).or_insert(0u32) += 1;
        }
    }
    let mut open = vec![false; n];
    for (&(i, j), &c) in &edge_faces {
        if c != 2 {
            open[i] = true;
            open[j] = true;
        }
    }
    (0..n).filter(|&i| !open[i] && area[i] > 0.0).map(|i| lap[i].norm() / (4.0 * area[i])).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

/// Largest `1 - |n1 · n2|` over non-singular vertices of internal seams.
pub fn normal_continuity(patch: &MeshPatch, piece: &FundamentalPiece) -> f64 {
    let d = &patch.domain;
    let mut worst = 0.0f64;
    for seam in piece.internal_seams() {
        let (ma, mb) = (piece.placements[seam.from.index()].m, piece.placements[seam.to.index()].m);
        for &v in &d.segments[seam.segment.index()] {
            if d.singular[v].is_some() {
                continue;
            }
            let (g, _) = domain_g_dh(&d.params, &ZPoint::new(d.z[v]));
            let n = piece.frame.m * gauss_normal(g);
            worst = worst.max(1.0 - (ma * n).dot(&(mb * n)).abs());
        }
    }
    worst
}

/// Reflection consistency across `(b,1)`: the continuation
/// `g~(w) = conj g(conj w)`, `dh~(w) = conj dh(conj w)` integrated from `z = 1`
/// to `conj z` must reproduce the mirror image of `X(z)`. Returns the largest
/// distance relative to the diameter over `samples` interior vertices.
pub fn reflection_consistency(patch: &MeshPatch, piece: &FundamentalPiece, samples: usize) -> Result<f64, GeometryError> {
    let d = &patch.domain;
    let params = d.params;
    let one = *d.segments[Segment::BOne.index()].last().expect("z = 1 vertex");
    let x1 = patch.positions[one];
    let mirror = piece.frame.inverse().compose(&piece.fits[Segment::BOne.index()].element.isometry()).compose(&piece.frame);
    let interior: Vec<usize> = (0..d.vertex_count()).filter(|&v| !d.on_boundary(v)).collect();
    let stride = (interior.len() / samples.max(1)).max(1);
    let picks: Vec<usize> = interior.into_iter().step_by(stride).collect();
    let worst = picks
        .par_iter()
        .map(|&v| {
            let q = d.z[v].conj();
            let z1 = Complex::new(1.0, 0.0);
            let dz = q - z1;
            let f = |s: Abscissa<f64>| {
                let w = z1 + dz * s.t;
                let (g, dh) = domain_g_dh(&params, &ZPoint::new(w.conj()));
                let phi = phi_from(g.conj(), dh.conj());
                Components([phi[0] * dz, phi[1] * dz, phi[2] * dz])
            };
            let r = integrate_general(f, 0.0, 1.0, Endpoints::regular(), edge_tolerance())?;
            let xt = x1 + Vec3::new(r.value.0[0].re, r.value.0[1].re, r.value.0[2].re);
            Ok((xt - mirror.apply(&patch.positions[v])).norm())
        })
        .collect::<Result<Vec<f64>, GeometryError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(worst / piece.scale)
}

/// Collects all diagnostics of an assembled piece.
pub fn quality_report(patch: &MeshPatch, piece: &FundamentalPiece) -> QualityReport {
    let h = mean_curvature(&piece.mesh);
    let interior_vertices = h.len();
    let mean_curvature_max = h.iter().copied().fold(0.0, f64::max);
    let (vertical_curves, horizontal_curves) = piece.census();
    QualityReport {
        planarity: piece.mesh.curves.iter().map(|c| c.residual).fold(piece.planarity_residual, f64::max) / piece.scale,
        seam_mismatch: piece.closure_residual / piece.scale,
        path_residual: patch.path_residual,
        conformality: patch.conformality,
        mean_curvature_median: median(h),
        mean_curvature_max,
        interior_vertices,
        normal_continuity: normal_continuity(patch, piece),
        euler_characteristic: quotient_euler_characteristic(&patch.domain),
        vertical_curves,
        horizontal_curves,
    }
}
