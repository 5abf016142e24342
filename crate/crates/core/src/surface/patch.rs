//! Immersion of the domain grid: `X(z) = Re ∫_{z0}^{z} phi`.

use num_complex::Complex;
use rayon::prelude::*;

use super::grid::DomainPatch;
use super::symmetry::Vec3;
use crate::error::GeometryError;
use crate::quadrature::{integrate_general, Abscissa, Components, Endpoints, SingularitySpec, Tolerance};
use crate::weierstrass::{domain_g_dh, domain_phi, phi_from, SurfaceParams, ZPoint};

/// Endpoint exponent of `phi` at every branch point of the domain.
pub const BRANCH_EXPONENT: f64 = -0.75;

/// Largest admissible cell circulation relative to the cell's edge integrals.
pub const CELL_CLOSURE_TOL: f64 = 1e-8;

/// Edge integration accuracy.
pub fn edge_tolerance() -> Tolerance<f64> {
    Tolerance { abs: 1e-13, rel: 1e-12, max_intervals: 2000 }
}

/// Immersed grid.
#[derive(Debug, Clone)]
pub struct MeshPatch {
    pub domain: DomainPatch,
    /// Positions `X(z_v)` with `X(i/2) = 0`.
    pub positions: Vec<Vec3>,
    /// `∫ phi` along each edge `(i, j)` from `z_i` to `z_j`.
    pub edge_integrals: Vec<[Complex<f64>; 3]>,
    /// Worst `|∮ phi|` around a triangle relative to its edge integrals.
    pub path_residual: f64,
    /// Worst deviation from isothermal coordinates over non-singular vertices.
    pub conformality: f64,
}

/// `∫ phi dz` along the straight segment `p -> q`; branch-point ends use a power substitution.
pub fn segment_integral(
    params: &SurfaceParams<f64>,
    p: ZPoint<f64>,
    q: ZPoint<f64>,
    tol: Tolerance<f64>,
) -> Result<[Complex<f64>; 3], GeometryError> {
    let dz = q.z - p.z;
    let spec = |s: &ZPoint<f64>| if s.near.is_some() { SingularitySpec::power_law(BRANCH_EXPONENT) } else { SingularitySpec::regular() };
    let ends = Endpoints { lo: spec(&p), hi: spec(&q) };
    let f = |s: Abscissa<f64>| {
        let pt = match (p.near, q.near) {
            (Some((l, _)), _) if s.from_lo <= s.to_hi || q.near.is_none() => ZPoint { z: p.z + dz * s.from_lo, near: Some((l, dz * s.from_lo)) },
            (_, Some((l, _))) => ZPoint { z: q.z - dz * s.to_hi, near: Some((l, -dz * s.to_hi)) },
            _ => ZPoint::new(p.z + dz * s.t),
        };
        let phi = domain_phi(params, &pt);
        Components([phi[0] * dz, phi[1] * dz, phi[2] * dz])
    };
    let r = integrate_general(f, 0.0, 1.0, ends, tol)?;
    Ok(r.value.0)
}

fn zpoint(d: &DomainPatch, v: usize) -> ZPoint<f64> {
    match d.singular[v] {
        Some(l) => ZPoint { z: d.z[v], near: Some((l, Complex::new(0.0, 0.0))) },
        None => ZPoint::new(d.z[v]),
    }
}

/// Deviation from conformality of `X` at `z`: `max(| |Re phi|/|Im phi| - 1 |, |cos angle|)`.
pub fn conformality_defect(phi: &[Complex<f64>; 3]) -> f64 {
    let re = Vec3::new(phi[0].re, phi[1].re, phi[2].re);
    let im = Vec3::new(phi[0].im, phi[1].im, phi[2].im);
    let (nr, ni) = (re.norm(), im.norm());
    ((nr / ni) - 1.0).abs().max(re.dot(&im).abs() / (nr * ni))
}

/// Integrates `phi` over every grid edge and accumulates `X` along a BFS spanning tree from `z = i/2`.
pub fn mesh_patch(params: &SurfaceParams<f64>, resolution: usize) -> Result<MeshPatch, GeometryError> {
    if resolution < 8 {
        return Err(GeometryError::Invalid(format!("resolution {resolution} below 8")));
    }
    let domain = DomainPatch::new(*params, resolution);
    let tol = edge_tolerance();
    let edge_integrals: Vec<[Complex<f64>; 3]> = domain
        .edges
        .par_iter()
        .map(|&[u, v]| segment_integral(params, zpoint(&domain, u), zpoint(&domain, v), tol))
        .collect::<Result<_, _>>()?;

    let nv = domain.vertex_count();
    let mut adj: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); nv];
    for (k, &[u, v]) in domain.edges.iter().enumerate() {
        adj[u].push((v, k, 1.0));
        adj[v].push((u, k, -1.0));
    }
    let mut positions = vec![Vec3::zeros(); nv];
    let mut seen = vec![false; nv];
    let mut queue = std::collections::VecDeque::from([domain.base]);
    seen[domain.base] = true;
    while let Some(u) = queue.pop_front() {
        for &(w, k, sign) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                let e = edge_integrals[k];
                positions[w] = positions[u] + sign * Vec3::new(e[0].re, e[1].re, e[2].re);
                queue.push_back(w);
            }
        }
    }

    let edge_index = |u: usize, v: usize| -> (usize, f64) {
        let key = if u < v { [u, v] } else { [v, u] };
        let k = domain.edges.binary_search(&key).expect("edge of triangle");
        (k, if u < v { 1.0 } else { -1.0 })
    };
    let mut path_residual = 0.0f64;
    let mut worst_cell = 0;
    for (cell, t) in domain.triangles.iter().enumerate() {
        let mut sum = [Complex::new(0.0, 0.0); 3];
        let mut scale = 0.0f64;
        for (u, v) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let (k, s) = edge_index(u, v);
            for c in 0..3 {
                sum[c] += edge_integrals[k][c] * s;
                scale = scale.max(edge_integrals[k][c].norm());
            }
        }
        let r = sum.iter().map(|c| c.norm()).fold(0.0, f64::max) / scale.max(f64::MIN_POSITIVE);
        if !(r <= path_residual) {
            path_residual = r;
            worst_cell = cell;
        }
    }
    if !(path_residual <= CELL_CLOSURE_TOL) {
        let t = domain.triangles[worst_cell];
        let c = (domain.z[t[0]] + domain.z[t[1]] + domain.z[t[2]]) / 3.0;
        return Err(GeometryError::CellClosure { cell: worst_cell, re: c.re, im: c.im, residual: path_residual });
    }

    let conformality = (0..nv)
        .into_par_iter()
        .filter(|&v| domain.singular[v].is_none())
        .map(|v| {
            let (g, dh) = domain_g_dh(params, &ZPoint::new(domain.z[v]));
            conformality_defect(&phi_from(g, dh))
        })
        .reduce(|| 0.0, f64::max);

    Ok(MeshPatch { domain, positions, edge_integrals, path_residual, conformality })
}
