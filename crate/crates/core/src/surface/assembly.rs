//! Assembly of symmetric copies of the immersed domain.
//!
//! Every boundary segment of the domain is fixed by an involution of the
//! surface, realised in space by the reflection in the segment's plane or the
//! half-turn about its line. Copies are indexed by the 16-element sheet group;
//! the copy across segment `e` of copy `h` is `h ∘ s_e` and is placed by
//! `M_{h ∘ s_e} = M_h ∘ S_e` along a breadth-first tree. Gluings off the tree
//! measure how well the periods close.

use std::collections::VecDeque;

use nalgebra::Matrix3;
use num_complex::Complex;

use super::grid::Segment;
use super::patch::MeshPatch;
use super::symmetry::{fit_line, fit_plane, segment_involution, Fit, Isometry, SheetElement, SymmetryElement, Vec3};
use crate::error::GeometryError;

/// Segments glued inside the fundamental piece.
pub const PIECE_SEGMENTS: [Segment; 4] = [Segment::ZeroA, Segment::AB, Segment::BOne, Segment::MinusOneMinusX];
/// Relative planarity tolerance of boundary curves.
pub const PLANARITY_TOL: f64 = 1e-6;
/// Relative seam tolerance inside the fundamental piece.
pub const SEAM_TOL: f64 = 1e-6;

/// A gluing between two copies along a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seam {
    pub from: SheetElement,
    pub to: SheetElement,
    pub segment: Segment,
    /// Whether the gluing was used to place `to`.
    pub tree: bool,
    /// Whether both copies belong to the same piece and `segment` is glued inside it.
    pub internal: bool,
    /// Largest distance between the two placements of the segment's vertices.
    pub mismatch: f64,
    /// Mean displacement `M_from X - M_to X` over the segment.
    pub translation: Vec3,
    /// Largest entry of `A_from A_S - A_to`.
    pub linear_mismatch: f64,
}

/// Classification of a boundary curve of the fundamental piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveClass {
    VerticalPlanar,
    HorizontalPlanar,
    /// Planar but neither vertical nor horizontal.
    Planar,
    NonPlanar,
}

impl CurveClass {
    pub fn label(self) -> &'static str {
        match self {
            CurveClass::VerticalPlanar => "vertical_planar",
            CurveClass::HorizontalPlanar => "horizontal_planar",
            CurveClass::Planar => "planar",
            CurveClass::NonPlanar => "non_planar",
        }
    }

    pub fn code(self) -> i32 {
        match self {
            CurveClass::VerticalPlanar => 1,
            CurveClass::HorizontalPlanar => 2,
            CurveClass::Planar => 3,
            CurveClass::NonPlanar => 4,
        }
    }
}

/// A boundary curve: merged vertex ids, class and plane-fit residual.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub id: usize,
    pub class: CurveClass,
    pub vertices: Vec<usize>,
    pub residual: f64,
    pub normal: Vec3,
}

/// Triangle mesh of a set of glued copies.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    /// Boundary curve id per vertex.
    pub tags: Vec<Option<usize>>,
    pub curves: Vec<BoundaryCurve>,
    /// Domain point and sheet of each merged vertex (one representative).
    pub provenance: Vec<(SheetElement, usize)>,
}

/// The assembled fundamental piece in normalised coordinates.
#[derive(Debug, Clone)]
pub struct FundamentalPiece {
    /// Raw immersion coordinates to normalised coordinates.
    pub frame: Isometry,
    /// Domain vertex positions in normalised coordinates.
    pub positions: Vec<Vec3>,
    /// Segment fits in normalised coordinates.
    pub fits: [Fit; 6],
    /// Placement of all 16 sheets (modulo the period lattice).
    pub placements: [Isometry; 16],
    pub seams: Vec<Seam>,
    pub mesh: PieceMesh,
    /// Diameter of the domain image.
    pub scale: f64,
    /// Largest internal seam mismatch.
    pub closure_residual: f64,
    /// Largest planarity / linearity residual of the six segments.
    pub planarity_residual: f64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

pub(crate) fn diameter(points: &[Vec3]) -> f64 {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

/// Fits the symmetry element of each segment in raw coordinates.
pub fn fit_segments(patch: &MeshPatch) -> Result<([Fit; 6], f64), GeometryError> {
    let scale = diameter(&patch.positions);
    let mut fits = Vec::with_capacity(6);
    for s in Segment::ALL {
        let pts: Vec<Vec3> = patch.domain.segments[s.index()].iter().map(|&v| patch.positions[v]).collect();
        let fit = if s == Segment::ZeroA { fit_line(&pts) } else { fit_plane(&pts) };
        if fit.residual > PLANARITY_TOL * scale {
            return Err(GeometryError::NotPlanar { segment: s.label().into(), residual: fit.residual, scale });
        }
        fits.push(fit);
    }
    Ok((fits.try_into().unwrap(), scale))
}

/// Raw → normalised frame: `X(a)` at the origin, the half-turn axis along `+x1`.
fn normalising_frame(patch: &MeshPatch, line: &Fit) -> Isometry {
    let d = &patch.domain;
    let ia = d.singular.iter().position(|s| *s == Some(crate::weierstrass::Locus::A)).unwrap();
    let xa = patch.positions[ia];
    let x0 = patch.positions[0];
    let SymmetryElement::Line { direction, .. } = line.element else { unreachable!() };
    let dir = if direction.dot(&(xa - x0)) < 0.0 { -direction } else { direction };
    let phi = dir.y.atan2(dir.x);
    let (s, c) = phi.sin_cos();
    let rot = Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0);
    Isometry { m: rot, t: -(rot * xa) }
}

fn transform_fit(f: &Fit, frame: &Isometry) -> Fit {
    let element = match f.element {
        SymmetryElement::Plane { normal, offset } => {
            let n = frame.m * normal;
            // point on plane: offset * normal
            let p = frame.apply(&(normal * offset));
            SymmetryElement::Plane { normal: n, offset: n.dot(&p) }
        }
        SymmetryElement::Line { point, direction } => SymmetryElement::Line { point: frame.apply(&point), direction: frame.m * direction },
    };
    Fit { element, residual: f.residual }
}

/// Places sheets by breadth-first search over the allowed gluings, extending `placed`.
fn place(placed: &mut [Option<Isometry>; 16], sym: &[Isometry; 6], allowed: &[Segment], tree: &mut Vec<(usize, Segment)>) {
    let mut queue: VecDeque<usize> = (0..16).filter(|&i| placed[i].is_some()).collect();
    while let Some(h) = queue.pop_front() {
        for &s in allowed {
            let n = SheetElement::from_index(h).compose(segment_involution(s)).index();
            if placed[n].is_none() {
                placed[n] = Some(placed[h].unwrap().compose(&sym[s.index()]));
                tree.push((h, s));
                queue.push_back(n);
            }
        }
    }
}

/// Unit normal from the Gauss map by inverse stereographic projection.
pub fn gauss_normal(g: Complex<f64>) -> Vec3 {
    let n2 = g.norm_sqr();
    Vec3::new(2.0 * g.re, 2.0 * g.im, n2 - 1.0) / (n2 + 1.0)
}

/// Assembles the fundamental piece without enforcing period closure.
pub fn assemble_unchecked(patch: &MeshPatch) -> Result<FundamentalPiece, GeometryError> {
    let (raw_fits, scale) = fit_segments(patch)?;
    let planarity_residual = raw_fits.iter().map(|f| f.residual).fold(0.0, f64::max);
    let frame = normalising_frame(patch, &raw_fits[Segment::ZeroA.index()]);
    let fits: [Fit; 6] = raw_fits.map(|f| transform_fit(&f, &frame));
    let sym: [Isometry; 6] = fits.map(|f| f.element.isometry());
    let pos: Vec<Vec3> = patch.positions.iter().map(|p| frame.apply(p)).collect();

    let mut placed: [Option<Isometry>; 16] = [None; 16];
    placed[0] = Some(Isometry::identity());
    let mut tree = Vec::new();
    place(&mut placed, &sym, &PIECE_SEGMENTS, &mut tree);
    place(&mut placed, &sym, &Segment::ALL, &mut tree);
    let placements: [Isometry; 16] = placed.map(|p| p.expect("group generated by segment involutions"));

    let d = &patch.domain;
    let mut seams = Vec::new();
    for h in 0..16 {
        for s in Segment::ALL {
            let he = SheetElement::from_index(h);
            let n = he.compose(segment_involution(s));
            if n.index() < h {
                continue;
            }
            let is_tree = tree.iter().any(|&(f, ts)| ts == s && ((f == h) || (f == n.index())) && {
                let other = SheetElement::from_index(f).compose(segment_involution(ts)).index();
                (f == h && other == n.index()) || (f == n.index() && other == h)
            });
            let (ma, mb) = (placements[h], placements[n.index()]);
            let verts = &d.segments[s.index()];
            let mut mismatch = 0.0f64;
            let mut tsum = Vec3::zeros();
            for &v in verts {
                let diff = ma.apply(&pos[v]) - mb.apply(&pos[v]);
                mismatch = mismatch.max(diff.norm());
                tsum += diff;
            }
            let linear_mismatch = ma.compose(&sym[s.index()]).linear_distance(&mb);
            let internal = he.over_disk() == n.over_disk() && PIECE_SEGMENTS.contains(&s);
            seams.push(Seam {
                from: he,
                to: n,
                segment: s,
                tree: is_tree,
                internal,
                mismatch,
                translation: tsum / verts.len() as f64,
                linear_mismatch,
            });
        }
    }
    let closure_residual = seams.iter().filter(|s| s.internal && he_in_piece(s.from)).map(|s| s.mismatch).fold(0.0, f64::max);
    let sheets: Vec<SheetElement> = (0..16).map(SheetElement::from_index).filter(|h| h.over_disk()).collect();
    let mesh = glue_copies(patch, &pos, &placements, &sheets, |_, s| PIECE_SEGMENTS.contains(&s), scale);
    Ok(FundamentalPiece { frame, positions: pos, fits, placements, seams, mesh, scale, closure_residual, planarity_residual })
}

fn he_in_piece(h: SheetElement) -> bool {
    h.over_disk()
}

/// Assembles the fundamental piece; fails with a closure fault when the
/// internal seams do not meet within `SEAM_TOL · scale`.
pub fn assemble_fundamental_piece(patch: &MeshPatch) -> Result<FundamentalPiece, GeometryError> {
    let piece = assemble_unchecked(patch)?;
    let tol = SEAM_TOL * piece.scale;
    if piece.closure_residual > tol {
        return Err(GeometryError::ClosureFault { mismatch: piece.closure_residual, tolerance: tol });
    }
    Ok(piece)
}

/// Glues the given sheets along every segment for which `glued(sheet, segment)` holds;
/// the remaining segments become boundary curves, joined at non-branch endpoints.
pub fn glue_copies(
    patch: &MeshPatch,
    pos: &[Vec3],
    placements: &[Isometry; 16],
    sheets: &[SheetElement],
    glued: impl Fn(SheetElement, Segment) -> bool,
    scale: f64,
) -> PieceMesh {
    let d = &patch.domain;
    let nv = d.vertex_count();
    let slot = |h: SheetElement| sheets.iter().position(|&s| s == h);
    let mut uf = UnionFind::new(sheets.len() * nv);
    for (k, &h) in sheets.iter().enumerate() {
        for s in Segment::ALL {
            if !glued(h, s) {
                continue;
            }
            if let Some(j) = slot(h.compose(segment_involution(s))) {
                for &v in &d.segments[s.index()] {
                    uf.union(k * nv + v, j * nv + v);
                }
            }
        }
    }
    let mut id = vec![usize::MAX; sheets.len() * nv];
    let mut vertices = Vec::new();
    let mut provenance = Vec::new();
    for (k, &h) in sheets.iter().enumerate() {
        for v in 0..nv {
            let r = uf.find(k * nv + v);
            if id[r] == usize::MAX {
                id[r] = vertices.len();
                vertices.push(placements[h.index()].apply(&pos[v]));
                provenance.push((h, v));
            }
            id[k * nv + v] = id[r];
        }
    }
    let mut triangles = Vec::new();
    for (k, &h) in sheets.iter().enumerate() {
        let flip = h.m & 1 == 1;
        for t in &d.triangles {
            let [p, q, r] = t.map(|v| id[k * nv + v]);
            triangles.push(if flip { [p, r, q] } else { [p, q, r] });
        }
    }

    let items: Vec<(usize, Segment)> =
        (0..sheets.len()).flat_map(|k| Segment::ALL.into_iter().map(move |s| (k, s))).filter(|&(k, s)| !glued(sheets[k], s)).collect();
    let mut cuf = UnionFind::new(items.len());
    let ends = |k: usize, s: Segment| {
        let seg = &d.segments[s.index()];
        [seg[0], *seg.last().unwrap()].map(|v| (id[k * nv + v], d.singular[v].is_none()))
    };
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let (ei, ej) = (ends(items[i].0, items[i].1), ends(items[j].0, items[j].1));
            if ei.iter().any(|&(u, reg)| reg && ej.iter().any(|&(w, _)| w == u)) {
                cuf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = std::collections::BTreeMap::new();
    for i in 0..items.len() {
        let r = cuf.find(i);
        let g = *root_slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    let mut tags = vec![None; vertices.len()];
    let mut curves = Vec::new();
    for (cid, g) in groups.iter().enumerate() {
        let mut vs: Vec<usize> = g
            .iter()
            .flat_map(|&i| {
                let (k, s) = items[i];
                d.segments[s.index()].iter().map(move |&v| (k, v))
            })
            .map(|(k, v)| id[k * nv + v])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        let pts: Vec<Vec3> = vs.iter().map(|&v| vertices[v]).collect();
        let fit = fit_plane(&pts);
        let SymmetryElement::Plane { normal, .. } = fit.element else { unreachable!() };
        let tol = PLANARITY_TOL * scale;
        let class = if fit.residual > tol {
            CurveClass::NonPlanar
        } else if normal.z.abs() > 1.0 - 1e-9 {
            CurveClass::HorizontalPlanar
        } else if normal.z.abs() < 1e-6 {
            CurveClass::VerticalPlanar
        } else {
            CurveClass::Planar
        };
        for &v in &vs {
            tags[v] = Some(cid);
        }
        curves.push(BoundaryCurve { id: cid, class, vertices: vs, residual: fit.residual, normal });
    }
    PieceMesh { vertices, triangles, tags, curves, provenance }
}

impl FundamentalPiece {
    /// `(vertical, horizontal)` planar boundary curve counts.
    pub fn census(&self) -> (usize, usize) {
        let v = self.mesh.curves.iter().filter(|c| c.class == CurveClass::VerticalPlanar).count();
        let h = self.mesh.curves.iter().filter(|c| c.class == CurveClass::HorizontalPlanar).count();
        (v, h)
    }

    /// Seams that must close for the piece to be embedded consistently.
    pub fn internal_seams(&self) -> impl Iterator<Item = &Seam> {
        self.seams.iter().filter(|s| s.internal && s.from.over_disk())
    }

    /// Translations between the two placements of non-internal gluings.
    pub fn seam_translations(&self) -> Vec<Vec3> {
        self.seams.iter().filter(|s| !(s.internal && s.from.over_disk())).map(|s| s.translation).collect()
    }
}
