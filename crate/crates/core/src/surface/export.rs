//! Mesh container, lattice replication and OBJ/PLY I/O.

use std::fmt::Write as _;
use std::path::Path;

use super::assembly::{glue_copies, BoundaryCurve, CurveClass, FundamentalPiece, PieceMesh, SEAM_TOL};
use super::lattice::Lattice;
use super::patch::MeshPatch;
use super::symmetry::{SheetElement, Vec3};
use crate::error::{Error, GeometryError};

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl std::str::FromStr for MeshFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            other => Err(format!("unknown mesh format '{other}'")),
        }
    }
}

/// Triangle mesh with boundary tags and the translation lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    /// Boundary curve id per vertex.
    pub tags: Vec<Option<usize>>,
    /// Class of each boundary curve id.
    pub curve_classes: Vec<CurveClass>,
    pub lattice: [Vec3; 3],
}

impl SurfaceMesh {
    fn from_piece_mesh(mesh: &PieceMesh, lattice: &Lattice) -> Self {
        Self {
            vertices: mesh.vertices.clone(),
            faces: mesh.triangles.clone(),
            tags: mesh.tags.clone(),
            curve_classes: mesh.curves.iter().map(|c: &BoundaryCurve| c.class).collect(),
            lattice: lattice.basis,
        }
    }

    /// The fundamental piece with its boundary tags.
    pub fn fundamental_piece(piece: &FundamentalPiece, lattice: &Lattice) -> Self {
        Self::from_piece_mesh(&piece.mesh, lattice)
    }

    /// All 16 sheets glued along the seams that close without translation: a
    /// unit cell of the periodic surface.
    pub fn unit_cell(patch: &MeshPatch, piece: &FundamentalPiece, lattice: &Lattice) -> Self {
        let tol = SEAM_TOL * piece.scale;
        let closes = |h: SheetElement, s| {
            piece.seams.iter().any(|m| m.segment == s && (m.from == h || m.to == h) && m.mismatch <= tol)
        };
        let sheets: Vec<SheetElement> = (0..16).map(SheetElement::from_index).collect();
        let mesh = glue_copies(patch, &piece.positions, &piece.placements, &sheets, closes, piece.scale);
        Self::from_piece_mesh(&mesh, lattice)
    }

    /// Replicates over the translates `i v1 + j v2 + k v3`, `0 <= i < n1` etc.
    pub fn replicate(&self, copies: (usize, usize, usize)) -> Result<SurfaceMesh, GeometryError> {
        let (n1, n2, n3) = copies;
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(GeometryError::Invalid(format!("copies must be at least 1, got {n1}x{n2}x{n3}")));
        }
        let nv = self.vertices.len();
        let ncurves = self.curve_classes.len();
        let mut out = SurfaceMesh { vertices: Vec::new(), faces: Vec::new(), tags: Vec::new(), curve_classes: Vec::new(), lattice: self.lattice };
        let mut block = 0;
        for i in 0..n1 {
            for j in 0..n2 {
                for k in 0..n3 {
                    let t = self.lattice[0] * i as f64 + self.lattice[1] * j as f64 + self.lattice[2] * k as f64;
                    let base = block * nv;
                    out.vertices.extend(self.vertices.iter().map(|p| p + t));
                    out.faces.extend(self.faces.iter().map(|f| f.map(|v| v + base)));
                    out.tags.extend(self.tags.iter().map(|t| t.map(|c| c + block * ncurves)));
                    out.curve_classes.extend_from_slice(&self.curve_classes);
                    block += 1;
                }
            }
        }
        Ok(out)
    }

    /// OBJ text: `v`/`f` records, boundary tags as `#tag <curve-id> <class>` comments.
    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# vertices {} faces {}", self.vertices.len(), self.faces.len());
        for (i, l) in self.lattice.iter().enumerate() {
            let _ = writeln!(s, "# lattice {} {:.17e} {:.17e} {:.17e}", i + 1, l.x, l.y, l.z);
        }
        for (id, c) in self.curve_classes.iter().enumerate() {
            let _ = writeln!(s, "#tag {id} {}", c.label());
        }
        for p in &self.vertices {
            let _ = writeln!(s, "v {:.17e} {:.17e} {:.17e}", p.x, p.y, p.z);
        }
        for (v, t) in self.tags.iter().enumerate() {
            if let Some(c) = t {
                let _ = writeln!(s, "#vtag {} {c}", v + 1);
            }
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        s
    }

    /// ASCII PLY with a per-vertex `tag` property (`-1` off the boundary).
    pub fn to_ply(&self) -> String {
        let mut s = String::new();
        s.push_str("ply\nformat ascii 1.0\n");
        for (id, c) in self.curve_classes.iter().enumerate() {
            let _ = writeln!(s, "comment tag {id} {}", c.label());
        }
        let _ = writeln!(s, "element vertex {}", self.vertices.len());
        s.push_str("property double x\nproperty double y\nproperty double z\nproperty int tag\n");
        let _ = writeln!(s, "element face {}", self.faces.len());
        s.push_str("property list uchar int vertex_indices\nend_header\n");
        for (p, t) in self.vertices.iter().zip(&self.tags) {
            let _ = writeln!(s, "{:.17e} {:.17e} {:.17e} {}", p.x, p.y, p.z, t.map_or(-1, |c| c as i64));
        }
        for f in &self.faces {
            let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
        }
        s
    }
}

/// Writes `mesh` replicated over `copies` lattice translates.
pub fn export_mesh(mesh: &SurfaceMesh, format: MeshFormat, copies: (usize, usize, usize), path: &Path) -> Result<(), Error> {
    let m = mesh.replicate(copies)?;
    let text = match format {
        MeshFormat::Obj => m.to_obj(),
        MeshFormat::Ply => m.to_ply(),
    };
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

/// Reads the vertices, faces and tags of an OBJ file written by [`SurfaceMesh::to_obj`].
pub fn read_obj(text: &str) -> Result<SurfaceMesh, Error> {
    let bad = |line: &str| Error::Parse(format!("malformed OBJ line '{line}'"));
    let mut mesh = SurfaceMesh { vertices: Vec::new(), faces: Vec::new(), tags: Vec::new(), curve_classes: Vec::new(), lattice: [Vec3::zeros(); 3] };
    let mut vtags = Vec::new();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(|t| t.parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad(line))?;
                if c.len() != 3 {
                    return Err(bad(line));
                }
                mesh.vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let c: Vec<usize> = it.map(|t| t.split('/').next().unwrap_or("").parse::<usize>()).collect::<Result<_, _>>().map_err(|_| bad(line))?;
                if c.len() != 3 || c.contains(&0) {
                    return Err(bad(line));
                }
                mesh.faces.push([c[0] - 1, c[1] - 1, c[2] - 1]);
            }
            Some("#tag") => {
                let _id = it.next();
                let class = match it.next() {
                    Some("vertical_planar") => CurveClass::VerticalPlanar,
                    Some("horizontal_planar") => CurveClass::HorizontalPlanar,
                    Some("planar") => CurveClass::Planar,
                    Some("non_planar") => CurveClass::NonPlanar,
                    _ => return Err(bad(line)),
                };
                mesh.curve_classes.push(class);
            }
            Some("#vtag") => {
                let v: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(line))?;
                let c: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(line))?;
                vtags.push((v, c));
            }
            Some("#")
                if it.next() == Some("lattice") => {
                    let i: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(line))?;
                    let c: Vec<f64> = it.map(|t| t.parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad(line))?;
                    if !(1..=3).contains(&i) || c.len() != 3 {
                        return Err(bad(line));
                    }
                    mesh.lattice[i - 1] = Vec3::new(c[0], c[1], c[2]);
                }
            _ => {}
        }
    }
    mesh.tags = vec![None; mesh.vertices.len()];
    for (v, c) in vtags {
        *mesh.tags.get_mut(v.wrapping_sub(1)).ok_or_else(|| Error::Parse(format!("tag for missing vertex {v}")))? = Some(c);
    }
    Ok(mesh)
}
