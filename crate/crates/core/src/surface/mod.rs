//! Immersion, symmetric assembly, lattice extraction and export of the surface.

pub mod assembly;
pub mod export;
pub mod grid;
pub mod lattice;
pub mod patch;
pub mod quality;
pub mod symmetry;

pub use assembly::{assemble_fundamental_piece, assemble_unchecked, BoundaryCurve, CurveClass, FundamentalPiece, PieceMesh, Seam};
pub use grid::{DomainPatch, Segment};
pub use patch::{mesh_patch, MeshPatch};
pub use symmetry::{Fit, Isometry, SheetElement, SymmetryElement, Vec3};
pub use lattice::{check_loop_periods, check_seam_translations, lattice_vectors, Lattice, LoopPeriod};
pub use quality::{quality_report, quotient_euler_characteristic, QualityReport};
pub use export::{export_mesh, read_obj, MeshFormat, SurfaceMesh};

use crate::error::GeometryError;
use crate::weierstrass::SurfaceParams;

/// Everything computed for one parameter triple.
#[derive(Debug, Clone)]
pub struct BuiltSurface {
    pub patch: MeshPatch,
    pub piece: FundamentalPiece,
    pub lattice: Lattice,
    pub loop_periods: Vec<LoopPeriod>,
    /// Worst lattice-membership residual of the seam translations.
    pub seam_lattice_residual: f64,
    pub quality: QualityReport,
}

impl BuiltSurface {
    pub fn mesh(&self) -> SurfaceMesh {
        SurfaceMesh::fundamental_piece(&self.piece, &self.lattice)
    }
}

/// Immerses, assembles and validates the fundamental piece at `params`.
pub fn build_surface(params: &SurfaceParams<f64>, resolution: usize) -> Result<BuiltSurface, GeometryError> {
    let patch = mesh_patch(params, resolution)?;
    let piece = assemble_fundamental_piece(&patch)?;
    let lattice = lattice_vectors(&piece)?;
    let seam_lattice_residual = check_seam_translations(&piece, &lattice)?;
    let loop_periods = check_loop_periods(params, &piece.frame, &lattice)?;
    let quality = quality_report(&patch, &piece);
    Ok(BuiltSurface { patch, piece, lattice, loop_periods, seam_lattice_residual, quality })
}
