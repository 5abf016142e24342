//! Immersion, assembly, lattice and export on a point of the solution curve.

use std::sync::OnceLock;

use tpms_core::error::GeometryError;
use tpms_core::period::curve_point_at_a;
use tpms_core::surface::assembly::PLANARITY_TOL;
use tpms_core::surface::quality::reflection_consistency;
use tpms_core::surface::*;
use tpms_core::weierstrass::make_params;

fn built() -> &'static BuiltSurface {
    static CELL: OnceLock<BuiltSurface> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = curve_point_at_a(0.47, 0.3, 1e-12).unwrap().params;
        build_surface(&p, 32).unwrap()
    })
}

#[test]
fn patch_is_path_independent_and_conformal() {
    let s = built();
    assert!(s.patch.path_residual <= 1e-8, "{}", s.patch.path_residual);
    assert!(s.patch.conformality <= 1e-6, "{}", s.patch.conformality);
}

#[test]
fn circle_maps_to_horizontal_curve() {
    let s = built();
    let d = &s.patch.domain;
    let heights: Vec<f64> = d.segments[Segment::Gamma.index()].iter().map(|&v| s.patch.positions[v].z).collect();
    let spread = heights.iter().fold(f64::NEG_INFINITY, |m, &h| m.max(h)) - heights.iter().fold(f64::INFINITY, |m, &h| m.min(h));
    assert!(spread <= 1e-8, "{spread}");
}

#[test]
fn boundary_images_are_lines_and_planar_curves() {
    let s = built();
    let scale = s.piece.scale;
    match s.piece.fits[Segment::ZeroA.index()].element {
        SymmetryElement::Line { .. } => {}
        other => panic!("(0,a) fitted as {other:?}"),
    }
    for seg in Segment::ALL {
        let f = &s.piece.fits[seg.index()];
        assert!(f.residual <= PLANARITY_TOL * scale, "{}: {}", seg.label(), f.residual);
        if seg != Segment::ZeroA {
            assert!(matches!(f.element, SymmetryElement::Plane { .. }), "{}", seg.label());
        }
    }
    assert!(s.piece.fits[Segment::ZeroA.index()].residual <= 1e-8 * scale);
}

#[test]
fn double_reflection_is_identity() {
    let s = built();
    for f in &s.piece.fits {
        let r = f.element.isometry();
        for p in s.piece.positions.iter().step_by(17) {
            assert!((r.apply(&r.apply(p)) - p).norm() <= 1e-13 * s.piece.scale);
        }
        assert!((r.m * r.m - nalgebra::Matrix3::identity()).abs().max() <= 1e-14);
    }
}

#[test]
fn census_seams_and_topology() {
    let s = built();
    assert_eq!(s.piece.census(), (8, 4));
    assert_eq!(s.quality.vertical_curves, 8);
    assert_eq!(s.quality.horizontal_curves, 4);
    assert!(s.quality.seam_mismatch <= 1e-6, "{}", s.quality.seam_mismatch);
    assert!(s.quality.planarity <= 1e-6);
    assert_eq!(s.quality.euler_characteristic, -12);
    assert!(s.quality.normal_continuity <= 1e-10);
    let r = reflection_consistency(&s.patch, &s.piece, 40).unwrap();
    assert!(r <= 1e-8, "{r}");
}

#[test]
fn lattice_is_nondegenerate_and_contains_periods() {
    let s = built();
    assert!(s.lattice.gram_det > 1e-12 * s.piece.scale.powi(6));
    for lp in &s.loop_periods {
        assert!(lp.membership.residual <= 1e-6, "{}: {:?}", lp.name, lp.membership);
        if lp.name.starts_with("contractible") {
            assert!(lp.period.norm() <= 1e-8, "{}: {}", lp.name, lp.period);
        }
        if lp.name == "unit_circle" {
            assert!(lp.period.z.abs() <= 1e-8);
        }
    }
    assert!(s.loop_periods.iter().any(|lp| lp.membership.coefficients != [0, 0, 0]));
    assert!(s.seam_lattice_residual <= 1e-6);
}

#[test]
fn replication_and_export() {
    let s = built();
    let m = s.mesh();
    let (nv, nf) = (m.vertices.len(), m.faces.len());
    let two = m.replicate((2, 1, 1)).unwrap();
    assert_eq!((two.vertices.len(), two.faces.len()), (2 * nv, 2 * nf));
    assert_eq!(m.replicate((2, 2, 2)).unwrap().vertices.len(), 8 * nv);
    assert!(matches!(m.replicate((0, 1, 1)), Err(GeometryError::Invalid(_))));
    for (p, q) in two.vertices[nv..].iter().zip(&m.vertices) {
        assert!((p - q - m.lattice[0]).norm() <= 1e-12 * s.piece.scale);
    }

    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("piece.obj");
    export_mesh(&m, MeshFormat::Obj, (1, 1, 1), &obj).unwrap();
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(read_obj(&text).unwrap(), m);
    assert_eq!(text.lines().filter(|l| l.starts_with("#tag ")).count(), 12);
    let ply = dir.path().join("piece.ply");
    export_mesh(&m, MeshFormat::Ply, (1, 1, 1), &ply).unwrap();
    let text = std::fs::read_to_string(&ply).unwrap();
    assert!(text.starts_with("ply\nformat ascii 1.0\n"));
    assert!(text.contains(&format!("element vertex {nv}\n")));
    assert!(text.contains("property int tag\n"));
    let missing = dir.path().join("no/such/dir/x.obj");
    let e = export_mesh(&m, MeshFormat::Obj, (1, 1, 1), &missing).unwrap_err();
    assert!(e.to_string().contains("x.obj"));
}

#[test]
fn unit_cell_has_all_sheets() {
    let s = built();
    let cell = SurfaceMesh::unit_cell(&s.patch, &s.piece, &s.lattice);
    assert_eq!(cell.faces.len(), 2 * s.mesh().faces.len());
}

#[test]
fn off_curve_parameters_fail_closure() {
    let p = make_params(0.47, 0.85, 0.68).unwrap();
    let patch = mesh_patch(&p, 16).unwrap();
    assert!(matches!(assemble_fundamental_piece(&patch), Err(GeometryError::ClosureFault { .. })));
}

#[test]
fn resolution_floor() {
    let p = make_params(0.3, 0.81, 0.5).unwrap();
    assert!(matches!(mesh_patch(&p, 7), Err(GeometryError::Invalid(_))));
}

#[test]
fn scherk_end_piece_closes() {
    let p = curve_point_at_a(0.01, 0.8, 1e-12).unwrap().params;
    let s = build_surface(&p, 24).unwrap();
    assert_eq!(s.piece.census(), (8, 4));
    assert_eq!(s.quality.euler_characteristic, -12);
}
