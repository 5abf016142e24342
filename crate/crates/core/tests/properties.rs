//! Property tests of the evaluators, quadrature, period integrals and mesh I/O.

use nalgebra::Vector3;
use num_complex::Complex;
use proptest::prelude::*;

use tpms_core::period::{i_gamma, period_residual};
use tpms_core::quadrature::{integrate, integrate_path, Endpoints, Tolerance};
use tpms_core::surface::{read_obj, CurveClass, Isometry, SheetElement, SurfaceMesh};
use tpms_core::surface::symmetry::segment_involution;
use tpms_core::surface::Segment;
use tpms_core::weierstrass::*;

/// Default period-integral tolerance of the public contract.
const TOL: f64 = 1e-10;

fn params() -> impl Strategy<Value = SurfaceParams<f64>> {
    (0.02f64..0.95, 0.05f64..0.95, 0.02f64..0.98).prop_map(|(a, bf, x)| make_params(a, a + bf * (1.0 - a), x).unwrap())
}

/// Points of the open upper half disk kept away from the real axis and the circle.
fn disk_point() -> impl Strategy<Value = Complex<f64>> {
    (0.05f64..0.95, 0.05f64..(std::f64::consts::PI - 0.05)).prop_map(|(r, t)| Complex::from_polar(r, t))
}

fn g4_rhs(p: &SurfaceParams<f64>, z: Complex<f64>) -> Complex<f64> {
    let (a, b, x) = (p.a(), p.b(), p.x());
    z * (1.0 - z * a) / (z - a) * ((b - z) / (z * b - 1.0)).powu(2) * ((z + x) / (z * x + 1.0)).powu(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn branch_consistency_along_polylines(p in params(), path in prop::collection::vec(disk_point(), 1..6)) {
        let mut st = BranchState::anchor(&p);
        for z in path {
            st = continue_to(&p, &st, z).unwrap();
            let r = g4_rhs(&p, z);
            prop_assert!((st.g.powu(4) - r).norm() <= 1e-12 * r.norm());
            let closed = domain_g(&p, &ZPoint::new(z));
            prop_assert!((st.g - closed).norm() <= 1e-10 * closed.norm());
        }
    }

    #[test]
    fn contractible_loops_restore_state(p in params(), c in disk_point(), frac in 0.1f64..0.9) {
        // stays in the upper half plane, which holds no branch point
        let r = frac * c.im;
        let start = continue_to(&p, &BranchState::anchor(&p), c + r).unwrap();
        let mut st = start;
        for k in 1..=24 {
            st = continue_to(&p, &st, c + Complex::from_polar(r, std::f64::consts::TAU * k as f64 / 24.0)).unwrap();
        }
        prop_assert!((st.g - start.g).norm() <= 1e-10);
        for i in 0..4 {
            prop_assert!((st.args[i] - start.args[i]).abs() <= 1e-10);
        }
        prop_assert!((st.radicand_arg - start.radicand_arg).abs() <= 1e-10);
    }

    #[test]
    fn curve_pullbacks_match_continuation(p in params(), s in 0.05f64..0.95) {
        let anchor = BranchState::anchor(&p);
        for name in [CurveName::Gamma, CurveName::Delta, CurveName::Sigma1, CurveName::Sigma2] {
            let c = CurveSpec::new(name, &p);
            let t = c.t_range.0 + (c.t_range.1 - c.t_range.0) * s;
            let z = c.z_of_t(t);
            // reach the boundary point from inside the disk
            let inner = continue_to(&p, &anchor, Complex::new(z.re, 0.5) * 0.9).unwrap();
            let st = continue_to(&p, &inner, z).unwrap();
            let closed = c.g(t);
            prop_assert!((st.g - closed).norm() <= 1e-10 * closed.norm().max(1.0), "{:?} {} {}", name, st.g, closed);
            let on = domain_g(&p, &ZPoint::new(z));
            prop_assert!((on - closed).norm() <= 1e-10 * closed.norm().max(1.0));
        }
    }

    #[test]
    fn conjugate_symmetry(p in params(), z in disk_point()) {
        let st = BranchState::anchor(&p);
        let up = continue_to(&p, &st, z).unwrap();
        let down = continue_to(&p, &st, z.conj()).unwrap();
        prop_assert!((down.g - up.g.conj()).norm() <= 1e-10 * up.g.norm());
    }

    #[test]
    fn period_additivity(p in params()) {
        let r = period_residual(&p, TOL).unwrap();
        prop_assert!(r.additivity.abs() <= 3.0 * TOL, "{:?}", r);
    }

    #[test]
    fn i_gamma_monotone(p in params()) {
        let (a, b, x) = (p.a(), p.b(), p.x());
        let h = 1e-3 * (b - a).min(1.0 - b).min(x).min(1.0 - x);
        let f = |b: f64, x: f64| i_gamma(&make_params(a, b, x).unwrap(), 1e-13).unwrap();
        prop_assert!(f(b, x + h) > f(b, x - h));
        prop_assert!(f(b + h, x) < f(b - h, x));
    }

    #[test]
    fn quadrature_deterministic_and_additive(lo in -2.0f64..0.0, mid in 0.0f64..1.0, hi in 1.0f64..3.0, w in 0.5f64..5.0) {
        let f = |t: f64| (w * t).sin() * (-t * t).exp();
        let tol = Tolerance::new(1e-12, 0.0);
        let whole = integrate(f, lo, hi, Endpoints::regular(), tol).unwrap();
        let again = integrate(f, lo, hi, Endpoints::regular(), tol).unwrap();
        prop_assert_eq!(whole.value.to_bits(), again.value.to_bits());
        let left = integrate(f, lo, mid, Endpoints::regular(), tol).unwrap().value;
        let right = integrate(f, mid, hi, Endpoints::regular(), tol).unwrap().value;
        prop_assert!((whole.value - left - right).abs() <= 3e-12);
    }

    #[test]
    fn path_integral_concatenation(p in params(), a in disk_point(), b in disk_point(), c in disk_point()) {
        let tol = Tolerance::new(1e-12, 0.0);
        let f = |z: Complex<f64>| domain_dh(&p, &ZPoint::new(z));
        let abc = integrate_path(f, &[a, b, c], tol).unwrap().value;
        let ab = integrate_path(f, &[a, b], tol).unwrap().value;
        let bc = integrate_path(f, &[b, c], tol).unwrap().value;
        prop_assert!((abc - ab - bc).norm() <= 2.0 * tol.abs * 2.0);
    }

    #[test]
    fn power_singularities_converge(e in prop::sample::select(vec![-0.5f64, -0.75]), len in 0.1f64..3.0) {
        let r = integrate(|t: f64| t.powf(e), 0.0, len, Endpoints::power_law(e, 0.0), Tolerance::new(1e-10, 0.0)).unwrap();
        prop_assert!((r.value - len.powf(1.0 + e) / (1.0 + e)).abs() <= 1e-10);
        prop_assert!(r.evaluations <= 2000);
    }

    #[test]
    fn reflections_are_involutions(nx in -1.0f64..1.0, ny in -1.0f64..1.0, nz in -1.0f64..1.0, d in -5.0f64..5.0,
                                   pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0), 1..20)) {
        let n = Vector3::new(nx, ny, nz);
        prop_assume!(n.norm() > 0.1);
        let r = Isometry::reflection(&n.normalize(), d);
        prop_assert!((r.m * r.m.transpose() - nalgebra::Matrix3::identity()).abs().max() <= 1e-12);
        prop_assert!((r.m.determinant() + 1.0).abs() <= 1e-12);
        for (x, y, z) in pts {
            let p = Vector3::new(x, y, z);
            prop_assert!((r.apply(&r.apply(&p)) - p).norm() <= 64.0 * f64::EPSILON * (p.norm() + d.abs()));
        }
    }

    #[test]
    fn obj_round_trip(verts in prop::collection::vec((any::<f64>(), any::<f64>(), any::<f64>()), 3..30)) {
        let vertices: Vec<_> = verts.iter().filter(|v| v.0.is_finite() && v.1.is_finite() && v.2.is_finite()).map(|&(x, y, z)| Vector3::new(x, y, z)).collect();
        prop_assume!(vertices.len() >= 3);
        let n = vertices.len();
        let faces = (0..n - 2).map(|i| [0, i + 1, i + 2]).collect();
        let mut tags = vec![None; n];
        tags[0] = Some(0);
        let mesh = SurfaceMesh { vertices, faces, tags, curve_classes: vec![CurveClass::VerticalPlanar], lattice: [Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 2.5, 0.0), Vector3::new(0.1, 0.0, 3.0)] };
        let back = read_obj(&mesh.to_obj()).unwrap();
        prop_assert_eq!(&back, &mesh);
        for (u, v) in back.vertices.iter().zip(&mesh.vertices) {
            for k in 0..3 {
                prop_assert_eq!(u[k].to_bits(), v[k].to_bits());
            }
        }
    }
}

#[test]
fn segment_involutions_square_to_identity_exactly() {
    for h in 0..16 {
        let h = SheetElement::from_index(h);
        for s in Segment::ALL {
            let e = segment_involution(s);
            assert_eq!(h.compose(e).compose(e), h);
        }
    }
}
