use hexcmc::assembly::*;
use hexcmc::construct::hexagon_widths;
use hexcmc::delaunay::WULFF_SIDE;
use hexcmc::hexnorm::{HexNorm, Vec3};
use proptest::prelude::*;
use std::sync::OnceLock;

const K: f64 = WULFF_SIDE;

fn fitted() -> &'static ClosureFit {
    static FIT: OnceLock<ClosureFit> = OnceLock::new();
    FIT.get_or_init(|| fit_closure(3, None, &AssemblyConfig::default()).unwrap())
}

fn built() -> &'static AssemblySurface {
    static SURF: OnceLock<AssemblySurface> = OnceLock::new();
    SURF.get_or_init(|| build_assembly(&fitted().solution).unwrap())
}

#[test]
fn trivial_root() {
    let r = residual4(&AssemblyParams::trivial(3, 7)).unwrap();
    assert!(r.iter().all(|v| v.abs() < 1e-12), "{r:?}");
}

#[test]
fn unsolved_point_is_out_of_equilibrium() {
    let p = AssemblyParams { r1: 0.05, r2: 0.05, ..AssemblyParams::trivial(3, 7) };
    let r = residual4(&p).unwrap();
    assert!(r.iter().any(|v| v.abs() > 1e-3), "{r:?}");
}

#[test]
fn solve_at_003_sign_pattern() {
    let s = solve_assembly(0.03, 3, 7, &AssemblyConfig::default()).unwrap();
    let p = s.params;
    assert!(p.Q0 < 2.0 && p.R1 < K && p.R2 > K && p.r2 > 0.0, "{p:?}");
    assert!((0.1..=10.0).contains(&(p.r2 / p.r1)));
    assert!(s.residual_norm < 1e-9);
    assert!(p.S() > K);
    // certificate recomputed from scratch
    let r = residual4(&p).unwrap();
    assert!(r.iter().all(|v| v.abs() < 1e-9), "{r:?}");
}

#[test]
fn perturbations_shrink_with_r1() {
    let cfg = AssemblyConfig::default();
    let dev = |r1: f64| {
        let p = solve_assembly(r1, 3, 7, &cfg).unwrap().params;
        [(p.Q0 - 2.0).abs(), (p.R1 - K).abs(), (p.R2 - K).abs(), p.r2]
    };
    let rows: Vec<_> = [0.02, 0.01, 0.005].into_iter().map(dev).collect();
    for w in rows.windows(2) {
        for i in 0..4 {
            assert!(w[1][i] < w[0][i], "{rows:?}");
        }
    }
}

#[test]
fn r1_zero_is_exact() {
    let s = solve_assembly(0.0, 3, 7, &AssemblyConfig::default()).unwrap();
    assert_eq!(s.params, AssemblyParams::trivial(3, 7));
    assert!(matches!(solve_assembly(0.5, 3, 7, &AssemblyConfig::default()), Err(AssemblyError::OutOfRange { .. })));
}

#[test]
fn chords_at_the_trivial_point() {
    let s = solve_assembly(0.0, 3, 7, &AssemblyConfig::default()).unwrap();
    assert!((s.unduloid.period_length() - 2.0).abs() < 1e-15);
    assert!((s.nodoid.period_length() - 2.0).abs() < 1e-15);
    assert!((s.mismatch() - 2.0 * (2.0 * 3.0 - 7.0) * 1.0).abs() < 1e-12);
}

#[test]
fn fit_for_three_periods() {
    let fit = fitted();
    assert!(fit.mismatch.abs() < 1e-9);
    let r1 = fit.solution.params.r1;
    assert!(r1 > 0.0 && r1 <= 0.1);
    assert!(fit.solution.residual_norm < 1e-9);
    // unduloids lengthen and nodoids shorten as r1 grows
    assert!(fit.solution.unduloid.period_length() > 2.0);
    assert!(fit.solution.nodoid.period_length() < 2.0);
}

#[test]
fn single_period_sides_are_reported_honestly() {
    match fit_closure(1, None, &AssemblyConfig::default()) {
        Ok(fit) => assert!(fit.mismatch.abs() < 1e-9),
        Err(e) => assert!(matches!(e, AssemblyError::NoBracket { .. } | AssemblyError::FitStalled { .. }), "{e}"),
    }
}

#[test]
fn assembly_is_closed_and_critical() {
    let a = built();
    let s = &a.surface;
    assert!(s.closure_vector().norm() < 1e-9);
    assert!((s.volume - s.volume_by_decomposition()).abs() < 1e-9 * s.volume);
    let res = s.mean_curvature_residual().unwrap();
    assert_eq!(res.len(), 14);
    assert!(res.values().all(|v| v.abs() < 1e-9), "{res:?}");
}

#[test]
fn components_and_crossing_diagonals() {
    let a = built();
    let names = &a.surface.topology.components;
    assert_eq!(names.len(), 15);
    assert_eq!(names.iter().filter(|n| n.starts_with("prism")).count(), 6);
    assert_eq!(names.iter().filter(|n| n.starts_with("unduloid")).count(), 6);
    assert_eq!(names.iter().filter(|n| n.starts_with("nodoid")).count(), 3);
    let idx = |n: &str| a.component_index(n).unwrap();
    for (x, y) in [("nodoid0", "nodoid1"), ("nodoid0", "nodoid2"), ("nodoid1", "nodoid2")] {
        assert!(a.components_intersect(idx(x), idx(y)), "{x} {y}");
    }
    // sides do not reach each other
    assert!(!a.components_intersect(idx("unduloid0"), idx("unduloid3")));
}

#[test]
fn dihedral_symmetry() {
    let a = built();
    for k in 0..6 {
        let turn = 60.0 * k as f64;
        assert!(a.symmetry_defect(|v| v.rotate_z(turn)) < 1e-10);
        // reflection across the line at angle 30°k
        let axis = 30.0 * k as f64;
        let refl = |v: Vec3| {
            let w = v.rotate_z(-axis);
            Vec3::new(w.x, -w.y, w.z).rotate_z(axis)
        };
        assert!(a.symmetry_defect(refl) < 1e-10);
    }
}

#[test]
fn every_face_has_unit_norm() {
    let norm = HexNorm::new();
    for f in &built().surface.topology.faces {
        assert!((norm.psi(f.normal()).unwrap() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn unfitted_parameters_are_rejected() {
    let s = solve_assembly(0.03, 3, 7, &AssemblyConfig::default()).unwrap();
    assert!(matches!(build_assembly(&s), Err(AssemblyError::Unfitted(_))));
}

#[test]
fn diagonal_span_matches_hexagon() {
    let a = built();
    let fit = &a.fit;
    assert!((fit.diagonal_chord() - 2.0 * a.circumradius).abs() < 1e-9);
    assert!(a.circumradius > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cross_section_closes(r1 in 0.5f64..2.0, r2 in 0.5f64..2.0) {
        let p = AssemblyParams { R1: r1, R2: r2, ..AssemblyParams::trivial(3, 7) };
        let w = hexagon_widths(&p.lateral_offsets());
        let expect = [p.S(), p.S(), r1, r2, r1, p.S()];
        for (a, b) in w.iter().zip(expect) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let (mut sx, mut sy) = (0.0, 0.0);
        for (k, wk) in w.iter().enumerate() {
            // side k runs along the direction 90° past its normal
            let t = (60.0 * k as f64 + 90.0f64).to_radians();
            sx += wk * t.cos();
            sy += wk * t.sin();
        }
        prop_assert!(sx.abs() < 1e-12 && sy.abs() < 1e-12);
    }
}

#[test]
fn obj_round_trip_of_assembly() {
    use hexcmc::obj::{export_obj, measure, parse_obj};
    let s = &built().surface;
    let mesh = parse_obj(&export_obj(s).unwrap()).unwrap();
    assert_eq!(mesh.objects.len(), 15);
    let (e, v) = measure(&mesh, None);
    assert!((e - s.energy).abs() < 1e-9);
    assert!((v - s.volume).abs() < 1e-9);
}
