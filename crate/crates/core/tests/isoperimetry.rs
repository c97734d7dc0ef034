use hexcmc::isoperimetry::*;
use hexcmc::par::Execution;
use proptest::prelude::*;

fn annulus(x0: f64, y0: f64, x1: f64, y1: f64) -> AnnulusSpec {
    AnnulusSpec::new(x0, y0, x1, y1).unwrap()
}

#[test]
fn polygon_perimeters() {
    let unit = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    assert_eq!(polygon_psi1_perimeter(std::slice::from_ref(&unit)).unwrap(), 4.0);
    let shifted: Vec<_> = unit.iter().map(|(x, y)| (x + 3.0, *y)).collect();
    assert_eq!(polygon_psi1_perimeter(&[unit, shifted]).unwrap(), 8.0);
    let tri = vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
    assert_eq!(polygon_psi1_perimeter(&[tri]), Err(IsoError::NonRectilinear(1)));
}

#[test]
fn grid_perimeters() {
    let a = annulus(0.0, 0.0, 2.0, 2.0);
    let two = GridRegion::from_rects(&a, &[Rect::new(-2.0, -1.0, 0.0, 1.0), Rect::new(1.0, 2.0, 0.0, 1.0)]);
    assert!((two.psi1_perimeter() - 8.0).abs() < 1e-15);
    let hole = annulus(0.05, 0.05, 1.0, 1.0);
    assert!((GridRegion::full(&hole, 7).psi1_perimeter() - 8.4).abs() < 1e-12);
}

#[test]
fn annulus_ratio_examples() {
    assert_eq!(annulus_ratio(&annulus(0.0, 0.0, 1.0, 1.0)).unwrap(), 2.0);
    assert!((annulus_ratio(&annulus(0.05, 0.05, 1.0, 1.0)).unwrap() - 8.4 / 3.99).abs() < 1e-15);
    assert!(matches!(AnnulusSpec::new(1.0, 1.0, 10.0, 1.0), Err(IsoError::Invalid(_))));
    assert!(!annulus(1.0, 1.0, 10.0, 1.001).in_lemma_regime(LEMMA_EPS));
    assert!(annulus(0.05, 0.05, 100.0, 1.0).in_lemma_regime(LEMMA_EPS));
}

#[test]
fn extremal_ratio_examples() {
    let r = extremal_ratios(&annulus(0.0, 0.0, 1.0, 1.0)).unwrap();
    assert_eq!(r[0], 4.0);
    assert_eq!(r[1], 3.0);
    let remark = annulus(1.0, 1.0, 10.0, 1.0 + 1e-12);
    let r = extremal_ratios(&remark).unwrap();
    assert!((r[1] - 22.0 / 18.0).abs() < 1e-9);
    assert!((annulus_ratio(&remark).unwrap() - 52.0 / 36.0).abs() < 1e-9);
    assert!(r[1] < annulus_ratio(&remark).unwrap());
}

#[test]
fn lemma_holds_in_regime() {
    let sizes = [1.0, 2.0, 10.0, 100.0];
    let cfg = LemmaConfig { trials: 2000, ..LemmaConfig::default() };
    for x1 in sizes {
        for y1 in sizes {
            let report = verify_lemma(&annulus(0.05, 0.05, x1, y1), &cfg, Execution::Parallel).unwrap();
            assert!(report.lemma_regime);
            assert!(report.pass, "{x1} {y1}: {:?}", report.witness);
            assert!(report.min_proper_margin > 0.0);
            assert_eq!(report.min_margin, 0.0);
            assert_eq!(report.witness.source, "omega");
        }
    }
}

#[test]
fn remark_counterexample() {
    let report = verify_lemma(&annulus(1.0, 1.0, 10.0, 1.001), &LemmaConfig::default(), Execution::Parallel).unwrap();
    assert!(!report.lemma_regime);
    assert!(!report.pass);
    assert!(report.min_margin < -0.1);
    // the minimizer is a full-height rectangle beside the hole
    let w = &report.witness;
    assert!((w.area - 9.0 * 2.002).abs() < 1e-9, "{w:?}");
}

#[test]
fn reports_do_not_depend_on_execution() {
    let a = annulus(0.05, 0.05, 2.0, 10.0);
    let cfg = LemmaConfig { trials: 300, ..LemmaConfig::default() };
    let seq = verify_lemma(&a, &cfg, Execution::Sequential).unwrap();
    let par = verify_lemma(&a, &cfg, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    let other = verify_lemma(&a, &LemmaConfig { seed: 7, ..cfg }, Execution::Parallel).unwrap();
    assert_eq!(other.regions_checked, seq.regions_checked);
}

#[test]
fn perimeter_is_concave_in_area() {
    for a in [annulus(0.05, 0.05, 1.0, 1.0), annulus(0.05, 0.05, 10.0, 2.0)] {
        for family in [Family::Square, Family::FixedWidth, Family::FixedHeight] {
            let profile = family_profile(&a, family, 40);
            assert!(concavity_defect(&profile) <= 1e-12, "{family:?}");
        }
    }
}

#[test]
fn functional_vanishes_on_constants() {
    let a = annulus(0.05, 0.05, 1.0, 1.0);
    let one = FaceTestFunction::constant(&a, 64, 1.0).unwrap();
    assert_eq!(first_variation_functional(&one).unwrap(), 0.0);
    for c in [0.25, 0.5, 0.9] {
        let v = FaceTestFunction::constant(&a, 64, c).unwrap();
        assert_eq!(first_variation_functional(&v).unwrap(), 0.0);
    }
    assert!(matches!(FaceTestFunction::constant(&a, 8, 0.0), Err(IsoError::ValueOutOfRange(_))));
    assert!(matches!(FaceTestFunction::constant(&a, 8, 1.5), Err(IsoError::ValueOutOfRange(_))));
}

#[test]
fn functional_is_nonnegative_on_random_functions() {
    let a = annulus(0.05, 0.05, 1.0, 1.0);
    let seeds: Vec<u64> = (0..200).collect();
    let worst = Execution::Parallel
        .map(&seeds, |&s| first_variation_functional(&FaceTestFunction::random(&a, 64, s)).unwrap())
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    assert!(worst >= -1e-12, "{worst}");
}

#[test]
fn coarea_identity() {
    let a = annulus(0.05, 0.05, 1.0, 2.0);
    for seed in 0..5 {
        let v = FaceTestFunction::random(&a, 24, seed);
        let (lhs, rhs) = (v.total_variation(), v.level_perimeter_integral());
        assert!((lhs - rhs).abs() < 1e-12 * lhs.max(1.0), "{lhs} {rhs}");
    }
    // a two-level function checked by hand: ½ on the right half, 1 elsewhere
    let v = FaceTestFunction::new(&a, 8, |i, _| if i >= 5 { 0.5 } else { 1.0 }).unwrap();
    let full = GridRegion::full(&a, 8);
    let left = GridRegion::from_rects(&a, &[Rect::new(-1.0, 0.0, -2.0, 2.0)]);
    let expect = 0.5 * full.psi1_perimeter() + 0.5 * left.psi1_perimeter();
    assert!((v.level_perimeter_integral() - expect).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rectangle_measures_match_polygon(xa in -3.0f64..3.0, w in 0.01f64..3.0, ya in -2.0f64..2.0, h in 0.01f64..2.0) {
        let a = annulus(0.0, 0.0, 10.0, 10.0);
        let g = GridRegion::from_rects(&a, &[Rect::new(xa, xa + w, ya, ya + h)]);
        let poly = vec![(xa, ya), (xa + w, ya), (xa + w, ya + h), (xa, ya + h)];
        prop_assert!((g.psi1_perimeter() - polygon_psi1_perimeter(&[poly]).unwrap()).abs() < 1e-12);
        prop_assert!((g.area() - w * h).abs() < 1e-12);
    }

    #[test]
    fn union_perimeter_is_subadditive(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = annulus(0.05, 0.05, 1.0, 1.0);
        let mut r = || {
            let (x, y) = (rng.gen_range(-1.0..0.5), rng.gen_range(-1.0..0.5));
            Rect::new(x, x + rng.gen_range(0.05..0.5), y, y + rng.gen_range(0.05..0.5))
        };
        let (p, q) = (r(), r());
        let gp = GridRegion::from_rects(&a, &[p]);
        let gq = GridRegion::from_rects(&a, &[q]);
        let gu = GridRegion::from_rects(&a, &[p, q]);
        prop_assert!(gu.psi1_perimeter() <= gp.psi1_perimeter() + gq.psi1_perimeter() + 1e-12);
        prop_assert!(gu.area() <= gp.area() + gq.area() + 1e-12);
        prop_assert!(gu.area() >= gp.area().max(gq.area()) - 1e-12);
    }

    #[test]
    fn functional_nonnegative(seed in any::<u64>()) {
        let a = annulus(0.05, 0.05, 1.0, 1.0);
        let v = FaceTestFunction::random(&a, 16, seed);
        prop_assert!(first_variation_functional(&v).unwrap() >= -1e-12);
    }
}
