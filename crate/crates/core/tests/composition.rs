use lindyn::composition::{
    classify_composition_entire, classify_composition_h2, classify_composition_hd, classify_composition_interval,
    classify_composition_punctured, classify_lfm, iterate_lfm, verify_h2_rotation, AffineSymbol, DiskSymbol,
    IntervalSymbol, LfmTaxon, PuncturedSymbol,
};
use lindyn::scalar::unit_phase;
use lindyn::{Complex, Error, Level, Lfm, Tol};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn tol() -> Tol {
    Tol::default()
}

fn rotation(z: Complex) -> Lfm {
    Lfm::rotation(z)
}

/// Cayley conjugate of `w ↦ w + t` on the upper half-plane, re-derived:
/// `z = (w - i)/(w + i)` turns `w + t` into `((2i - t) z + t)/(-t z + 2i + t)`.
fn cayley_translation(t: Complex) -> Lfm {
    let two_i = c(0.0, 2.0);
    Lfm::new(two_i - t, t, -t, two_i + t)
}

fn hyperbolic() -> Lfm {
    Lfm::new(c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0))
}

#[test]
fn cayley_coefficients_match_the_closed_form() {
    let p = cayley_translation(c(1.0, 0.0));
    assert_eq!(p, Lfm::new(c(-1.0, 2.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 2.0)));
    // conjugation check at a sample point
    let z = c(0.2, -0.3);
    let w = c(0.0, 1.0) * (c(1.0, 0.0) + z) / (c(1.0, 0.0) - z);
    let w1 = w + 1.0;
    let back = (w1 - c(0.0, 1.0)) / (w1 + c(0.0, 1.0));
    assert!((p.eval(z).unwrap() - back).norm() < 1e-14);
}

#[test]
fn lfm_examples() {
    match classify_lfm(&rotation(c(0.0, 1.0)), &tol()).unwrap().taxon {
        LfmTaxon::EllipticAutomorphism { interior_fp, multiplier } => {
            assert!(interior_fp.norm() < 1e-15);
            assert!((multiplier - c(0.0, 1.0)).norm() < 1e-15);
        }
        t => panic!("{t:?}"),
    }
    match classify_lfm(&hyperbolic(), &tol()).unwrap().taxon {
        LfmTaxon::HyperbolicBoundary { attractive, other, automorphism: true } => {
            assert!((attractive - c(1.0, 0.0)).norm() < 1e-12);
            assert!((other.unwrap() + c(1.0, 0.0)).norm() < 1e-12);
            assert!((hyperbolic().derivative(attractive).norm() - 1.0 / 3.0).abs() < 1e-12);
            assert!((hyperbolic().derivative(c(-1.0, 0.0)).norm() - 3.0).abs() < 1e-12);
        }
        t => panic!("{t:?}"),
    }
    match classify_lfm(&cayley_translation(c(1.0, 0.0)), &tol()).unwrap().taxon {
        LfmTaxon::Parabolic { automorphism: true, fixed_point } => assert!((fixed_point - c(1.0, 0.0)).norm() < 1e-12),
        t => panic!("{t:?}"),
    }
}

#[test]
fn disk_verdicts() {
    let hd = |phi: Lfm| classify_composition_hd(&DiskSymbol::Lfm(phi), &tol()).unwrap().level;
    assert_eq!(hd(rotation(c(0.0, 1.0))), Level::Rigid);
    assert_eq!(hd(rotation(c(0.5, 0.0))), Level::NotRecurrent);
    assert_eq!(hd(cayley_translation(c(1.0, 0.0))), Level::Recurrent);
    let general = |u, f| classify_composition_hd(&DiskSymbol::<f64>::General { univalent: u, fixed_point_free: f }, &tol()).unwrap().level;
    assert_eq!(general(true, true), Level::Recurrent);
    assert_eq!(general(false, true), Level::NotRecurrent);
    assert_eq!(general(true, false), Level::NotRecurrent);
}

#[test]
fn hardy_verdicts() {
    let h2 = |phi: Lfm| classify_composition_h2(&phi, &tol()).unwrap();
    let v = h2(rotation(c(0.0, 1.0)));
    assert_eq!(v.level, Level::UniformlyRigid);
    assert_eq!(v.witness().unwrap()[0], 4);
    assert_eq!(h2(rotation(unit_phase(2f64.sqrt()))).level, Level::Rigid);
    assert_eq!(h2(cayley_translation(c(1.0, 1.0))).level, Level::NotRecurrent);
    assert_eq!(h2(cayley_translation(c(1.0, 0.0))).level, Level::Recurrent);
    assert_eq!(h2(hyperbolic()).level, Level::Recurrent);
}

#[test]
fn entire_and_punctured_verdicts() {
    let e = |a, b| classify_composition_entire(&AffineSymbol { a, b }, &tol()).unwrap().level;
    assert_eq!(e(c(1.0, 0.0), c(1.0, 0.0)), Level::Recurrent);
    assert_eq!(e(unit_phase(2f64.sqrt()), c(7.0, 0.0)), Level::Rigid);
    assert_eq!(e(c(2.0, 0.0), c(0.0, 0.0)), Level::NotRecurrent);

    let v = classify_composition_punctured(&PuncturedSymbol::Inv(c(5.0, 0.0)), &tol()).unwrap();
    assert_eq!(v.level, Level::Rigid);
    assert_eq!(v.witness().unwrap(), &[2, 4, 6, 8, 10]);
    let p = |s| classify_composition_punctured(&s, &tol()).unwrap().level;
    assert_eq!(p(PuncturedSymbol::Mult(unit_phase(1.0 / 7.0))), Level::Rigid);
    assert_eq!(p(PuncturedSymbol::Mult(c(2.0, 0.0))), Level::NotRecurrent);
}

#[test]
fn interval_verdicts() {
    let i = |s| classify_composition_interval(&s, &tol()).unwrap();
    let r = i(IntervalSymbol::Reflection);
    assert_eq!(r.level, Level::UniformlyRigid);
    assert_eq!(r.witness().unwrap()[..2], [2, 4]);
    assert_eq!(i(IntervalSymbol::Affine { p: 0.9, q: 0.0 }).level, Level::NotRecurrent);
    assert_eq!(i(IntervalSymbol::Identity).level, Level::UniformlyRigid);

    let grid: Vec<f64> = (0..32).map(|k| k as f64 / 31.0).collect();
    let refl: Vec<f64> = grid.iter().map(|x| 1.0 - x).collect();
    assert_eq!(i(IntervalSymbol::Sampled { grid: grid.clone(), values: refl }).level, Level::UniformlyRigid);
    let square: Vec<f64> = grid.iter().map(|x| x * x).collect();
    let v = i(IntervalSymbol::Sampled { grid: grid.clone(), values: square });
    assert_eq!(v.level, Level::NotRecurrent);
    assert!(v.violated_condition().unwrap().contains("not the identity"));
    let tent: Vec<f64> = grid.iter().map(|x| 1.0 - (2.0 * x - 1.0).abs()).collect();
    let v = i(IntervalSymbol::Sampled { grid: grid.clone(), values: tent });
    assert!(v.violated_condition().unwrap().starts_with("not injective"));
    assert!(matches!(
        classify_composition_interval(&IntervalSymbol::Sampled { grid: grid[..8].to_vec(), values: grid[..8].to_vec() }, &tol()),
        Err(Error::GridTooCoarse { got: 8, need: 16 })
    ));
}

#[test]
fn h2_rotation_identity() {
    let coeffs = [c(0.0, 0.0), c(1.0, 0.0)];
    assert_eq!(verify_h2_rotation(c(0.0, 1.0), &coeffs, 4, &tol()).unwrap(), 0.0);
    assert!((verify_h2_rotation(c(0.0, 1.0), &coeffs, 1, &tol()).unwrap() - 2.0).abs() < 1e-15);
    let ones = [c(1.0, 0.0); 3];
    assert_eq!(verify_h2_rotation(unit_phase(1.0 / 3.0), &ones, 3, &tol()).unwrap(), 0.0);
    // series cross-check at n = 1: Σ |1 - λ^m|² over m = 0, 1, 2
    let lam = unit_phase(1.0 / 3.0);
    let direct: f64 = (0..3).map(|m| (c(1.0, 0.0) - lam.powi(m)).norm_sqr()).sum();
    assert!((verify_h2_rotation(lam, &ones, 1, &tol()).unwrap() - direct).abs() < 1e-12);
}

#[test]
fn iteration_examples() {
    let four = iterate_lfm(&rotation(c(0.0, 1.0)), 4);
    for z in [c(0.1, 0.2), c(-0.7, 0.0)] {
        assert!((four.eval(z).unwrap() - z).norm() < 1e-15);
    }
    let half = iterate_lfm(&rotation(c(0.5, 0.0)), 10);
    assert!((half.eval(c(0.9, 0.0)).unwrap() - c(0.9 / 1024.0, 0.0)).norm() < 1e-15);
    let par = cayley_translation(c(1.0, 0.0));
    let mut prev = f64::INFINITY;
    for n in [10u64, 100, 1000, 10_000] {
        let d = (iterate_lfm(&par, n).eval(c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm();
        assert!(d < prev);
        prev = d;
    }
    assert!(prev < 1e-3);
}

#[test]
fn interior_attractive_orbits_converge() {
    let phi = Lfm::new(c(0.3, 0.1), c(0.2, 0.0), c(0.1, 0.0), c(1.0, 0.0));
    let fp = match classify_lfm(&phi, &tol()).unwrap().taxon {
        LfmTaxon::InteriorAttractive { fixed_point } => fixed_point,
        t => panic!("{t:?}"),
    };
    assert!((phi.eval(fp).unwrap() - fp).norm() < 1e-10);
    for z0 in [c(0.9, 0.0), c(-0.5, 0.5), c(0.0, -0.99)] {
        let mut prev = f64::INFINITY;
        for n in 1..30 {
            let d = (iterate_lfm(&phi, n).eval(z0).unwrap() - fp).norm();
            assert!(d <= prev + 1e-15);
            prev = d;
        }
        assert!(prev < 1e-10);
    }
}

#[test]
fn fixed_point_free_maps_push_compacts_off_themselves() {
    for phi in [cayley_translation(c(1.0, 0.0)), hyperbolic()] {
        let r = 0.5;
        let grid: Vec<Complex> = (0..64).map(|k| unit_phase(k as f64 / 64.0) * r).chain([c(0.0, 0.0)]).collect();
        let n = (1..10_000u64)
            .find(|&n| {
                let it = iterate_lfm(&phi, n);
                grid.iter().all(|&z| it.eval(z).unwrap().norm() > r + 0.05)
            })
            .expect("iterates leave the disk of radius r");
        assert!(n > 0);
    }
}

#[test]
fn lfm_errors() {
    let deg = Lfm::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0));
    assert_eq!(classify_lfm(&deg, &tol()).unwrap_err(), Error::DegenerateMap);
    assert!(matches!(classify_lfm(&rotation(c(1.5, 0.0)), &tol()), Err(Error::NotSelfMap(_))));
}

fn taxon_signature(t: &LfmTaxon<f64>) -> (String, bool) {
    (t.name().to_string(), t.is_automorphism())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn taxon_ignores_coefficient_scaling(re in -3.0f64..3.0, im in -3.0f64..3.0, pick in 0usize..5, turn in 0.0f64..1.0) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let k = c(re, im);
        let phi = [
            rotation(unit_phase(turn)),
            hyperbolic(),
            cayley_translation(c(1.0, 0.0)),
            cayley_translation(c(1.0, 1.0)),
            Lfm::new(c(0.5, 0.0), c(0.1, 0.1), c(0.0, 0.0), c(1.0, 0.0)),
        ][pick];
        let scaled = Lfm::new(phi.a * k, phi.b * k, phi.c * k, phi.d * k);
        let a = classify_lfm(&phi, &tol()).unwrap();
        let b = classify_lfm(&scaled, &tol()).unwrap();
        prop_assert_eq!(taxon_signature(&a.taxon), taxon_signature(&b.taxon));
    }

    #[test]
    fn rational_rotations_vanish_at_the_denominator(p in 0i64..12, q in 1u64..12, coeffs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..8)) {
        let lam = unit_phase(p as f64 / q as f64);
        let f: Vec<Complex> = coeffs.iter().map(|&(a, b)| c(a, b)).collect();
        prop_assert_eq!(verify_h2_rotation(lam, &f, q, &tol()).unwrap(), 0.0);
        let v = classify_composition_h2(&rotation(lam), &tol()).unwrap();
        prop_assert_eq!(v.level, Level::UniformlyRigid);
        prop_assert_eq!(verify_h2_rotation(lam, &f, v.witness().unwrap()[0], &tol()).unwrap(), 0.0);
    }
}
