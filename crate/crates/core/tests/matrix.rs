use lindyn::laws::{conditioned_basis, generate, random_unitary, Family};
use lindyn::linalg::{singular_values, ComplexMatrix};
use lindyn::matrix_dynamics::{classify_complex, classify_real, necessary_conditions, spectrum, structural_checks};
use lindyn::scalar::unit_phase;
use lindyn::{Complex, Level, Matrix, Tol};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn real(rows: &[Vec<f64>]) -> Matrix {
    Matrix::from_real_rows(rows).unwrap()
}

fn tol() -> Tol {
    Tol::default()
}

#[test]
fn spectrum_examples() {
    let s = spectrum(&Matrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)]), &tol()).unwrap();
    assert_eq!(s.eigenvalues.len(), 2);
    assert!(s.diagonalizable);
    assert!((s.spectral_radius - 1.0).abs() < 1e-14);

    let rot = real(&[vec![0.6, 0.8], vec![-0.8, 0.6]]);
    let s = spectrum(&rot, &tol()).unwrap();
    assert!(s.all_unimodular && s.diagonalizable);
    for z in &s.eigenvalues {
        assert!((z.re - 0.6).abs() < 1e-12 && (z.im.abs() - 0.8).abs() < 1e-12);
    }
}

#[test]
fn multiplicities_sum_to_dim() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for fam in [Family::RationalRotation, Family::IrrationalRotation, Family::OffCircle, Family::Jordan] {
        for dim in 2..=6 {
            let inst = generate(fam, dim, &mut rng);
            let s = spectrum(&inst.matrix, &tol()).unwrap();
            assert_eq!(s.algebraic_multiplicities.iter().sum::<usize>(), dim);
            for (a, g) in s.algebraic_multiplicities.iter().zip(&s.geometric_multiplicities) {
                assert!(g <= a && *g >= 1);
            }
            let r = s.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert_eq!(r, s.spectral_radius);
        }
    }
}

#[test]
fn classify_complex_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (u, uinv, _) = conditioned_basis(4, 100.0, &mut rng);
    let d: Vec<Complex> = (1..=4).map(|j| unit_phase(2f64.sqrt() * j as f64)).collect();
    let t = u.matmul(&Matrix::from_diag(&d)).matmul(&uinv);
    assert_eq!(classify_complex(&t, &tol()).unwrap().level, Level::UniformlyRigid);

    let v = classify_complex(&real(&[vec![1.0, 1.0], vec![0.0, 1.0]]), &tol()).unwrap();
    assert_eq!(v.level, Level::NotRecurrent);
    assert!(v.violated_condition().is_some());

    let v = classify_complex(&real(&[vec![0.9, 0.0], vec![0.0, 1.0]]), &tol()).unwrap();
    assert_eq!(v.level, Level::NotRecurrent);
}

#[test]
fn classify_real_examples() {
    assert_eq!(classify_real(&real(&[vec![0.0, 1.0], vec![-1.0, 0.0]]), &tol()).unwrap().level, Level::UniformlyRigid);
    assert_eq!(classify_real(&real(&[vec![1.0, 0.0], vec![0.0, -1.0]]), &tol()).unwrap().level, Level::UniformlyRigid);
    let (ca, sa) = (0.7f64.cos(), 0.7f64.sin());
    let t = real(&[
        vec![ca, sa, 1.0, 0.0],
        vec![-sa, ca, 0.0, 1.0],
        vec![0.0, 0.0, ca, sa],
        vec![0.0, 0.0, -sa, ca],
    ]);
    assert_eq!(classify_real(&t, &tol()).unwrap().level, Level::NotRecurrent);
    assert!(classify_real(&Matrix::from_diag(&[c(0.0, 1.0)]), &tol()).is_err());
}

#[test]
fn necessary_condition_examples() {
    let half = Matrix::identity(2).scale(c(0.5, 0.0));
    let checks = necessary_conditions(&half, &tol()).unwrap();
    assert!(checks.iter().all(|k| !k.passed));
    assert!(checks.iter().all(|k| k.witness.is_some_and(|w| (w - c(0.5, 0.0)).norm() < 1e-12)));

    let checks = necessary_conditions(&Matrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]), &tol()).unwrap();
    assert!(!checks[1].passed);
    assert!((checks[1].witness.unwrap() - c(2.0, 0.0)).norm() < 1e-12);

    let checks = necessary_conditions(&Matrix::from_diag(&[c(0.0, 1.0), c(1.0, 0.0)]), &tol()).unwrap();
    assert!(checks.iter().all(|k| k.passed));
}

#[test]
fn structural_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = random_unitary(4, &mut rng);
    let direct = u.adjoint().matmul(&u).sub(&Matrix::identity(4)).norm2();
    assert!(direct < 1e-12);
    let r = structural_checks(&u, &tol()).unwrap();
    assert_eq!(r.get("unitary"), Some(true));
    assert_eq!(r.get("m_isometry(1,2)_witnessed"), Some(true));
    assert_eq!(r.level, Level::UniformlyRigid);

    let r = structural_checks(&Matrix::from_diag(&[c(0.5, 0.0), c(1.0, 0.0)]), &tol()).unwrap();
    assert_eq!(r.get("normal"), Some(true));
    assert_eq!(r.level, Level::NotRecurrent);
}

#[test]
fn works_in_single_precision() {
    let t = ComplexMatrix::<f32>::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
    let tol = lindyn::taxonomy::Tolerance::<f32> { unimodular_eps: 1e-4, return_eps: 1e-3, rank_eps: 1e-4, max_denominator: 1000 };
    assert_eq!(classify_complex(&t, &tol).unwrap().level, Level::UniformlyRigid);
    let j = ComplexMatrix::<f32>::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    assert_eq!(classify_complex(&j, &tol).unwrap().level, Level::NotRecurrent);
}

fn instance(seed: u64, family: Family, dim: usize) -> lindyn::laws::Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate(family, dim, &mut rng)
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::RationalRotation),
        Just(Family::IrrationalRotation),
        Just(Family::OffCircle),
        Just(Family::Jordan)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn only_two_levels_in_finite_dimension(seed in any::<u64>(), fam in family(), dim in 2usize..=6) {
        let inst = instance(seed, fam, dim);
        let l = classify_complex(&inst.matrix, &tol()).unwrap().level;
        prop_assert!(l == Level::UniformlyRigid || l == Level::NotRecurrent);
        prop_assert_eq!(l.is_recurrent(), fam.is_recurrent());
    }

    #[test]
    fn verdict_invariant_under_unimodular_scaling_and_inverse(seed in any::<u64>(), fam in family(), dim in 2usize..=5, a in 0.0f64..1.0) {
        let inst = instance(seed, fam, dim);
        let l = classify_complex(&inst.matrix, &tol()).unwrap().level;
        prop_assert_eq!(classify_complex(&inst.matrix.scale(unit_phase(a)), &tol()).unwrap().level, l);
        let inv = inst.matrix.inverse().unwrap();
        prop_assert_eq!(classify_complex(&inv, &tol()).unwrap().level, l);
    }

    #[test]
    fn recurrent_matrices_are_power_bounded_by_cond(seed in any::<u64>(), dim in 1usize..=5) {
        let inst = instance(seed, Family::IrrationalRotation, dim);
        let mut p = inst.matrix.clone();
        for _ in 0..64 {
            let s = singular_values(&p)[0];
            prop_assert!(s <= inst.cond * (1.0 + 1e-9));
            p = p.matmul(&inst.matrix);
        }
    }

    #[test]
    fn doubled_recurrent_matrix_stays_uniformly_rigid(seed in any::<u64>(), dim in 1usize..=3) {
        let inst = instance(seed, Family::IrrationalRotation, dim);
        let d = inst.matrix.direct_sum(&inst.matrix);
        prop_assert_eq!(classify_complex(&d, &tol()).unwrap().level, Level::UniformlyRigid);
    }
}
