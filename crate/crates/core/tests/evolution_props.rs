mod common;

use common::{max_abs_diff, random_hermitian, random_instance, random_projector, random_unit, rng};
use proptest::prelude::*;
use rand::Rng;
use subqsl_core::bounds::commutator_speed;
use subqsl_core::evolution::{
    block_decompose, commutator, derivative_check, evolve_state, project_at, ProjectionPath, UnitaryPropagator,
};
use subqsl_core::linalg::{norm, operator_norm, ComplexMatrix};
use subqsl_core::scenarios::{spectral_projector_case, two_level};
use subqsl_core::Complex64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn propagator_group_law(seed in any::<u64>(), s in -20.0f64..20.0, t in -20.0f64..20.0) {
        let mut g = rng(seed);
        let dim = g.random_range(1..=8);
        let u = UnitaryPropagator::new(random_hermitian(&mut g, dim));
        let id = ComplexMatrix::identity(dim);
        prop_assert_eq!(u.at(0.0), id.clone());
        let ut = u.at(t);
        prop_assert!(max_abs_diff(&ut.adjoint_mul(&ut), &id) <= 1e-10);
        prop_assert!(max_abs_diff(&u.at(s + t), &u.at(s).matmul(&ut)) <= 1e-9);
    }

    #[test]
    fn state_norm_is_preserved(seed in any::<u64>(), t in -50.0f64..50.0) {
        let mut g = rng(seed);
        let dim = g.random_range(1..=8);
        let u = UnitaryPropagator::new(random_hermitian(&mut g, dim));
        let psi = random_unit(&mut g, dim);
        let out = evolve_state(&u, &psi, t).unwrap();
        prop_assert!((norm(&out) - 1.0).abs() <= 1e-10);
        let direct = u.at(t).mul_vec(&psi);
        let diff: Vec<Complex64> = out.iter().zip(&direct).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&diff) <= 1e-10);
    }

    #[test]
    fn path_stays_a_projector_of_fixed_rank(seed in any::<u64>(), t in -30.0f64..30.0) {
        let (h, p) = random_instance(&mut rng(seed), 8);
        let path = ProjectionPath::new(h, p.clone()).unwrap();
        let pt = project_at(&path, t);
        pt.validate().unwrap();
        prop_assert_eq!(pt.rank(), p.rank());
        let pm = pt.matrix();
        prop_assert!(max_abs_diff(&pm.matmul(pm), pm) <= 1e-10);
    }

    #[test]
    fn commutator_structure(seed in any::<u64>(), t in 0.0f64..10.0) {
        let (h, p0) = random_instance(&mut rng(seed), 8);
        let t = t / (1.0 + h.norm());
        let v0 = commutator_speed(&h, &p0).unwrap();
        let path = ProjectionPath::new(h.clone(), p0).unwrap();
        let pt = path.at(t);
        let k = commutator(&h, &pt).unwrap();
        // Skew-Hermitian.
        prop_assert!(max_abs_diff(&k.adjoint(), &k.scale_real(-1.0)) <= 1e-10);
        // [H, P] = P^⊥ H P − P H P^⊥.
        let q = pt.complement();
        let hm = h.matrix();
        let alt = &q.matrix().matmul(hm).matmul(pt.matrix()) - &pt.matrix().matmul(hm).matmul(q.matrix());
        prop_assert!(max_abs_diff(&k, &alt) <= 1e-10);
        // Block off-diagonal in the (ran P, ran P^⊥) frame.
        prop_assert!(max_abs_diff(&pt.matrix().matmul(&k).matmul(pt.matrix()), &ComplexMatrix::zeros(h.dim(), h.dim())) <= 1e-10);
        prop_assert!(max_abs_diff(&q.matrix().matmul(&k).matmul(q.matrix()), &ComplexMatrix::zeros(h.dim(), h.dim())) <= 1e-10);
        // The commutator norm is invariant along the path.
        prop_assert!((operator_norm(&k).unwrap() - v0).abs() <= 1e-10);
    }

    #[test]
    fn block_reassembly(seed in any::<u64>()) {
        let (h, p) = random_instance(&mut rng(seed), 8);
        let blocks = block_decompose(&h, &p).unwrap();
        prop_assert!(max_abs_diff(&blocks.c, &blocks.b.adjoint()) <= 1e-10);
        prop_assert!(max_abs_diff(&blocks.reassemble(), h.matrix()) <= 1e-10);
        prop_assert_eq!(blocks.h_pp.rows(), p.rank());
        prop_assert_eq!(blocks.h_qq.rows(), h.dim() - p.rank());
    }
}

#[test]
fn seeded_six_dim_rank_two_reassembly() {
    let mut g = rng(66);
    let h = random_hermitian(&mut g, 6);
    let p = random_projector(&mut g, 6, 2);
    let blocks = block_decompose(&h, &p).unwrap();
    assert!(max_abs_diff(&blocks.reassemble(), h.matrix()) <= 1e-10);
}

#[test]
fn two_level_blocks_and_commutator() {
    let (e1, e2) = (0.3, 1.7);
    let sc = two_level(e1, e2).unwrap();
    let blocks = block_decompose(sc.hamiltonian(), sc.initial()).unwrap();
    assert!((blocks.b[(0, 0)].norm() - (e2 - e1) / 2.0).abs() < 1e-12);
    let k = commutator(sc.hamiltonian(), sc.initial()).unwrap();
    // ((E₂ − E₁)/2)(⟨·, e₁⟩e₂ − ⟨·, e₂⟩e₁)
    let half = (e2 - e1) / 2.0;
    let expected =
        ComplexMatrix::from_row_major(2, 2, vec![0.0.into(), Complex64::new(-half, 0.0), Complex64::new(half, 0.0), 0.0.into()])
            .unwrap();
    assert!(max_abs_diff(&k, &expected) < 1e-12);
}

#[test]
fn two_level_path_matches_closed_form() {
    let sc = two_level(-0.4, 2.2).unwrap();
    for i in 0..50 {
        let tau = i as f64 * 0.37 - 5.0;
        assert!(max_abs_diff(sc.path().at(tau).matrix(), &sc.analytic_projector(tau)) < 1e-10);
    }
}

#[test]
fn reducing_path_is_constant() {
    let mut g = rng(3);
    let h = random_hermitian(&mut g, 5);
    let p = spectral_projector_case(&h, &[0, 3]).unwrap();
    let path = ProjectionPath::new(h.clone(), p.clone()).unwrap();
    for t in [0.1, 1.0, 17.0, -4.0] {
        assert!(max_abs_diff(path.at(t).matrix(), p.matrix()) < 1e-10);
        assert!(derivative_check(&path, t, 1e-3).unwrap() < 1e-10);
    }
}

/// Central differences converge at second order: each halving of the step
/// quarters the defect.
#[test]
fn derivative_defect_is_second_order() {
    for seed in 0..5u64 {
        let mut g = rng(500 + seed);
        let h = random_hermitian(&mut g, 5);
        let p = random_projector(&mut g, 5, 2);
        let path = ProjectionPath::new(h.clone(), p).unwrap();
        let t = 0.7;
        let mut step = 1e-2 / (1.0 + h.norm());
        let mut prev = derivative_check(&path, t, step).unwrap();
        for _ in 0..3 {
            step /= 2.0;
            let next = derivative_check(&path, t, step).unwrap();
            let ratio = prev / next;
            assert!((3.5..=4.5).contains(&ratio), "seed {seed}: ratio {ratio}");
            prev = next;
        }
    }
}

#[test]
fn two_level_defect_bounded_by_second_derivative() {
    let sc = two_level(0.0, 1.0).unwrap();
    let h = 1e-4;
    let d = derivative_check(sc.path(), 0.3, h).unwrap();
    // ‖P'''‖ ≤ 8‖H‖³ bounds the central-difference remainder by (8/6)‖H‖³h².
    assert!(d <= 8.0 / 6.0 * h * h + 1e-10, "{d}");
}
