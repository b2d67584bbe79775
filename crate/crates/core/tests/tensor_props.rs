use conjcomb_core::linalg::{schmidt_decompose, uhlmann_fidelity};
use conjcomb_core::random::{
    ginibre, haar_unitary_with, random_density, random_state, rng_from_seed,
};
use conjcomb_core::tensor::{
    kron, partial_trace, permute_subsystems, ComplexMatrix, DensityOperator, StateVector, C64,
};
use proptest::prelude::*;

fn small_matrix(seed: u64, r: usize, c: usize) -> ComplexMatrix {
    ginibre(r, c, &mut rng_from_seed(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_associative(s in any::<u64>(), r in 1usize..4, c in 1usize..4) {
        let a = small_matrix(s, r, c);
        let b = small_matrix(s ^ 1, c, r);
        let d = small_matrix(s ^ 2, 2, 3);
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn kron_mixed_product(s in any::<u64>()) {
        let a = small_matrix(s, 2, 3);
        let b = small_matrix(s ^ 3, 3, 2);
        let c = small_matrix(s ^ 5, 3, 2);
        let d = small_matrix(s ^ 7, 2, 3);
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn partial_trace_linear_and_trace_preserving(s in any::<u64>(), p in 0.0f64..1.0) {
        let mut rng = rng_from_seed(s);
        let r1 = random_density(&[2, 3], &mut rng).unwrap();
        let r2 = random_density(&[2, 3], &mut rng).unwrap();
        let mut mix = r1.matrix().scale_real(p);
        mix.add_scaled(r2.matrix(), C64::new(1.0 - p, 0.0));
        let mixed = DensityOperator::new(vec![2, 3], mix).unwrap();
        for keep in [[0usize], [1usize]] {
            let a = partial_trace(&r1, &keep).unwrap();
            let b = partial_trace(&r2, &keep).unwrap();
            let m = partial_trace(&mixed, &keep).unwrap();
            let mut expect = a.matrix().scale_real(p);
            expect.add_scaled(b.matrix(), C64::new(1.0 - p, 0.0));
            prop_assert!(m.matrix().max_abs_diff(&expect) < 1e-12);
            prop_assert!((a.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_roundtrip(s in any::<u64>()) {
        let v = random_state(&[2, 3, 2, 3], &mut rng_from_seed(s)).unwrap();
        let grouped = permute_subsystems(&v, &[0, 2, 1, 3]).unwrap();
        prop_assert_eq!(grouped.dims(), &[2, 2, 3, 3]);
        prop_assert!((grouped.norm() - 1.0).abs() < 1e-12);
        let back = permute_subsystems(&grouped, &[0, 2, 1, 3]).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn schmidt_sum_and_local_unitary_invariance(s in any::<u64>(), d in 2usize..5) {
        let mut rng = rng_from_seed(s);
        let v = random_state(&[d, d], &mut rng).unwrap();
        let sd = schmidt_decompose(&v, &[0]).unwrap();
        prop_assert!((sd.coefficients.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(sd.coefficients.windows(2).all(|w| w[0] >= w[1]));
        let back = sd.reconstruct();
        for (a, b) in back.iter().zip(v.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
        let u = haar_unitary_with(d, &mut rng).unwrap();
        let w = haar_unitary_with(d, &mut rng).unwrap();
        let moved = v.apply(&kron(&u, &w)).unwrap();
        let sm = schmidt_decompose(&moved, &[0]).unwrap();
        for (a, b) in sd.coefficients.iter().zip(&sm.coefficients) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn fidelity_concave_and_symmetric(s in any::<u64>(), p in 0.0f64..1.0) {
        let mut rng = rng_from_seed(s);
        let rho = random_density(&[3], &mut rng).unwrap();
        let s1 = random_density(&[3], &mut rng).unwrap();
        let s2 = random_density(&[3], &mut rng).unwrap();
        let mut mix = s1.matrix().scale_real(p);
        mix.add_scaled(s2.matrix(), C64::new(1.0 - p, 0.0));
        let mixed = DensityOperator::new(vec![3], mix).unwrap();
        let lhs = uhlmann_fidelity(&rho, &mixed).unwrap();
        let rhs = p * uhlmann_fidelity(&rho, &s1).unwrap() + (1.0 - p) * uhlmann_fidelity(&rho, &s2).unwrap();
        prop_assert!(lhs >= rhs - 1e-10);
        let f12 = uhlmann_fidelity(&s1, &s2).unwrap();
        let f21 = uhlmann_fidelity(&s2, &s1).unwrap();
        prop_assert!((f12 - f21).abs() < 1e-9);
    }
}

#[test]
fn kron_examples() {
    assert_eq!(
        kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)),
        ComplexMatrix::identity(6)
    );
    let a = small_matrix(1, 2, 2);
    let b = small_matrix(2, 2, 2);
    let k = kron(&a, &b);
    for i in 0..2 {
        for j in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    assert_eq!(k[(i * 2 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                }
            }
        }
    }
}

#[test]
fn partial_trace_of_products_and_bell() {
    let mut rng = rng_from_seed(5);
    let a = random_density(&[2], &mut rng).unwrap();
    let b = random_density(&[3], &mut rng).unwrap();
    let ab = a.tensor(&b);
    assert!(
        partial_trace(&ab, &[0])
            .unwrap()
            .matrix()
            .max_abs_diff(a.matrix())
            < 1e-12
    );
    assert!(
        partial_trace(&ab, &[1])
            .unwrap()
            .matrix()
            .max_abs_diff(b.matrix())
            < 1e-12
    );
    let s = 0.5f64.sqrt();
    let z = C64::new(0.0, 0.0);
    let bell =
        StateVector::new(vec![2, 2], vec![C64::new(s, 0.0), z, z, C64::new(s, 0.0)]).unwrap();
    let rho = DensityOperator::from_pure(&bell);
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    for keep in [[0usize], [1usize]] {
        assert!(
            partial_trace(&rho, &keep)
                .unwrap()
                .matrix()
                .max_abs_diff(&half)
                < 1e-12
        );
    }
    assert!(partial_trace(&rho, &[]).is_err());
}

#[test]
fn swap_on_basis_state() {
    let v = StateVector::basis(vec![2, 2], 1).unwrap();
    let w = permute_subsystems(&v, &[1, 0]).unwrap();
    assert_eq!(w, StateVector::basis(vec![2, 2], 2).unwrap());
    assert_eq!(permute_subsystems(&v, &[0, 1]).unwrap(), v);
    assert!(permute_subsystems(&v, &[0]).is_err());
}

#[test]
fn mixed_state_fidelity_with_pure() {
    let psi = random_state(&[2], &mut rng_from_seed(3)).unwrap();
    let f = uhlmann_fidelity(
        &DensityOperator::maximally_mixed(2),
        &DensityOperator::from_pure(&psi),
    )
    .unwrap();
    assert!((f - 0.5f64.sqrt()).abs() < 1e-12);
}
