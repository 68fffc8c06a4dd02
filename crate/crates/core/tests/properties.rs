mod common;

use nhq_core::dynamics::{normalize_operator, rhs_omega, step_rk4};
use nhq_core::entropy::{s_lin, s_lin_nh, s_vn, EntropySample};
use nhq_core::hermitian::{log_psd, DEFAULT_EIGEN_FLOOR};
use nhq_core::matrix::{anticommutator, commutator};
use nhq_core::*;
use proptest::prelude::*;

fn hermitian(n: usize) -> impl Strategy<Value = HermitianOperator> {
    any::<u64>().prop_map(move |seed| common::random_hermitian(&mut common::rng(seed), n, 1.5))
}

fn state(n: usize) -> impl Strategy<Value = HermitianOperator> {
    any::<u64>().prop_map(move |seed| common::random_mixed_state(&mut common::rng(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_of_hermitians_is_anti_hermitian(a in hermitian(3), b in hermitian(3)) {
        let c = commutator(a.matrix(), b.matrix()).unwrap();
        prop_assert!((&c + &c.adjoint()).max_abs() < 1e-13);
        prop_assert!(c.trace().norm() < 1e-13);
        let d = anticommutator(a.matrix(), b.matrix()).unwrap();
        prop_assert!(d.hermiticity_defect() < 1e-13);
    }

    #[test]
    fn exp_and_log_are_inverse(a in hermitian(4)) {
        let e = a.exp();
        let back = log_psd(&e, DEFAULT_EIGEN_FLOOR).unwrap();
        prop_assert!(back.max_abs_diff(a.matrix()) < 1e-10);
    }

    #[test]
    fn spectral_reconstruction(a in hermitian(4)) {
        let eig = a.eigh();
        prop_assert!(eig.reconstruct(|x| x).max_abs_diff(a.matrix()) < 1e-12);
        let v = eig.vectors.clone();
        prop_assert!(v.adjoint().matmul(&v).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn entropies_are_bounded(rho in state(3)) {
        let n = 3.0f64;
        let svn = s_vn(&rho, 1.0).unwrap();
        prop_assert!(svn >= -1e-12 && svn <= n.ln() + 1e-12);
        let sl = s_lin(&rho).unwrap();
        prop_assert!(sl >= -1e-12 && sl <= 1.0 - 1.0 / n + 1e-12);
        prop_assert!((s_lin_nh(&rho).unwrap() - sl).abs() < 1e-13);
    }

    #[test]
    fn overall_scale_shifts_nh_entropy_by_log(rho in state(3), c in 0.05f64..3.0) {
        let model = NonHermitianHamiltonian::new(HermitianOperator::zeros(3), HermitianOperator::identity(3)).unwrap();
        let s = EntropySample::at(&model, &rho.scale(c), 0.0).unwrap();
        prop_assert!((s.s_vn - s_vn(&rho, 1.0).unwrap()).abs() < 1e-12);
        prop_assert!((s.s_vn - s.s_nh - c.ln()).abs() < 1e-12);
        prop_assert!((normalize_operator(&rho.scale(c)).unwrap().max_abs_diff(rho.matrix())) < 1e-14);
    }

    #[test]
    fn generator_preserves_hermiticity(seed in any::<u64>()) {
        let (model, rho) = common::random_model(seed, 3);
        let d = rhs_omega(&model, &rho).unwrap();
        prop_assert!(d.hermiticity_defect() < 1e-14);
        let next = step_rk4(&model, &DensityState::new(rho, 0.0).unwrap(), 0.01).unwrap();
        prop_assert!(next.omega().hermiticity_defect() == 0.0);
        prop_assert!(next.trace() > 0.0);
    }
}
