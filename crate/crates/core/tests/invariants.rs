use bertrand_core::dynamics::hamiltonian::finite_difference_gradient;
use bertrand_core::dynamics::integrals::{bracket_of_gradients, standard_integrals};
use bertrand_core::dynamics::{
    angular_integrals, fradkin_tensor, hamiltonian_gradient, PhaseState,
};
use bertrand_core::quantum::{
    analytic_level, continuum_bottom, degeneracy, degeneracy_by_count, verify_quadratic_identity,
};
use bertrand_core::{BertrandFamily, CoordinateMap, PdmSystem, QuantumParams, RadialProfile};
use proptest::prelude::*;

fn coprime() -> impl Strategy<Value = (u32, u32)> {
    (1u32..=4, 1u32..=4).prop_filter("coprime", |(n, m)| {
        let (mut a, mut b) = (*n, *m);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a == 1
    })
}

fn phase_state(dim: usize, scale: f64) -> impl Strategy<Value = PhaseState> {
    (
        prop::collection::vec(-scale..scale, dim),
        prop::collection::vec(-scale..scale, dim),
    )
        .prop_map(|(q, p)| PhaseState::new(q, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn type_i_map_roundtrip((n, m) in coprime(), k in -1.0f64..1.0, u in 0.05f64..0.95) {
        let family = BertrandFamily::type_i(n, m, k, 0.0).unwrap();
        let profile = RadialProfile::new(family).unwrap();
        let r = profile.sample_radius(u);
        let map = CoordinateMap::new(profile);
        let back = map.r_of_rho(map.rho_of_r(r).unwrap()).unwrap();
        prop_assert!((back - r).abs() <= 1e-10 * r, "r = {r}, back = {back}");
    }

    #[test]
    fn profile_is_positive_on_domain((n, m) in coprime(), k in -1.0f64..1.0, d in -1.0f64..1.0, u in 0.01f64..0.99) {
        if let Ok(family) = BertrandFamily::type_ii(n, m, k, d, 0.0, bertrand_core::Branch::Plus) {
            let profile = RadialProfile::new(family).unwrap();
            let r = profile.sample_radius(u);
            let h = profile.h(r).unwrap();
            prop_assert!(h > 0.0 && h.is_finite());
        }
    }

    #[test]
    fn levels_increase_below_threshold(dim in 1usize..5, lambda in 0.01f64..3.0, omega in 0.1f64..3.0, n in 0usize..200) {
        let p = QuantumParams::new(dim, 1.0, lambda, omega).unwrap();
        let e0 = analytic_level(&p, n);
        let e1 = analytic_level(&p, n + 1);
        prop_assert!(e1 > e0);
        prop_assert!(e1 < continuum_bottom(&p).unwrap());
        // identity residual relative to the size of its largest term
        let nu = n as f64 + dim as f64 / 2.0;
        let scale = (omega * nu).powi(2).max(e0 * e0).max(1.0);
        prop_assert!(verify_quadratic_identity(&p, n) * (e0 * e0).max(1.0) / scale <= 1e-13);
    }

    #[test]
    fn degeneracy_matches_harmonic_count(dim in 1usize..7, n in 0usize..30) {
        prop_assert_eq!(degeneracy(dim, n), degeneracy_by_count(dim, n));
    }

    #[test]
    fn fradkin_trace_and_symmetry(lambda in 0.0f64..2.0, omega in 0.2f64..2.0, s in phase_state(3, 1.5)) {
        let c = fradkin_tensor(lambda, omega, &s).unwrap();
        let h = PdmSystem::darboux(lambda, omega, 3).unwrap().hamiltonian(&s.q, &s.p).unwrap();
        prop_assert!((0.5 * c.trace() - h).abs() <= 1e-14 * h.max(1.0));
        prop_assert_eq!(c.clone(), c.transpose());
    }

    #[test]
    fn top_angular_integrals_coincide(s in phase_state(4, 2.0)) {
        let (upper, lower) = angular_integrals(&s, 4).unwrap();
        prop_assert!((upper - lower).abs() <= 1e-13 * upper.max(1.0));
    }

    #[test]
    fn darboux_integrals_commute_with_energy(lambda in 0.05f64..2.0, dim in 2usize..5, seed in 0u64..1000) {
        let sys = PdmSystem::darboux(lambda, 1.0, dim).unwrap();
        let s = {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let q = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            PhaseState::new(q, p).unwrap()
        };
        let dh = hamiltonian_gradient(&sys, &s).unwrap();
        for integral in standard_integrals(&sys) {
            let g = integral.gradient(&sys, &s).unwrap();
            prop_assert!(bracket_of_gradients(&dh, &g).abs() <= 1e-10, "{}", integral.name());
        }
    }

    #[test]
    fn darboux_gradient_matches_finite_differences(s in phase_state(3, 1.0)) {
        let sys = PdmSystem::darboux(1.0, 1.0, 3).unwrap();
        let analytic = hamiltonian_gradient(&sys, &s).unwrap();
        let fd = finite_difference_gradient(|z| sys.hamiltonian(&z.q, &z.p), &s, 1e-5).unwrap();
        for (a, b) in analytic.to_vec().iter().zip(fd.to_vec()) {
            prop_assert!((a - b).abs() <= 1e-6);
        }
    }
}
