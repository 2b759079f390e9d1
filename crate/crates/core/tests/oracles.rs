//! Closed-form and cross-method oracles for maps, orbits, integrators and
//! the spectrum.

use std::f64::consts::{FRAC_PI_2, PI};

use bertrand_core::dynamics::integrals::{fradkin_unit_vector, runge_lenz, unit_vector_at_angle};
use bertrand_core::dynamics::orbit::{
    circular_orbit, measured_apsidal_angle, radial_period_of_state, RadialOrbit,
};
use bertrand_core::dynamics::{apsidal_angle, integrate, IntegratorConfig, PhaseState, Scheme};
use bertrand_core::quantum::{assemble_spectrum, radial_solve, GridPolicy};
use bertrand_core::{
    check_relations, preset_families, random_family, verify_intrinsic_potentials, BertrandFamily,
    CoordinateMap, Error, PdmSystem, QuantumParams, RadialGrid, RadialProfile,
};
use rand::SeedableRng;

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn map_identities_on_presets_and_random_draws() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut families = preset_families();
    families.extend((0..20).map(|_| random_family(&mut rng)));
    for family in families {
        let label = family.label.clone();
        let profile = RadialProfile::new(family).unwrap();
        let map = CoordinateMap::new(profile.clone());
        for u in [0.1, 0.35, 0.6, 0.85] {
            let r = profile.sample_radius(u);
            let back = map.r_of_rho(map.rho_of_r(r).unwrap()).unwrap();
            assert!(
                (back - r).abs() <= 1e-10 * r,
                "{label}: roundtrip at r = {r}"
            );
            let res = check_relations(&map, r).unwrap();
            assert!(res.max() <= 1e-7, "{label}: {res:?} at r = {r}");
        }
    }
}

#[test]
fn intrinsic_potentials_fit_presets() {
    for family in preset_families() {
        let profile = RadialProfile::new(family.clone()).unwrap();
        let grid: Vec<f64> = (1..=9)
            .map(|i| profile.sample_radius(0.1 * i as f64))
            .collect();
        let report = verify_intrinsic_potentials(&family, &grid).unwrap();
        assert!(
            report.max_residual <= 1e-9,
            "{}: {}",
            family.label,
            report.max_residual
        );
    }
}

#[test]
fn textbook_apsidal_angles() {
    let kepler = PdmSystem::flat_kepler(1.0, 3).unwrap();
    for e in [-0.45, -0.3, -0.1] {
        assert!((apsidal_angle(&kepler, e, 1.0).unwrap() - PI).abs() < 1e-8);
    }
    let osc = PdmSystem::flat_oscillator(1.0, 2).unwrap();
    for e in [1.1, 2.0, 5.0] {
        assert!((apsidal_angle(&osc, e, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-8);
    }
    let darboux = PdmSystem::darboux(0.3, 1.0, 3).unwrap();
    for (e, l) in [(0.6, 0.5), (1.0, 0.5), (1.4, 1.0), (1.6, 0.3)] {
        let angle = apsidal_angle(&darboux, e, l).unwrap();
        assert!(
            (angle - FRAC_PI_2).abs() < 1e-6,
            "E = {e}, L = {l}: {angle}"
        );
    }
}

#[test]
fn escape_energy_has_no_turning_points() {
    let kepler = PdmSystem::flat_kepler(1.0, 3).unwrap();
    assert!(matches!(
        apsidal_angle(&kepler, 0.2, 1.0),
        Err(Error::NoTurningPoints { .. })
    ));
    let darboux = PdmSystem::darboux(0.5, 1.0, 3).unwrap();
    assert!(matches!(
        apsidal_angle(&darboux, 1.2, 0.5),
        Err(Error::NoTurningPoints { .. })
    ));
}

#[test]
fn darboux_has_a_stable_circular_orbit_for_every_momentum() {
    let sys = PdmSystem::darboux(1.0, 1.0, 3).unwrap();
    for l in [0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0] {
        let c = circular_orbit(&sys, l).unwrap();
        assert!(c.stable, "L = {l}");
    }
}

#[test]
fn measured_angles_agree_with_quadrature_on_type_i() {
    for (n, m) in [(1, 1), (2, 1), (1, 2)] {
        let family = BertrandFamily::type_i(n, m, -0.2, 0.0).unwrap();
        let expected = family.expected_apsidal_angle();
        let sys = PdmSystem::type_i(family, -1.0, 3).unwrap();
        let c = circular_orbit(&sys, 1.0).unwrap();
        let e = sys.chart().unwrap().effective(0.7 * c.r, 1.0).unwrap();
        let measured = measured_apsidal_angle(&sys, e, 1.0).unwrap();
        assert!(
            (measured - expected).abs() < 1e-6,
            "n = {n}, m = {m}: {measured}"
        );
    }
}

#[test]
fn kepler_circular_orbit_keeps_its_radius() {
    let sys = PdmSystem::flat_kepler(1.0, 3).unwrap();
    let s = PhaseState::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]).unwrap();
    let config = IntegratorConfig {
        step: Some(2.0 * PI / 128.0),
        sample_every: 16,
        ..Default::default()
    };
    let traj = integrate(&sys, &s, 100.0 * 2.0 * PI, &config).unwrap();
    let drift = traj
        .states
        .iter()
        .map(|z| (z.rho() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(drift <= 1e-9, "{drift}");
}

#[test]
fn integrators_agree_over_ten_periods() {
    let sys = PdmSystem::darboux(0.1, 1.0, 3).unwrap();
    let s = PhaseState::new(vec![0.8, -0.2, 0.3], vec![0.1, 0.7, -0.2]).unwrap();
    let period = radial_period_of_state(&sys, &s).unwrap();
    let midpoint = integrate(&sys, &s, 10.0 * period, &IntegratorConfig::default()).unwrap();
    let rk = integrate(
        &sys,
        &s,
        10.0 * period,
        &IntegratorConfig {
            scheme: Scheme::DormandPrince,
            ..Default::default()
        },
    )
    .unwrap();
    let a = midpoint.last().unwrap().1.to_vec();
    let b = rk.last().unwrap().1.to_vec();
    assert!(max_diff(&a, &b) <= 1e-7, "{}", max_diff(&a, &b));
    assert!(!midpoint.flagged);
}

#[test]
fn radial_chart_energy_identity() {
    let sys = PdmSystem::darboux(0.5, 1.0, 3).unwrap();
    let chart = sys.chart().unwrap().clone();
    let s = PhaseState::new(vec![1.0, 0.1, 0.0], vec![0.2, 0.6, 0.1]).unwrap();
    let e = sys.hamiltonian(&s.q, &s.p).unwrap();
    let l = s.angular_momentum();
    let config = IntegratorConfig {
        steps_per_period: 2048,
        ..Default::default()
    };
    let period = radial_period_of_state(&sys, &s).unwrap();
    let traj = integrate(&sys, &s, 2.0 * period, &config).unwrap();
    let dt = traj.times[1] - traj.times[0];
    let r: Vec<f64> = traj
        .states
        .iter()
        .map(|z| chart.map().r_of_rho(z.rho()).unwrap())
        .collect();
    let mut worst = 0.0f64;
    for i in 2..r.len() - 2 {
        let r_dot = (-r[i + 2] + 8.0 * r[i + 1] - 8.0 * r[i - 1] + r[i - 2]) / (12.0 * dt);
        let h = chart.h(r[i]).unwrap();
        let residual = 0.5 * h * h * r_dot * r_dot + chart.effective(r[i], l).unwrap() - e;
        worst = worst.max(residual.abs());
    }
    assert!(worst <= 1e-7, "{worst}");
}

#[test]
fn kappa_oscillator_orbit_stays_between_turning_points() {
    let sys = PdmSystem::kappa_oscillator(0.3, 0.5, 3).unwrap();
    let s = PhaseState::new(vec![0.5, 0.0, 0.0], vec![0.1, 0.4, 0.0]).unwrap();
    let orbit = RadialOrbit::through(&sys, &s).unwrap();
    let map = sys.chart().unwrap().map().clone();
    let rho_max = map.rho_of_r(orbit.r_max).unwrap();
    let rho_min = map.rho_of_r(orbit.r_min).unwrap();
    let period = orbit.radial_period().unwrap();
    let traj = integrate(&sys, &s, 20.0 * period, &IntegratorConfig::default()).unwrap();
    for z in &traj.states {
        assert!(z.rho() <= rho_max * (1.0 + 1e-8) && z.rho() >= rho_min * (1.0 - 1e-8));
    }
}

#[test]
fn darboux_ball_rejects_exterior_start() {
    let sys = PdmSystem::darboux(-1.0, 1.0, 2).unwrap();
    let s = PhaseState::new(vec![1.2, 0.0], vec![0.0, 0.5]).unwrap();
    assert!(matches!(
        integrate(&sys, &s, 1.0, &IntegratorConfig::default()),
        Err(Error::DomainExit { t, .. }) if t == 0.0
    ));
}

#[test]
fn kepler_unit_vector_is_conserved_and_points_along_runge_lenz() {
    let sys = PdmSystem::flat_kepler(1.0, 3).unwrap();
    let s = PhaseState::new(vec![1.0, 0.2, 0.1], vec![-0.1, 0.9, 0.3]).unwrap();
    let period = radial_period_of_state(&sys, &s).unwrap();
    let traj = integrate(&sys, &s, 5.0 * period, &IntegratorConfig::default()).unwrap();
    let a0 = fradkin_unit_vector(&sys, &s).unwrap();
    let rl = unit(runge_lenz(&s, 1.0, 1.0));
    assert!(max_diff(&a0, &rl) <= 1e-8);
    for z in traj.states.iter().step_by(13) {
        let a = fradkin_unit_vector(&sys, z).unwrap();
        assert!(max_diff(&a, &a0) <= 1e-8);
    }
}

#[test]
fn oscillator_unit_vector_square_is_conserved() {
    let sys = PdmSystem::flat_oscillator(1.0, 3).unwrap();
    let s = PhaseState::new(vec![1.0, 0.3, -0.2], vec![0.2, 0.8, 0.1]).unwrap();
    let period = radial_period_of_state(&sys, &s).unwrap();
    let traj = integrate(&sys, &s, 3.0 * period, &IntegratorConfig::default()).unwrap();
    let outer = |a: [f64; 3]| -> Vec<f64> { (0..9).map(|k| a[k / 3] * a[k % 3]).collect() };
    let t0 = outer(fradkin_unit_vector(&sys, &s).unwrap());
    for z in traj.states.iter().step_by(11) {
        let t = outer(fradkin_unit_vector(&sys, z).unwrap());
        assert!(max_diff(&t, &t0) <= 1e-8);
    }
    // the vector itself flips sign between consecutive half-orbits
    let a = unit_vector_at_angle(&s, 0.0);
    let flipped = unit_vector_at_angle(&s, PI);
    assert!(max_diff(&a, &flipped.map(|x| -x)) <= 1e-15);
}

#[test]
fn spectrum_ground_state_and_degeneracies() {
    let params = QuantumParams::new(3, 1.0, 0.5, 1.0).unwrap();
    let grid = RadialGrid::for_levels(&params, 0, 0);
    let ground = radial_solve(&params, &grid, 1).unwrap();
    assert!((ground.eigenvalues[0] - 0.75).abs() <= 1e-6);

    let result = assemble_spectrum(&params, 4, &GridPolicy::default()).unwrap();
    let found: Vec<u128> = result.levels.iter().map(|l| l.degeneracy_found).collect();
    assert_eq!(found, vec![1, 3, 6, 10, 15]);
    for pair in result.levels.windows(2) {
        assert!(pair[1].numeric > pair[0].numeric);
    }
}

#[test]
fn flat_spectrum_is_the_isotropic_oscillator() {
    let params = QuantumParams::new(3, 1.0, 0.0, 1.0).unwrap();
    let result = assemble_spectrum(&params, 4, &GridPolicy::default()).unwrap();
    for level in &result.levels {
        assert!((level.numeric - (level.n as f64 + 1.5)).abs() <= 1e-6);
    }
    assert!(result.continuum_bottom.is_none());
}
