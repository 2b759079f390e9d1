use std::hint::black_box;

use bertrand_core::dynamics::integrals::standard_integrals;
use bertrand_core::dynamics::orbit::radial_period_of_state;
use bertrand_core::dynamics::{
    hamiltonian_gradient, integrate, IntegratorConfig, PhaseState, RadialOrbit, Scheme,
};
use bertrand_core::quantum::{compute_spectrum, radial_solve, GridPolicy};
use bertrand_core::{
    BertrandFamily, CoordinateMap, PdmSystem, QuantumParams, RadialGrid, RadialProfile,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn maps(c: &mut Criterion) {
    let closed = CoordinateMap::new(
        RadialProfile::new(BertrandFamily::type_i(2, 1, 0.2, 0.0).unwrap()).unwrap(),
    );
    let quadrature = CoordinateMap::new(
        RadialProfile::new(BertrandFamily::constant_curvature_oscillator(0.3).unwrap()).unwrap(),
    );
    let mut group = c.benchmark_group("map");
    group.bench_function("rho_of_r/closed", |b| {
        b.iter(|| closed.rho_of_r(black_box(0.7)))
    });
    group.bench_function("rho_of_r/quadrature", |b| {
        b.iter(|| quadrature.rho_of_r(black_box(0.7)))
    });
    group.bench_function("r_of_rho/quadrature", |b| {
        b.iter(|| quadrature.r_of_rho(black_box(0.9)))
    });
    group.finish();
}

fn dynamics(c: &mut Criterion) {
    let system = PdmSystem::darboux(0.5, 1.0, 3).unwrap();
    let state = PhaseState::new(vec![0.6, 0.1, -0.2], vec![0.1, 0.5, 0.2]).unwrap();
    let period = radial_period_of_state(&system, &state).unwrap();
    let mut group = c.benchmark_group("dynamics");
    group.bench_function("gradient", |b| {
        b.iter(|| hamiltonian_gradient(&system, black_box(&state)))
    });
    group.bench_function("integrals", |b| {
        let integrals = standard_integrals(&system);
        b.iter(|| {
            integrals
                .iter()
                .map(|i| i.value(&system, black_box(&state)).unwrap())
                .sum::<f64>()
        })
    });
    group.sample_size(20);
    for (name, scheme) in [
        ("period/midpoint6", Scheme::Midpoint6),
        ("period/dormand_prince", Scheme::DormandPrince),
    ] {
        let config = IntegratorConfig {
            scheme,
            ..IntegratorConfig::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| integrate(&system, black_box(&state), period, &config))
        });
    }
    let energy = system.hamiltonian(&state.q, &state.p).unwrap();
    let l = state.angular_momentum();
    group.bench_function("apsidal_quadrature", |b| {
        b.iter(|| RadialOrbit::new(&system, black_box(energy), l).and_then(|o| o.apsidal_angle()))
    });
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let params = QuantumParams::new(3, 1.0, 0.5, 1.0).unwrap();
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    let grid = RadialGrid::for_levels(&params, 4, 0)
        .with_points(2000)
        .unwrap();
    group.bench_function("radial_solve/2000", |b| {
        b.iter(|| radial_solve(&params, black_box(&grid), 3))
    });
    let policy = GridPolicy {
        points: 4000,
        ..GridPolicy::default()
    };
    group.bench_function("levels/n_max=4", |b| {
        b.iter(|| compute_spectrum(&params, 4, black_box(&policy)))
    });
    group.finish();
}

criterion_group!(kernels, maps, dynamics, spectrum);
criterion_main!(kernels);
