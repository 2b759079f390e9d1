//! Hamiltonian flow of PDM systems, integrals of motion and orbit closure.

pub mod hamiltonian;
pub mod integrals;
pub mod integrator;
pub mod orbit;
pub mod report;
mod state;

pub use hamiltonian::{energy, hamiltonian_gradient, Gradient};
pub use integrals::{
    angular_integrals, fradkin_tensor, fradkin_unit_vector, independence_rank, poisson_bracket,
    Integral,
};
pub use integrator::{integrate, IntegratorConfig, Scheme};
pub use orbit::{apsidal_angle, circular_orbit, CircularOrbit, OrbitAnalysis, RadialOrbit};
pub use report::{conservation_report, random_states, DriftReport, RandomStateSpec};
pub use state::{IntegratorStats, PhaseState, Trajectory};
