//! Drift tables along trajectories and seeded random phase points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::integrals::Integral;
use crate::dynamics::{PhaseState, Trajectory};
use crate::error::{Error, Result};
use crate::pdm_map::{PdmKind, PdmSystem};

/// Drift of one monitored quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftEntry {
    pub name: String,
    pub initial: f64,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
}

impl DriftEntry {
    /// Drift of a sampled series relative to its first value.
    pub fn from_series(name: impl Into<String>, values: &[f64]) -> Self {
        let initial = values.first().copied().unwrap_or(0.0);
        let max_abs_drift = values
            .iter()
            .map(|v| (v - initial).abs())
            .fold(0.0, f64::max);
        Self {
            name: name.into(),
            initial,
            max_abs_drift,
            max_rel_drift: max_abs_drift / initial.abs().max(1e-30),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DriftReport {
    pub entries: Vec<DriftEntry>,
}

impl DriftReport {
    pub fn max_rel_drift(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_rel_drift)
            .fold(0.0, f64::max)
    }

    pub fn within(&self, budget: f64) -> bool {
        self.entries.iter().all(|e| e.max_rel_drift <= budget)
    }

    pub fn get(&self, name: &str) -> Option<&DriftEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn push(&mut self, entry: DriftEntry) {
        self.entries.push(entry);
    }
}

/// Evaluates every integral on every sample of the trajectory.
pub fn integral_series(
    system: &PdmSystem,
    trajectory: &Trajectory,
    integrals: &[Integral],
) -> Result<Vec<Vec<f64>>> {
    integrals
        .iter()
        .map(|integral| {
            trajectory
                .states
                .iter()
                .map(|s| integral.value(system, s))
                .collect()
        })
        .collect()
}

/// Per-integral max relative drift over the trajectory, normalized by
/// `max(|value at t = 0|, 1e-30)`.
pub fn conservation_report(
    system: &PdmSystem,
    trajectory: &Trajectory,
    integrals: &[Integral],
) -> Result<DriftReport> {
    if trajectory.is_empty() {
        return Err(Error::InvalidParameter("empty trajectory".into()));
    }
    let series = integral_series(system, trajectory, integrals)?;
    Ok(DriftReport {
        entries: integrals
            .iter()
            .zip(&series)
            .map(|(integral, values)| DriftEntry::from_series(integral.name(), values))
            .collect(),
    })
}

/// Sampling box and rejection rules for random phase points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomStateSpec {
    /// Positions are drawn uniformly from `[-q_scale, q_scale]^N`.
    pub q_scale: f64,
    /// Momenta are drawn uniformly from `[-p_scale, p_scale]^N`.
    pub p_scale: f64,
    /// Minimum distance of `|q|` from any boundary or singular radius.
    pub boundary_margin: f64,
    /// Minimum total angular momentum.
    pub min_angular_momentum: f64,
    /// Energies at or above this value are rejected.
    pub max_energy: Option<f64>,
    pub max_attempts: usize,
}

impl Default for RandomStateSpec {
    fn default() -> Self {
        Self {
            q_scale: 1.0,
            p_scale: 1.0,
            boundary_margin: 1e-3,
            min_angular_momentum: 0.0,
            max_energy: None,
            max_attempts: 1_000_000,
        }
    }
}

impl RandomStateSpec {
    /// Box suited to bounded motion: for Darboux with λ > 0 the energy is
    /// kept below `fraction · ω²/(2λ)`, for Kepler-like systems below zero.
    pub fn bounded(system: &PdmSystem, fraction: f64) -> Self {
        let mut spec = Self {
            min_angular_momentum: 0.05,
            ..Self::default()
        };
        match system.kind() {
            PdmKind::Darboux { lambda, omega } if *lambda > 0.0 => {
                spec.max_energy = Some(fraction * omega * omega / (2.0 * lambda));
            }
            PdmKind::Darboux { lambda, .. } if *lambda < 0.0 => {
                spec.q_scale = 0.5 / (-lambda).sqrt();
            }
            PdmKind::FlatKepler { .. } => {
                spec.q_scale = 1.5;
                spec.max_energy = Some(-0.05);
            }
            _ => {}
        }
        spec
    }
}

/// Draws `count` phase points with a ChaCha8 stream seeded by `seed`.
pub fn random_states(
    system: &PdmSystem,
    spec: &RandomStateSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<PhaseState>> {
    let n = system.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(count);
    let mut attempts = 0;
    while states.len() < count {
        attempts += 1;
        if attempts > spec.max_attempts {
            return Err(Error::InvalidParameter(format!(
                "only {} of {count} admissible states after {} draws",
                states.len(),
                spec.max_attempts
            )));
        }
        let q: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-spec.q_scale..=spec.q_scale))
            .collect();
        let p: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-spec.p_scale..=spec.p_scale))
            .collect();
        let state = PhaseState::new(q, p)?;
        let rho = state.rho();
        if !system.contains_rho(rho) || system.boundary_distance(rho) < spec.boundary_margin {
            continue;
        }
        if state.angular_momentum() < spec.min_angular_momentum {
            continue;
        }
        if let Some(cap) = spec.max_energy {
            match system.hamiltonian(&state.q, &state.p) {
                Ok(e) if e < cap => {}
                _ => continue,
            }
        }
        states.push(state);
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_normalization() {
        let e = DriftEntry::from_series("x", &[2.0, 2.5, 1.0]);
        assert_eq!(e.max_abs_drift, 1.0);
        assert_eq!(e.max_rel_drift, 0.5);
        let z = DriftEntry::from_series("z", &[0.0, 1e-31]);
        assert!((z.max_rel_drift - 0.1).abs() < 1e-15);
    }

    #[test]
    fn random_states_respect_rules_and_seed() {
        let sys = PdmSystem::darboux(0.5, 1.0, 3).unwrap();
        let spec = RandomStateSpec::bounded(&sys, 0.8);
        let a = random_states(&sys, &spec, 50, 7).unwrap();
        let b = random_states(&sys, &spec, 50, 7).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!(sys.hamiltonian(&s.q, &s.p).unwrap() < 0.8);
            assert!(s.angular_momentum() >= 0.05);
        }
        let ball = PdmSystem::darboux(-1.0, 1.0, 2).unwrap();
        let spec = RandomStateSpec {
            q_scale: 2.0,
            ..Default::default()
        };
        for s in random_states(&ball, &spec, 100, 3).unwrap() {
            assert!(s.rho() < 1.0 - 1e-3);
        }
    }

    #[test]
    fn impossible_spec_errors() {
        let sys = PdmSystem::darboux(0.5, 1.0, 2).unwrap();
        let spec = RandomStateSpec {
            max_energy: Some(-1.0),
            max_attempts: 100,
            ..Default::default()
        };
        assert!(random_states(&sys, &spec, 1, 0).is_err());
    }
}
