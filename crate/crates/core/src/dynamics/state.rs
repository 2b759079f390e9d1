use serde::Serialize;

use crate::error::{Error, Result};

/// Cartesian position and conjugate momentum in `N` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() || q.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "position and momentum lengths {} and {} differ or are zero",
                q.len(),
                p.len()
            )));
        }
        Ok(Self { q, p })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// `|q|`.
    pub fn rho(&self) -> f64 {
        self.q.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn q_dot_p(&self) -> f64 {
        self.q.iter().zip(&self.p).map(|(a, b)| a * b).sum()
    }

    /// Magnitude of the angular momentum `√(q²p² − (q·p)²)`.
    pub fn angular_momentum(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                let l = self.q[i] * self.p[j] - self.q[j] * self.p[i];
                s += l * l;
            }
        }
        s.sqrt()
    }

    /// `(q, p)` flattened.
    pub fn to_vec(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    pub fn from_slice(z: &[f64]) -> Self {
        let n = z.len() / 2;
        Self {
            q: z[..n].to_vec(),
            p: z[n..].to_vec(),
        }
    }

    /// Euclidean distance in phase space.
    pub fn distance(&self, other: &Self) -> f64 {
        self.q
            .iter()
            .chain(&self.p)
            .zip(other.q.iter().chain(&other.p))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Counters reported by the integrators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected_steps: usize,
    pub newton_iterations: usize,
    pub fixed_point_fallbacks: usize,
}

/// Time-ordered samples of one integration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub stats: IntegratorStats,
    /// Step size of the fixed-step schemes (initial step for adaptive ones).
    pub step: f64,
    /// Relative energy drift over the samples.
    pub energy_drift: f64,
    /// Set when `energy_drift` exceeds the configured budget.
    pub flagged: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &PhaseState)> {
        self.times.last().copied().zip(self.states.last())
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PhaseState)> {
        self.times.iter().copied().zip(&self.states)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_momentum_of_planar_state() {
        let s = PhaseState::new(vec![1.0, 0.0, 0.0], vec![0.3, 2.0, 0.0]).unwrap();
        assert!((s.angular_momentum() - 2.0).abs() < 1e-15);
        assert!((s.q_dot_p() - 0.3).abs() < 1e-15);
        assert_eq!(PhaseState::from_slice(&s.to_vec()), s);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(PhaseState::new(vec![1.0], vec![1.0, 2.0]).is_err());
    }
}
