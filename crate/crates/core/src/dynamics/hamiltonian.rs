//! Analytic derivatives of `H = ½ W(x) p² + U(x)`, `x = |q|²`.

use nalgebra::DMatrix;

use crate::dynamics::PhaseState;
use crate::error::{Error, Result};
use crate::pdm_map::PdmSystem;

/// Gradient `(∂H/∂q, ∂H/∂p)` of a phase-space function.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
}

impl Gradient {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dq: vec![0.0; dim],
            dp: vec![0.0; dim],
        }
    }

    pub fn norm(&self) -> f64 {
        self.dq
            .iter()
            .chain(&self.dp)
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.dq.iter().chain(&self.dp).copied().collect()
    }
}

fn check(system: &PdmSystem, state: &PhaseState) -> Result<()> {
    if state.dim() != system.dim() {
        return Err(Error::InvalidParameter(format!(
            "state dimension {} does not match system dimension {}",
            state.dim(),
            system.dim()
        )));
    }
    Ok(())
}

/// `H(q, p)`.
pub fn energy(system: &PdmSystem, state: &PhaseState) -> Result<f64> {
    system.hamiltonian(&state.q, &state.p)
}

/// `∂H/∂q = (W′p² + 2U′) q`, `∂H/∂p = W p`.
pub fn hamiltonian_gradient(system: &PdmSystem, state: &PhaseState) -> Result<Gradient> {
    check(system, state)?;
    let x: f64 = state.q.iter().map(|v| v * v).sum();
    let p2: f64 = state.p.iter().map(|v| v * v).sum();
    let t = system.radial_terms(x)?;
    let c = t.dw * p2 + 2.0 * t.du;
    Ok(Gradient {
        dq: state.q.iter().map(|q| c * q).collect(),
        dp: state.p.iter().map(|p| t.w * p).collect(),
    })
}

/// Jacobian of the Hamiltonian vector field `(∂H/∂p, −∂H/∂q)` with respect
/// to `(q, p)`.
pub fn vector_field_jacobian(system: &PdmSystem, state: &PhaseState) -> Result<DMatrix<f64>> {
    check(system, state)?;
    let n = state.dim();
    let q = &state.q;
    let p = &state.p;
    let x: f64 = q.iter().map(|v| v * v).sum();
    let p2: f64 = p.iter().map(|v| v * v).sum();
    let t = system.radial_terms(x)?;
    let c1 = t.dw * p2 + 2.0 * t.du;
    let c2 = t.d2w * p2 + 2.0 * t.d2u;
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // ∂(W p_i)/∂q_j, ∂(W p_i)/∂p_j
            jac[(i, j)] = 2.0 * t.dw * p[i] * q[j];
            // −∂(c1 q_i)/∂q_j, −∂(c1 q_i)/∂p_j
            jac[(n + i, j)] = -2.0 * c2 * q[i] * q[j];
            jac[(n + i, n + j)] = -2.0 * t.dw * q[i] * p[j];
        }
        jac[(i, n + i)] = t.w;
        jac[(n + i, i)] -= c1;
    }
    Ok(jac)
}

/// Central finite-difference gradient of any phase-space function.
pub fn finite_difference_gradient<F>(f: F, state: &PhaseState, step: f64) -> Result<Gradient>
where
    F: Fn(&PhaseState) -> Result<f64>,
{
    let n = state.dim();
    let mut grad = Gradient::zeros(n);
    let mut probe = state.clone();
    for i in 0..n {
        let q0 = probe.q[i];
        probe.q[i] = q0 + step;
        let plus = f(&probe)?;
        probe.q[i] = q0 - step;
        let minus = f(&probe)?;
        probe.q[i] = q0;
        grad.dq[i] = (plus - minus) / (2.0 * step);

        let p0 = probe.p[i];
        probe.p[i] = p0 + step;
        let plus = f(&probe)?;
        probe.p[i] = p0 - step;
        let minus = f(&probe)?;
        probe.p[i] = p0;
        grad.dp[i] = (plus - minus) / (2.0 * step);
    }
    Ok(grad)
}
