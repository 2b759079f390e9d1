//! Implicit midpoint (plain and composed to sixth order) and an embedded
//! Dormand–Prince 5(4) cross-check integrator.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::hamiltonian::{hamiltonian_gradient, vector_field_jacobian};
use crate::dynamics::orbit::radial_period_of_state;
use crate::dynamics::{IntegratorStats, PhaseState, Trajectory};
use crate::error::{Error, Result};
use crate::pdm_map::PdmSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Second-order implicit midpoint.
    Midpoint,
    /// Seven-stage symmetric composition of implicit midpoint (order 6).
    Midpoint6,
    /// Adaptive Dormand–Prince 5(4).
    DormandPrince,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    /// Fixed step; `None` takes the radial period over `steps_per_period`.
    pub step: Option<f64>,
    pub steps_per_period: usize,
    /// Keep every `sample_every`-th step.
    pub sample_every: usize,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Relative energy drift above which the trajectory is flagged.
    pub energy_budget: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Midpoint6,
            step: None,
            steps_per_period: 512,
            sample_every: 1,
            newton_tol: 1e-13,
            max_newton: 50,
            rtol: 1e-11,
            atol: 1e-13,
            energy_budget: 1e-8,
        }
    }
}

// Yoshida's sixth-order symmetric composition, solution A.
const W1: f64 = -1.177_679_984_178_87;
const W2: f64 = 0.235_573_213_359_357;
const W3: f64 = 0.784_513_610_477_560;

fn composition_weights() -> [f64; 7] {
    let w0 = 1.0 - 2.0 * (W1 + W2 + W3);
    [W3, W2, W1, w0, W1, W2, W3]
}

/// `(∂H/∂p, −∂H/∂q)` at the flattened state `z`.
pub fn vector_field(system: &PdmSystem, z: &[f64]) -> Result<Vec<f64>> {
    let g = hamiltonian_gradient(system, &PhaseState::from_slice(z))?;
    let mut v = g.dp;
    v.extend(g.dq.iter().map(|x| -x));
    Ok(v)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn as_exit(err: Error, t: f64, z: &[f64]) -> Error {
    match err {
        Error::Domain { .. } => Error::DomainExit {
            t,
            rho: PhaseState::from_slice(z).rho(),
        },
        other => other,
    }
}

/// Increment `d` of one implicit midpoint step, `d = h f(z₀ + d/2)`.
///
/// Newton with the analytic Jacobian followed by one fixed-point polish;
/// falls back to fixed-point iteration when Newton fails to converge.
fn midpoint_increment(
    system: &PdmSystem,
    z0: &[f64],
    h: f64,
    t: f64,
    config: &IntegratorConfig,
    stats: &mut IntegratorStats,
) -> Result<Vec<f64>> {
    let dim = z0.len();
    let f0 = vector_field(system, z0).map_err(|e| as_exit(e, t, z0))?;
    let scale = inf_norm(z0).max(1.0);
    let midpoint = |d: &[f64]| -> Vec<f64> { z0.iter().zip(d).map(|(z, d)| z + 0.5 * d).collect() };
    let mut d: Vec<f64> = f0.iter().map(|f| h * f).collect();

    let mut newton_ok = false;
    for _ in 0..config.max_newton {
        let m = midpoint(&d);
        let fm = match vector_field(system, &m) {
            Ok(f) => f,
            Err(_) => break,
        };
        let residual: Vec<f64> = (0..dim).map(|i| d[i] - h * fm[i]).collect();
        if inf_norm(&residual) <= config.newton_tol * scale {
            newton_ok = true;
            break;
        }
        stats.newton_iterations += 1;
        let df = match vector_field_jacobian(system, &PhaseState::from_slice(&m)) {
            Ok(j) => j,
            Err(_) => break,
        };
        let jac = DMatrix::identity(dim, dim) - df * (0.5 * h);
        let rhs = -DVector::from_vec(residual);
        match jac.lu().solve(&rhs) {
            Some(delta) => d.iter_mut().zip(delta.iter()).for_each(|(x, y)| *x += y),
            None => break,
        }
    }
    if newton_ok {
        if let Ok(fm) = vector_field(system, &midpoint(&d)) {
            d = fm.iter().map(|f| h * f).collect();
        }
        return Ok(d);
    }

    stats.fixed_point_fallbacks += 1;
    let mut d: Vec<f64> = f0.iter().map(|f| h * f).collect();
    for _ in 0..500 {
        let m = midpoint(&d);
        let fm = vector_field(system, &m).map_err(|e| as_exit(e, t, &m))?;
        let next: Vec<f64> = fm.iter().map(|f| h * f).collect();
        let change = next
            .iter()
            .zip(&d)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        d = next;
        if change <= config.newton_tol * scale {
            return Ok(d);
        }
    }
    Err(Error::StepFailure {
        t,
        iterations: config.max_newton + 500,
    })
}

/// One implicit midpoint step `z₁ = z₀ + h f((z₀ + z₁)/2)`.
pub fn midpoint_step(
    system: &PdmSystem,
    z0: &[f64],
    h: f64,
    t: f64,
    config: &IntegratorConfig,
    stats: &mut IntegratorStats,
) -> Result<Vec<f64>> {
    let d = midpoint_increment(system, z0, h, t, config, stats)?;
    Ok(z0.iter().zip(&d).map(|(z, d)| z + d).collect())
}

// Kahan summation of `z += d` with running compensation `c`.
fn compensated_add(z: &mut [f64], c: &mut [f64], d: &[f64]) {
    for i in 0..z.len() {
        let y = d[i] - c[i];
        let t = z[i] + y;
        c[i] = (t - z[i]) - y;
        z[i] = t;
    }
}

fn advance_compensated(
    system: &PdmSystem,
    z: &mut [f64],
    c: &mut [f64],
    h: f64,
    t: f64,
    config: &IntegratorConfig,
    stats: &mut IntegratorStats,
) -> Result<()> {
    let weights: &[f64] = match config.scheme {
        Scheme::Midpoint => &[1.0],
        _ => &composition_weights(),
    };
    for w in weights {
        let d = midpoint_increment(system, z, w * h, t, config, stats)?;
        compensated_add(z, c, &d);
    }
    Ok(())
}

/// One step of the scheme (`Midpoint` or `Midpoint6`).
pub fn symplectic_step(
    system: &PdmSystem,
    z0: &[f64],
    h: f64,
    t: f64,
    config: &IntegratorConfig,
    stats: &mut IntegratorStats,
) -> Result<Vec<f64>> {
    let mut z = z0.to_vec();
    let mut c = vec![0.0; z.len()];
    advance_compensated(system, &mut z, &mut c, h, t, config, stats)?;
    Ok(z)
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince 5(4) with mixed error control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for DormandPrince {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            max_steps: 10_000_000,
        }
    }
}

impl DormandPrince {
    // One trial step; `None` if a stage leaves the domain.
    #[allow(clippy::needless_range_loop)]
    fn trial(
        &self,
        system: &PdmSystem,
        z: &[f64],
        k1: &[f64],
        h: f64,
    ) -> Option<(Vec<f64>, Vec<f64>, f64)> {
        let n = z.len();
        let mut k: Vec<Vec<f64>> = vec![k1.to_vec()];
        for stage in 1..7 {
            let y: Vec<f64> = (0..n)
                .map(|i| z[i] + h * (0..stage).map(|j| A[stage][j] * k[j][i]).sum::<f64>())
                .collect();
            if !system.contains_rho(PhaseState::from_slice(&y).rho()) {
                return None;
            }
            k.push(vector_field(system, &y).ok()?);
        }
        let y5: Vec<f64> = (0..n)
            .map(|i| z[i] + h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>())
            .collect();
        let mut err = 0.0;
        for i in 0..n {
            let y4 = z[i] + h * (0..7).map(|j| B4[j] * k[j][i]).sum::<f64>();
            let scale = self.atol + self.rtol * z[i].abs().max(y5[i].abs());
            err += ((y5[i] - y4) / scale).powi(2);
        }
        Some((y5, k.pop().unwrap(), (err / n as f64).sqrt()))
    }

    /// Advance from `t0` to exactly `t1`; `h` carries the step size between
    /// calls.
    pub fn advance(
        &self,
        system: &PdmSystem,
        z: &[f64],
        t0: f64,
        t1: f64,
        h: &mut f64,
        stats: &mut IntegratorStats,
    ) -> Result<Vec<f64>> {
        let mut z = z.to_vec();
        let mut t = t0;
        let dir = (t1 - t0).signum();
        let mut k1 = vector_field(system, &z).map_err(|e| as_exit(e, t, &z))?;
        let mut steps = 0;
        while (t1 - t) * dir > 0.0 {
            let remaining = t1 - t;
            let last = h.abs() >= remaining.abs();
            let step = if last { remaining } else { h.abs() * dir };
            match self.trial(system, &z, &k1, step) {
                Some((y, k_last, err)) if err <= 1.0 => {
                    z = y;
                    k1 = k_last;
                    t = if last { t1 } else { t + step };
                    stats.steps += 1;
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    if !last || factor < 1.0 {
                        *h = step.abs() * factor;
                    }
                }
                rejected => {
                    stats.rejected_steps += 1;
                    *h = match rejected {
                        Some((_, _, err)) => step.abs() * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9),
                        None => 0.25 * step.abs(),
                    };
                    if *h < 1e-14 * t.abs().max(1.0) {
                        return Err(Error::DomainExit {
                            t,
                            rho: PhaseState::from_slice(&z).rho(),
                        });
                    }
                }
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::StepFailure {
                    t,
                    iterations: steps,
                });
            }
        }
        Ok(z)
    }
}

/// Default fixed step: radial period of the orbit through `state` divided
/// by `steps_per_period`.
pub fn default_step(
    system: &PdmSystem,
    state: &PhaseState,
    steps_per_period: usize,
) -> Result<f64> {
    Ok(radial_period_of_state(system, state)? / steps_per_period as f64)
}

/// Integrate Hamilton's equations from `state0` over `[0, t_end]`.
pub fn integrate(
    system: &PdmSystem,
    state0: &PhaseState,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end = {t_end}")));
    }
    if config.sample_every == 0 || config.steps_per_period == 0 {
        return Err(Error::InvalidParameter(
            "sampling and step counts must be positive".into(),
        ));
    }
    if state0.dim() != system.dim() {
        return Err(Error::InvalidParameter("state dimension mismatch".into()));
    }
    if !system.contains_rho(state0.rho()) {
        return Err(Error::DomainExit {
            t: 0.0,
            rho: state0.rho(),
        });
    }
    let h0 = system.hamiltonian(&state0.q, &state0.p)?;

    let nominal = match config.step {
        Some(h) if h > 0.0 => h,
        Some(h) => return Err(Error::InvalidParameter(format!("step = {h}"))),
        None => default_step(system, state0, config.steps_per_period)?,
    };
    let n_steps = (t_end / nominal).ceil().max(1.0) as usize;
    let h = t_end / n_steps as f64;

    let mut stats = IntegratorStats::default();
    let mut times = vec![0.0];
    let mut states = vec![state0.clone()];
    let mut z = state0.to_vec();

    match config.scheme {
        Scheme::Midpoint | Scheme::Midpoint6 => {
            let mut comp = vec![0.0; z.len()];
            for k in 1..=n_steps {
                let t = (k - 1) as f64 * h;
                advance_compensated(system, &mut z, &mut comp, h, t, config, &mut stats)?;
                stats.steps += 1;
                let rho = PhaseState::from_slice(&z).rho();
                if !system.contains_rho(rho) {
                    return Err(Error::DomainExit {
                        t: k as f64 * h,
                        rho,
                    });
                }
                if k % config.sample_every == 0 || k == n_steps {
                    times.push(k as f64 * h);
                    states.push(PhaseState::from_slice(&z));
                }
            }
        }
        Scheme::DormandPrince => {
            let dp = DormandPrince {
                rtol: config.rtol,
                atol: config.atol,
                ..DormandPrince::default()
            };
            let mut step = h;
            let mut k = 0;
            while k < n_steps {
                let next = (k + config.sample_every).min(n_steps);
                let (t0, t1) = (k as f64 * h, next as f64 * h);
                z = dp.advance(system, &z, t0, t1, &mut step, &mut stats)?;
                times.push(t1);
                states.push(PhaseState::from_slice(&z));
                k = next;
            }
        }
    }

    let scale = h0.abs().max(1e-30);
    let mut drift: f64 = 0.0;
    for s in &states {
        let e = system.hamiltonian(&s.q, &s.p)?;
        drift = drift.max((e - h0).abs() / scale);
    }
    Ok(Trajectory {
        times,
        states,
        stats,
        step: h,
        energy_drift: drift,
        flagged: drift > config.energy_budget,
    })
}
