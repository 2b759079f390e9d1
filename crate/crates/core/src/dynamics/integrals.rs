//! Angular-momentum integrals, the curved Fradkin tensor, the flat unit
//! vector `a`, Poisson brackets and functional independence.

use nalgebra::{DMatrix, SVD};
use serde::Serialize;

use crate::dynamics::hamiltonian::{hamiltonian_gradient, Gradient};
use crate::dynamics::orbit::orbital_angle;
use crate::dynamics::PhaseState;
use crate::error::{Error, Result};
use crate::pdm_map::{PdmKind, PdmSystem};

fn check_block(dim: usize, m: usize) -> Result<()> {
    if m < 2 || m > dim {
        Err(Error::Index { index: m, dim })
    } else {
        Ok(())
    }
}

fn leading(dim: usize, m: usize) -> std::ops::Range<usize> {
    let _ = dim;
    0..m
}

fn trailing(dim: usize, m: usize) -> std::ops::Range<usize> {
    dim - m..dim
}

fn block_sum(state: &PhaseState, block: std::ops::Range<usize>) -> f64 {
    let (q, p) = (&state.q, &state.p);
    let mut s = 0.0;
    for i in block.clone() {
        for j in i + 1..block.end {
            let l = q[i] * p[j] - q[j] * p[i];
            s += l * l;
        }
    }
    s
}

fn block_gradient(state: &PhaseState, block: std::ops::Range<usize>) -> Gradient {
    let (q, p) = (&state.q, &state.p);
    let mut g = Gradient::zeros(state.dim());
    for k in block.clone() {
        for j in block.clone() {
            let l = q[k] * p[j] - q[j] * p[k];
            g.dq[k] += 2.0 * l * p[j];
            g.dp[k] -= 2.0 * l * q[j];
        }
    }
    g
}

/// `(C^(m), C_(m))`: sums of `(q_i p_j − q_j p_i)²` over the leading and the
/// trailing `m` coordinates.
pub fn angular_integrals(state: &PhaseState, m: usize) -> Result<(f64, f64)> {
    let n = state.dim();
    check_block(n, m)?;
    Ok((
        block_sum(state, leading(n, m)),
        block_sum(state, trailing(n, m)),
    ))
}

fn darboux_parameters(system: &PdmSystem) -> Result<(f64, f64)> {
    match system.kind() {
        PdmKind::Darboux { lambda, omega } => Ok((*lambda, *omega)),
        _ => Err(Error::InvalidParameter(format!(
            "the Fradkin tensor is defined for the Darboux system, not {}",
            system.label()
        ))),
    }
}

fn darboux_energy(lambda: f64, omega: f64, state: &PhaseState) -> Result<f64> {
    let q2: f64 = state.q.iter().map(|v| v * v).sum();
    let p2: f64 = state.p.iter().map(|v| v * v).sum();
    let g = 1.0 + lambda * q2;
    if !(g > 0.0) {
        return Err(Error::Domain {
            what: "|q|",
            value: q2.sqrt(),
        });
    }
    Ok((p2 + omega * omega * q2) / (2.0 * g))
}

/// `C_ij = p_i p_j − (2λH − ω²) q_i q_j`.
pub fn fradkin_tensor(lambda: f64, omega: f64, state: &PhaseState) -> Result<DMatrix<f64>> {
    let h = darboux_energy(lambda, omega, state)?;
    let s = 2.0 * lambda * h - omega * omega;
    let n = state.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        state.p[i] * state.p[j] - s * (state.q[i] * state.q[j])
    }))
}

/// A named integral of motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Integral {
    Energy,
    /// `C^(m)`.
    Upper(usize),
    /// `C_(m)`.
    Lower(usize),
    /// Fradkin component `C_ij` (0-based indices).
    Fradkin(usize, usize),
}

impl Integral {
    pub fn name(&self) -> String {
        match self {
            Integral::Energy => "H".into(),
            Integral::Upper(m) => format!("C^({m})"),
            Integral::Lower(m) => format!("C_({m})"),
            Integral::Fradkin(i, j) => format!("C_{}{}", i + 1, j + 1),
        }
    }

    pub fn value(&self, system: &PdmSystem, state: &PhaseState) -> Result<f64> {
        let n = state.dim();
        match *self {
            Integral::Energy => system.hamiltonian(&state.q, &state.p),
            Integral::Upper(m) => {
                check_block(n, m)?;
                Ok(block_sum(state, leading(n, m)))
            }
            Integral::Lower(m) => {
                check_block(n, m)?;
                Ok(block_sum(state, trailing(n, m)))
            }
            Integral::Fradkin(i, j) => {
                if i >= n || j >= n {
                    return Err(Error::Index {
                        index: i.max(j),
                        dim: n,
                    });
                }
                let (lambda, omega) = darboux_parameters(system)?;
                let h = darboux_energy(lambda, omega, state)?;
                let s = 2.0 * lambda * h - omega * omega;
                Ok(state.p[i] * state.p[j] - s * (state.q[i] * state.q[j]))
            }
        }
    }

    pub fn gradient(&self, system: &PdmSystem, state: &PhaseState) -> Result<Gradient> {
        let n = state.dim();
        match *self {
            Integral::Energy => hamiltonian_gradient(system, state),
            Integral::Upper(m) => {
                check_block(n, m)?;
                Ok(block_gradient(state, leading(n, m)))
            }
            Integral::Lower(m) => {
                check_block(n, m)?;
                Ok(block_gradient(state, trailing(n, m)))
            }
            Integral::Fradkin(i, j) => {
                if i >= n || j >= n {
                    return Err(Error::Index {
                        index: i.max(j),
                        dim: n,
                    });
                }
                let (lambda, omega) = darboux_parameters(system)?;
                let h = darboux_energy(lambda, omega, state)?;
                let s = 2.0 * lambda * h - omega * omega;
                let dh = hamiltonian_gradient(system, state)?;
                let (q, p) = (&state.q, &state.p);
                let qq = q[i] * q[j];
                let mut g = Gradient {
                    dq: dh.dq.iter().map(|d| -2.0 * lambda * qq * d).collect(),
                    dp: dh.dp.iter().map(|d| -2.0 * lambda * qq * d).collect(),
                };
                g.dq[i] -= s * q[j];
                g.dq[j] -= s * q[i];
                g.dp[i] += p[j];
                g.dp[j] += p[i];
                Ok(g)
            }
        }
    }
}

/// `H`, every `C^(m)` and `C_(m)`, and for the Darboux system all `C_ij`
/// with `i ≤ j`.
pub fn standard_integrals(system: &PdmSystem) -> Vec<Integral> {
    let n = system.dim();
    let mut list = vec![Integral::Energy];
    list.extend((2..=n).map(Integral::Upper));
    list.extend((2..=n).map(Integral::Lower));
    if matches!(system.kind(), PdmKind::Darboux { .. }) {
        for i in 0..n {
            for j in i..n {
                list.push(Integral::Fradkin(i, j));
            }
        }
    }
    list
}

/// The three involutive sets `{H, C^(m)}`, `{H, C_(m)}`, `{C_ii}`.
pub fn involutive_sets(dim: usize) -> [Vec<Integral>; 3] {
    let mut upper = vec![Integral::Energy];
    upper.extend((2..=dim).map(Integral::Upper));
    let mut lower = vec![Integral::Energy];
    lower.extend((2..=dim).map(Integral::Lower));
    let diagonal = (0..dim).map(|i| Integral::Fradkin(i, i)).collect();
    [upper, lower, diagonal]
}

/// `{H, C^(m), C_(m), C_ii}` for `m = 2..N` and a fixed `i`.
pub fn independent_set(dim: usize, i: usize) -> Vec<Integral> {
    let mut set = vec![Integral::Energy];
    set.extend((2..=dim).map(Integral::Upper));
    set.extend((2..dim).map(Integral::Lower));
    set.push(Integral::Fradkin(i, i));
    set
}

/// `Σ_i (∂a/∂q_i ∂b/∂p_i − ∂a/∂p_i ∂b/∂q_i)`.
pub fn bracket_of_gradients(a: &Gradient, b: &Gradient) -> f64 {
    a.dq.iter().zip(&b.dp).map(|(x, y)| x * y).sum::<f64>()
        - a.dp.iter().zip(&b.dq).map(|(x, y)| x * y).sum::<f64>()
}

/// Poisson bracket of two functions given by their analytic gradients.
pub fn poisson_bracket<A, B>(a: A, b: B, state: &PhaseState) -> Result<f64>
where
    A: Fn(&PhaseState) -> Result<Gradient>,
    B: Fn(&PhaseState) -> Result<Gradient>,
{
    Ok(bracket_of_gradients(&a(state)?, &b(state)?))
}

/// Numerical rank of the Jacobian of `integrals` at `state`, thresholding
/// singular values at `1e-9 σ_max`.
pub fn independence_rank(
    system: &PdmSystem,
    integrals: &[Integral],
    state: &PhaseState,
) -> Result<usize> {
    if integrals.is_empty() {
        return Err(Error::InvalidParameter("no integrals given".into()));
    }
    let n = state.dim();
    let mut rows = Vec::with_capacity(integrals.len());
    for integral in integrals {
        let g = integral.gradient(system, state)?;
        if g.norm() <= 1e-14 {
            return Err(Error::DegeneratePoint(format!(
                "gradient of {} vanishes",
                integral.name()
            )));
        }
        rows.push(g.to_vec());
    }
    let jac = DMatrix::from_fn(integrals.len(), 2 * n, |i, j| rows[i][j]);
    let svd = SVD::new(jac, false, false);
    let sigma_max = svd.singular_values.max();
    Ok(svd
        .singular_values
        .iter()
        .filter(|s| **s > 1e-9 * sigma_max)
        .count())
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Unit vector `a = (cos φ / r) q + (sin φ / (r J)) q × (q × p)` for a
/// constant-mass radial system in three dimensions, with `φ` the angle from
/// the last pericenter (see [`orbital_angle`]).
pub fn fradkin_unit_vector(system: &PdmSystem, state: &PhaseState) -> Result<[f64; 3]> {
    if state.dim() != 3 {
        return Err(Error::InvalidParameter(
            "the unit vector a needs N = 3".into(),
        ));
    }
    let x: f64 = state.q.iter().map(|v| v * v).sum();
    if system.radial_terms(x)?.dw != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{} does not have a constant mass",
            system.label()
        )));
    }
    let j = state.angular_momentum();
    if j <= 1e-14 {
        return Err(Error::DegenerateOrbit("zero angular momentum".into()));
    }
    let phi = orbital_angle(system, state)?;
    Ok(unit_vector_at_angle(state, phi))
}

/// The same construction for an externally supplied angle `φ`.
pub fn unit_vector_at_angle(state: &PhaseState, phi: f64) -> [f64; 3] {
    let q = &state.q;
    let r = state.rho();
    let j = state.angular_momentum();
    let qp = cross(q, &state.p);
    let qqp = cross(q, &qp);
    let (s, c) = phi.sin_cos();
    [
        c * q[0] / r + s * qqp[0] / (r * j),
        c * q[1] / r + s * qqp[1] / (r * j),
        c * q[2] / r + s * qqp[2] / (r * j),
    ]
}

/// Runge–Lenz vector `p × L − M k q̂` of `H = p²/(2M) − k/|q|`.
pub fn runge_lenz(state: &PhaseState, mass: f64, strength: f64) -> [f64; 3] {
    let l = cross(&state.q, &state.p);
    let pl = cross(&state.p, &l);
    let r = state.rho();
    [
        pl[0] - mass * strength * state.q[0] / r,
        pl[1] - mass * strength * state.q[1] / r,
        pl[2] - mass * strength * state.q[2] / r,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian::finite_difference_gradient;

    fn state3() -> PhaseState {
        PhaseState::new(vec![0.3, -0.5, 0.7], vec![0.4, 0.2, -0.6]).unwrap()
    }

    #[test]
    fn angular_examples() {
        let s = PhaseState::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(angular_integrals(&s, 2).unwrap().0, 1.0);
        let s = PhaseState::new(vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(angular_integrals(&s, 2).unwrap(), (4.0, 0.0));
        assert_eq!(angular_integrals(&s, 3).unwrap(), (4.0, 4.0));
        assert!(matches!(angular_integrals(&s, 4), Err(Error::Index { .. })));
        assert!(matches!(angular_integrals(&s, 1), Err(Error::Index { .. })));
    }

    #[test]
    fn fradkin_trace_and_flat_limit() {
        let s = state3();
        for lambda in [0.0, 0.7, -0.3] {
            let c = fradkin_tensor(lambda, 1.3, &s).unwrap();
            let h = darboux_energy(lambda, 1.3, &s).unwrap();
            assert!((0.5 * c.trace() - h).abs() <= 4.0 * f64::EPSILON * h.abs());
            assert_eq!(c, c.transpose());
        }
        let c = fradkin_tensor(0.0, 1.3, &s).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let flat = s.p[i] * s.p[j] + 1.69 * s.q[i] * s.q[j];
                assert!((c[(i, j)] - flat).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let sys = PdmSystem::darboux(0.6, 1.1, 3).unwrap();
        let s = state3();
        for integral in standard_integrals(&sys) {
            let g = integral.gradient(&sys, &s).unwrap();
            let fd = finite_difference_gradient(|z| integral.value(&sys, z), &s, 1e-5).unwrap();
            for (a, b) in g.to_vec().iter().zip(fd.to_vec()) {
                assert!((a - b).abs() < 1e-8, "{}", integral.name());
            }
        }
    }

    #[test]
    fn canonical_bracket() {
        let s = PhaseState::new(vec![0.7], vec![-1.3]).unwrap();
        let q2 = |z: &PhaseState| {
            Ok(Gradient {
                dq: vec![2.0 * z.q[0]],
                dp: vec![0.0],
            })
        };
        let p2 = |z: &PhaseState| {
            Ok(Gradient {
                dq: vec![0.0],
                dp: vec![z.p[0]],
            })
        };
        assert_eq!(poisson_bracket(q2, p2, &s).unwrap(), 2.0 * 0.7 * -1.3);
    }

    #[test]
    fn rank_examples() {
        let sys = PdmSystem::darboux(0.4, 1.0, 3).unwrap();
        let s = state3();
        assert_eq!(
            independence_rank(&sys, &independent_set(3, 0), &s).unwrap(),
            5
        );
        assert_eq!(
            independence_rank(&sys, &[Integral::Energy, Integral::Energy], &s).unwrap(),
            1
        );
    }

    #[test]
    fn unit_vector_is_unit() {
        let s = state3();
        let a = unit_vector_at_angle(&s, 0.83);
        let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        assert!((norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unit_vector_needs_constant_mass() {
        let sys = PdmSystem::darboux(0.4, 1.0, 3).unwrap();
        assert!(fradkin_unit_vector(&sys, &state3()).is_err());
        let flat = PdmSystem::flat_kepler(1.0, 3).unwrap();
        let radial = PhaseState::new(vec![1.0, 0.0, 0.0], vec![0.3, 0.0, 0.0]).unwrap();
        assert!(matches!(
            fradkin_unit_vector(&flat, &radial),
            Err(Error::DegenerateOrbit(_))
        ));
    }

    #[test]
    fn kepler_unit_vector_is_runge_lenz_direction() {
        let sys = PdmSystem::flat_kepler(1.0, 3).unwrap();
        let s = PhaseState::new(vec![0.9, 0.2, -0.1], vec![-0.1, 0.8, 0.3]).unwrap();
        let a = fradkin_unit_vector(&sys, &s).unwrap();
        let rl = runge_lenz(&s, 1.0, 1.0);
        let n = (rl[0] * rl[0] + rl[1] * rl[1] + rl[2] * rl[2]).sqrt();
        for i in 0..3 {
            assert!((a[i] - rl[i] / n).abs() < 1e-8, "{a:?} vs {rl:?}");
        }
    }
}
