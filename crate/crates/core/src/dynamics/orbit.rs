//! Radial analysis in the Bertrand chart, where the motion obeys
//! `½ h(r)² ṙ² + U(r) = E` with `U(r) = L²/(2r²) + V(r)`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::dynamics::integrator::DormandPrince;
use crate::dynamics::{IntegratorStats, PhaseState};
use crate::error::{Error, Result};
use crate::geometry::Interval;
use crate::numerics::{brent, Quadrature};
use crate::pdm_map::{PdmSystem, RadialChart};

fn chart_of(system: &PdmSystem) -> Result<&RadialChart> {
    system
        .chart()
        .ok_or_else(|| Error::Regime(format!("{} has no Bertrand radial chart", system.label())))
}

/// Circular orbit at angular momentum `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircularOrbit {
    pub angular_momentum: f64,
    pub r: f64,
    pub rho: f64,
    pub energy: f64,
    pub stable: bool,
    /// `U″(r_c)`.
    pub curvature: f64,
    /// Period of small radial oscillations, `2π h(r_c) / √U″(r_c)`.
    pub small_oscillation_period: f64,
}

fn scan_points(interval: Interval) -> Vec<f64> {
    let lo = if interval.lo > 0.0 {
        interval.lo * (1.0 + 1e-9)
    } else {
        1e-6
    };
    let hi = if interval.hi.is_finite() {
        interval.hi * (1.0 - 1e-9)
    } else {
        1e6
    };
    let n = 2000;
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Solve `U′(r) = 0` by a logarithmic scan and Brent refinement. A stable
/// root (minimum) is preferred over an unstable one.
pub fn circular_orbit(system: &PdmSystem, l: f64) -> Result<CircularOrbit> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "angular momentum {l} must be positive"
        )));
    }
    let chart = chart_of(system)?;
    let du = |r: f64| chart.effective_derivative(r, l).unwrap_or(f64::NAN);
    let grid = scan_points(chart.interval());
    let mut unstable = None;
    let mut stable = None;
    for w in grid.windows(2) {
        let (a, b) = (du(w[0]), du(w[1]));
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if a < 0.0 && b >= 0.0 {
            stable = Some((w[0], w[1]));
            break;
        }
        if a > 0.0 && b <= 0.0 && unstable.is_none() {
            unstable = Some((w[0], w[1]));
        }
    }
    let (a, b) = stable.or(unstable).ok_or(Error::NoCircularOrbit { l })?;
    let r = brent(du, a, b, 1e-15 * b)?;
    let step = 1e-5 * r;
    let curvature = (du(r + step) - du(r - step)) / (2.0 * step);
    let h = chart.h(r)?;
    Ok(CircularOrbit {
        angular_momentum: l,
        r,
        rho: chart.map().rho_of_r(r)?,
        energy: chart.effective(r, l)?,
        stable: curvature > 0.0,
        curvature,
        small_oscillation_period: 2.0 * std::f64::consts::PI * h / curvature.sqrt(),
    })
}

/// Bounded radial motion between two turning points.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOrbit {
    chart: RadialChart,
    pub energy: f64,
    pub angular_momentum: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub circular: CircularOrbit,
    // (U', U'') of the effective potential at r_min and r_max
    edges: [(f64, f64); 2],
}

/// Summary of one bounded orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitAnalysis {
    pub energy: f64,
    pub angular_momentum: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub apsidal_angle: f64,
    pub radial_period: f64,
}

impl RadialOrbit {
    pub fn new(system: &PdmSystem, energy: f64, l: f64) -> Result<Self> {
        let chart = chart_of(system)?.clone();
        let circular = circular_orbit(system, l)?;
        let no_points = Error::NoTurningPoints { energy, l };
        if !circular.stable {
            return Err(no_points);
        }
        let rc = circular.r;
        let excess = energy - circular.energy;
        if excess < 0.0 {
            return Err(no_points);
        }
        if excess <= 1e-14 * energy.abs().max(1.0) {
            return Err(Error::DegenerateOrbit(format!(
                "E = {energy} is the circular-orbit energy at L = {l}"
            )));
        }
        let g = |r: f64| {
            chart
                .effective(r, l)
                .map(|u| energy - u)
                .unwrap_or(f64::NAN)
        };
        let Interval { lo, hi } = chart.interval();

        let mut inner = rc;
        let mut prev = rc;
        let mut found = false;
        for _ in 0..200 {
            prev = inner;
            inner = if lo > 0.0 {
                lo + 0.5 * (inner - lo)
            } else {
                0.5 * inner
            };
            let v = g(inner);
            if v < 0.0 {
                found = true;
                break;
            }
            if !v.is_finite() {
                break;
            }
        }
        if !found {
            return Err(no_points);
        }
        let r_min = brent(g, inner, prev, 1e-14 * prev)?;

        let mut outer = rc;
        let mut found = false;
        for _ in 0..200 {
            prev = outer;
            outer = if hi.is_finite() {
                hi - 0.5 * (hi - outer)
            } else {
                2.0 * outer
            };
            if outer > 1e12 {
                break;
            }
            let v = g(outer);
            if v < 0.0 {
                found = true;
                break;
            }
            if !v.is_finite() {
                break;
            }
        }
        if !found {
            return Err(no_points);
        }
        let r_max = brent(g, prev, outer, 1e-14 * outer)?;

        let edge = |r: f64| -> Result<(f64, f64)> {
            let d = 1e-5 * (r_max - r_min);
            let slope = chart.effective_derivative(r, l)?;
            let curvature = (chart.effective_derivative(r + d, l)?
                - chart.effective_derivative(r - d, l)?)
                / (2.0 * d);
            Ok((slope, curvature))
        };
        let edges = [edge(r_min)?, edge(r_max)?];
        Ok(Self {
            chart,
            energy,
            angular_momentum: l,
            r_min,
            r_max,
            circular,
            edges,
        })
    }

    /// Orbit through a phase-space point.
    pub fn through(system: &PdmSystem, state: &PhaseState) -> Result<Self> {
        let energy = system.hamiltonian(&state.q, &state.p)?;
        Self::new(system, energy, state.angular_momentum())
    }

    fn width(&self) -> f64 {
        self.r_max - self.r_min
    }

    // r(θ) and the regularized factor 1/√(2Q), Q = (E − U)/((r − r₋)(r₊ − r)).
    // Inside a thin layer at either turning point Q comes from a Taylor
    // expansion, since E − U loses all its digits there.
    fn regularized(&self, theta: f64) -> Result<(f64, f64)> {
        const LAYER: f64 = 1e-5;
        let (s, c) = theta.sin_cos();
        let s2 = s * s;
        let c2 = c * c;
        let w = self.width();
        let l = self.angular_momentum;
        let r = if s2 <= c2 {
            self.r_min + w * s2
        } else {
            self.r_max - w * c2
        };
        let q = if s2 < LAYER {
            let (d1, d2) = self.edges[0];
            let delta = w * s2;
            (-d1 - 0.5 * d2 * delta) / (w - delta)
        } else if c2 < LAYER {
            let (d1, d2) = self.edges[1];
            let eps = w * c2;
            (d1 - 0.5 * d2 * eps) / (w - eps)
        } else {
            (self.energy - self.chart.effective(r, l)?) / (w * w * s2 * c2)
        };
        if !(q > 0.0) {
            return Err(Error::Quadrature(format!(
                "non-positive kinetic factor at r = {r}"
            )));
        }
        Ok((r, 1.0 / (2.0 * q).sqrt()))
    }

    // Rounding in E − U sets a noise floor that grows like 1/width² for
    // nearly circular orbits; the tolerance follows it.
    fn quadrature(&self) -> Quadrature {
        let mid = 0.5 * (self.r_min + self.r_max);
        let depth = (self.energy
            - self
                .chart
                .effective(mid, self.angular_momentum)
                .unwrap_or(0.0))
        .abs();
        let scale = self.energy.abs().max(depth);
        let noise = if depth > 0.0 {
            f64::EPSILON * scale / depth
        } else {
            1.0
        };
        let mut quad = Quadrature::default();
        quad.abs_tol = quad.abs_tol.max(100.0 * noise);
        quad
    }

    fn integrate_theta<F: Fn(f64, f64) -> f64>(&self, weight: F, upper: f64) -> Result<f64> {
        let quad = self.quadrature();
        let value = quad.integrate(
            |theta| match self.regularized(theta) {
                Ok((r, k)) => weight(r, k),
                Err(_) => f64::NAN,
            },
            0.0,
            upper,
        )?;
        Ok(value)
    }

    /// `Δφ = ∫ L h / (r² √(2(E − U))) dr` from `r_min` to `r_max`.
    pub fn apsidal_angle(&self) -> Result<f64> {
        let l = self.angular_momentum;
        self.integrate_theta(
            |r, k| 2.0 * l * self.chart.h(r).unwrap_or(f64::NAN) * k / (r * r),
            FRAC_PI_2,
        )
    }

    /// `T = 2 ∫ h / √(2(E − U)) dr`.
    pub fn radial_period(&self) -> Result<f64> {
        Ok(2.0
            * self.integrate_theta(
                |r, k| 2.0 * self.chart.h(r).unwrap_or(f64::NAN) * k,
                FRAC_PI_2,
            )?)
    }

    /// Angle swept since the last pericenter, in `[0, 2Δφ)`.
    pub fn angle_from_pericenter(&self, r: f64, outgoing: bool) -> Result<f64> {
        let fraction = ((r - self.r_min) / self.width()).clamp(0.0, 1.0);
        let theta = fraction.sqrt().asin();
        let l = self.angular_momentum;
        let partial = self.integrate_theta(
            |r, k| 2.0 * l * self.chart.h(r).unwrap_or(f64::NAN) * k / (r * r),
            theta,
        )?;
        if outgoing {
            Ok(partial)
        } else {
            Ok(2.0 * self.apsidal_angle()? - partial)
        }
    }

    pub fn analysis(&self) -> Result<OrbitAnalysis> {
        Ok(OrbitAnalysis {
            energy: self.energy,
            angular_momentum: self.angular_momentum,
            r_min: self.r_min,
            r_max: self.r_max,
            apsidal_angle: self.apsidal_angle()?,
            radial_period: self.radial_period()?,
        })
    }

    /// Phase state at pericenter, moving along the second axis.
    pub fn pericenter_state(&self, dim: usize) -> Result<PhaseState> {
        if dim < 2 {
            return Err(Error::InvalidParameter("orbits need N ≥ 2".into()));
        }
        let rho = self.chart.map().rho_of_r(self.r_min)?;
        let mut q = vec![0.0; dim];
        let mut p = vec![0.0; dim];
        q[0] = rho;
        p[1] = self.angular_momentum / rho;
        PhaseState::new(q, p)
    }
}

/// Quadrature apsidal angle for `(E, L)`.
pub fn apsidal_angle(system: &PdmSystem, energy: f64, l: f64) -> Result<f64> {
    RadialOrbit::new(system, energy, l)?.apsidal_angle()
}

/// Radial period of the orbit through `state`; near-circular orbits fall back
/// to the small-oscillation period.
pub fn radial_period_of_state(system: &PdmSystem, state: &PhaseState) -> Result<f64> {
    match RadialOrbit::through(system, state) {
        Ok(orbit) => orbit.radial_period(),
        Err(Error::DegenerateOrbit(_)) => {
            Ok(circular_orbit(system, state.angular_momentum())?.small_oscillation_period)
        }
        Err(e) => Err(e),
    }
}

/// Angle from the last pericenter as a function of the phase point.
pub fn orbital_angle(system: &PdmSystem, state: &PhaseState) -> Result<f64> {
    let orbit = RadialOrbit::through(system, state)?;
    let r = chart_of(system)?.map().r_of_rho(state.rho())?;
    orbit.angle_from_pericenter(r, state.q_dot_p() >= 0.0)
}

/// Apsidal angle measured on a trajectory: integrate from pericenter to the
/// next zero of `q·p` and unwrap the in-plane polar angle.
pub fn measured_apsidal_angle(system: &PdmSystem, energy: f64, l: f64) -> Result<f64> {
    let orbit = RadialOrbit::new(system, energy, l)?;
    let start = orbit.pericenter_state(system.dim())?;
    let period = orbit.radial_period()?;
    let dp = DormandPrince {
        rtol: 1e-12,
        atol: 1e-14,
        ..DormandPrince::default()
    };
    let mut stats = IntegratorStats::default();
    let chunk = period / 256.0;
    let mut step = chunk;
    let polar = |z: &[f64]| z[1].atan2(z[0]);
    let n = system.dim();
    let radial = |z: &[f64]| (0..n).map(|i| z[i] * z[n + i]).sum::<f64>();

    let mut t = 0.0;
    let mut z = start.to_vec();
    let mut angle = 0.0;
    let mut prev_polar = polar(&z);
    for _ in 0..(4 * 256) {
        let next = dp.advance(system, &z, t, t + chunk, &mut step, &mut stats)?;
        if radial(&next) <= 0.0 {
            // refine the zero of q·p in (t, t + chunk) by the Illinois method
            let (mut ta, mut tb) = (t, t + chunk);
            let (mut ga, mut gb) = (radial(&z), radial(&next));
            let mut zb = next;
            let mut side = 0;
            for _ in 0..100 {
                if (tb - ta).abs() <= 1e-13 * period {
                    break;
                }
                let tm = (ta * gb - tb * ga) / (gb - ga);
                let mut h = step.min(tm - t);
                let zm = dp.advance(system, &z, t, tm, &mut h, &mut stats)?;
                let gm = radial(&zm);
                if gm > 0.0 {
                    ta = tm;
                    ga = gm;
                    if side == -1 {
                        gb *= 0.5;
                    }
                    side = -1;
                } else {
                    tb = tm;
                    gb = gm;
                    zb = zm;
                    if side == 1 {
                        ga *= 0.5;
                    }
                    side = 1;
                }
                if gm == 0.0 {
                    break;
                }
            }
            let mut d = polar(&zb) - prev_polar;
            d -= (d / std::f64::consts::TAU).round() * std::f64::consts::TAU;
            return Ok(angle + d);
        }
        let mut d = polar(&next) - prev_polar;
        d -= (d / std::f64::consts::TAU).round() * std::f64::consts::TAU;
        angle += d;
        prev_polar = polar(&next);
        z = next;
        t += chunk;
    }
    Err(Error::Convergence(
        "no apocenter within four radial periods".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BertrandFamily;
    use std::f64::consts::PI;

    #[test]
    fn kepler_circular_orbit() {
        let s = PdmSystem::flat_kepler(1.0, 3).unwrap();
        let c = circular_orbit(&s, 1.0).unwrap();
        assert!((c.r - 1.0).abs() < 1e-12);
        assert!((c.rho - 1.0).abs() < 1e-12);
        assert!(c.stable);
        assert!((c.energy + 0.5).abs() < 1e-12);
        assert!((c.small_oscillation_period - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn oscillator_circular_orbit() {
        let s = PdmSystem::flat_oscillator(1.0, 2).unwrap();
        let c = circular_orbit(&s, 1.0).unwrap();
        assert!((c.r - 1.0).abs() < 1e-12 && c.stable);
    }

    #[test]
    fn darboux_circular_orbits_exist() {
        let s = PdmSystem::darboux(1.0, 1.0, 3).unwrap();
        for l in [0.05, 0.3, 1.0, 4.0, 20.0] {
            assert!(circular_orbit(&s, l).unwrap().stable, "L = {l}");
        }
    }

    #[test]
    fn kepler_turning_points_and_angle() {
        let s = PdmSystem::flat_kepler(1.0, 3).unwrap();
        // E = −0.3, L = 1: r± = (1 ± √(1 − 0.6)) / 0.6
        let o = RadialOrbit::new(&s, -0.3, 1.0).unwrap();
        let disc = (1.0f64 - 0.6).sqrt();
        assert!((o.r_min - (1.0 - disc) / 0.6).abs() < 1e-12);
        assert!((o.r_max - (1.0 + disc) / 0.6).abs() < 1e-12);
        assert!((o.apsidal_angle().unwrap() - PI).abs() < 1e-8);
        // Kepler's third law with a = −1/(2E)
        let a: f64 = 1.0 / 0.6;
        assert!((o.radial_period().unwrap() - 2.0 * PI * a.powf(1.5)).abs() < 1e-8);
    }

    #[test]
    fn oscillator_angle() {
        let s = PdmSystem::flat_oscillator(1.0, 2).unwrap();
        let a = apsidal_angle(&s, 2.0, 1.0).unwrap();
        assert!((a - PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn unbounded_and_circular_cases() {
        let s = PdmSystem::flat_kepler(1.0, 3).unwrap();
        assert!(matches!(
            RadialOrbit::new(&s, 0.1, 1.0),
            Err(Error::NoTurningPoints { .. })
        ));
        assert!(matches!(
            RadialOrbit::new(&s, -0.6, 1.0),
            Err(Error::NoTurningPoints { .. })
        ));
        assert!(matches!(
            RadialOrbit::new(&s, -0.5, 1.0),
            Err(Error::DegenerateOrbit(_))
        ));
    }

    #[test]
    fn darboux_radial_period_oracle() {
        // T = (π/Ω)(1 + λE/Ω²), Ω² = ω² − 2λE
        let lambda = 0.3;
        let s = PdmSystem::darboux(lambda, 1.0, 3).unwrap();
        for (e, l) in [(0.4, 0.3), (0.8, 0.5)] {
            let o = RadialOrbit::new(&s, e, l).unwrap();
            let big_omega = (1.0f64 - 2.0 * lambda * e).sqrt();
            let expected = PI / big_omega * (1.0 + lambda * e / (big_omega * big_omega));
            assert!((o.radial_period().unwrap() - expected).abs() < 1e-8);
            assert!((o.apsidal_angle().unwrap() - PI / 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn measured_angle_matches_quadrature() {
        let s =
            PdmSystem::type_i(BertrandFamily::type_i(2, 1, 0.2, 0.0).unwrap(), -1.0, 3).unwrap();
        let c = circular_orbit(&s, 1.0).unwrap();
        let e = c.energy + 0.05;
        let q = apsidal_angle(&s, e, 1.0).unwrap();
        let m = measured_apsidal_angle(&s, e, 1.0).unwrap();
        assert!((q - PI / 2.0).abs() < 1e-8, "{q}");
        assert!((m - q).abs() < 1e-6, "{m} vs {q}");
    }

    #[test]
    fn orbital_angle_walks_around() {
        let s = PdmSystem::flat_kepler(1.0, 3).unwrap();
        let o = RadialOrbit::new(&s, -0.3, 1.0).unwrap();
        let peri = o.pericenter_state(3).unwrap();
        assert!(orbital_angle(&s, &peri).unwrap().abs() < 1e-10);
        // a point at apocenter
        let apo =
            PhaseState::new(vec![-o.r_max, 0.0, 0.0], vec![0.0, -1.0 / o.r_max, 0.0]).unwrap();
        assert!((orbital_angle(&s, &apo).unwrap() - PI).abs() < 1e-8);
    }
}
