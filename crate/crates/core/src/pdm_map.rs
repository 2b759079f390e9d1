//! Conformal change of radial variable `r ↔ ρ = |q|` and the resulting
//! position-dependent-mass Hamiltonians `H = p² / (2M(|q|)) + V(|q|)`.
//!
//! The map satisfies `d ln ρ / dr = h(r) / r`, so the metric becomes
//! `f(ρ)² dq²` with `f = r/ρ` and `M = m₀ f²`.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BertrandFamily, FamilyKind, Interval, RadialProfile};
use crate::numerics::{brent, Quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Calibration {
    /// `ρ / r^c → 1` as `r → 0`, where `c = h(0⁺)`.
    Origin { exponent: f64 },
    /// `ρ(r₀) = 1`.
    Reference { r0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Formula {
    TypeI,
    Darboux { lambda: f64 },
    Quadrature(Calibration),
}

/// Monotone map between the Bertrand radius `r` and `ρ = |q|` on one
/// validity interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMap {
    profile: RadialProfile,
    interval: Interval,
    formula: Formula,
    log_offset: f64,
}

impl CoordinateMap {
    /// Closed form for Type I, quadrature for Type II.
    pub fn new(profile: RadialProfile) -> Self {
        if profile.family().kind == FamilyKind::TypeI {
            let interval = profile.domain()[0];
            Self {
                profile,
                interval,
                formula: Formula::TypeI,
                log_offset: 0.0,
            }
        } else {
            Self::quadrature(profile)
        }
    }

    /// Quadrature map regardless of family.
    ///
    /// The additive constant is fixed by `ρ/r^c → 1` at the origin when the
    /// domain reaches `r = 0` with `c = h(0⁺) > 0`, and by `ρ(r₀) = 1` at
    /// the profile's default anchor otherwise.
    pub fn quadrature(profile: RadialProfile) -> Self {
        let interval = profile.domain()[0];
        let calibration = match profile.h_at_origin() {
            Some(c) if c > 0.0 => Calibration::Origin { exponent: c },
            _ => Calibration::Reference {
                r0: profile.default_anchor(),
            },
        };
        Self {
            profile,
            interval,
            formula: Formula::Quadrature(calibration),
            log_offset: 0.0,
        }
    }

    /// Closed-form Darboux III map `r = ρ √(1 + λρ²)`.
    pub fn darboux(lambda: f64) -> Result<Self> {
        let profile = crate::geometry::darboux_profile(lambda)?;
        let interval = profile.domain()[0];
        Ok(Self {
            profile,
            interval,
            formula: Formula::Darboux { lambda },
            log_offset: 0.0,
        })
    }

    /// Shift `ln ρ` by a constant (rescales `ρ`).
    pub fn with_log_offset(mut self, offset: f64) -> Self {
        self.log_offset = offset;
        self
    }

    pub fn kind(&self) -> MapKind {
        match self.formula {
            Formula::Quadrature(_) => MapKind::Quadrature,
            _ => MapKind::ClosedForm,
        }
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn log_offset(&self) -> f64 {
        self.log_offset
    }

    fn check_r(&self, r: f64) -> Result<()> {
        if self.interval.contains(r) {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "r",
                value: r,
            })
        }
    }

    pub fn ln_rho_of_r(&self, r: f64) -> Result<f64> {
        self.check_r(r)?;
        let base = match self.formula {
            Formula::TypeI => {
                let f = self.profile.family();
                let s = (1.0 + f.k * r * r).sqrt();
                f.ratio() * (r.ln() - (1.0 + s).ln())
            }
            Formula::Darboux { lambda } => {
                // ρ² = (√(1+4λr²) − 1)/(2λ) = 2r² / (1 + √(1+4λr²))
                let s = (1.0 + 4.0 * lambda * r * r).sqrt();
                r.ln() + 0.5 * (2.0 / (1.0 + s)).ln()
            }
            Formula::Quadrature(cal) => self.quadrature_ln_rho(cal, r)?,
        };
        Ok(base + self.log_offset)
    }

    fn quadrature_ln_rho(&self, cal: Calibration, r: f64) -> Result<f64> {
        let quad = Quadrature {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_subdivisions: 4000,
        };
        let h = |s: f64| self.profile.h(s).unwrap_or(f64::NAN);
        match cal {
            Calibration::Origin { exponent } => {
                let tail = quad.integrate(|s| (h(s) - exponent) / s, 0.0, r)?;
                Ok(exponent * r.ln() + tail)
            }
            Calibration::Reference { r0 } => quad.integrate(|s| h(s) / s, r0, r),
        }
    }

    pub fn rho_of_r(&self, r: f64) -> Result<f64> {
        self.ln_rho_of_r(r).map(f64::exp)
    }

    /// Inverse map. Closed forms are evaluated directly; quadrature maps are
    /// inverted by bracketing and Brent refinement.
    pub fn r_of_rho(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain {
                what: "rho",
                value: rho,
            });
        }
        let base = rho * (-self.log_offset).exp();
        match self.formula {
            Formula::TypeI => {
                let f = self.profile.family();
                let t = base.powf(1.0 / f.ratio());
                let denom = 1.0 / t - f.k * t;
                if !(denom > 0.0) {
                    return Err(Error::Domain {
                        what: "rho",
                        value: rho,
                    });
                }
                Ok(2.0 / denom)
            }
            Formula::Darboux { lambda } => {
                let g = 1.0 + lambda * base * base;
                if !(g > 0.0) {
                    return Err(Error::Domain {
                        what: "rho",
                        value: rho,
                    });
                }
                Ok(base * g.sqrt())
            }
            Formula::Quadrature(_) => self.invert(rho),
        }
    }

    fn invert(&self, rho: f64) -> Result<f64> {
        let target = rho.ln();
        let g = |r: f64| self.ln_rho_of_r(r).map(|v| v - target);
        let Interval { lo, hi } = self.interval;
        // keep the first guess away from a possibly singular edge
        let margin = if hi.is_finite() {
            1e-3 * (hi - lo)
        } else {
            0.0
        };
        let inside = |r: f64| r > lo + margin && r < hi - margin;

        let mut guess = rho;
        if !inside(guess) {
            guess = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * lo + 1.0
            };
        }
        let mut a = guess;
        let mut b = guess;
        let mut ga = g(a)?;
        let mut gb = ga;
        for _ in 0..400 {
            if ga <= 0.0 {
                break;
            }
            a = if lo > 0.0 {
                lo + 0.5 * (a - lo)
            } else {
                0.5 * a
            };
            ga = g(a)?;
        }
        for _ in 0..400 {
            if gb >= 0.0 {
                break;
            }
            b = if hi.is_finite() {
                hi - 0.5 * (hi - b)
            } else {
                2.0 * b
            };
            gb = g(b)?;
        }
        if ga > 0.0 || gb < 0.0 {
            return Err(Error::Domain {
                what: "rho",
                value: rho,
            });
        }
        brent(|r| g(r).unwrap_or(f64::NAN), a, b, 1e-15 * b)
    }

    /// `dρ/dr = ρ h / r`.
    pub fn drho_dr(&self, r: f64) -> Result<f64> {
        Ok(self.rho_of_r(r)? * self.profile.h(r)? / r)
    }

    /// Conformal factor `f(ρ) = r/ρ`.
    pub fn conformal_factor(&self, rho: f64) -> Result<f64> {
        Ok(self.r_of_rho(rho)? / rho)
    }

    /// Range of `ρ` covered by the map's `r` interval.
    pub fn rho_range(&self) -> (f64, f64) {
        let Interval { lo, hi } = self.interval;
        let lo_rho = if lo == 0.0 {
            match self.formula {
                Formula::Quadrature(Calibration::Reference { .. }) => self
                    .rho_of_r(1e-300f64.max(1e-12 * self.profile.default_anchor()))
                    .unwrap_or(0.0),
                _ => 0.0,
            }
        } else {
            self.rho_of_r(lo * (1.0 + 1e-12)).unwrap_or(0.0)
        };
        let hi_rho = if hi.is_finite() {
            self.rho_of_r(hi * (1.0 - 1e-12)).unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        };
        (lo_rho, hi_rho)
    }
}

/// Residuals of the three relations `r = ρ f`, `f dρ = h dr`,
/// `dρ/ρ = h dr / r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationResiduals {
    pub position: f64,
    pub differential: f64,
    pub logarithmic: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        self.position.max(self.differential).max(self.logarithmic)
    }
}

/// Check the map relations at `r` with `f` taken from the inverse map and
/// `dρ/dr` from a five-point central difference.
pub fn check_relations(map: &CoordinateMap, r: f64) -> Result<RelationResiduals> {
    let rho = map.rho_of_r(r)?;
    let f = map.r_of_rho(rho)? / rho;
    let h = map.profile().h(r)?;
    let Interval { lo, hi } = map.interval();
    let mut step = 1e-3 * r;
    while !(r - 2.0 * step > lo && r + 2.0 * step < hi) {
        step *= 0.5;
        if step < 1e-12 * r {
            return Err(Error::Domain {
                what: "r",
                value: r,
            });
        }
    }
    let at = |x: f64| map.rho_of_r(x);
    let drho = (-at(r + 2.0 * step)? + 8.0 * at(r + step)? - 8.0 * at(r - step)?
        + at(r - 2.0 * step)?)
        / (12.0 * step);
    Ok(RelationResiduals {
        position: (r - rho * f).abs(),
        differential: (f * drho - h).abs(),
        logarithmic: (drho / rho - h / r).abs(),
    })
}

/// `M(ρ) = m₀ r(ρ)² / ρ²` built on a coordinate map.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    pub map: CoordinateMap,
    pub m0: f64,
}

impl MassFunction {
    pub fn new(map: CoordinateMap) -> Self {
        Self { map, m0: 1.0 }
    }

    pub fn with_m0(mut self, m0: f64) -> Result<Self> {
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "m0 = {m0} must be positive"
            )));
        }
        self.m0 = m0;
        Ok(self)
    }

    pub fn mass(&self, rho: f64) -> Result<f64> {
        let f = self.map.conformal_factor(rho)?;
        Ok(self.m0 * f * f)
    }
}

/// Type I mass `4 / ((ρ^{-n/m} − K ρ^{n/m})² ρ²)`.
pub fn type_i_mass(n: u32, m: u32, k: f64, rho: f64) -> f64 {
    let e = f64::from(n) / f64::from(m);
    let p = rho.powf(-e) - k * rho.powf(e);
    4.0 / (p * p * rho * rho)
}

/// Mass of the constant-curvature Kepler/oscillator in Poincaré coordinates.
pub fn constant_curvature_mass(kappa: f64, rho: f64) -> f64 {
    let g = 1.0 + kappa * rho * rho;
    4.0 / (g * g)
}

/// Darboux III mass `1 + λρ²`.
pub fn darboux_mass(lambda: f64, rho: f64) -> f64 {
    1.0 + lambda * rho * rho
}

/// Inverse mass `W`, potential `U` and their first two derivatives with
/// respect to `x = |q|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTerms {
    pub w: f64,
    pub dw: f64,
    pub d2w: f64,
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
}

/// The Bertrand radial chart of a PDM system: the profile, the map to `ρ`
/// and the potential `V(r) = coupling · (V_family(r) − G) + G`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialChart {
    map: CoordinateMap,
    coupling: f64,
}

impl RadialChart {
    pub fn new(map: CoordinateMap, coupling: f64) -> Self {
        Self { map, coupling }
    }

    pub fn map(&self) -> &CoordinateMap {
        &self.map
    }

    pub fn profile(&self) -> &RadialProfile {
        self.map.profile()
    }

    pub fn family(&self) -> &BertrandFamily {
        self.map.profile().family()
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn interval(&self) -> Interval {
        self.map.interval()
    }

    pub fn h(&self, r: f64) -> Result<f64> {
        self.profile().h(r)
    }

    pub fn potential(&self, r: f64) -> Result<f64> {
        let g = self.family().shift;
        Ok(self.coupling * (self.profile().potential(r)? - g) + g)
    }

    pub fn potential_derivative(&self, r: f64) -> Result<f64> {
        Ok(self.coupling * self.profile().potential_derivative(r)?)
    }

    /// `U(r) = L² / (2r²) + V(r)`.
    pub fn effective(&self, r: f64, l: f64) -> Result<f64> {
        Ok(0.5 * l * l / (r * r) + self.potential(r)?)
    }

    pub fn effective_derivative(&self, r: f64, l: f64) -> Result<f64> {
        Ok(-l * l / (r * r * r) + self.potential_derivative(r)?)
    }
}

/// Closed-form or quadrature-backed PDM system kinds.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PdmKind {
    /// `(p² + ω² q²) / (2(1 + λq²))`; for λ < 0 the interior ball.
    Darboux { lambda: f64, omega: f64 },
    /// λ < 0 exterior region with reversed metric sign:
    /// `(p² + ω² q²) / (2(|λ|q² − 1))`.
    DarbouxExterior { lambda: f64, omega: f64 },
    /// Type I family in its closed-form PDM representation.
    TypeI {
        n: u32,
        m: u32,
        k: f64,
        shift: f64,
        coupling: f64,
    },
    /// Constant-curvature oscillator in Poincaré coordinates:
    /// `(1 + κq²)² p²/8 + A₂ · 2q² / (1 − κq²)²`.
    KappaOscillator { kappa: f64, coupling: f64 },
    /// `p²/2 − k/|q|`.
    FlatKepler { strength: f64 },
    /// Any family through a numerically inverted map.
    Quadrature { coupling: f64 },
}

/// A PDM Hamiltonian in `N` Cartesian dimensions (`m₀ = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct PdmSystem {
    kind: PdmKind,
    dim: usize,
    chart: Option<RadialChart>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidParameter("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

fn power(x: f64, a: f64) -> (f64, f64, f64) {
    let v = x.powf(a);
    (v, a * v / x, a * (a - 1.0) * v / (x * x))
}

impl PdmSystem {
    /// Darboux III oscillator (interior system for λ < 0).
    pub fn darboux(lambda: f64, omega: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !(omega > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need ω > 0 and finite λ, got ω = {omega}, λ = {lambda}"
            )));
        }
        let chart = RadialChart::new(CoordinateMap::darboux(lambda)?, -omega * omega);
        Ok(Self {
            kind: PdmKind::Darboux { lambda, omega },
            dim,
            chart: Some(chart),
        })
    }

    pub fn flat_oscillator(omega: f64, dim: usize) -> Result<Self> {
        Self::darboux(0.0, omega, dim)
    }

    /// Darboux exterior system, λ < 0, `|q| > 1/√|λ|`.
    pub fn darboux_exterior(lambda: f64, omega: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !(lambda < 0.0) || !(omega > 0.0) {
            return Err(Error::InvalidParameter(
                "exterior Darboux system needs λ < 0 and ω > 0".into(),
            ));
        }
        Ok(Self {
            kind: PdmKind::DarbouxExterior { lambda, omega },
            dim,
            chart: None,
        })
    }

    /// Type I family with potential `coupling · √(r⁻² + K) + G`.
    pub fn type_i(family: BertrandFamily, coupling: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if family.kind != FamilyKind::TypeI {
            return Err(Error::InvalidParameter("expected a Type I family".into()));
        }
        let kind = PdmKind::TypeI {
            n: family.n,
            m: family.m,
            k: family.k,
            shift: family.shift,
            coupling,
        };
        let map = CoordinateMap::new(RadialProfile::new(family)?);
        Ok(Self {
            kind,
            dim,
            chart: Some(RadialChart::new(map, coupling)),
        })
    }

    /// Kepler system on constant curvature κ in Poincaré coordinates:
    /// `(1 + κq²)² p²/8 + A₁ (1 − κq²) / (2|q|)`.
    pub fn kappa_kepler(kappa: f64, a1: f64, dim: usize) -> Result<Self> {
        Self::type_i(BertrandFamily::constant_curvature_kepler(kappa)?, a1, dim)
    }

    /// Oscillator on constant curvature κ in Poincaré coordinates.
    pub fn kappa_oscillator(kappa: f64, a2: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let profile = RadialProfile::new(BertrandFamily::constant_curvature_oscillator(kappa)?)?;
        // Poincaré normalization ρ ~ r/2 near the origin
        let map = CoordinateMap::quadrature(profile).with_log_offset(-LN_2);
        Ok(Self {
            kind: PdmKind::KappaOscillator {
                kappa,
                coupling: a2,
            },
            dim,
            chart: Some(RadialChart::new(map, -a2)),
        })
    }

    /// Euclidean Kepler problem with unit mass, `p²/2 − k/|q|`.
    pub fn flat_kepler(strength: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let profile = RadialProfile::new(BertrandFamily::euclidean_kepler())?;
        let map = CoordinateMap::new(profile).with_log_offset(LN_2);
        Ok(Self {
            kind: PdmKind::FlatKepler { strength },
            dim,
            chart: Some(RadialChart::new(map, -strength)),
        })
    }

    /// Any family through the generic map of [`CoordinateMap::new`]:
    /// closed form for Type I, quadrature for Type II.
    pub fn from_family(family: BertrandFamily, coupling: f64, dim: usize) -> Result<Self> {
        match family.kind {
            FamilyKind::TypeI => Self::type_i(family, coupling, dim),
            FamilyKind::TypeII => {
                check_dim(dim)?;
                let map = CoordinateMap::quadrature(RadialProfile::new(family)?);
                Ok(Self {
                    kind: PdmKind::Quadrature { coupling },
                    dim,
                    chart: Some(RadialChart::new(map, coupling)),
                })
            }
        }
    }

    pub fn kind(&self) -> &PdmKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn with_dim(mut self, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        self.dim = dim;
        Ok(self)
    }

    /// The Bertrand radial chart, absent for the exterior Darboux system.
    pub fn chart(&self) -> Option<&RadialChart> {
        self.chart.as_ref()
    }

    pub fn label(&self) -> String {
        match &self.kind {
            PdmKind::Darboux { lambda, omega } => format!("darboux lambda={lambda} omega={omega}"),
            PdmKind::DarbouxExterior { lambda, omega } => {
                format!("darboux-exterior lambda={lambda} omega={omega}")
            }
            PdmKind::TypeI { n, m, k, .. } => format!("type-I n={n} m={m} K={k}"),
            PdmKind::KappaOscillator { kappa, .. } => format!("kappa-oscillator kappa={kappa}"),
            PdmKind::FlatKepler { strength } => format!("flat-kepler k={strength}"),
            PdmKind::Quadrature { .. } => self
                .chart
                .as_ref()
                .map(|c| c.family().label.clone())
                .unwrap_or_default(),
        }
    }

    /// Open range of `|q|`; the lower end is attained when the origin is a
    /// regular point (see [`origin_regular`](Self::origin_regular)).
    pub fn rho_limits(&self) -> (f64, f64) {
        match &self.kind {
            PdmKind::Darboux { lambda, .. } => {
                if *lambda < 0.0 {
                    (0.0, 1.0 / (-lambda).sqrt())
                } else {
                    (0.0, f64::INFINITY)
                }
            }
            PdmKind::DarbouxExterior { lambda, .. } => (1.0 / (-lambda).sqrt(), f64::INFINITY),
            PdmKind::TypeI { n, m, k, .. } => {
                if *k > 0.0 {
                    (0.0, k.powf(-f64::from(*m) / (2.0 * f64::from(*n))))
                } else {
                    (0.0, f64::INFINITY)
                }
            }
            PdmKind::KappaOscillator { kappa, .. } => {
                if *kappa == 0.0 {
                    (0.0, f64::INFINITY)
                } else {
                    (0.0, 1.0 / kappa.abs().sqrt())
                }
            }
            PdmKind::FlatKepler { .. } => (0.0, f64::INFINITY),
            PdmKind::Quadrature { .. } => self
                .chart
                .as_ref()
                .map(|c| c.map().rho_range())
                .unwrap_or((0.0, f64::INFINITY)),
        }
    }

    /// Whether `q = 0` belongs to the configuration space.
    pub fn origin_regular(&self) -> bool {
        matches!(
            self.kind,
            PdmKind::Darboux { .. } | PdmKind::KappaOscillator { .. }
        )
    }

    pub fn contains_rho(&self, rho: f64) -> bool {
        let (lo, hi) = self.rho_limits();
        rho < hi && (rho > lo || (rho == 0.0 && lo == 0.0 && self.origin_regular()))
    }

    /// Distance from `rho` to the nearest domain boundary or singular point.
    pub fn boundary_distance(&self, rho: f64) -> f64 {
        let (lo, hi) = self.rho_limits();
        let lower = if lo == 0.0 && self.origin_regular() {
            f64::INFINITY
        } else {
            rho - lo
        };
        lower.min(hi - rho)
    }

    /// `W = 1/M`, `U` and derivatives in `x = |q|²`.
    pub fn radial_terms(&self, x: f64) -> Result<RadialTerms> {
        let rho = x.sqrt();
        if !self.contains_rho(rho) {
            return Err(Error::Domain {
                what: "|q|",
                value: rho,
            });
        }
        let terms = match &self.kind {
            PdmKind::Darboux { lambda, omega } => {
                let g = 1.0 + lambda * x;
                let half_w2 = 0.5 * omega * omega;
                RadialTerms {
                    w: 1.0 / g,
                    dw: -lambda / (g * g),
                    d2w: 2.0 * lambda * lambda / (g * g * g),
                    u: half_w2 * x / g,
                    du: half_w2 / (g * g),
                    d2u: -2.0 * half_w2 * lambda / (g * g * g),
                }
            }
            PdmKind::DarbouxExterior { lambda, omega } => {
                let a = -lambda;
                let g = a * x - 1.0;
                let half_w2 = 0.5 * omega * omega;
                RadialTerms {
                    w: 1.0 / g,
                    dw: -a / (g * g),
                    d2w: 2.0 * a * a / (g * g * g),
                    u: half_w2 * x / g,
                    du: -half_w2 / (g * g),
                    d2u: 2.0 * half_w2 * a / (g * g * g),
                }
            }
            PdmKind::TypeI {
                n,
                m,
                k,
                shift,
                coupling,
            } => {
                // t = ρ^{n/m} = x^e;  W = x (x^{-e} − K x^e)² / 4
                let e = f64::from(*n) / (2.0 * f64::from(*m));
                let (a0, a1, a2) = power(x, 1.0 - 2.0 * e);
                let (c0, c1, c2) = power(x, 1.0 + 2.0 * e);
                let (n0, n1, n2) = power(x, -e);
                let (p0, p1, p2) = power(x, e);
                RadialTerms {
                    w: 0.25 * (a0 - 2.0 * k * x + k * k * c0),
                    dw: 0.25 * (a1 - 2.0 * k + k * k * c1),
                    d2w: 0.25 * (a2 + k * k * c2),
                    u: 0.5 * coupling * (n0 + k * p0) + shift,
                    du: 0.5 * coupling * (n1 + k * p1),
                    d2u: 0.5 * coupling * (n2 + k * p2),
                }
            }
            PdmKind::KappaOscillator { kappa, coupling } => {
                let s = 1.0 + kappa * x;
                let g = 1.0 - kappa * x;
                let g3 = g * g * g;
                RadialTerms {
                    w: 0.25 * s * s,
                    dw: 0.5 * kappa * s,
                    d2w: 0.5 * kappa * kappa,
                    u: 2.0 * coupling * x / (g * g),
                    du: 2.0 * coupling * s / g3,
                    d2u: 2.0 * coupling * kappa * (4.0 + 2.0 * kappa * x) / (g3 * g),
                }
            }
            PdmKind::FlatKepler { strength } => {
                let (v0, v1, v2) = power(x, -0.5);
                RadialTerms {
                    w: 1.0,
                    dw: 0.0,
                    d2w: 0.0,
                    u: -strength * v0,
                    du: -strength * v1,
                    d2u: -strength * v2,
                }
            }
            PdmKind::Quadrature { .. } => {
                let chart = self
                    .chart
                    .as_ref()
                    .expect("quadrature systems carry a chart");
                let first = |x: f64| -> Result<(f64, f64, f64, f64)> {
                    let r = chart.map().r_of_rho(x.sqrt())?;
                    let h = chart.h(r)?;
                    let w = x / (r * r);
                    let dw = (1.0 - 1.0 / h) / (r * r);
                    let u = chart.potential(r)?;
                    let du = chart.potential_derivative(r)? * r / (2.0 * x * h);
                    Ok((w, dw, u, du))
                };
                let (w, dw, u, du) = first(x)?;
                let step = 1e-5 * x;
                let (_, dw_p, _, du_p) = first(x + step)?;
                let (_, dw_m, _, du_m) = first(x - step)?;
                RadialTerms {
                    w,
                    dw,
                    d2w: (dw_p - dw_m) / (2.0 * step),
                    u,
                    du,
                    d2u: (du_p - du_m) / (2.0 * step),
                }
            }
        };
        Ok(terms)
    }

    /// `M(|q|)`.
    pub fn mass(&self, rho: f64) -> Result<f64> {
        Ok(1.0 / self.radial_terms(rho * rho)?.w)
    }

    /// `V(|q|)`.
    pub fn potential(&self, rho: f64) -> Result<f64> {
        Ok(self.radial_terms(rho * rho)?.u)
    }

    /// `H(q, p) = p² / (2M(|q|)) + V(|q|)`.
    pub fn hamiltonian(&self, q: &[f64], p: &[f64]) -> Result<f64> {
        if q.len() != self.dim || p.len() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "state dimension {} / {} does not match system dimension {}",
                q.len(),
                p.len(),
                self.dim
            )));
        }
        let x: f64 = q.iter().map(|v| v * v).sum();
        let p2: f64 = p.iter().map(|v| v * v).sum();
        let t = self.radial_terms(x)?;
        Ok(0.5 * t.w * p2 + t.u)
    }
}

/// Free-function form of [`PdmSystem::mass`].
pub fn mass_of_rho(system: &PdmSystem, rho: f64) -> Result<f64> {
    system.mass(rho)
}

/// Free-function form of [`PdmSystem::hamiltonian`].
pub fn pdm_hamiltonian(system: &PdmSystem, q: &[f64], p: &[f64]) -> Result<f64> {
    system.hamiltonian(q, p)
}
