//! Bertrand metric profiles `h(r)`, their potentials, radial Green functions
//! and the intrinsic Kepler/oscillator potentials built from them.
//!
//! The metric is `g = h(r)² dr² + r² dΩ²`. Type I systems carry
//! `h = m / (n √(1 + K r²))` with `V = √(r⁻² + K) + G`; Type II systems carry
//! `h² = 2m² X / (n² Δ)` with `Δ = (1 − D r²)² − K r⁴`,
//! `X = 1 − D r² ± √Δ` and `V = G ∓ r² / X`.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bisect_predicate, Quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
}

/// Sign choice of the Type II square root (`±` in `h`, `∓` in `V`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// One fully parameterized Bertrand system.
///
/// `n` and `m` are coprime positive integers; `k`, `d` and `shift` are the
/// real constants K, D and G (D is zero for Type I).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BertrandFamily {
    pub kind: FamilyKind,
    pub n: u32,
    pub m: u32,
    pub k: f64,
    pub d: f64,
    pub shift: f64,
    pub branch: Branch,
    pub label: String,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_integers(n: u32, m: u32) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "n and m must be positive, got n = {n}, m = {m}"
        )));
    }
    if gcd(n, m) != 1 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} and m = {m} are not coprime"
        )));
    }
    Ok(())
}

fn check_finite(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{name} = {v} is not finite"
            )));
        }
    }
    Ok(())
}

impl BertrandFamily {
    pub fn type_i(n: u32, m: u32, k: f64, shift: f64) -> Result<Self> {
        check_integers(n, m)?;
        check_finite(&[("K", k), ("G", shift)])?;
        Ok(Self {
            kind: FamilyKind::TypeI,
            n,
            m,
            k,
            d: 0.0,
            shift,
            branch: Branch::Plus,
            label: format!("type-I n={n} m={m} K={k}"),
        })
    }

    /// Type II family. Rejects parameter sets whose `h²` is nowhere positive.
    pub fn type_ii(n: u32, m: u32, k: f64, d: f64, shift: f64, branch: Branch) -> Result<Self> {
        check_integers(n, m)?;
        check_finite(&[("K", k), ("D", d), ("G", shift)])?;
        let family = Self {
            kind: FamilyKind::TypeII,
            n,
            m,
            k,
            d,
            shift,
            branch,
            label: format!("type-II n={n} m={m} K={k} D={d} {branch:?}"),
        };
        if validity_intervals(&family).is_empty() {
            return Err(Error::InvalidParameter(format!(
                "{}: h² is nowhere positive",
                family.label
            )));
        }
        Ok(family)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Flat-space Kepler system (`h ≡ 1`, `V = 1/r`).
    pub fn euclidean_kepler() -> Self {
        Self::type_i(1, 1, 0.0, 0.0)
            .expect("valid preset")
            .with_label("euclidean-kepler")
    }

    /// Kepler system on the space of constant sectional curvature `kappa`.
    pub fn constant_curvature_kepler(kappa: f64) -> Result<Self> {
        Ok(Self::type_i(1, 1, -kappa, 0.0)?.with_label(format!("kepler kappa={kappa}")))
    }

    /// Flat isotropic oscillator (`n = 2, m = 1, K = D = 0`).
    pub fn flat_oscillator() -> Self {
        Self::type_ii(2, 1, 0.0, 0.0, 0.0, Branch::Plus)
            .expect("valid preset")
            .with_label("flat-oscillator")
    }

    /// Oscillator on the space of constant sectional curvature `kappa`.
    pub fn constant_curvature_oscillator(kappa: f64) -> Result<Self> {
        Ok(Self::type_ii(2, 1, 0.0, kappa, 0.0, Branch::Plus)?
            .with_label(format!("oscillator kappa={kappa}")))
    }

    /// Darboux III space: `n = 2, m = 1, K = D², D = −2λ`, plus branch.
    pub fn darboux(lambda: f64) -> Result<Self> {
        let d = -2.0 * lambda;
        Ok(Self::type_ii(2, 1, d * d, d, 0.0, Branch::Plus)?
            .with_label(format!("darboux lambda={lambda}")))
    }

    /// `m / n`.
    pub fn ratio(&self) -> f64 {
        f64::from(self.m) / f64::from(self.n)
    }

    /// Angle between successive pericenter and apocenter, `π m / n`.
    pub fn expected_apsidal_angle(&self) -> f64 {
        PI * self.ratio()
    }

    // Type II pieces (Δ, X) with X evaluated without cancellation.
    fn type_ii_parts(&self, r: f64) -> Option<(f64, f64)> {
        let r2 = r * r;
        let one = 1.0 - self.d * r2;
        let quartic = self.k * r2 * r2;
        let delta = 1.0 - 2.0 * self.d * r2 + (self.d * self.d - self.k) * r2 * r2;
        if !(delta > 0.0) {
            return None;
        }
        let sq = delta.sqrt();
        let x = match self.branch {
            Branch::Plus if one >= 0.0 => one + sq,
            Branch::Plus => quartic / (one - sq),
            Branch::Minus if one > 0.0 => quartic / (one + sq),
            Branch::Minus => one - sq,
        };
        (x > 0.0 && x.is_finite()).then_some((delta, x))
    }

    /// `h(r)²`, or `None` where the profile is not a Riemannian metric.
    pub fn h_squared(&self, r: f64) -> Option<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return None;
        }
        let ratio2 = self.ratio() * self.ratio();
        let h2 = match self.kind {
            FamilyKind::TypeI => {
                let s = 1.0 + self.k * r * r;
                (s > 0.0).then(|| ratio2 / s)?
            }
            FamilyKind::TypeII => {
                let (delta, x) = self.type_ii_parts(r)?;
                2.0 * ratio2 * x / delta
            }
        };
        (h2 > 0.0 && h2.is_finite()).then_some(h2)
    }
}

/// Open interval `(lo, hi)`; `hi` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    #[serde(with = "crate::serde_inf")]
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, r: f64) -> bool {
        r > self.lo && r < self.hi
    }
}

const SCAN_MIN: f64 = 1e-8;
const SCAN_MAX: f64 = 1e8;
const SCAN_POINTS: usize = 3201;

/// Intervals of `r > 0` where `h² > 0`, found by a log-spaced scan and
/// refined by bisection to 1e-14 relative.
pub fn validity_intervals(family: &BertrandFamily) -> Vec<Interval> {
    let valid = |r: f64| family.h_squared(r).is_some();
    let log_lo = SCAN_MIN.ln();
    let step = (SCAN_MAX.ln() - log_lo) / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| (log_lo + step * i as f64).exp())
        .collect();

    let mut intervals = Vec::new();
    let mut open: Option<f64> = valid(grid[0]).then_some(0.0);
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        match (valid(a), valid(b)) {
            (false, true) => {
                open = Some(bisect_predicate(valid, a, b, 1e-14));
            }
            (true, false) => {
                let hi = bisect_predicate(valid, a, b, 1e-14);
                if let Some(lo) = open.take() {
                    intervals.push(Interval { lo, hi });
                }
            }
            _ => {}
        }
    }
    if let Some(lo) = open {
        intervals.push(Interval {
            lo,
            hi: f64::INFINITY,
        });
    }
    intervals
}

/// A family together with its validity domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    family: BertrandFamily,
    domain: Vec<Interval>,
}

impl RadialProfile {
    pub fn new(family: BertrandFamily) -> Result<Self> {
        let domain = validity_intervals(&family);
        if domain.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "{}: empty validity domain",
                family.label
            )));
        }
        Ok(Self { family, domain })
    }

    pub fn family(&self) -> &BertrandFamily {
        &self.family
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    /// Interval containing `r`, if any.
    pub fn interval_of(&self, r: f64) -> Option<Interval> {
        self.domain.iter().copied().find(|iv| iv.contains(r))
    }

    pub fn contains(&self, r: f64) -> bool {
        self.family.h_squared(r).is_some()
    }

    pub fn h_squared(&self, r: f64) -> Result<f64> {
        self.family.h_squared(r).ok_or(Error::Domain {
            what: "r",
            value: r,
        })
    }

    pub fn h(&self, r: f64) -> Result<f64> {
        self.h_squared(r).map(f64::sqrt)
    }

    /// Limit of `h` as `r → 0⁺` when the domain reaches the origin.
    pub fn h_at_origin(&self) -> Option<f64> {
        if self.domain[0].lo > 0.0 {
            return None;
        }
        match (self.family.kind, self.family.branch) {
            (FamilyKind::TypeI, _) => Some(self.family.ratio()),
            (FamilyKind::TypeII, Branch::Plus) => Some(2.0 * self.family.ratio()),
            (FamilyKind::TypeII, Branch::Minus) => Some(0.0),
        }
    }

    /// Perlick potential `V(r)`.
    pub fn potential(&self, r: f64) -> Result<f64> {
        let f = &self.family;
        match f.kind {
            FamilyKind::TypeI => {
                let s = 1.0 + f.k * r * r;
                if !(r > 0.0) || s < 0.0 {
                    return Err(Error::Domain {
                        what: "r",
                        value: r,
                    });
                }
                Ok(s.sqrt() / r + f.shift)
            }
            FamilyKind::TypeII => {
                let (_, x) = f.type_ii_parts(r).ok_or(Error::Domain {
                    what: "r",
                    value: r,
                })?;
                Ok(f.shift - f.branch.sign() * r * r / x)
            }
        }
    }

    /// `dV/dr`.
    pub fn potential_derivative(&self, r: f64) -> Result<f64> {
        let f = &self.family;
        match f.kind {
            FamilyKind::TypeI => {
                let s = 1.0 + f.k * r * r;
                if !(r > 0.0) || !(s > 0.0) {
                    return Err(Error::Domain {
                        what: "r",
                        value: r,
                    });
                }
                // d/dr √(r⁻² + K) = −r⁻³ / √(r⁻² + K)
                Ok(-1.0 / (r * r * s.sqrt()))
            }
            FamilyKind::TypeII => {
                let (delta, x) = f.type_ii_parts(r).ok_or(Error::Domain {
                    what: "r",
                    value: r,
                })?;
                let sign = f.branch.sign();
                let one = 1.0 - f.d * r * r;
                let sq = delta.sqrt();
                // d√Δ/dr
                let dsq = (-2.0 * f.d * r + 2.0 * (f.d * f.d - f.k) * r * r * r) / sq;
                // same representation choice as `type_ii_parts`
                let rationalized = match f.branch {
                    Branch::Plus => one < 0.0,
                    Branch::Minus => one > 0.0,
                };
                let dx = if rationalized {
                    // X = K r⁴ / X̄ with X̄ = 1 − D r² ∓ √Δ
                    let conj = one - sign * sq;
                    let dconj = -2.0 * f.d * r - sign * dsq;
                    x * (4.0 / r - dconj / conj)
                } else {
                    -2.0 * f.d * r + sign * dsq
                };
                Ok(-sign * (2.0 * r * x - r * r * dx) / (x * x))
            }
        }
    }

    /// Closed-form antiderivative of `h(r)/r²`.
    ///
    /// Type I: `−(m/n)√(r⁻² + K)`; Type II: `∓ (m√2 / (n r)) √X`.
    pub fn green_closed(&self, r: f64) -> Result<f64> {
        let f = &self.family;
        match f.kind {
            FamilyKind::TypeI => {
                let s = 1.0 + f.k * r * r;
                if !(r > 0.0) || s < 0.0 {
                    return Err(Error::Domain {
                        what: "r",
                        value: r,
                    });
                }
                Ok(-f.ratio() * s.sqrt() / r)
            }
            FamilyKind::TypeII => {
                let (_, x) = f.type_ii_parts(r).ok_or(Error::Domain {
                    what: "r",
                    value: r,
                })?;
                Ok(-f.branch.sign() * f.ratio() * SQRT_2 * x.sqrt() / r)
            }
        }
    }

    /// Anchor radius for Green-function integrals: 1 when it lies in the
    /// first domain interval, otherwise an interior point of that interval.
    pub fn default_anchor(&self) -> f64 {
        let iv = self.domain[0];
        if iv.contains(1.0) {
            1.0
        } else if iv.hi.is_finite() {
            if iv.lo == 0.0 {
                0.5 * iv.hi
            } else {
                (iv.lo * iv.hi).sqrt()
            }
        } else {
            2.0 * iv.lo
        }
    }

    /// Radius at fraction `u ∈ (0, 1)` of the first domain interval; an
    /// unbounded interval is compressed by `u ↦ u/(1 − u)`.
    pub fn sample_radius(&self, u: f64) -> f64 {
        let iv = self.domain[0];
        if iv.hi.is_finite() {
            iv.lo + u * (iv.hi - iv.lo)
        } else {
            iv.lo + (1.0 + iv.lo) * u / (1.0 - u)
        }
    }
}

/// Named systems used throughout the tests and the command line: flat and
/// constant-curvature Kepler and oscillator, and Darboux III.
pub fn preset_families() -> Vec<BertrandFamily> {
    let mut list = vec![BertrandFamily::euclidean_kepler()];
    for kappa in [0.3, -0.3] {
        list.push(BertrandFamily::constant_curvature_kepler(kappa).expect("valid preset"));
    }
    list.push(BertrandFamily::flat_oscillator());
    for kappa in [0.3, -0.3] {
        list.push(BertrandFamily::constant_curvature_oscillator(kappa).expect("valid preset"));
    }
    for lambda in [0.5, -0.5] {
        list.push(BertrandFamily::darboux(lambda).expect("valid preset"));
    }
    list
}

/// Draws an admissible family: coprime `n, m ≤ 4`, `K, D ∈ [−1, 1]`,
/// Type I or Type II (either branch), redrawing until the domain is nonempty.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R) -> BertrandFamily {
    loop {
        let n = rng.gen_range(1..=4u32);
        let m = rng.gen_range(1..=4u32);
        let k = rng.gen_range(-1.0..=1.0);
        let d = rng.gen_range(-1.0..=1.0);
        let family = if rng.gen_bool(0.5) {
            BertrandFamily::type_i(n, m, k, 0.0)
        } else {
            let branch = if rng.gen_bool(0.5) {
                Branch::Plus
            } else {
                Branch::Minus
            };
            BertrandFamily::type_ii(n, m, k, d, 0.0, branch)
        };
        if let Ok(f) = family {
            return f;
        }
    }
}

/// Green function `u(r) = ∫ₐʳ h(s)/s² ds` by adaptive quadrature.
///
/// `a = +∞` is allowed when the domain is unbounded above. The result is
/// checked against the closed-form antiderivative wherever that is usable
/// and a mismatch above 1e-10 is reported as a quadrature failure.
pub fn green_u(profile: &RadialProfile, r: f64, a: f64) -> Result<f64> {
    let iv = profile.interval_of(r).ok_or(Error::Domain {
        what: "r",
        value: r,
    })?;
    let quad = Quadrature::with_tolerance(1e-12);
    let integrand = |s: f64| profile.h(s).map(|h| h / (s * s)).unwrap_or(f64::NAN);

    let value = if a == f64::INFINITY {
        if iv.hi.is_finite() {
            return Err(Error::Domain {
                what: "anchor",
                value: a,
            });
        }
        // s = 1/t: ∫_∞^r h(s)/s² ds = −∫_0^{1/r} h(1/t) dt
        -quad.integrate(
            |t: f64| profile.h(1.0 / t).unwrap_or(f64::NAN),
            0.0,
            1.0 / r,
        )?
    } else {
        if !iv.contains(a) {
            return Err(Error::Domain {
                what: "anchor",
                value: a,
            });
        }
        quad.integrate(integrand, a, r)?
    };

    let closed = if a.is_finite() {
        Some(profile.green_closed(r)? - profile.green_closed(a)?)
    } else {
        let f = profile.family();
        (f.kind == FamilyKind::TypeI && f.k >= 0.0)
            .then(|| profile.green_closed(r).map(|u| u + f.ratio() * f.k.sqrt()))
            .transpose()?
    };
    if let Some(c) = closed {
        if (c - value).abs() > 1e-10 * value.abs().max(1.0) {
            return Err(Error::Quadrature(format!(
                "Green function at r = {r}: quadrature {value} vs closed form {c}"
            )));
        }
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Kepler,
    Oscillator,
}

/// Constants of an intrinsic potential: `amplitude (u + offset)` (Kepler)
/// or `amplitude (u + offset)⁻²` (oscillator), `u` anchored at `anchor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicPotentialSpec {
    pub kind: PotentialKind,
    pub amplitude: f64,
    pub offset: f64,
    pub anchor: f64,
}

impl IntrinsicPotentialSpec {
    pub fn kepler(amplitude: f64, offset: f64) -> Self {
        Self {
            kind: PotentialKind::Kepler,
            amplitude,
            offset,
            anchor: 1.0,
        }
    }

    pub fn oscillator(amplitude: f64, offset: f64) -> Self {
        Self {
            kind: PotentialKind::Oscillator,
            amplitude,
            offset,
            anchor: 1.0,
        }
    }

    pub fn anchored_at(mut self, anchor: f64) -> Self {
        self.anchor = anchor;
        self
    }
}

pub fn intrinsic_potential(
    profile: &RadialProfile,
    spec: &IntrinsicPotentialSpec,
    r: f64,
) -> Result<f64> {
    let u = green_u(profile, r, spec.anchor)?;
    let base = u + spec.offset;
    match spec.kind {
        PotentialKind::Kepler => Ok(spec.amplitude * base),
        PotentialKind::Oscillator => {
            if base.abs() <= 4.0 * f64::EPSILON * (u.abs() + spec.offset.abs()) {
                return Err(Error::Singularity { r });
            }
            Ok(spec.amplitude / (base * base))
        }
    }
}

/// Outcome of matching a family's potential to its intrinsic potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicFitReport {
    pub label: String,
    pub spec: IntrinsicPotentialSpec,
    /// Additive constant compared outside the fit (G for Type II, 0 for Type I).
    pub additive: f64,
    pub max_residual: f64,
    pub points: usize,
}

/// Fit `(A, B)` from the first and last grid radii and report the largest
/// deviation between the family potential and the intrinsic potential
/// (Kepler for Type I, oscillator plus the constant G for Type II).
pub fn verify_intrinsic_potentials(
    family: &BertrandFamily,
    grid: &[f64],
) -> Result<IntrinsicFitReport> {
    if grid.len() < 2 {
        return Err(Error::Fit("need at least two radii".into()));
    }
    let profile = RadialProfile::new(family.clone())?;
    let anchor = profile.default_anchor();
    let (kind, additive) = match family.kind {
        FamilyKind::TypeI => (PotentialKind::Kepler, 0.0),
        FamilyKind::TypeII => (PotentialKind::Oscillator, family.shift),
    };
    let mut u = Vec::with_capacity(grid.len());
    let mut target = Vec::with_capacity(grid.len());
    for &r in grid {
        u.push(green_u(&profile, r, anchor)?);
        target.push(profile.potential(r)? - additive);
    }
    let last = grid.len() - 1;
    let (u1, u2, v1, v2) = (u[0], u[last], target[0], target[last]);

    let residual = |spec: &IntrinsicPotentialSpec| -> Option<f64> {
        let mut worst = 0.0f64;
        for (ui, ti) in u.iter().zip(&target) {
            let base = ui + spec.offset;
            let model = match spec.kind {
                PotentialKind::Kepler => spec.amplitude * base,
                PotentialKind::Oscillator => {
                    if base == 0.0 {
                        return None;
                    }
                    spec.amplitude / (base * base)
                }
            };
            worst = worst.max((model - ti).abs());
        }
        worst.is_finite().then_some(worst)
    };

    let candidates: Vec<IntrinsicPotentialSpec> = match kind {
        PotentialKind::Kepler => {
            if u2 == u1 {
                return Err(Error::Fit("coincident Green function values".into()));
            }
            let a = (v2 - v1) / (u2 - u1);
            if a == 0.0 {
                return Err(Error::Fit("potential is constant".into()));
            }
            vec![IntrinsicPotentialSpec::kepler(a, v1 / a - u1).anchored_at(anchor)]
        }
        PotentialKind::Oscillator => {
            let ratio = v1 / v2;
            if !(ratio > 0.0 && ratio.is_finite()) {
                return Err(Error::Fit(format!(
                    "potential values {v1}, {v2} do not share a sign"
                )));
            }
            let t = ratio.sqrt();
            [1.0, -1.0]
                .iter()
                .filter_map(|s| {
                    let denom = 1.0 - s * t;
                    (denom.abs() > 1e-14).then(|| {
                        let b = (s * t * u1 - u2) / denom;
                        let a = v1 * (u1 + b) * (u1 + b);
                        IntrinsicPotentialSpec::oscillator(a, b).anchored_at(anchor)
                    })
                })
                .collect()
        }
    };

    let best = candidates
        .into_iter()
        .filter_map(|spec| residual(&spec).map(|res| (spec, res)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Fit("two-point system is singular".into()))?;

    Ok(IntrinsicFitReport {
        label: family.label.clone(),
        spec: best.0,
        additive,
        max_residual: best.1,
        points: grid.len(),
    })
}

/// Darboux III profile for parameter `lambda`.
pub fn darboux_profile(lambda: f64) -> Result<RadialProfile> {
    RadialProfile::new(BertrandFamily::darboux(lambda)?)
}

/// Scalar curvature of the N-dimensional Darboux III space at the origin.
pub fn darboux_curvature_origin(lambda: f64, dim: usize) -> f64 {
    let n = dim as f64;
    -2.0 * lambda * n * (n - 1.0)
}
