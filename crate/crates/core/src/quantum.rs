//! Discrete spectrum of the quantum Darboux III oscillator
//! `Ĥ = (−ħ²Δ + ω²q²) / (2(1 + λq²))`.
//!
//! Closed-form levels are checked against a finite-volume discretization
//! of the radial problem. Writing `ψ = ρ^l F(ρ) Y_l` and `d = 2l + N`,
//! the radial equation is
//!
//! ```text
//! −ħ² ρ^{1−d} (ρ^{d−1} F′)′ + ω² ρ² F = 2E (1 + λρ²) F
//! ```
//!
//! which is discretized on cell centres `ρ_i = (i − ½)h` with flux
//! differences, giving a symmetric-definite tridiagonal pencil.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{GeneralizedTridiagonal, SymTridiagonal};

/// Dimension, `ħ`, curvature parameter `λ` and frequency `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumParams {
    pub dim: usize,
    pub hbar: f64,
    pub lambda: f64,
    pub omega: f64,
}

impl QuantumParams {
    /// Accepts `λ ≥ 0`; `λ = 0` is the flat isotropic oscillator.
    pub fn new(dim: usize, hbar: f64, lambda: f64, omega: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(hbar > 0.0 && hbar.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need ħ > 0 and ω > 0, got ħ = {hbar}, ω = {omega}"
            )));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("λ = {lambda}")));
        }
        if lambda < 0.0 {
            return Err(Error::Regime(format!(
                "only λ ≥ 0 has a solved discrete spectrum, got λ = {lambda}"
            )));
        }
        Ok(Self {
            dim,
            hbar,
            lambda,
            omega,
        })
    }

    fn nu(&self, n: usize) -> f64 {
        n as f64 + 0.5 * self.dim as f64
    }
}

/// Algebraic forms of the level formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelForm {
    /// `−ħ²λν² + ħν √(ħ²λ²ν² + ω²)`.
    Expanded,
    /// `−ħ²λν² (1 − √(1 + ω²/(ħ²λ²ν²)))`.
    Factored,
    /// `ħνω² / (√(ħ²λ²ν² + ω²) + ħλν)`.
    Rationalized,
    /// `(ω²/λ) / (1 + √(1 + ω²/(ħ²λ²ν²)))`.
    Saturating,
}

/// `E_n` with `ν = n + N/2`, evaluated in the requested form.
///
/// The expanded and factored forms subtract nearly equal numbers for
/// large `ħλν/ω`; the other two do not.
pub fn level_in_form(params: &QuantumParams, n: usize, form: LevelForm) -> f64 {
    let QuantumParams {
        hbar: hb,
        lambda: l,
        omega: w,
        ..
    } = *params;
    let nu = params.nu(n);
    let a = hb * l * nu;
    match form {
        LevelForm::Expanded => -hb * a * nu + hb * nu * (a * a + w * w).sqrt(),
        LevelForm::Factored => -hb * a * nu * (1.0 - (1.0 + (w / a).powi(2)).sqrt()),
        LevelForm::Rationalized => hb * nu * w * w / ((a * a + w * w).sqrt() + a),
        LevelForm::Saturating => (w * w / l) / (1.0 + (1.0 + (w / a).powi(2)).sqrt()),
    }
}

/// Analytic level `E_n`; exact flat value `ħω(n + N/2)` at `λ = 0`.
pub fn analytic_level(params: &QuantumParams, n: usize) -> f64 {
    level_in_form(params, n, LevelForm::Rationalized)
}

/// `|E² − ħ²(ω² − 2λE)ν²| / max(E², 1)` at the analytic level.
pub fn verify_quadratic_identity(params: &QuantumParams, n: usize) -> f64 {
    let e = analytic_level(params, n);
    let nu = params.nu(n);
    let rhs = params.hbar.powi(2) * (params.omega.powi(2) - 2.0 * params.lambda * e) * nu * nu;
    (e * e - rhs).abs() / (e * e).max(1.0)
}

/// Bottom of the continuous spectrum `ω²/(2λ)`.
pub fn continuum_bottom(params: &QuantumParams) -> Result<f64> {
    if params.lambda > 0.0 {
        Ok(params.omega.powi(2) / (2.0 * params.lambda))
    } else {
        Err(Error::Regime(
            "the continuum threshold exists only for λ > 0".into(),
        ))
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Degeneracy `C(n + N − 1, N − 1)` of level `n`.
pub fn degeneracy(dim: usize, n: usize) -> u128 {
    binomial(n + dim - 1, dim - 1)
}

/// Dimension of degree-`l` harmonic polynomials in `N` variables.
pub fn harmonic_dimension(dim: usize, l: usize) -> u128 {
    let all = binomial(l + dim - 1, dim - 1);
    if l < 2 {
        all
    } else {
        all - binomial(l + dim - 3, dim - 1)
    }
}

/// Degeneracy by summing harmonic dimensions over `2k + l = n`.
pub fn degeneracy_by_count(dim: usize, n: usize) -> u128 {
    (n % 2..=n)
        .step_by(2)
        .map(|l| harmonic_dimension(dim, l))
        .sum()
}

/// Uniform cell-centred grid on `(0, rho_max)` for angular number `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    pub rho_max: f64,
    pub points: usize,
    pub l: usize,
    /// Largest accepted relative change between the grid and its
    /// refinement, divided by 3.
    pub tolerance: f64,
}

pub const MIN_GRID_POINTS: usize = 200;
pub const DEFAULT_GRID_POINTS: usize = 20_000;

impl RadialGrid {
    pub fn new(rho_max: f64, points: usize, l: usize) -> Result<Self> {
        if !(rho_max > 0.0 && rho_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho_max = {rho_max}")));
        }
        if points < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter(format!(
                "need at least {MIN_GRID_POINTS} grid points, got {points}"
            )));
        }
        Ok(Self {
            rho_max,
            points,
            l,
            tolerance: 1e-4,
        })
    }

    /// Grid wide enough for every level up to `n_max`.
    ///
    /// With `E_n ≥ E_lo = ħνω² / (ω + 2ħλν)` and `Ω = E/(ħν)` for the
    /// asymptotic frequency `Ω² = ω² − 2λE`, the turning radius obeys
    /// `ρ_t² = 2ħ²ν²/E ≤ 2ħ²ν²/E_lo` and `Ω ≥ E_lo/(ħν)`; room is left for
    /// the Gaussian tail `exp(−Ωρ²/2ħ)`.
    pub fn for_levels(params: &QuantumParams, n_max: usize, l: usize) -> Self {
        let nu = params.nu(n_max);
        let hb = params.hbar;
        let w = params.omega;
        let e_lo = hb * nu * w * w / (w + 2.0 * hb * params.lambda * nu);
        let turning2 = 2.0 * hb * hb * nu * nu / e_lo;
        let tail_freq = e_lo / (hb * nu);
        let rho_max = (2.5 * turning2.sqrt()).max((turning2 + 60.0 * hb / tail_freq).sqrt());
        Self {
            rho_max,
            points: DEFAULT_GRID_POINTS,
            l,
            tolerance: 1e-4,
        }
    }

    pub fn with_points(mut self, points: usize) -> Result<Self> {
        Self::new(self.rho_max, points, self.l)?;
        self.points = points;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn spacing(&self) -> f64 {
        self.rho_max / self.points as f64
    }

    fn centre(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }
}

// Flux-form stiffness (symmetrized by ρ^{(d−1)/2}) and weight.
fn pencil(params: &QuantumParams, grid: &RadialGrid) -> GeneralizedTridiagonal {
    let p = grid.points;
    let h = grid.spacing();
    let exp = (2 * grid.l + params.dim - 1) as i32;
    let hb2 = params.hbar * params.hbar / (h * h);
    let w2 = params.omega * params.omega;
    let mut a_diag = Vec::with_capacity(p);
    let mut a_off = Vec::with_capacity(p - 1);
    let mut b_diag = Vec::with_capacity(p);
    for i in 0..p {
        let rho = grid.centre(i);
        let left = if i == 0 {
            0.0
        } else {
            (i as f64 / (i as f64 + 0.5)).powi(exp)
        };
        let right = ((i + 1) as f64 / (i as f64 + 0.5)).powi(exp);
        a_diag.push(hb2 * (left + right) + w2 * rho * rho);
        b_diag.push(2.0 * (1.0 + params.lambda * rho * rho));
        if i + 1 < p {
            let face = (i + 1) as f64;
            let geo = ((i as f64 + 0.5) * (i as f64 + 1.5)).sqrt();
            a_off.push(-hb2 * (face / geo).powi(exp));
        }
    }
    GeneralizedTridiagonal {
        a_diag,
        a_off,
        b_diag,
    }
}

fn lowest_eigenvalues(
    params: &QuantumParams,
    grid: &RadialGrid,
    count: usize,
) -> Result<(SymTridiagonal, Vec<f64>)> {
    let matrix = pencil(params, grid).to_standard()?;
    // E ≤ ħνω² / (max(ω, ħλν) + ħλν)
    let a = params.hbar * params.lambda * params.nu(2 * count + grid.l);
    let upper = params.hbar * params.nu(2 * count + grid.l) * params.omega.powi(2)
        / (params.omega.max(a) + a);
    let values = (0..count)
        .map(|k| matrix.eigenvalue_in(k, 0.0, 1.5 * upper, 1e-13))
        .collect::<Result<Vec<_>>>()?;
    Ok((matrix, values))
}

/// Radial eigenvalues on one grid and on its refinement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub l: usize,
    /// Richardson-extrapolated eigenvalues, ascending (`k = 0, 1, …`).
    pub eigenvalues: Vec<f64>,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    /// `max_k |E_fine − E_coarse| / (3|E_fine|)`.
    pub error_estimate: f64,
    /// Ground-state amplitude at the outer cell relative to its maximum.
    pub boundary_amplitude: f64,
}

/// Lowest `count` radial eigenvalues for angular number `grid.l`.
pub fn radial_solve(
    params: &QuantumParams,
    grid: &RadialGrid,
    count: usize,
) -> Result<RadialSolution> {
    if count == 0 {
        return Err(Error::InvalidParameter("requested zero eigenvalues".into()));
    }
    RadialGrid::new(grid.rho_max, grid.points, grid.l)?;
    let (coarse_matrix, coarse) = lowest_eigenvalues(params, grid, count)?;
    let fine_grid = RadialGrid {
        points: 2 * grid.points,
        ..*grid
    };
    let (_, fine) = lowest_eigenvalues(params, &fine_grid, count)?;

    let mut error_estimate: f64 = 0.0;
    let eigenvalues = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| {
            error_estimate = error_estimate.max((f - c).abs() / (3.0 * f.abs()));
            (4.0 * f - c) / 3.0
        })
        .collect();

    let ground = coarse_matrix.eigenvector(coarse[0]);
    let peak = ground.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let boundary_amplitude = ground.last().map_or(0.0, |v| v.abs()) / peak;

    if error_estimate > grid.tolerance {
        return Err(Error::GridTooCoarse {
            estimate: error_estimate,
            tolerance: grid.tolerance,
        });
    }
    if boundary_amplitude > 1e-8 {
        return Err(Error::GridTooCoarse {
            estimate: boundary_amplitude,
            tolerance: 1e-8,
        });
    }
    Ok(RadialSolution {
        l: grid.l,
        eigenvalues,
        coarse,
        fine,
        error_estimate,
        boundary_amplitude,
    })
}

/// Self-adjointness diagnostics of the discretized Hamiltonian with respect
/// to the weighted scalar product `Σ ρ_i^{d−1} (1 + λρ_i²) u_i v_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// `max |μ_i H_ij − μ_j H_ji| / max |μ_i H_ij|`.
    pub matrix_asymmetry: f64,
    /// `|⟨u, Hv⟩ − ⟨Hu, v⟩| / |⟨u, Hv⟩|` for random `u, v`.
    pub bilinear_asymmetry: f64,
}

/// Build the (non-symmetric) operator acting on `F` and measure how far it
/// is from being symmetric in the weighted product.
pub fn symmetry_check(params: &QuantumParams, grid: &RadialGrid, seed: u64) -> SymmetryReport {
    let p = grid.points;
    let h = grid.spacing();
    let exp = (2 * grid.l + params.dim - 1) as i32;
    let hb2 = params.hbar * params.hbar / (h * h);
    let w2 = params.omega * params.omega;
    let rho: Vec<f64> = (0..p).map(|i| grid.centre(i)).collect();
    let weight: Vec<f64> = rho.iter().map(|r| 1.0 + params.lambda * r * r).collect();
    let measure: Vec<f64> = rho
        .iter()
        .zip(&weight)
        .map(|(r, w)| (r / h).powi(exp) * w)
        .collect();

    // H = W⁻¹ A_raw / 2 with A_raw the flux form divided by ρ_i^{d−1} h
    let mut diag = vec![0.0; p];
    let mut upper = vec![0.0; p - 1];
    let mut lower = vec![0.0; p - 1];
    for i in 0..p {
        let ri = i as f64 + 0.5;
        let left = if i == 0 {
            0.0
        } else {
            (i as f64 / ri).powi(exp)
        };
        let right = ((i + 1) as f64 / ri).powi(exp);
        diag[i] = (hb2 * (left + right) + w2 * rho[i] * rho[i]) / (2.0 * weight[i]);
        if i + 1 < p {
            upper[i] = -hb2 * ((i + 1) as f64 / ri).powi(exp) / (2.0 * weight[i]);
        }
        if i > 0 {
            lower[i - 1] = -hb2 * (i as f64 / ri).powi(exp) / (2.0 * weight[i]);
        }
    }

    let mut scale: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..p - 1 {
        let a = measure[i] * upper[i];
        let b = measure[i + 1] * lower[i];
        scale = scale.max(a.abs()).max(b.abs());
        worst = worst.max((a - b).abs());
    }
    for i in 0..p {
        scale = scale.max((measure[i] * diag[i]).abs());
    }

    let apply = |v: &[f64]| -> Vec<f64> {
        (0..p)
            .map(|i| {
                let mut s = diag[i] * v[i];
                if i + 1 < p {
                    s += upper[i] * v[i + 1];
                }
                if i > 0 {
                    s += lower[i - 1] * v[i - 1];
                }
                s
            })
            .collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let hu = apply(&u);
    let hv = apply(&v);
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(&measure)
            .map(|((x, y), m)| x * y * m)
            .sum()
    };
    let uhv = dot(&u, &hv);
    let huv = dot(&hu, &v);

    SymmetryReport {
        matrix_asymmetry: worst / scale,
        bilinear_asymmetry: (uhv - huv).abs() / uhv.abs(),
    }
}

/// One clustered level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub n: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub degeneracy_expected: u128,
    pub degeneracy_found: u128,
    /// `(k, l)` radial and angular numbers merged into this level.
    pub members: Vec<(usize, usize)>,
}

impl SpectrumLevel {
    pub fn relative_error(&self) -> f64 {
        (self.numeric - self.analytic).abs() / self.analytic.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub params: QuantumParams,
    pub levels: Vec<SpectrumLevel>,
    /// `ω²/(2λ)`; absent in the flat case.
    pub continuum_bottom: Option<f64>,
    pub max_relative_error: f64,
}

/// Grid and acceptance settings for [`compute_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPolicy {
    pub points: usize,
    /// `None` picks the width from [`RadialGrid::for_levels`].
    pub rho_max: Option<f64>,
    pub cluster_tolerance: f64,
    pub level_tolerance: f64,
    pub richardson_tolerance: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            points: DEFAULT_GRID_POINTS,
            rho_max: None,
            cluster_tolerance: 1e-8,
            level_tolerance: 1e-6,
            richardson_tolerance: 1e-4,
        }
    }
}

/// Solve every `l ≤ n_max` (in parallel), cluster the eigenvalues and
/// attach analytic values and degeneracies. No acceptance checks.
pub fn compute_spectrum(
    params: &QuantumParams,
    n_max: usize,
    policy: &GridPolicy,
) -> Result<SpectrumResult> {
    let ls: Vec<usize> = (0..=n_max)
        .filter(|&l| harmonic_dimension(params.dim, l) > 0)
        .collect();
    let solutions: Vec<Result<RadialSolution>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ls
            .iter()
            .map(|&l| {
                scope.spawn(move || {
                    let mut grid = RadialGrid::for_levels(params, n_max, l)
                        .with_points(policy.points)?
                        .with_tolerance(policy.richardson_tolerance);
                    if let Some(rho_max) = policy.rho_max {
                        grid.rho_max = rho_max;
                    }
                    radial_solve(params, &grid, (n_max - l) / 2 + 1)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("radial solver thread panicked"))
            .collect()
    });

    let mut states: Vec<(f64, usize, usize)> = Vec::new();
    for solution in solutions {
        let solution = solution?;
        for (k, e) in solution.eigenvalues.iter().enumerate() {
            states.push((*e, k, solution.l));
        }
    }
    states.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut clusters: Vec<Vec<(f64, usize, usize)>> = Vec::new();
    for state in states {
        match clusters.last_mut() {
            Some(cluster)
                if (state.0 - cluster[0].0).abs() <= policy.cluster_tolerance * state.0.abs() =>
            {
                cluster.push(state)
            }
            _ => clusters.push(vec![state]),
        }
    }

    let levels: Vec<SpectrumLevel> = clusters
        .into_iter()
        .enumerate()
        .map(|(n, cluster)| {
            let numeric = cluster.iter().map(|s| s.0).sum::<f64>() / cluster.len() as f64;
            SpectrumLevel {
                n,
                analytic: analytic_level(params, n),
                numeric,
                degeneracy_expected: degeneracy(params.dim, n),
                degeneracy_found: cluster
                    .iter()
                    .map(|s| harmonic_dimension(params.dim, s.2))
                    .sum(),
                members: cluster.iter().map(|s| (s.1, s.2)).collect(),
            }
        })
        .collect();
    let max_relative_error = levels
        .iter()
        .map(SpectrumLevel::relative_error)
        .fold(0.0, f64::max);
    Ok(SpectrumResult {
        params: *params,
        levels,
        continuum_bottom: continuum_bottom(params).ok(),
        max_relative_error,
    })
}

impl SpectrumResult {
    /// Check degeneracies, level values and the continuum bound.
    pub fn verify(&self, n_max: usize, level_tolerance: f64) -> Result<()> {
        for level in &self.levels {
            if level.degeneracy_found != level.degeneracy_expected {
                return Err(Error::DegeneracyMismatch {
                    n: level.n,
                    expected: level.degeneracy_expected as usize,
                    found: level.degeneracy_found as usize,
                });
            }
            let above_continuum = self.continuum_bottom.is_some_and(|c| level.numeric >= c);
            if level.relative_error() > level_tolerance || above_continuum {
                return Err(Error::LevelMismatch {
                    n: level.n,
                    analytic: level.analytic,
                    numeric: level.numeric,
                });
            }
        }
        if self.levels.len() != n_max + 1 {
            let n = self.levels.len().min(n_max);
            return Err(Error::DegeneracyMismatch {
                n,
                expected: degeneracy(self.params.dim, n) as usize,
                found: self
                    .levels
                    .get(n)
                    .map_or(0, |l| l.degeneracy_found as usize),
            });
        }
        Ok(())
    }
}

/// [`compute_spectrum`] followed by [`SpectrumResult::verify`].
pub fn assemble_spectrum(
    params: &QuantumParams,
    n_max: usize,
    policy: &GridPolicy,
) -> Result<SpectrumResult> {
    let result = compute_spectrum(params, n_max, policy)?;
    result.verify(n_max, policy.level_tolerance)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(dim: usize, lambda: f64, omega: f64) -> QuantumParams {
        QuantumParams::new(dim, 1.0, lambda, omega).unwrap()
    }

    #[test]
    fn ground_state_value() {
        let p = params(3, 0.5, 1.0);
        assert!((analytic_level(&p, 0) - 0.75).abs() < 1e-15);
        assert!((continuum_bottom(&p).unwrap() - 1.0).abs() < 1e-15);
        let p = params(3, 1.0, 2.0);
        assert!((continuum_bottom(&p).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn flat_limit() {
        let p = params(3, 0.0, 1.0);
        assert_eq!(analytic_level(&p, 0), 1.5);
        assert!(continuum_bottom(&p).is_err());
        let p = params(3, 1e-8, 1.0);
        for n in 0..=10 {
            let flat = n as f64 + 1.5;
            let e = analytic_level(&p, n);
            assert!((e - flat).abs() < 1e-6 * flat);
            // leading correction −ħ²λν²
            assert!((e - flat + 1e-8 * flat * flat).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_lambda_is_a_regime_error() {
        assert!(matches!(
            QuantumParams::new(3, 1.0, -1.0, 1.0),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn forms_agree() {
        let p = params(3, 0.5, 1.0);
        for n in 0..20 {
            let a = level_in_form(&p, n, LevelForm::Expanded);
            let b = level_in_form(&p, n, LevelForm::Rationalized);
            let c = level_in_form(&p, n, LevelForm::Factored);
            assert!((a - b).abs() < 1e-12 * b);
            assert!((c - b).abs() < 1e-12 * b);
        }
        for n in [0usize, 10, 1000, 100_000, 1_000_000] {
            let b = level_in_form(&p, n, LevelForm::Rationalized);
            let d = level_in_form(&p, n, LevelForm::Saturating);
            assert!((b - d).abs() <= 1e-12 * b, "n={n}");
        }
    }

    #[test]
    fn monotone_and_below_continuum() {
        let p = params(2, 2.0, 0.5);
        let top = continuum_bottom(&p).unwrap();
        let mut prev = 0.0;
        let mut prev_gap = f64::INFINITY;
        for n in 0..10_000 {
            let e = analytic_level(&p, n);
            assert!(e > prev && e < top);
            let gap = e - prev;
            if n > 0 {
                assert!(gap <= prev_gap + 4.0 * f64::EPSILON * e);
            }
            prev_gap = gap;
            prev = e;
        }
    }

    #[test]
    fn quadratic_identity() {
        for (dim, lambda, omega) in [(3, 0.5, 1.0), (2, 2.0, 0.5), (4, 0.1, 1.7)] {
            let p = params(dim, lambda, omega);
            for n in 0..=50 {
                assert!(verify_quadratic_identity(&p, n) <= 1e-12);
            }
        }
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy(3, 0), 1);
        assert_eq!(degeneracy(3, 2), 6);
        assert_eq!(degeneracy(2, 3), 4);
        assert_eq!(harmonic_dimension(3, 2), 5);
        for dim in 1..6 {
            for n in 0..12 {
                assert_eq!(degeneracy(dim, n), degeneracy_by_count(dim, n));
            }
        }
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(10.0, 100, 0).is_err());
        assert!(RadialGrid::new(-1.0, 1000, 0).is_err());
    }

    #[test]
    fn ground_state_numeric() {
        let p = params(3, 0.5, 1.0);
        let grid = RadialGrid::for_levels(&p, 0, 0).with_points(4000).unwrap();
        let sol = radial_solve(&p, &grid, 1).unwrap();
        assert!((sol.eigenvalues[0] - 0.75).abs() < 1e-6, "{:?}", sol);
    }

    #[test]
    fn flat_numeric() {
        let p = params(3, 0.0, 1.0);
        let grid = RadialGrid::for_levels(&p, 2, 0).with_points(4000).unwrap();
        let sol = radial_solve(&p, &grid, 2).unwrap();
        assert!((sol.eigenvalues[0] - 1.5).abs() < 1e-6);
        assert!((sol.eigenvalues[1] - 3.5).abs() < 1e-6);
    }

    #[test]
    fn two_dimensional_s_wave() {
        let p = params(2, 0.5, 1.0);
        let grid = RadialGrid::for_levels(&p, 4, 0).with_points(4000).unwrap();
        let sol = radial_solve(&p, &grid, 3).unwrap();
        for (k, e) in sol.eigenvalues.iter().enumerate() {
            let exact = analytic_level(&p, 2 * k);
            assert!((e - exact).abs() < 1e-6 * exact, "k={k}: {e} vs {exact}");
        }
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let p = params(3, 0.5, 1.0);
        let grid = RadialGrid::new(12.0, 200, 0).unwrap().with_tolerance(1e-9);
        assert!(matches!(
            radial_solve(&p, &grid, 1),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn narrow_box_is_flagged() {
        let p = params(3, 0.5, 1.0);
        let grid = RadialGrid::new(2.0, 2000, 0).unwrap();
        assert!(matches!(
            radial_solve(&p, &grid, 1),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn operator_is_weighted_symmetric() {
        for lambda in [0.0, 0.5] {
            let p = params(3, lambda, 1.0);
            let grid = RadialGrid::new(10.0, 500, 1).unwrap();
            let report = symmetry_check(&p, &grid, 7);
            assert!(report.matrix_asymmetry <= 1e-12, "{report:?}");
            assert!(report.bilinear_asymmetry <= 1e-10, "{report:?}");
        }
    }

    #[test]
    fn small_spectrum_assembles() {
        let p = params(3, 0.5, 1.0);
        let policy = GridPolicy {
            points: 4000,
            ..GridPolicy::default()
        };
        let result = assemble_spectrum(&p, 4, &policy).unwrap();
        let found: Vec<u128> = result.levels.iter().map(|l| l.degeneracy_found).collect();
        assert_eq!(found, vec![1, 3, 6, 10, 15]);
        assert_eq!(result.continuum_bottom, Some(1.0));
    }
}
