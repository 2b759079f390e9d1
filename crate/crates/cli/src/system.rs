//! Building a [`PdmSystem`] from the shared system flags.

use anyhow::Result;
use bertrand_core::{BertrandFamily, Branch, PdmSystem};
use serde_json::{json, Value};

use crate::cli::{BranchArg, FamilyType, Preset, SystemArgs};
use crate::exit::usage;

pub const DEFAULT_DIM: usize = 3;
pub const DEFAULT_LAMBDA: f64 = 0.1;

fn preset_type(preset: Preset) -> FamilyType {
    match preset {
        Preset::Kepler | Preset::KappaKepler => FamilyType::I,
        _ => FamilyType::II,
    }
}

fn check_integers(args: &SystemArgs, n: u32, m: u32, preset: &str) -> Result<()> {
    if args.n.is_some_and(|v| v != n) || args.m.is_some_and(|v| v != m) {
        return Err(usage(format!("preset {preset} has n = {n}, m = {m}")));
    }
    Ok(())
}

/// The selected system; without `--preset` or `--type` this is Darboux III
/// with λ = 0.1, ω = 1.
pub fn build(args: &SystemArgs) -> Result<PdmSystem> {
    let dim = args.dim.unwrap_or(DEFAULT_DIM);
    let omega = args.omega.unwrap_or(1.0);
    let coupling = args.coupling;
    let preset = match (args.preset, args.family_type) {
        (Some(p), Some(t)) if preset_type(p) != t => {
            return Err(usage(format!("preset {p:?} is not a Type {t:?} system")));
        }
        (Some(p), _) => Some(p),
        (None, None) => Some(Preset::Darboux),
        (None, Some(_)) => None,
    };
    let system = match preset {
        Some(Preset::Darboux) => {
            check_integers(args, 2, 1, "darboux")?;
            PdmSystem::darboux(args.lambda.unwrap_or(DEFAULT_LAMBDA), omega, dim)?
        }
        Some(Preset::DarbouxExterior) => {
            check_integers(args, 2, 1, "darboux-exterior")?;
            PdmSystem::darboux_exterior(args.lambda.unwrap_or(-1.0), omega, dim)?
        }
        Some(Preset::Oscillator) => {
            check_integers(args, 2, 1, "oscillator")?;
            PdmSystem::flat_oscillator(omega, dim)?
        }
        Some(Preset::Kepler) => {
            check_integers(args, 1, 1, "kepler")?;
            PdmSystem::flat_kepler(-coupling.unwrap_or(-1.0), dim)?
        }
        Some(Preset::KappaKepler) => {
            check_integers(args, 1, 1, "kappa-kepler")?;
            PdmSystem::kappa_kepler(args.kappa.unwrap_or(0.0), coupling.unwrap_or(-1.0), dim)?
        }
        Some(Preset::KappaOscillator) => {
            check_integers(args, 2, 1, "kappa-oscillator")?;
            PdmSystem::kappa_oscillator(args.kappa.unwrap_or(0.0), coupling.unwrap_or(0.5), dim)?
        }
        None => {
            let family = family(args)?;
            PdmSystem::from_family(family, coupling.unwrap_or(-1.0), dim)?
        }
    };
    Ok(system)
}

/// Explicit `(type, n, m, K, D, G, branch)` family.
pub fn family(args: &SystemArgs) -> Result<BertrandFamily> {
    let g = args.g.unwrap_or(0.0);
    let k = args.k.unwrap_or(0.0);
    match args.family_type.unwrap_or(FamilyType::II) {
        FamilyType::I => {
            if args.d.is_some_and(|d| d != 0.0) {
                return Err(usage("Type I families have no D parameter"));
            }
            Ok(BertrandFamily::type_i(
                args.n.unwrap_or(1),
                args.m.unwrap_or(1),
                k,
                g,
            )?)
        }
        FamilyType::II => {
            let branch = match args.branch.unwrap_or(BranchArg::Plus) {
                BranchArg::Plus => Branch::Plus,
                BranchArg::Minus => Branch::Minus,
            };
            Ok(BertrandFamily::type_ii(
                args.n.unwrap_or(2),
                args.m.unwrap_or(1),
                k,
                args.d.unwrap_or(0.0),
                g,
                branch,
            )?)
        }
    }
}

/// `π m / n` for systems with a Bertrand chart.
pub fn expected_apsidal_angle(system: &PdmSystem) -> Option<f64> {
    system.chart().map(|c| c.family().expected_apsidal_angle())
}

pub fn describe(system: &PdmSystem) -> Value {
    json!({
        "label": system.label(),
        "dim": system.dim(),
        "parameters": system.kind(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bertrand_core::PdmKind;

    #[test]
    fn default_is_darboux() {
        let s = build(&SystemArgs::default()).unwrap();
        assert_eq!(
            s.kind(),
            &PdmKind::Darboux {
                lambda: 0.1,
                omega: 1.0
            }
        );
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn preset_type_mismatch_is_rejected() {
        let args = SystemArgs {
            preset: Some(Preset::Darboux),
            family_type: Some(FamilyType::I),
            ..Default::default()
        };
        assert!(build(&args).is_err());
        let args = SystemArgs {
            preset: Some(Preset::Darboux),
            n: Some(3),
            ..Default::default()
        };
        assert!(build(&args).is_err());
    }

    #[test]
    fn explicit_type_i() {
        let args = SystemArgs {
            family_type: Some(FamilyType::I),
            n: Some(2),
            m: Some(1),
            k: Some(0.2),
            ..Default::default()
        };
        let s = build(&args).unwrap();
        assert!((expected_apsidal_angle(&s).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn non_coprime_is_invalid() {
        let args = SystemArgs {
            family_type: Some(FamilyType::I),
            n: Some(2),
            m: Some(2),
            ..Default::default()
        };
        let err = build(&args).unwrap_err();
        assert_eq!(crate::exit::code_of(&err), crate::exit::USAGE);
    }
}
