//! One module per verb; each turns merged arguments into an [`Outcome`].

mod apsidal;
mod family;
mod integrals;
mod simulate;
mod spectrum;
mod sweep;

use anyhow::Result;
use bertrand_core::dynamics::{random_states, RandomStateSpec};
use bertrand_core::{PdmSystem, PhaseState};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::cli::StateArgs;
use crate::exit::usage;
use crate::output::Outcome;

pub use sweep::run as sweep;

pub const DEFAULT_SEED: u64 = 0;

/// Settings shared by every verb of one invocation.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub seed: u64,
}

fn parse<T: DeserializeOwned>(args: Value) -> Result<T> {
    serde_json::from_value(args).map_err(|e| usage(format!("invalid arguments: {e}")))
}

/// Runs a non-sweep verb from its merged JSON arguments.
pub fn run(verb: &str, args: Value, ctx: &Context) -> Result<Outcome> {
    match verb {
        "family" => family::run(&parse(args)?, ctx),
        "simulate" => simulate::run(&parse(args)?, ctx),
        "integrals" => integrals::run(&parse(args)?, ctx),
        "apsidal" => apsidal::run(&parse(args)?, ctx),
        "spectrum" => spectrum::run(&parse(args)?, ctx),
        other => Err(usage(format!("unknown verb {other}"))),
    }
}

/// Explicit `(q, p)` if given; `None` otherwise.
fn explicit_state(state: &StateArgs, system: &PdmSystem) -> Result<Option<PhaseState>> {
    match (&state.q, &state.p) {
        (None, None) => Ok(None),
        (Some(q), Some(p)) => {
            if state.energy.is_some() || state.angular_momentum.is_some() {
                return Err(usage("give either --q/--p or --energy/--L, not both"));
            }
            if q.len() != system.dim() || p.len() != system.dim() {
                return Err(usage(format!(
                    "--q and --p need {} components each",
                    system.dim()
                )));
            }
            Ok(Some(PhaseState::new(q.clone(), p.clone())?))
        }
        _ => Err(usage("--q and --p must be given together")),
    }
}

/// Seeded phase points suited to bounded motion.
fn sample_states(system: &PdmSystem, count: usize, seed: u64) -> Result<Vec<PhaseState>> {
    let spec = RandomStateSpec::bounded(system, 0.8);
    Ok(random_states(system, &spec, count, seed)?)
}

fn state_json(state: &PhaseState) -> Value {
    serde_json::json!({ "q": state.q, "p": state.p })
}
