use anyhow::Result;
use bertrand_core::dynamics::integrals::{standard_integrals, unit_vector_at_angle};
use bertrand_core::dynamics::orbit::{orbital_angle, radial_period_of_state};
use bertrand_core::dynamics::report::DriftEntry;
use bertrand_core::dynamics::{
    conservation_report, integrate, IntegratorConfig, RadialOrbit, Scheme,
};
use bertrand_core::{PdmKind, PdmSystem, PhaseState, Trajectory};
use serde_json::json;

use super::{explicit_state, sample_states, state_json, Context};
use crate::cli::{SchemeArg, SimulateArgs};
use crate::exit::{usage, DRIFT, SUCCESS};
use crate::output::{Outcome, Table};
use crate::system;

const DEFAULT_PERIODS: f64 = 100.0;
const DEFAULT_SAMPLE_EVERY: usize = 8;
const DEFAULT_BUDGET: f64 = 1e-8;
// samples used for the Kepler unit-vector check
const DIRECTION_SAMPLES: usize = 200;

fn initial_state(args: &SimulateArgs, system: &PdmSystem, seed: u64) -> Result<PhaseState> {
    if let Some(state) = explicit_state(&args.state, system)? {
        return Ok(state);
    }
    match (args.state.energy, args.state.angular_momentum) {
        (None, None) => Ok(sample_states(system, 1, seed)?.remove(0)),
        (Some(energy), l) => {
            let orbit = RadialOrbit::new(system, energy, l.unwrap_or(1.0))?;
            Ok(orbit.pericenter_state(system.dim())?)
        }
        (None, Some(_)) => Err(usage("--L needs --energy")),
    }
}

fn scheme(arg: Option<SchemeArg>) -> Scheme {
    match arg.unwrap_or(SchemeArg::Midpoint6) {
        SchemeArg::Midpoint => Scheme::Midpoint,
        SchemeArg::Midpoint6 => Scheme::Midpoint6,
        SchemeArg::DormandPrince => Scheme::DormandPrince,
    }
}

// cos of the angle between the unit vector a(t) and a(0)
fn direction_entry(system: &PdmSystem, trajectory: &Trajectory) -> Result<DriftEntry> {
    let stride = (trajectory.len() / DIRECTION_SAMPLES).max(1);
    let first = unit_vector_at_angle(
        &trajectory.states[0],
        orbital_angle(system, &trajectory.states[0])?,
    );
    let mut series = Vec::new();
    for state in trajectory.states.iter().step_by(stride) {
        let a = unit_vector_at_angle(state, orbital_angle(system, state)?);
        series.push(a.iter().zip(&first).map(|(x, y)| x * y).sum::<f64>());
    }
    Ok(DriftEntry::from_series("a.a0", &series))
}

pub fn run(args: &SimulateArgs, ctx: &Context) -> Result<Outcome> {
    let system = system::build(&args.system)?;
    let state0 = initial_state(args, &system, ctx.seed)?;
    let budget = args.budget.unwrap_or(DEFAULT_BUDGET);
    if !(budget > 0.0) {
        return Err(usage("--budget must be positive"));
    }
    let config = IntegratorConfig {
        scheme: scheme(args.scheme),
        step: args.step,
        steps_per_period: args
            .steps_per_period
            .unwrap_or(IntegratorConfig::default().steps_per_period),
        sample_every: args.sample_every.unwrap_or(DEFAULT_SAMPLE_EVERY),
        energy_budget: budget,
        ..IntegratorConfig::default()
    };
    let (t_end, period) = match args.t_end {
        Some(t) => (t, None),
        None => {
            let period = radial_period_of_state(&system, &state0)?;
            (
                args.periods.unwrap_or(DEFAULT_PERIODS) * period,
                Some(period),
            )
        }
    };
    let trajectory = integrate(&system, &state0, t_end, &config)?;

    let integrals = standard_integrals(&system);
    let mut drift = conservation_report(&system, &trajectory, &integrals)?;
    if matches!(system.kind(), PdmKind::FlatKepler { .. }) && system.dim() == 3 {
        drift.push(direction_entry(&system, &trajectory)?);
    }
    let within = drift.within(budget) && !trajectory.flagged;

    let n = system.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("q{i}")));
    header.extend((1..=n).map(|i| format!("p{i}")));
    header.extend(integrals.iter().map(|i| i.name()));
    let mut table = Table::new(header);
    for (t, state) in trajectory.iter() {
        let mut row = vec![t];
        row.extend(&state.q);
        row.extend(&state.p);
        for integral in &integrals {
            row.push(integral.value(&system, state)?);
        }
        table.push_floats(&row);
    }

    let report = json!({
        "command": "simulate",
        "seed": ctx.seed,
        "system": system::describe(&system),
        "initial_state": state_json(&state0),
        "config": config,
        "radial_period": period,
        "t_end": t_end,
        "step": trajectory.step,
        "samples": trajectory.len(),
        "stats": trajectory.stats,
        "energy_drift": trajectory.energy_drift,
        "budget": budget,
        "within_budget": within,
        "drift": drift.entries,
        "max_rel_drift": drift.max_rel_drift(),
    });
    Ok(Outcome::new(
        if within { SUCCESS } else { DRIFT },
        report,
        Some(table),
    ))
}
