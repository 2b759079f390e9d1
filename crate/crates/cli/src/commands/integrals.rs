use anyhow::Result;
use bertrand_core::dynamics::integrals::{
    bracket_of_gradients, independent_set, involutive_sets, standard_integrals,
};
use bertrand_core::dynamics::{independence_rank, Gradient, Integral};
use bertrand_core::{Error, PdmKind, PdmSystem, PhaseState};
use serde_json::json;

use super::{explicit_state, sample_states, Context};
use crate::cli::IntegralsArgs;
use crate::exit::{usage, SUCCESS};
use crate::output::{float, Outcome, Table};
use crate::system;

const DEFAULT_SAMPLES: usize = 100;

struct PointReport {
    values: Vec<f64>,
    max_bracket: f64,
    rank: Option<usize>,
}

// Largest |{a, b}| over every pair inside one set.
fn max_bracket_in(gradients: &[Gradient]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in gradients.iter().enumerate() {
        for b in &gradients[i + 1..] {
            worst = worst.max(bracket_of_gradients(a, b).abs());
        }
    }
    worst
}

fn analyse(system: &PdmSystem, integrals: &[Integral], state: &PhaseState) -> Result<PointReport> {
    let darboux = matches!(system.kind(), PdmKind::Darboux { .. });
    let values = integrals
        .iter()
        .map(|i| i.value(system, state))
        .collect::<Result<Vec<_>, _>>()?;
    let grad = |set: &[Integral]| {
        set.iter()
            .map(|i| i.gradient(system, state))
            .collect::<Result<Vec<_>, _>>()
    };
    let all = grad(integrals)?;
    let mut max_bracket: f64 = all[1..]
        .iter()
        .map(|g| bracket_of_gradients(&all[0], g).abs())
        .fold(0.0, f64::max);
    for (k, set) in involutive_sets(system.dim()).iter().enumerate() {
        if k == 2 && !darboux {
            continue;
        }
        max_bracket = max_bracket.max(max_bracket_in(&grad(set)?));
    }
    let rank_set = if darboux {
        independent_set(system.dim(), 0)
    } else {
        integrals.to_vec()
    };
    let rank = match independence_rank(system, &rank_set, state) {
        Ok(r) => Some(r),
        Err(Error::DegeneratePoint(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(PointReport {
        values,
        max_bracket,
        rank,
    })
}

pub fn run(args: &IntegralsArgs, ctx: &Context) -> Result<Outcome> {
    let system = system::build(&args.system)?;
    if args.state.energy.is_some() || args.state.angular_momentum.is_some() {
        return Err(usage("integrals takes --q/--p or random samples"));
    }
    let states = match explicit_state(&args.state, &system)? {
        Some(s) => vec![s],
        None => sample_states(&system, args.samples.unwrap_or(DEFAULT_SAMPLES), ctx.seed)?,
    };
    if states.is_empty() {
        return Err(usage("--samples must be positive"));
    }
    let integrals = standard_integrals(&system);
    let darboux = matches!(system.kind(), PdmKind::Darboux { .. });
    let expected_rank = if darboux {
        2 * system.dim() - 1
    } else {
        integrals.len()
    };

    let mut header = vec!["sample".to_string()];
    header.extend(integrals.iter().map(|i| i.name()));
    header.extend(["max_bracket".to_string(), "rank".to_string()]);
    let mut table = Table::new(header);
    let mut points = Vec::with_capacity(states.len());
    let mut max_bracket: f64 = 0.0;
    let mut full_rank = 0;
    for (k, state) in states.iter().enumerate() {
        let point = analyse(&system, &integrals, state)?;
        max_bracket = max_bracket.max(point.max_bracket);
        if point.rank == Some(expected_rank) {
            full_rank += 1;
        }
        let mut row = vec![k.to_string()];
        row.extend(point.values.iter().map(|v| float(*v)));
        row.push(float(point.max_bracket));
        row.push(point.rank.map_or("nan".into(), |r| r.to_string()));
        table.push(row);
        points.push(json!({
            "q": state.q,
            "p": state.p,
            "values": point.values,
            "max_bracket": point.max_bracket,
            "rank": point.rank,
        }));
    }

    let report = json!({
        "command": "integrals",
        "seed": ctx.seed,
        "system": system::describe(&system),
        "integrals": integrals.iter().map(Integral::name).collect::<Vec<_>>(),
        "samples": states.len(),
        "max_bracket": max_bracket,
        "expected_rank": expected_rank,
        "full_rank_points": full_rank,
        "points": points,
    });
    Ok(Outcome::new(SUCCESS, report, Some(table)))
}
