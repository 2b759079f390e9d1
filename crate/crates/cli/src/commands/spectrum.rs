use anyhow::Result;
use bertrand_core::quantum::{compute_spectrum, GridPolicy, DEFAULT_GRID_POINTS};
use bertrand_core::QuantumParams;
use serde_json::json;

use super::Context;
use crate::cli::SpectrumArgs;
use crate::exit::{code_of, usage, SUCCESS};
use crate::output::{Outcome, Table};

pub fn run(args: &SpectrumArgs, ctx: &Context) -> Result<Outcome> {
    let lambda = args.lambda.unwrap_or(0.5);
    if !(lambda > 0.0) {
        return Err(usage(format!(
            "the discrete spectrum needs λ > 0, got {lambda}"
        )));
    }
    let params = QuantumParams::new(
        args.dim.unwrap_or(3),
        args.hbar.unwrap_or(1.0),
        lambda,
        args.omega.unwrap_or(1.0),
    )?;
    let n_max = args.n_max.unwrap_or(4);
    let policy = GridPolicy {
        points: args.points.unwrap_or(DEFAULT_GRID_POINTS),
        rho_max: args.rho_max,
        level_tolerance: args
            .tolerance
            .unwrap_or(GridPolicy::default().level_tolerance),
        ..GridPolicy::default()
    };
    let result = compute_spectrum(&params, n_max, &policy)?;
    let verdict = result.verify(n_max, policy.level_tolerance);

    let mut table = Table::new([
        "n",
        "E_analytic",
        "E_numeric",
        "degeneracy_expected",
        "degeneracy_found",
    ]);
    for level in &result.levels {
        table.push(vec![
            level.n.to_string(),
            crate::output::float(level.analytic),
            crate::output::float(level.numeric),
            level.degeneracy_expected.to_string(),
            level.degeneracy_found.to_string(),
        ]);
    }
    let (code, error) = match &verdict {
        Ok(()) => (SUCCESS, None),
        Err(e) => (code_of(&e.clone().into()), Some(e.to_string())),
    };
    let report = json!({
        "command": "spectrum",
        "seed": ctx.seed,
        "parameters": params,
        "n_max": n_max,
        "grid": policy,
        "continuum_bottom": result.continuum_bottom,
        "max_relative_error": result.max_relative_error,
        "verified": verdict.is_ok(),
        "error": error,
        "levels": result.levels,
    });
    Ok(Outcome::new(code, report, Some(table)))
}
