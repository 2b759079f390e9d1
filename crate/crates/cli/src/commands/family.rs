use anyhow::Result;
use serde_json::json;

use super::Context;
use crate::cli::FamilyArgs;
use crate::exit::{usage, SUCCESS};
use crate::output::{Outcome, Table};
use crate::system;

const DEFAULT_POINTS: usize = 19;

pub fn run(args: &FamilyArgs, ctx: &Context) -> Result<Outcome> {
    let system = system::build(&args.system)?;
    let chart = system
        .chart()
        .ok_or_else(|| usage(format!("{} has no radial table", system.label())))?;
    let profile = chart.profile();
    let points = args.points.unwrap_or(DEFAULT_POINTS);
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let radii: Vec<f64> = match (args.r_min, args.r_max) {
        (None, None) => (0..points)
            .map(|i| profile.sample_radius(0.05 + 0.9 * i as f64 / (points - 1) as f64))
            .collect(),
        (Some(lo), Some(hi)) if lo < hi => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
        _ => {
            return Err(usage(
                "--r-min and --r-max must be given together with r_min < r_max",
            ))
        }
    };

    let mut table = Table::new(["r", "h", "V", "rho", "M"]);
    let mut rows = Vec::with_capacity(radii.len());
    for &r in &radii {
        if !profile.contains(r) {
            return Err(usage(format!("r = {r} lies outside the domain")));
        }
        let rho = chart.map().rho_of_r(r)?;
        let row = [r, chart.h(r)?, chart.potential(r)?, rho, system.mass(rho)?];
        table.push_floats(&row);
        rows.push(row);
    }
    let report = json!({
        "command": "family",
        "seed": ctx.seed,
        "system": system::describe(&system),
        "family": chart.family(),
        "domain": profile.domain(),
        "expected_apsidal_angle": chart.family().expected_apsidal_angle(),
        "columns": table.header,
        "rows": rows,
    });
    Ok(Outcome::new(SUCCESS, report, Some(table)))
}
