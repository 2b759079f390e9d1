use anyhow::Result;
use bertrand_core::dynamics::orbit::measured_apsidal_angle;
use bertrand_core::dynamics::{circular_orbit, RadialOrbit};
use bertrand_core::Error;
use serde_json::json;

use super::{explicit_state, Context};
use crate::cli::ApsidalArgs;
use crate::exit::{usage, SUCCESS};
use crate::output::{Outcome, Table};
use crate::system;

const DEFAULT_ECCENTRICITY: f64 = 0.2;

pub fn run(args: &ApsidalArgs, ctx: &Context) -> Result<Outcome> {
    let system = system::build(&args.system)?;
    let chart = system
        .chart()
        .ok_or_else(|| usage(format!("{} has no radial chart", system.label())))?;
    let (energy, l) = match explicit_state(&args.state, &system)? {
        Some(state) => (
            system.hamiltonian(&state.q, &state.p)?,
            state.angular_momentum(),
        ),
        None => {
            let l = args.state.angular_momentum.unwrap_or(1.0);
            let energy = match args.state.energy {
                Some(e) => e,
                None => {
                    let ecc = args.eccentricity.unwrap_or(DEFAULT_ECCENTRICITY);
                    if !(0.0..1.0).contains(&ecc) {
                        return Err(usage("--eccentricity must lie in [0, 1)"));
                    }
                    let rc = circular_orbit(&system, l)?.r;
                    let r_in = rc * (1.0 - ecc);
                    if !chart.interval().contains(r_in) {
                        return Err(Error::NoTurningPoints {
                            energy: f64::NAN,
                            l,
                        }
                        .into());
                    }
                    chart.effective(r_in, l)?
                }
            };
            (energy, l)
        }
    };

    let analysis = RadialOrbit::new(&system, energy, l)?.analysis()?;
    let measured = measured_apsidal_angle(&system, energy, l)?;
    let expected = system::expected_apsidal_angle(&system).unwrap_or(f64::NAN);
    let quad_dev = (analysis.apsidal_angle - expected).abs();
    let measured_dev = (measured - expected).abs();

    let mut table = Table::new([
        "energy",
        "L",
        "r_min",
        "r_max",
        "quadrature",
        "measured",
        "expected",
        "quadrature_deviation",
        "measured_deviation",
    ]);
    table.push_floats(&[
        energy,
        l,
        analysis.r_min,
        analysis.r_max,
        analysis.apsidal_angle,
        measured,
        expected,
        quad_dev,
        measured_dev,
    ]);
    let report = json!({
        "command": "apsidal",
        "seed": ctx.seed,
        "system": system::describe(&system),
        "orbit": analysis,
        "quadrature_angle": analysis.apsidal_angle,
        "measured_angle": measured,
        "expected_angle": expected,
        "quadrature_deviation": quad_dev,
        "measured_deviation": measured_dev,
    });
    Ok(Outcome::new(SUCCESS, report, Some(table)))
}
