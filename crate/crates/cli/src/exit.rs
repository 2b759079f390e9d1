//! Process exit codes.

use bertrand_core::Error;

pub const SUCCESS: u8 = 0;
pub const FAILURE: u8 = 1;
pub const USAGE: u8 = 2;
pub const DOMAIN_EXIT: u8 = 3;
pub const DRIFT: u8 = 4;
pub const NO_TURNING_POINTS: u8 = 5;
pub const SPECTRAL_MISMATCH: u8 = 6;

/// A configuration or parameter problem detected by the front end.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    Usage(message.into()).into()
}

fn code_of_core(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_)
        | Error::Index { .. }
        | Error::Regime(_)
        | Error::Domain { .. }
        | Error::Singularity { .. }
        | Error::Fit(_) => USAGE,
        Error::DomainExit { .. } => DOMAIN_EXIT,
        Error::NoTurningPoints { .. }
        | Error::DegenerateOrbit(_)
        | Error::NoCircularOrbit { .. } => NO_TURNING_POINTS,
        Error::DegeneracyMismatch { .. }
        | Error::LevelMismatch { .. }
        | Error::GridTooCoarse { .. } => SPECTRAL_MISMATCH,
        Error::Quadrature(_)
        | Error::StepFailure { .. }
        | Error::Convergence(_)
        | Error::DegeneratePoint(_) => FAILURE,
    }
}

/// Exit code for an error raised anywhere below `main`.
pub fn code_of(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<Usage>().is_some() {
            return USAGE;
        }
        if let Some(core) = cause.downcast_ref::<Error>() {
            return code_of_core(core);
        }
    }
    FAILURE
}
