use std::fmt;

use chen_censor::Error;

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl fmt::Display) -> Self {
        Self { code: EXIT_USAGE, message: msg.to_string() }
    }

    pub fn runtime(msg: impl fmt::Display) -> Self {
        Self { code: EXIT_RUNTIME, message: msg.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::InvalidPlan(_) | Error::Inconsistent(_) | Error::InvalidConfig(_) => EXIT_USAGE,
            Error::DegenerateSample(_)
            | Error::NoRoot { .. }
            | Error::SingularInformation(_)
            | Error::ProposalInvalid { .. }
            | Error::AllReplicationsFailed(_)
            | Error::BootstrapFailures { .. } => EXIT_RUNTIME,
        };
        Self { code, message: e.to_string() }
    }
}
