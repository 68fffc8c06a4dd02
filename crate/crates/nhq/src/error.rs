use thiserror::Error;

use crate::config::Violation;

/// Process exit code for configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit code for failures after the run has started.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {0}: {1}")]
    ReadConfig(String, #[source] std::io::Error),
    #[error("invalid TOML: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("bad override `{0}`: {1}")]
    Override(String, String),
    #[error("invalid scenario:\n{}", fmt_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error("run failed at step {step}: {source}")]
    Numerical {
        step: usize,
        #[source]
        source: nhq_core::Error,
    },
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::ReadConfig(..) | Self::Syntax(_) | Self::Override(..) | Self::Invalid(_) => {
                EXIT_CONFIG
            }
            Self::Output(_) | Self::Numerical { .. } => EXIT_NUMERICAL,
        }
    }
}
