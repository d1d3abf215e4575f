use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the command-line tool, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(gamow_core::Error),
    #[error("verification failed: {0} check(s) out of tolerance")]
    ChecksFailed(usize),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ReadConfig { .. } | CliError::Parse(_) | CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::ChecksFailed(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<gamow_core::Error> for CliError {
    fn from(e: gamow_core::Error) -> Self {
        use gamow_core::Error as E;
        match e {
            E::InvalidPotential(_)
            | E::InvalidScale(_)
            | E::LayerOutOfRange { .. }
            | E::ZeroWavenumber
            | E::NegativeRadius(_)
            | E::NonPositiveEnergy(_)
            | E::InvalidGrid(_)
            | E::InvalidRegion(_) => CliError::Config(e.to_string()),
            E::Pole { .. } | E::MissedRoots { .. } | E::IllConditionedResidue { .. } | E::NonConvergent(_) => {
                CliError::Numerical(e)
            }
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Io(std::io::Error::other(format!("{other:?}"))),
        }
    }
}
