//! Experiment harness for the `camat` command: the power-method and GMRES
//! studies on the periodic Poisson problem, written as CSV.

pub mod experiments;

use camat::CircError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Circ(#[from] CircError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 no convergence, 3 I/O or unreadable input, 4 numerical breakdown,
    /// 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Csv(_) => 3,
            CliError::Circ(e) => match e {
                CircError::NoConvergence { .. } => 2,
                CircError::Parse(_) => 3,
                CircError::ZeroDivisor { .. }
                | CircError::NonRealSpectrum { .. }
                | CircError::SingularSlice { .. }
                | CircError::DefectiveSlice { .. }
                | CircError::EigenFailure { .. }
                | CircError::ZeroVector => 4,
                _ => 1,
            },
            CliError::Usage(_) => 1,
        }
    }
}
