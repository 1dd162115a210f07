use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("{module}: {source}")]
    Numerical {
        module: &'static str,
        #[source]
        source: pellip_core::Error,
    },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Wraps a library error; parameter and shape errors count as schema errors.
    pub fn from_core(module: &'static str, source: pellip_core::Error) -> Self {
        use pellip_core::Error as E;
        match source {
            E::InvalidParameter { .. }
            | E::DimensionMismatch { .. }
            | E::NotElliptic { .. }
            | E::NotPElliptic { .. }
            | E::EmptyField
            | E::EmptyMask
            | E::MisalignedField { .. } => CliError::Schema(format!("{module}: {source}")),
            _ => CliError::Numerical { module, source },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            _ => 1,
        }
    }
}

/// Attaches the owning module to library results.
pub trait Context<T> {
    fn module(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> Context<T> for pellip_core::Result<T> {
    fn module(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|e| CliError::from_core(module, e))
    }
}
