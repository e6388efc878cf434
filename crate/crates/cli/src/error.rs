use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("unresolved name `{name}`{}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Unresolved { name: String, line: Option<usize> },

    #[error("{context}: {source}")]
    Invariant {
        context: String,
        #[source]
        source: slopecert_core::Error,
    },

    #[error("self-test failed")]
    SelftestFailed,

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 success, 1 usage or parse problems, 2 invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. }
            | CliError::Usage(_)
            | CliError::Unresolved { .. }
            | CliError::Io { .. } => 1,
            CliError::Invariant { .. } | CliError::SelftestFailed => 2,
        }
    }

    pub(crate) fn invariant(
        context: impl Into<String>,
    ) -> impl FnOnce(slopecert_core::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Invariant { context, source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
