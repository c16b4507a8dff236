use hmp_core::ValidationErrors;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema_version {found}, this build reads version {expected}")]
    SchemaVersion { found: i64, expected: i64 },
    #[error("{0}")]
    Invalid(ValidationErrors),
    #[error(transparent)]
    Core(#[from] hmp_core::Error),
    #[error("generator: {0}")]
    Generator(String),
    #[error("schedule report: {0}")]
    Report(String),
}

impl From<ValidationErrors> for Error {
    fn from(value: ValidationErrors) -> Self {
        Error::Invalid(value)
    }
}

impl Error {
    /// Converts a byte offset into 1-based line and column.
    pub(crate) fn at_offset(text: &str, offset: usize, message: impl Into<String>) -> Self {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn from_toml(text: &str, e: toml::de::Error) -> Self {
        let offset = e.span().map_or(0, |s| s.start);
        Error::at_offset(text, offset, e.message().trim_end().to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
