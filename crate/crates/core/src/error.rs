use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is out of range ({expected})")]
    Range {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("enumeration over N = {n} components is infeasible (limit {limit})")]
    Feasibility { n: usize, limit: usize },

    #[error("stimulus `{0}` is already registered")]
    Conflict(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    /// A caller invoked an operation outside its preconditions.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("log line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by invalid user input: configs, grids, parameter ranges
    /// and malformed logs.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Range { .. }
                | Error::Dimension(_)
                | Error::Feasibility { .. }
                | Error::Conflict(_)
                | Error::Integrity(_)
                | Error::Config { .. }
                | Error::Parse { .. }
        )
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Range {
            name,
            value,
            expected: "0 <= x <= 1",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Range {
            name,
            value,
            expected: "x > 0",
        })
    }
}
