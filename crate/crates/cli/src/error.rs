use std::fmt;

/// Failures surfaced to the shell. Exit codes: 2 for configuration
/// problems, 3 for numeric failures inside a computation, 1 for I/O.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Numeric(msg) | CliError::Io(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl From<cfsk_core::Error> for CliError {
    fn from(e: cfsk_core::Error) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}
