use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config files or parameters.
    Config(String),
    /// The requested rate cannot be reached.
    Infeasible(String),
    Runtime(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<outagelab::Error> for CliError {
    fn from(e: outagelab::Error) -> Self {
        use outagelab::Error as E;
        let msg = e.to_string();
        match e {
            _ if e.is_infeasible() => CliError::Infeasible(msg),
            E::UnknownConstellation(_)
            | E::InvalidConstellation(_)
            | E::InvalidParameter(_)
            | E::DimensionMismatch { .. }
            | E::AxisOutOfRange { .. }
            | E::QuadratureBudget { .. }
            | E::Json(_) => CliError::Config(msg),
            _ => CliError::Runtime(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
