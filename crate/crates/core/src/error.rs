use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown constellation `{0}`")]
    UnknownConstellation(String),

    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("axis {axis} out of range for a {dim}-dimensional constellation")]
    AxisOutOfRange { axis: usize, dim: usize },

    /// The projected constellation cannot carry the requested rate at any SNR.
    ///
    /// This is the diversity-loss condition: the projection onto a coordinate
    /// axis carries at most `limit` bits, so the outage boundary does not cross
    /// the axes and the upper bound on the outage probability does not exist.
    #[error(
        "target of {target:.4} bits is not reachable: the projection carries at most {limit:.4} bits \
         ({points} distinct points); full diversity is lost at this rate"
    )]
    Saturation { target: f64, limit: f64, points: usize },

    #[error(
        "quadrature needs {required:.3e} kernel evaluations which exceeds the budget of {budget:.3e}; \
         use the Monte Carlo engine instead"
    )]
    QuadratureBudget { required: f64, budget: f64 },

    #[error("rate is infeasible: {0}")]
    InfeasibleRate(String),

    #[error("root finding failed: {0}")]
    Solver(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that signal an unreachable rate rather than bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Saturation { .. } | Error::InfeasibleRate(_))
    }
}
