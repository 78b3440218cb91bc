use thiserror::Error;

/// Errors produced by the analysis engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{quantity} = {value} lies outside the admissible range {range}")]
    Domain {
        quantity: &'static str,
        value: f64,
        range: String,
    },

    #[error("singular geometry mapping at (xi, eta) = ({xi}, {eta}), det J = {det}")]
    Geometry { xi: f64, eta: f64, det: f64 },

    #[error("through-thickness integration did not converge (last relative change {change:e})")]
    Integration { change: f64 },

    #[error("series for the conduction profile did not converge within {terms} terms")]
    Convergence { terms: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("material error: {0}")]
    Material(String),

    #[error("boundary conditions leave the stiffness singular: {0}")]
    Boundary(String),

    #[error("linear solver failure: {0}")]
    Solver(String),

    #[error("newton iteration did not converge in {iterations} iterations (relative residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("singular tangent stiffness at load factor {load_factor}; likely a bifurcation point, use smaller load steps")]
    Bifurcation { load_factor: f64 },

    #[error("eigen solver: {0}")]
    Eigen(String),

    #[error("case file: {0}")]
    Case(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn arg(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
