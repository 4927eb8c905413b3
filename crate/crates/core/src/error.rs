use thiserror::Error;

/// Errors raised by the solvers and special-function evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("{what} is undefined for {context}")]
    Undefined {
        what: &'static str,
        context: String,
    },

    #[error("special function {function} parameter out of domain: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function} failed to converge within {terms} terms")]
    SeriesNotConverged { function: &'static str, terms: usize },

    #[error("evaluation overflow: {0}")]
    Overflow(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("singular linear system at pivot {0}")]
    Singular(usize),

    #[error("initial guess rejected: {0}")]
    GuessRejected(String),

    #[error("continuous Newton iteration diverged at step {iteration} (residual {residual:e})")]
    Diverged { iteration: usize, residual: f64 },

    #[error("continuous Newton iteration exceeded {max_iterations} steps (residual {residual:e})")]
    MaxIterations { max_iterations: usize, residual: f64 },

    #[error("negative value {value:e} at node {node} exceeds clamp tolerance")]
    NegativeValues { node: usize, value: f64 },

    #[error("solution left the sanity envelope: max {max:e} > {bound:e}")]
    OutOfEnvelope { max: f64, bound: f64 },

    #[error("time step collapsed below {tau_min:e} at t = {t}")]
    StepCollapsed { t: f64, tau_min: f64 },

    #[error("nonlinear source overflow at t = {t} (u_max = {u_max:e})")]
    SourceOverflow { t: f64, u_max: f64 },

    #[error("insufficient series: {0}")]
    InsufficientSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;
