use thiserror::Error;

/// Errors raised by assembly, time stepping, stationary solves and checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("coordinate {x:?} lies outside the domain [{lo}, {hi}] on axis {axis}")]
    OutOfDomain { x: f64, axis: usize, lo: f64, hi: f64 },
    #[error("reaction argument {0} is negative")]
    ReactionDomain(f64),
    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },
    #[error("bad parameter for `{owner}`: {message}")]
    Param { owner: String, message: String },
    #[error("problem violates its hypotheses: {0}")]
    Invalid(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("gauge factor overflow: |psi/sigma| = {value} exceeds {limit}")]
    Scaling { value: f64, limit: f64 },
    #[error("state is in the {found} gauge, expected {expected}")]
    Gauge {
        expected: &'static str,
        found: &'static str,
    },
    #[error("linear solver did not converge: residual {residual:e} after {iterations} iterations")]
    Solver { residual: f64, iterations: usize },
    #[error("singular pivot {pivot:e} at row {row}")]
    SingularPivot { row: usize, pivot: f64 },
    #[error("time step {dt} exceeds the positivity bound {dt_max}")]
    StepSize { dt: f64, dt_max: f64 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("inverse iteration did not converge in {iterations} iterations (last change {last_change:e}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        last_change: f64,
        residual: f64,
    },
    #[error("iterate entry {value:e} at index {index} is negative: operator is not irreducible")]
    Irreducible { index: usize, value: f64 },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("oracle limited to {cap} unknowns, got {size}")]
    OracleScope { size: usize, cap: usize },
    #[error("at t = {time}: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(owner: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Param {
            owner: owner.into(),
            message: message.into(),
        }
    }

    /// Strip any `AtTime` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code: 2 config error, 3 invariant failure, 4 solver failure.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Grid(_)
            | Error::OutOfDomain { .. }
            | Error::UnknownStrategy { .. }
            | Error::Param { .. }
            | Error::Invalid(_)
            | Error::Unsupported(_)
            | Error::Dimension(_)
            | Error::Config(_)
            | Error::Degenerate(_)
            | Error::OracleScope { .. }
            | Error::StepSize { .. }
            | Error::Gauge { .. }
            | Error::Io(_) => 2,
            Error::Invariant(_) | Error::ReactionDomain(_) | Error::Irreducible { .. } => 3,
            Error::Solver { .. }
            | Error::SingularPivot { .. }
            | Error::NonConvergence { .. }
            | Error::Scaling { .. }
            | Error::AtTime { .. } => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
