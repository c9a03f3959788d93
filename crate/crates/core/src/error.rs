use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// An index or size lies outside the supported range.
    #[error("range error in {func}: {detail}")]
    Range { func: &'static str, detail: String },

    #[error("unsupported order {order} for {func} (max {max})")]
    UnsupportedOrder {
        func: &'static str,
        order: u32,
        max: u32,
    },

    #[error("eigenvalue iteration did not converge (n = {n}, s = {s})")]
    EigenNoConvergence { n: usize, s: f64 },

    /// The transform integral diverges (e.g. `1/(1-e^-x)` at `s = 0`).
    #[error("transform diverges: {0}")]
    Divergence(String),

    #[error("function evaluation failed at x = {x}: {detail}")]
    Evaluation { x: f64, detail: String },

    /// The function lacks an analytic derivative or antiderivative the
    /// operation needs.
    #[error("unsupported function: {0}")]
    UnsupportedFunction(String),

    #[error("falling-factorial fit failed for j = {j} at i = {i}: residual {residual}")]
    FitFailure { j: usize, i: usize, residual: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn range(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Range {
            func,
            detail: detail.into(),
        }
    }
}
