use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// An argument lies outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative solver stopped before reaching its residual target.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    /// The requested computation exceeds the configured work budget.
    #[error("work budget exceeded: {required} units requested, budget is {budget}")]
    Resource { required: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
