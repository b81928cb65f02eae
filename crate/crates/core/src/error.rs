use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("arithmetic domain error in {op}: operand value {value}")]
    Domain { op: &'static str, value: f64 },

    #[error("degenerate metric: minimum eigenvalue {min_eigenvalue:e}")]
    DegenerateMetric { min_eigenvalue: f64 },

    #[error("singular basis: smallest singular value {sigma_min:e}")]
    SingularBasis { sigma_min: f64 },

    #[error("form is not of type (0,{degree},0) at this point: |i_Z w| = {residual:e}")]
    NotTangential { degree: usize, residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("path error: {0}")]
    Path(String),

    #[error("quadrature did not converge after {intervals} intervals: last estimates {previous} and {last}")]
    Quadrature {
        intervals: usize,
        previous: f64,
        last: f64,
    },

    #[error("form is not d'-closed: |d'w| = {residual:e} at {location}")]
    NotClosed { residual: f64, location: String },
}

pub type Result<T> = std::result::Result<T, GeomError>;
