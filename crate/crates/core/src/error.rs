use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero vector has no primitive ray")]
    ZeroVector,
    #[error("incomplete fan: {0}")]
    IncompleteFan(String),
    #[error("fan is not smooth")]
    NotSmooth,
    #[error("divisors live on different surfaces")]
    SurfaceMismatch,
    #[error("fan does not contain the ray {0}")]
    MissingRay(String),
    #[error("fan does not dominate the target fan")]
    NotDominating,
    #[error("function is not piecewise linear on the fan")]
    NotPiecewiseLinear,
    #[error("degenerate Newton polygon")]
    DegeneratePolygon,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("homogenization did not converge (last {last}, previous {prev})")]
    NonConvergence { last: f64, prev: f64 },
    #[error("real eigenvalues: no rotation norm")]
    NoRotationNorm,
    #[error("tropicalization is not a homeomorphism")]
    NotHomeomorphism,
    #[error("singular matrix")]
    Singular,
    #[error("exceptional/indeterminacy data unverified: {0}")]
    Unverified(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short module-qualified code, used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroVector | Error::IncompleteFan(_) | Error::NotSmooth => "lattice",
            Error::SurfaceMismatch | Error::MissingRay(_) | Error::NotDominating => "surface",
            Error::NotPiecewiseLinear | Error::DegeneratePolygon | Error::NonConvergence { .. } => {
                "support"
            }
            Error::NotHomeomorphism | Error::Singular => "trop",
            Error::NoRotationNorm => "equidist",
            Error::Unverified(_) => "tmap",
            Error::Budget(_) => "budget",
            Error::Parse { .. } => "parse",
            Error::Unsupported(_) | Error::Invalid(_) => "input",
            Error::Internal(_) => "internal",
        }
    }
}
