use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different quadratic fields: sqrt({0}) and sqrt({1})")]
    MixedSurdFields(u64, u64),
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("orbit hit the discontinuity set at step {step}")]
    OnDiscontinuity { step: usize },
    #[error("point lies outside the domain")]
    OutOfDomain,
    #[error("point is not in an induction zone")]
    NotInZone,
    #[error("enumeration did not terminate within {0} iterations")]
    NotTerminated(usize),
    #[error("degenerate parameter: {0}")]
    Degenerate(String),
    #[error("expansion reached a terminal parameter after {0} steps")]
    Terminal(usize),
    #[error("window too short: need {needed} letters, have {have}")]
    WindowTooShort { needed: usize, have: usize },
    #[error("prefix too short: only {0} blocks decomposed")]
    PrefixTooShort(usize),
    #[error("degenerate fit (R^2 = {0:.4})")]
    DegenerateFit(f64),
    #[error("depth mismatch: {0}")]
    DepthMismatch(String),
    #[error("sampler failure: {0}")]
    SamplerFailure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::MixedSurdFields(..) => "MixedSurdFields",
            Error::Parse(_) => "Parse",
            Error::OnDiscontinuity { .. } => "OnDiscontinuity",
            Error::OutOfDomain => "OutOfDomain",
            Error::NotInZone => "NotInZone",
            Error::NotTerminated(_) => "NotTerminated",
            Error::Degenerate(_) => "Degenerate",
            Error::Terminal(_) => "Terminal",
            Error::WindowTooShort { .. } => "WindowTooShort",
            Error::PrefixTooShort(_) => "PrefixTooShort",
            Error::DegenerateFit(_) => "DegenerateFit",
            Error::DepthMismatch(_) => "DepthMismatch",
            Error::SamplerFailure(_) => "SamplerFailure",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
