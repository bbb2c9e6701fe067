use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid operand: {0}")]
    InvalidOperand(String),

    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("point outside evaluation radius {radius} (sup norm {norm}); truncation not certified")]
    OutsideRadius { radius: f64, norm: f64 },

    #[error("singular kernel: constant term is zero")]
    SingularKernel,

    #[error("series is not invertible: constant term is zero")]
    NotInvertible,

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("gauge factor vanishes at the origin")]
    GaugeSingular,

    #[error("degenerate kernel: K(0,0) = {0} is not real positive")]
    DegenerateKernel(String),

    #[error("insufficient trusted degree: need {needed}, have {available}")]
    InsufficientDegree { needed: usize, available: usize },

    #[error("point is not on the hypersurface (defect {defect:e})")]
    NotOnHypersurface { defect: f64 },

    #[error("transversal curvature {0} is not negative")]
    Signature(f64),

    #[error("modules are incomparable: {0}")]
    Incomparable(String),

    #[error("coefficient matrix is rank deficient: {0}")]
    RankDeficient(String),
}

impl Error {
    /// `true` for errors caused by malformed or out-of-contract input, `false`
    /// for failures of the numerics on otherwise valid input.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::InvalidOperand(_)
            | Error::IndexOutOfRange { .. }
            | Error::OutsideRadius { .. }
            | Error::InvalidKernel(_)
            | Error::InvalidParameters(_)
            | Error::GaugeSingular
            | Error::NotOnHypersurface { .. }
            | Error::Incomparable(_) => true,
            Error::SingularKernel
            | Error::NotInvertible
            | Error::DegenerateKernel(_)
            | Error::InsufficientDegree { .. }
            | Error::Signature(_)
            | Error::RankDeficient(_) => false,
        }
    }
}
