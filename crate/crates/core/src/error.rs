use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field size {size} exceeds the configured bound {bound}")]
    FieldTooLarge { size: u64, bound: u32 },
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precision exhausted: {0}")]
    PrecisionLoss(String),
    #[error("not a square: {0}")]
    NotASquare(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("the algebra ramifies at infinity")]
    RamifiedAtInfinity,
    #[error("search exhausted up to degree bound {0}")]
    SearchExhausted(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("non-integral value for {0}")]
    NonIntegral(&'static str),
    #[error("stabilizer of {vertex} has order {order}, expected q-1 or q^2-1")]
    StabilizerAnomalousOrder { vertex: String, order: usize },
    #[error("quotient exploration exceeded {limit} vertices")]
    NonterminationGuard { limit: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn is_precision_loss(&self) -> bool {
        matches!(self, Error::PrecisionLoss(_))
    }
}
