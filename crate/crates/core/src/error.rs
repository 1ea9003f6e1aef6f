use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} outside the encodable range (|x| < {limit})")]
    Range { value: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("scale mismatch: {left} vs {right} fractional bits")]
    ScaleMismatch { left: u32, right: u32 },

    #[error("correlated randomness {id} already consumed")]
    MaskReuse { id: u64 },

    #[error("protocol desync in round {round}: {detail}")]
    Desync { round: u64, detail: String },

    #[error("deadlock: correlation {correlation} is waiting on parties {missing:?}")]
    Deadlock {
        correlation: u64,
        missing: Vec<usize>,
    },

    #[error("reveal ticket {correlation} read before flush")]
    Unresolved { correlation: u64 },

    #[error("preprocessing: {0}")]
    Preprocessing(String),

    #[error("capacity: {0}")]
    Capacity(String),

    #[error("wire format: {0}")]
    Wire(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
