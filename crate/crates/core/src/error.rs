use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("odd number of bits ({0}); QPSK needs bit pairs")]
    OddBitCount(usize),

    #[error("grid is {found_rows}x{found_cols}, expected {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },

    #[error("signal has {found} samples, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid frame configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "Doppler index {k_nu:.3} is ambiguous (|k_nu| must stay below {limit}); \
         the unambiguous speed limit is {max_speed_mps:.2} m/s ({:.1} km/h)",
        max_speed_mps * 3.6
    )]
    DopplerAmbiguity {
        k_nu: f64,
        limit: f64,
        max_speed_mps: f64,
    },

    #[error("delay index {l_tau:.3} does not fit in a frame of {m} delay bins")]
    DelayOutOfFrame { l_tau: f64, m: usize },

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("targets {first} and {second} share integer delay bin {bin}")]
    SharedDelayBin {
        first: usize,
        second: usize,
        bin: i64,
    },

    #[error("requested {requested} peaks but only {found} local maxima were found")]
    TooFewPeaks { requested: usize, found: usize },

    #[error("transmitted symbol at slot {slot}, subcarrier {subcarrier} is zero")]
    ZeroSymbol { slot: usize, subcarrier: usize },
}
