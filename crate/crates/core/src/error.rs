use crate::graph::TickIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("self-loop on node {0}")]
    SelfLoop(TickIndex),
    #[error("unknown node {0}")]
    UnknownNode(TickIndex),
    #[error("indices out of order: expected i < j, got i = {i}, j = {j}")]
    Ordering { i: usize, j: usize },
    #[error("index {index} out of range for series of length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("window capacity must be at least 1")]
    ZeroCapacity,
    #[error("window holds {len} of {capacity} samples; warm-up incomplete")]
    WarmupIncomplete { len: usize, capacity: usize },
    #[error("window already holds {capacity} samples")]
    WindowFull { capacity: usize },
    #[error("stream gap: expected tick {expected}, got {got}")]
    StreamGap { expected: TickIndex, got: TickIndex },
    #[error("non-finite value {value} at tick {index}")]
    NonFinite { index: TickIndex, value: f64 },
    #[error("invalid choice: {0}")]
    InvalidChoice(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("column {0} not found")]
    MissingColumn(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
