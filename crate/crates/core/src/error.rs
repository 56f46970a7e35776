use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two consecutive states (or sphere points) are orthogonal (antipodal), so
    /// the connecting geodesic and therefore the phase are undefined.
    #[error("degenerate geodesic between vertices {0} and {1}")]
    DegenerateGeodesic(usize, usize),

    #[error("sample period {dt} s too coarse for minimum dwell {t_min} s")]
    SamplingTooCoarse { dt: f64, t_min: f64 },

    #[error("delay {tau} s leaves too little overlap in a trace of {len} samples")]
    InsufficientOverlap { tau: f64, len: usize },

    #[error("delay {tau} s is not a multiple of the sample period {dt} s")]
    OffGridDelay { tau: f64, dt: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("incompatible traces: {0}")]
    IncompatibleTraces(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
