use crate::qp::Qp;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("QP {0} is outside [0, 51]")]
    QpOutOfRange(i64),
    #[error("search interval [{start}, {end}] is empty: start must be below end")]
    EmptyInterval { start: Qp, end: Qp },
    #[error("search round already terminated")]
    RoundTerminated,
    #[error("search round is still active")]
    RoundActive,
    #[error("no samples given")]
    EmptySamples,
    #[error("anchor QP {0} leaves no room for a further JND point")]
    RangeExhausted(Qp),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    #[error("no latent threshold for sequence {sequence} at JND level {jnd_index}")]
    MissingThreshold { sequence: crate::SequenceId, jnd_index: u8 },
    #[error("sample has zero variance")]
    DegenerateSample,
    #[error("no small-sample critical value tabulated for alpha = {0}")]
    UnsupportedAlpha(f64),
    #[error("duplicate record for subject {subject} on {sequence} at JND level {jnd_index}")]
    DuplicateRecord {
        sequence: crate::SequenceId,
        subject: u32,
        jnd_index: u8,
    },
}

impl Error {
    pub(crate) const fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
