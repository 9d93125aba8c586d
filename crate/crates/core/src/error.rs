use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("pixel {0} has a zero feature vector")]
    ZeroColumn(usize),
    #[error("zero variance: all pixels are identical")]
    ZeroVariance,
    #[error("empty segment")]
    EmptySegment,
    #[error("unknown segment id {0}")]
    UnknownSegment(usize),
    #[error("requested {requested} singular vectors but the effective rank is {rank}")]
    RankDeficient { requested: usize, rank: usize },
    #[error("only {distinct} distinct points for {k} clusters")]
    DegenerateClusters { distinct: usize, k: usize },
    #[error("no labeled pixels to evaluate")]
    NothingToEvaluate,
    #[error("problem size {n} exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("pixel {pixel}: {source}")]
    Pixel {
        pixel: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn at_pixel(self, pixel: usize) -> Self {
        Error::Pixel {
            pixel,
            source: alloc::boxed::Box::new(self),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: alloc::boxed::Box::new(self),
        }
    }

    /// Name of the pipeline stage that failed, if the error was tagged with one.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
