use thiserror::Error;

/// Errors raised by the bandit, prior, pose and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("arm index {index} out of range for {arm_count} arms")]
    IndexOutOfRange { index: usize, arm_count: usize },

    #[error("empty arm set")]
    EmptyArmSet,

    #[error("length mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("degenerate ranking: {0}")]
    DegenerateRanking(String),

    #[error(
        "ground-truth generation exhausted {attempts} attempts without a positive-quality arm"
    )]
    GenerationExhausted { attempts: usize },

    #[error("mismatch calibration failed for target {target}: closest achieved {closest}")]
    CalibrationFailed { target: f64, closest: f64 },

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("conditional over the complement of pose {pose} is undefined (drop probability 1)")]
    UndefinedConditional { pose: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_index(index: usize, arm_count: usize) -> Result<()> {
    if index < arm_count {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, arm_count })
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, got })
    }
}
