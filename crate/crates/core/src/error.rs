//! Error type shared across the crate.

/// Errors produced by distribution arithmetic, environments, algorithms
/// and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no samples")]
    NoSamples,

    #[error("empty {what}")]
    Empty { what: &'static str },

    #[error("invalid {what}: {value}")]
    InvalidParameter { what: &'static str, value: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error(
        "support explosion: convolution would produce {size} atoms (cap {cap}); \
         use the discretized variant"
    )]
    SupportExplosion { size: usize, cap: usize },

    #[error("outcome space too large: {size} combinations (cap {cap})")]
    ProductTooLarge { size: u128, cap: u128 },

    #[error("arm {arm} has no samples yet")]
    UnpulledArm { arm: usize },

    #[error("arm {arm} needs at least two samples for a variance estimate")]
    VarianceUndefined { arm: usize },

    #[error("super arm {index} has not been played yet")]
    UnplayedSuperArm { index: usize },

    #[error("reward supplied for arm {arm}, which is not in the chosen super arm")]
    RewardArmMismatch { arm: usize },

    #[error("expected {expected} rewards (one per constituent arm), got {got}")]
    RewardCountMismatch { expected: usize, got: usize },

    #[error("super arm is not a member of the action set")]
    SuperArmNotInActionSet,

    #[error("arm {arm} is not covered by any super arm")]
    UncoverableArm { arm: usize },

    #[error("horizon {horizon} is shorter than the init phase ({init_len} rounds)")]
    HorizonTooShort { horizon: u64, init_len: u64 },

    #[error("invalid environment: {}", .0.join("; "))]
    InvalidEnvironment(Vec<String>),

    #[error("algorithm {algorithm} requires a {required} environment")]
    EnvironmentKindMismatch {
        algorithm: &'static str,
        required: &'static str,
    },

    #[error("unknown algorithm {0:?} (known: cucb-g, sdcb, d-sdcb, naive)")]
    UnknownAlgorithm(String),

    #[error("run {algorithm}/{run_id} failed: {source}")]
    RunFailed {
        algorithm: String,
        run_id: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
