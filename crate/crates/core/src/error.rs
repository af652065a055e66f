//! Error type shared by every module.

/// Everything that can go wrong while building spectra, summing series or
/// assembling thermodynamic reports.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("`{name}` must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("nome must lie in [0, 1), got {0}")]
    NomeOutOfRange(f64),

    #[error(
        "Boltzmann base exp(-beta*pi^2/(2*length^2)) = {q} degenerates for \
         beta = {beta}, length = {length}"
    )]
    DegenerateNome { q: f64, beta: f64, length: f64 },

    #[error("level index must be at least 1")]
    ZeroLevel,

    #[error("transformed nome {transformed} still above the summation threshold {threshold}")]
    DualityOutOfRange { transformed: f64, threshold: f64 },

    #[error("series did not reach tolerance {tol} within {max_terms} terms")]
    ToleranceUnreachable { tol: f64, max_terms: u32 },

    #[error("particle number {n} exceeds the supported cap {cap}")]
    ParticleCapExceeded { n: u32, cap: u32 },

    #[error("scenarios need a positive even particle number, got {0}")]
    OddParticleNumber(u32),

    #[error("distinguishable statistics is only defined for colored scenarios")]
    DistinguishableNeedsColors,

    #[error("partition function is not positive ({value}); spectrum too cold for this precision")]
    NonPositivePartition { value: f64 },

    #[error("operands were computed at different thermodynamic points (q = {left} vs {right})")]
    PointMismatch { left: f64, right: f64 },

    #[error("expected an (unmixed, mixed) pair of the same scenario family")]
    StagePairMismatch,

    #[error("spectrum well does not match the scenario stage")]
    WellStageMismatch,

    #[error(
        "spectrum cutoff too small: tail estimate {tail_estimate} exceeds budget {budget} \
         at n_max = {n_max}"
    )]
    CutoffTooSmall {
        n_max: u32,
        tail_estimate: f64,
        budget: f64,
    },

    #[error("state list is empty")]
    EmptyStateList,

    #[error("quantity changes sign over the fitted tail; no power-law exponent")]
    SignChangeInTail,

    #[error("power-law fit needs at least {needed} points, got {got}")]
    TooFewFitPoints { needed: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
