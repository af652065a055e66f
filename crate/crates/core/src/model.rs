//! Reduced units, well geometry, exchange statistics and the scenario
//! vocabulary shared by every other module.
//!
//! All level energies are represented as integer exponents of the Boltzmann
//! base `q`, never as floating-point energies: a level with exponent `e` has
//! weight `q^e`. This keeps many-body bookkeeping exact and lets the oracle
//! compare against the series machinery bit-stably.

use crate::error::{Error, Result};
use crate::{cast, Float};

/// Hard cap on particle numbers accepted by the ensemble builders.
pub const PARTICLE_CAP: u32 = 64;

/// Inverse temperature and trap width in reduced units (`k_B = hbar = M = 1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConfig<F> {
    beta: F,
    length: F,
}

impl<F: Float> PhysicalConfig<F> {
    /// Build a configuration, rejecting non-positive parameters and any
    /// combination whose Boltzmann base leaves the open interval (0, 1) in
    /// the working precision.
    pub fn new(beta: F, length: F) -> Result<Self> {
        for (name, value) in [("beta", beta), ("length", length)] {
            if !(value.is_finite() && value > F::zero()) {
                return Err(Error::NonPositive {
                    name,
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let config = Self { beta, length };
        let q = config.boltzmann_base();
        if !(q > F::zero() && q < F::one()) {
            return Err(Error::DegenerateNome {
                q: q.to_f64().unwrap_or(f64::NAN),
                beta: beta.to_f64().unwrap_or(f64::NAN),
                length: length.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(config)
    }

    pub fn beta(&self) -> F {
        self.beta
    }

    pub fn length(&self) -> F {
        self.length
    }

    /// `ln q = -beta pi^2 / (2 length^2)`, computed directly from the
    /// parameters. Downstream code uses this instead of `q.ln()` so that
    /// nothing is lost when `q` rounds to within a few ulp of 1.
    pub fn log_nome(&self) -> F {
        let pi = F::PI();
        -(self.beta * pi * pi) / (cast::<F>(2.0) * self.length * self.length)
    }

    /// The Boltzmann base `q = exp(-beta pi^2 / (2 length^2))`.
    pub fn boltzmann_base(&self) -> F {
        self.log_nome().exp()
    }

    /// Energy of a unit exponent: `pi^2 / (2 length^2)`. A level with weight
    /// `q^e` has energy `e` times this.
    pub fn exponent_energy(&self) -> F {
        let pi = F::PI();
        pi * pi / (cast::<F>(2.0) * self.length * self.length)
    }
}

/// Which box a single-particle spectrum belongs to: the full well of width
/// `l` or one of the half wells of width `l/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Well {
    Full,
    Half,
}

impl Well {
    /// Power of the global base `q` carried by this well's ground scale:
    /// full-well levels weigh `q^(n^2)`, half-well levels `q^(4 n^2)`.
    pub fn nome_power(self) -> u32 {
        match self {
            Well::Full => 1,
            Well::Half => 4,
        }
    }
}

impl core::fmt::Display for Well {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Well::Full => "full",
            Well::Half => "half",
        })
    }
}

/// Integer exponent `e` such that level `n` of `well` has Boltzmann weight
/// `q^e`: `n^2` for the full well, `4 n^2` for a half well.
pub fn level_weight_exponent(well: Well, n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let n = u64::from(n);
    Ok(u64::from(well.nome_power()) * n * n)
}

/// Exchange statistics governing many-body state counting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statistics {
    /// Multisets of occupied orbitals.
    Bose,
    /// Strictly distinct orbitals within one identical group.
    Fermi,
    /// Ordered tuples; no symmetrization.
    Distinguishable,
}

impl core::fmt::Display for Statistics {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Statistics::Bose => "bose",
            Statistics::Fermi => "fermi",
            Statistics::Distinguishable => "dist",
        })
    }
}

/// Whether particles carry the two-valued internal color label that ties
/// each group to its starting side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LabelMode {
    WithColors,
    WithoutColors,
}

impl core::fmt::Display for LabelMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            LabelMode::WithColors => "with_colors",
            LabelMode::WithoutColors => "without_colors",
        })
    }
}

/// Before or after the dividing wall is removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Unmixed,
    Mixed,
}

impl Stage {
    /// The well that hosts single-particle orbitals at this stage.
    pub fn well(self) -> Well {
        match self {
            Stage::Unmixed => Well::Half,
            Stage::Mixed => Well::Full,
        }
    }
}

impl core::fmt::Display for Stage {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Stage::Unmixed => "unmixed",
            Stage::Mixed => "mixed",
        })
    }
}

/// A fully specified thermodynamic state: particle number, label mode,
/// exchange statistics and mixing stage. Together with a [`PhysicalConfig`]
/// this determines a canonical partition function.
///
/// Colored scenarios split the particles evenly into a blue group starting
/// on the left and a red group starting on the right, so `n_particles` must
/// be even. Distinguishable statistics is only defined with colors; the
/// colorless Gibbs setup has no notion of which particle is which.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub n_particles: u32,
    pub labels: LabelMode,
    pub statistics: Statistics,
    pub stage: Stage,
}

impl Scenario {
    pub fn new(
        n_particles: u32,
        labels: LabelMode,
        statistics: Statistics,
        stage: Stage,
    ) -> Result<Self> {
        let scenario = Self {
            n_particles,
            labels,
            statistics,
            stage,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 || !self.n_particles.is_multiple_of(2) {
            return Err(Error::OddParticleNumber(self.n_particles));
        }
        if self.n_particles > PARTICLE_CAP {
            return Err(Error::ParticleCapExceeded {
                n: self.n_particles,
                cap: PARTICLE_CAP,
            });
        }
        if self.labels == LabelMode::WithoutColors
            && self.statistics == Statistics::Distinguishable
        {
            return Err(Error::DistinguishableNeedsColors);
        }
        Ok(())
    }
}

/// An (unmixed, mixed) scenario family sharing particle number, labels and
/// statistics — the unit mixing processes are defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScenarioPair {
    pub n_particles: u32,
    pub labels: LabelMode,
    pub statistics: Statistics,
}

impl ScenarioPair {
    pub fn new(n_particles: u32, labels: LabelMode, statistics: Statistics) -> Result<Self> {
        Scenario::new(n_particles, labels, statistics, Stage::Unmixed)?;
        Ok(Self {
            n_particles,
            labels,
            statistics,
        })
    }

    pub fn unmixed(&self) -> Scenario {
        Scenario {
            n_particles: self.n_particles,
            labels: self.labels,
            statistics: self.statistics,
            stage: Stage::Unmixed,
        }
    }

    pub fn mixed(&self) -> Scenario {
        Scenario {
            n_particles: self.n_particles,
            labels: self.labels,
            statistics: self.statistics,
            stage: Stage::Mixed,
        }
    }
}
