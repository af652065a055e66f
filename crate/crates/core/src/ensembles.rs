//! Canonical partition functions for every mixing scenario.
//!
//! The workhorse is the cycle-index recursion
//!
//! ```text
//! Z_N^± = (1/N) sum_{k=1..N} (±1)^(k-1) z1(tau^k) Z_{N-k}^± ,   Z_0 = 1,
//! ```
//!
//! with `tau` the single-particle nome of the hosting well (`q` for the full
//! well, `q^4` for a half well), `+` for bosons, `-` for fermions;
//! distinguishable particles factorize as `z1(tau)^N`. Scenario partition
//! functions assemble from the ladder `Z_0..Z_N`:
//!
//! * colored, either stage: `(Z_{N/2})^2` over the stage's well — one factor
//!   per color group, identical spectra, so for `N = 2` all three statistics
//!   coincide;
//! * colorless, unmixed: `sum_{k=0..N} Z_k Z_{N-k}` over the half well, one
//!   term per left/right split;
//! * colorless, mixed: `Z_N` over the full well.
//!
//! The recursion is evaluated over one of two rings picked per call. Warm
//! spectra (`q` near 1) use floating-point [`SeriesValue`] leaves from the
//! theta machinery, where the alternating Fermi sum is well conditioned.
//! Cold spectra route through exact integer-exponent polynomials
//! ([`QPoly`]), because there the Fermi subtraction cancels `q^12`-deep and
//! no floating-point evaluation of the leaves can survive it. The switch is
//! decided by the size of that cancellation, `q^(-base (d^2 - 1))` for a
//! depth-`d` ladder.

// Positivity guards use `!(x > 0)` on purpose: NaN must fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{LabelMode, PhysicalConfig, Scenario, Stage, Statistics, Well, PARTICLE_CAP};
use crate::qpoly::{required_cap, tuple_tail_bound, QPoly};
use crate::series::{weighted_series_with_log, z1_with_log, SeriesValue};
use crate::{cast, Float};

/// Cancellation amplification (in decimal digits) above which the exact
/// polynomial backend takes over. Below one digit the alternating float
/// recursion loses at most a bit, so the theta leaves stay in charge.
const AMP_GUARD_DIGITS: f64 = 1.0;

/// Largest exponent cap the polynomial backend accepts before falling back
/// to floating-point leaves.
const CAP_BUDGET: u64 = 32_768;

/// Ring interface the recursion is written against: `SeriesValue` (values),
/// `Dual` (values plus `beta d/dbeta` derivatives) and `QPoly` (exact
/// exponent polynomials) all satisfy it.
pub trait PartitionTerm<F: Float>:
    Clone + Zero + One + core::ops::Sub<Output = Self> + core::ops::Mul<F, Output = Self>
{
}

impl<F: Float, T> PartitionTerm<F> for T where
    T: Clone + Zero + One + core::ops::Sub<Output = Self> + core::ops::Mul<F, Output = Self>
{
}

/// Value and its `beta d/dbeta` derivative, propagated through ring
/// arithmetic (the operator is a derivation, so dual-number rules apply).
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dual<F> {
    pub z: SeriesValue<F>,
    pub dz: SeriesValue<F>,
}

impl<F: Float> core::ops::Add for Dual<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            z: self.z + rhs.z,
            dz: self.dz + rhs.dz,
        }
    }
}

impl<F: Float> core::ops::Sub for Dual<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            z: self.z - rhs.z,
            dz: self.dz - rhs.dz,
        }
    }
}

impl<F: Float> core::ops::Mul for Dual<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            z: self.z * rhs.z,
            dz: self.dz * rhs.z + self.z * rhs.dz,
        }
    }
}

impl<F: Float> core::ops::Mul<F> for Dual<F> {
    type Output = Self;
    fn mul(self, rhs: F) -> Self {
        Self {
            z: self.z * rhs,
            dz: self.dz * rhs,
        }
    }
}

impl<F: Float> Zero for Dual<F> {
    fn zero() -> Self {
        Self {
            z: SeriesValue::zero(),
            dz: SeriesValue::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.z.is_zero() && self.dz.is_zero()
    }
}

impl<F: Float> One for Dual<F> {
    fn one() -> Self {
        Self {
            z: SeriesValue::one(),
            dz: SeriesValue::zero(),
        }
    }
}

/// Build the ladder `Z_0..Z_depth` over an arbitrary partition ring.
/// `leaf(k)` supplies the single-particle element at cycle length `k`.
pub(crate) fn zn_ladder<F, T, L>(depth: u32, statistics: Statistics, mut leaf: L) -> Result<Vec<T>>
where
    F: Float,
    T: PartitionTerm<F>,
    L: FnMut(u32) -> Result<T>,
{
    if depth > PARTICLE_CAP {
        return Err(Error::ParticleCapExceeded {
            n: depth,
            cap: PARTICLE_CAP,
        });
    }
    let mut ladder: Vec<T> = Vec::with_capacity(depth as usize + 1);
    ladder.push(T::one());
    if depth == 0 {
        return Ok(ladder);
    }
    match statistics {
        Statistics::Distinguishable => {
            let single = leaf(1)?;
            for i in 1..=depth as usize {
                ladder.push(ladder[i - 1].clone() * single.clone());
            }
        }
        Statistics::Bose | Statistics::Fermi => {
            let leaves: Vec<T> = (1..=depth).map(&mut leaf).collect::<Result<_>>()?;
            for i in 1..=depth as usize {
                let mut acc = T::zero();
                for k in 1..=i {
                    let term = leaves[k - 1].clone() * ladder[i - k].clone();
                    acc = if statistics == Statistics::Fermi && k % 2 == 0 {
                        acc - term
                    } else {
                        acc + term
                    };
                }
                ladder.push(acc * cast::<F>(1.0 / i as f64));
            }
        }
    }
    Ok(ladder)
}

/// Assemble a scenario partition function from the ladder of its stage well.
pub(crate) fn combine_scenario<F, T>(scenario: &Scenario, ladder: &[T]) -> T
where
    F: Float,
    T: PartitionTerm<F>,
{
    let n = scenario.n_particles as usize;
    match scenario.labels {
        LabelMode::WithColors => {
            let group = ladder[n / 2].clone();
            group.clone() * group
        }
        LabelMode::WithoutColors => match scenario.stage {
            Stage::Unmixed => {
                let mut acc = T::zero();
                for k in 0..=n {
                    acc = acc + ladder[k].clone() * ladder[n - k].clone();
                }
                acc
            }
            Stage::Mixed => ladder[n].clone(),
        },
    }
}

/// Recursion depth actually needed for a scenario.
fn ladder_depth(scenario: &Scenario) -> u32 {
    match scenario.labels {
        LabelMode::WithColors => scenario.n_particles / 2,
        LabelMode::WithoutColors => scenario.n_particles,
    }
}

/// Coldest composite Fermi exponent — the scale the exact backend's relative
/// truncation target is anchored to.
fn fermi_ground(depth: u32, base: u32) -> u64 {
    u64::from(base) * (1..=u64::from(depth)).map(|i| i * i).sum::<u64>()
}

fn composite_ground(scenario: &Scenario, base: u32) -> u64 {
    match (scenario.labels, scenario.stage) {
        (LabelMode::WithColors, _) | (LabelMode::WithoutColors, Stage::Unmixed) => {
            2 * fermi_ground(scenario.n_particles / 2, base)
        }
        (LabelMode::WithoutColors, Stage::Mixed) => fermi_ground(scenario.n_particles, base),
    }
}

enum Backend {
    Exact { cap: u64 },
    Theta,
}

fn choose_backend(depth: u32, n_total: u32, base: u32, ground: u64, u: f64, tol: f64) -> Backend {
    if depth >= 2 && u.is_finite() {
        let depth_f = depth as f64;
        let digits =
            f64::from(base) * (depth_f * depth_f - 1.0) * u / core::f64::consts::LN_10;
        if digits > AMP_GUARD_DIGITS {
            let cap = required_cap(n_total, base, u, ground, tol.clamp(1e-300, 0.1));
            if cap <= CAP_BUDGET {
                return Backend::Exact { cap };
            }
        }
    }
    Backend::Theta
}

/// Canonical `n`-particle partition function over a single well, as a value
/// with a certified truncation bound.
///
/// Bosons and fermions go through the cycle-index recursion, distinguishable
/// particles through `z1^n`. `n = 0` returns 1 exactly.
pub fn zn_ideal<F: Float>(
    n: u32,
    statistics: Statistics,
    well: Well,
    q: F,
    tol: F,
) -> Result<SeriesValue<F>> {
    if !(q > F::zero() && q < F::one()) {
        return Err(Error::NomeOutOfRange(q.to_f64().unwrap_or(f64::NAN)));
    }
    if n == 0 {
        return Ok(SeriesValue::one());
    }
    let ln_q = q.ln();
    let base = well.nome_power();
    let u = -ln_q.to_f64().unwrap_or(f64::NAN);
    let tol_f = tol.to_f64().unwrap_or(f64::NAN);
    match choose_backend(n, n, base, fermi_ground(n, base), u, tol_f) {
        Backend::Exact { cap } => {
            let ladder = zn_ladder::<F, QPoly<F>, _>(n, statistics, |k| {
                Ok(QPoly::z1_leaf(u64::from(base) * u64::from(k), cap))
            })?;
            let poly = &ladder[n as usize];
            let ev = poly.eval(ln_q);
            let bound = tuple_tail_bound(n, base, cap, ln_q);
            Ok(SeriesValue::new(
                ev.value(ln_q),
                bound,
                poly.nonzero_terms().max(1) as u32,
            ))
        }
        Backend::Theta => {
            let ladder = zn_ladder::<F, SeriesValue<F>, _>(n, statistics, |k| {
                let m = cast::<F>(f64::from(base) * f64::from(k));
                let lt = m * ln_q;
                z1_with_log(lt.exp(), lt, tol)
            })?;
            Ok(ladder[n as usize])
        }
    }
}

/// Fully evaluated scenario: partition value with bound, its logarithm,
/// Gibbs entropy, and `beta d/dbeta ln Z` — everything thermodynamics needs,
/// assembled on whichever backend is numerically sound at this point.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PartitionEval<F> {
    pub z: SeriesValue<F>,
    pub log_z: F,
    pub entropy: F,
    pub beta_dbeta_log_z: F,
    pub entropy_err: F,
}

pub(crate) fn evaluate_scenario<F: Float>(
    scenario: &Scenario,
    config: &PhysicalConfig<F>,
    tol: F,
) -> Result<PartitionEval<F>> {
    scenario.validate()?;
    let ln_q = config.log_nome();
    let u = -ln_q;
    let base = scenario.stage.well().nome_power();
    let depth = ladder_depth(scenario);
    let n_total = scenario.n_particles;
    let ground = composite_ground(scenario, base);
    let backend = choose_backend(
        depth,
        n_total,
        base,
        ground,
        u.to_f64().unwrap_or(f64::NAN),
        tol.to_f64().unwrap_or(f64::NAN),
    );
    match backend {
        Backend::Exact { cap } => {
            let ladder = zn_ladder::<F, QPoly<F>, _>(depth, scenario.statistics, |k| {
                Ok(QPoly::z1_leaf(u64::from(base) * u64::from(k), cap))
            })?;
            let poly = combine_scenario::<F, _>(scenario, &ladder);
            let ev = poly.eval(ln_q);
            if !(ev.mantissa > F::zero()) {
                return Err(Error::NonPositivePartition {
                    value: ev.mantissa.to_f64().unwrap_or(f64::NAN),
                });
            }
            let value = ev.value(ln_q);
            if !(value > F::zero()) {
                return Err(Error::NonPositivePartition {
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
            let tail = tuple_tail_bound(n_total, base, cap, ln_q);
            let terms = poly.nonzero_terms().max(1) as u32;
            let mean_excess = ev.mean_excess_exponent();
            // ln Z - ln q <e>: the q^offset parts cancel identically, so the
            // entropy is formed from well-scaled positive pieces only.
            let entropy = ev.mantissa.ln() + u * mean_excess;
            let rel_tail = tail / value;
            let window = cast::<F>(cap.saturating_sub(ev.offset) as f64);
            Ok(PartitionEval {
                z: SeriesValue::new(value, tail, terms),
                log_z: ev.log_value(ln_q),
                entropy,
                beta_dbeta_log_z: ln_q * ev.mean_exponent(),
                entropy_err: rel_tail * (cast::<F>(2.0) + u * window),
            })
        }
        Backend::Theta => {
            let ladder = zn_ladder::<F, Dual<F>, _>(depth, scenario.statistics, |k| {
                let m = cast::<F>(f64::from(base) * f64::from(k));
                let lt = m * ln_q;
                let tau = lt.exp();
                let z = z1_with_log(tau, lt, tol)?;
                let s = weighted_series_with_log(tau, lt, tol)?;
                // beta d/dbeta z1(tau) = ln(tau) * S1(tau)
                Ok(Dual { z, dz: s * lt })
            })?;
            let dual = combine_scenario::<F, _>(scenario, &ladder);
            if !(dual.z.value > F::zero()) {
                return Err(Error::NonPositivePartition {
                    value: dual.z.value.to_f64().unwrap_or(f64::NAN),
                });
            }
            let log_z = dual.z.value.ln();
            let beta_dbeta_log_z = dual.dz.value / dual.z.value;
            let rel = dual.z.error_bound / dual.z.value;
            Ok(PartitionEval {
                z: dual.z,
                log_z,
                entropy: log_z - beta_dbeta_log_z,
                beta_dbeta_log_z,
                entropy_err: rel * (F::one() + beta_dbeta_log_z.abs())
                    + dual.dz.error_bound / dual.z.value,
            })
        }
    }
}

/// A scenario's canonical partition function at a given thermodynamic point.
#[derive(Clone, Copy, Debug)]
pub struct PartitionResult<F> {
    pub scenario: Scenario,
    pub q: F,
    pub z: SeriesValue<F>,
    pub log_z: F,
}

/// Evaluate the partition function of `scenario` at `config`.
///
/// Rejects invalid scenarios (odd colored splits, colorless distinguishable
/// setups) and reports a range error instead of returning a non-positive
/// value when a Fermi spectrum underflows.
pub fn scenario_partition<F: Float>(
    scenario: &Scenario,
    config: &PhysicalConfig<F>,
    tol: F,
) -> Result<PartitionResult<F>> {
    let eval = evaluate_scenario(scenario, config, tol)?;
    Ok(PartitionResult {
        scenario: *scenario,
        q: config.boltzmann_base(),
        z: eval.z,
        log_z: eval.log_z,
    })
}
