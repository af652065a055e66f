//! Entropy, mixing entropy, isothermal work and mean energy from partition
//! functions, with analytic temperature derivatives.
//!
//! For a Gibbs state, `S = (1 - beta d/dbeta) ln Z`. The derivative is never
//! taken by finite differences: on the theta backend it propagates through
//! the chain rule `beta d/dbeta z1(tau) = ln(tau) * weighted_series(tau)`,
//! on the exact backend it falls out of the exponents themselves,
//! `beta d/dbeta ln Z = ln(q) <e>`. Mixing quantities compare the two stages
//! at a fixed `(beta, length)` point:
//!
//! * `delta_entropy = S_mixed - S_unmixed`
//! * `work = (ln Z_unmixed - ln Z_mixed) / beta` — the isothermal
//!   free-energy difference paid or extracted while the wall is removed.

use crate::ensembles::{evaluate_scenario, PartitionEval, PartitionResult};
use crate::error::{Error, Result};
use crate::model::{PhysicalConfig, ScenarioPair, Stage};
use crate::series::{default_tol, SeriesValue};
use crate::{cast, Float};

fn check_same_point<F: Float>(partition: &PartitionResult<F>, config: &PhysicalConfig<F>) -> Result<()> {
    let q = config.boltzmann_base();
    let diff = (partition.q - q).abs();
    if diff > q * cast(1e-12) {
        return Err(Error::PointMismatch {
            left: partition.q.to_f64().unwrap_or(f64::NAN),
            right: q.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

fn check_pair<F: Float>(
    unmixed: &PartitionResult<F>,
    mixed: &PartitionResult<F>,
) -> Result<()> {
    if unmixed.scenario.stage != Stage::Unmixed
        || mixed.scenario.stage != Stage::Mixed
        || unmixed.scenario.n_particles != mixed.scenario.n_particles
        || unmixed.scenario.labels != mixed.scenario.labels
        || unmixed.scenario.statistics != mixed.scenario.statistics
    {
        return Err(Error::StagePairMismatch);
    }
    if unmixed.q != mixed.q {
        return Err(Error::PointMismatch {
            left: unmixed.q.to_f64().unwrap_or(f64::NAN),
            right: mixed.q.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

fn eval_at<F: Float>(
    partition: &PartitionResult<F>,
    config: &PhysicalConfig<F>,
) -> Result<PartitionEval<F>> {
    check_same_point(partition, config)?;
    evaluate_scenario(&partition.scenario, config, default_tol())
}

/// Gibbs entropy `(1 - beta d/dbeta) ln Z = ln Z + beta <E>` of a scenario's
/// thermal state. Equals `-sum p ln p` over the underlying spectrum.
pub fn entropy<F: Float>(
    partition: &PartitionResult<F>,
    config: &PhysicalConfig<F>,
) -> Result<F> {
    Ok(eval_at(partition, config)?.entropy)
}

/// Mean energy `<E> = -d(ln Z)/d(beta)` in reduced units.
pub fn mean_energy<F: Float>(
    partition: &PartitionResult<F>,
    config: &PhysicalConfig<F>,
) -> Result<F> {
    let eval = eval_at(partition, config)?;
    Ok(-eval.beta_dbeta_log_z / config.beta())
}

/// Entropy change of the mixing process, `S(mixed) - S(unmixed)`.
pub fn delta_entropy<F: Float>(
    unmixed: &PartitionResult<F>,
    mixed: &PartitionResult<F>,
    config: &PhysicalConfig<F>,
) -> Result<F> {
    check_pair(unmixed, mixed)?;
    Ok(eval_at(mixed, config)?.entropy - eval_at(unmixed, config)?.entropy)
}

/// Isothermal work `(ln Z_unmixed - ln Z_mixed) / beta`, the free-energy
/// change of the mixing process. Species-independent for colored pairs.
pub fn work<F: Float>(
    unmixed: &PartitionResult<F>,
    mixed: &PartitionResult<F>,
    config: &PhysicalConfig<F>,
) -> Result<F> {
    check_pair(unmixed, mixed)?;
    check_same_point(unmixed, config)?;
    Ok((unmixed.log_z - mixed.log_z) / config.beta())
}

/// Everything the CLI prints for one `(scenario pair, beta, length)` point.
#[derive(Clone, Copy, Debug)]
pub struct ThermoReport<F> {
    pub pair: ScenarioPair,
    pub beta: F,
    pub length: F,
    pub q: F,
    pub z_unmixed: SeriesValue<F>,
    pub z_mixed: SeriesValue<F>,
    pub log_z_unmixed: F,
    pub log_z_mixed: F,
    pub s_unmixed: F,
    pub s_mixed: F,
    pub s_unmixed_err: F,
    pub s_mixed_err: F,
    pub delta_s: F,
    pub work: F,
    pub mean_energy_unmixed: F,
    pub mean_energy_mixed: F,
}

/// Evaluate both stages of `pair` at `config` and assemble the full report.
pub fn report<F: Float>(
    pair: &ScenarioPair,
    config: &PhysicalConfig<F>,
    tol: F,
) -> Result<ThermoReport<F>> {
    let unmixed = evaluate_scenario(&pair.unmixed(), config, tol)?;
    let mixed = evaluate_scenario(&pair.mixed(), config, tol)?;
    let beta = config.beta();
    Ok(ThermoReport {
        pair: *pair,
        beta,
        length: config.length(),
        q: config.boltzmann_base(),
        z_unmixed: unmixed.z,
        z_mixed: mixed.z,
        log_z_unmixed: unmixed.log_z,
        log_z_mixed: mixed.log_z,
        s_unmixed: unmixed.entropy,
        s_mixed: mixed.entropy,
        s_unmixed_err: unmixed.entropy_err,
        s_mixed_err: mixed.entropy_err,
        delta_s: mixed.entropy - unmixed.entropy,
        work: (unmixed.log_z - mixed.log_z) / beta,
        mean_energy_unmixed: -unmixed.beta_dbeta_log_z / beta,
        mean_energy_mixed: -mixed.beta_dbeta_log_z / beta,
    })
}

/// Least-squares line through `(ln_x, ln_y)` with its coefficient of
/// determination.
#[derive(Clone, Copy, Debug)]
pub struct PowerLawFit<F> {
    pub slope: F,
    pub intercept: F,
    pub r_squared: F,
    pub points: usize,
}

/// Fit `ln_y = intercept + slope * ln_x`.
pub fn fit_power_law<F: Float>(ln_x: &[F], ln_y: &[F]) -> Result<PowerLawFit<F>> {
    let n = ln_x.len();
    if n < 2 || ln_y.len() != n {
        return Err(Error::TooFewFitPoints {
            needed: 2,
            got: n.min(ln_y.len()),
        });
    }
    let nf = cast::<F>(n as f64);
    let mean = |v: &[F]| v.iter().fold(F::zero(), |a, &b| a + b) / nf;
    let mx = mean(ln_x);
    let my = mean(ln_y);
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    let mut syy = F::zero();
    for (&x, &y) in ln_x.iter().zip(ln_y) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
        syy = syy + (y - my) * (y - my);
    }
    if sxx.is_zero() {
        return Err(Error::TooFewFitPoints { needed: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let r_squared = if syy.is_zero() {
        F::one()
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(PowerLawFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}

/// Fit the high-temperature scaling exponent of the mixing work.
///
/// `betas` is a grid of decreasing inverse temperatures at fixed `length`;
/// the fit runs over the last `tail_points` entries (the hottest part of the
/// grid), regressing `ln |W|` on `ln T`. The exponent is reported, not
/// asserted: colored pairs come out near 1, colorless bosons near 1/2.
pub fn asymptotic_work_exponent<F: Float>(
    pair: &ScenarioPair,
    length: F,
    betas: &[F],
    tail_points: usize,
    tol: F,
) -> Result<PowerLawFit<F>> {
    if betas.len() < 2 || tail_points < 2 {
        return Err(Error::TooFewFitPoints {
            needed: 2,
            got: betas.len().min(tail_points),
        });
    }
    let start = betas.len().saturating_sub(tail_points);
    let mut ln_t = Vec::with_capacity(betas.len() - start);
    let mut ln_w = Vec::with_capacity(betas.len() - start);
    let mut sign = F::zero();
    for &beta in &betas[start..] {
        let config = PhysicalConfig::new(beta, length)?;
        let rep = report(pair, &config, tol)?;
        if rep.work.is_zero() {
            return Err(Error::SignChangeInTail);
        }
        let s = rep.work.signum();
        if sign.is_zero() {
            sign = s;
        } else if s != sign {
            return Err(Error::SignChangeInTail);
        }
        ln_t.push(beta.recip().ln());
        ln_w.push(rep.work.abs().ln());
    }
    fit_power_law(&ln_t, &ln_w)
}
