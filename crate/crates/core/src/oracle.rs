//! Brute-force validator: enumerate truncated many-body spectra by explicit
//! state counting and compute partition functions, entropies and energies by
//! direct summation, with no series machinery anywhere.
//!
//! Correctness equipment, not a production path — everything is exact
//! integer exponents and exhaustive walks, so it is only meant for small
//! particle numbers and nomes well below 1.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{
    level_weight_exponent, LabelMode, PhysicalConfig, Scenario, Stage, Statistics, Well,
};
use crate::{cast, Float};

/// Hard cap on single-particle levels per spectrum.
pub const LEVEL_CAP: u32 = 10_000;

/// Default relative truncation budget for the adaptive cutoff.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// The lowest `n_max` single-particle levels of one well, as exact
/// Boltzmann exponents.
#[derive(Clone, Debug)]
pub struct TruncatedSpectrum {
    well: Well,
    n_max: u32,
    exponents: Vec<u64>,
}

impl TruncatedSpectrum {
    pub fn new(well: Well, n_max: u32) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::ZeroLevel);
        }
        if n_max > LEVEL_CAP {
            return Err(Error::ParticleCapExceeded {
                n: n_max,
                cap: LEVEL_CAP,
            });
        }
        let exponents = (1..=n_max)
            .map(|n| level_weight_exponent(well, n))
            .collect::<Result<_>>()?;
        Ok(Self {
            well,
            n_max,
            exponents,
        })
    }

    pub fn well(&self) -> Well {
        self.well
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }
}

/// Aggregated many-body states: `(total exponent, multiplicity)` sorted by
/// exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateList {
    pub entries: Vec<(u64, u64)>,
}

impl StateList {
    fn from_map(map: BTreeMap<u64, u64>) -> Self {
        Self {
            entries: map.into_iter().collect(),
        }
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m).sum()
    }
}

fn bump(map: &mut BTreeMap<u64, u64>, e: u64, m: u64) {
    *map.entry(e).or_insert(0) += m;
}

fn convolve(a: &BTreeMap<u64, u64>, b: &BTreeMap<u64, u64>) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    for (&ea, &ma) in a {
        for (&eb, &mb) in b {
            bump(&mut out, ea + eb, ma * mb);
        }
    }
    out
}

fn walk(
    exponents: &[u64],
    remaining: u32,
    min_idx: usize,
    acc: u64,
    strict: bool,
    out: &mut BTreeMap<u64, u64>,
) {
    if remaining == 0 {
        bump(out, acc, 1);
        return;
    }
    for idx in min_idx..exponents.len() {
        walk(
            exponents,
            remaining - 1,
            idx + usize::from(strict),
            acc + exponents[idx],
            strict,
            out,
        );
    }
}

fn group_map(n: u32, statistics: Statistics, exponents: &[u64]) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    if n == 0 {
        bump(&mut out, 0, 1);
        return out;
    }
    match statistics {
        Statistics::Bose => walk(exponents, n, 0, 0, false, &mut out),
        Statistics::Fermi => walk(exponents, n, 0, 0, true, &mut out),
        Statistics::Distinguishable => {
            let single: BTreeMap<u64, u64> = exponents.iter().map(|&e| (e, 1)).collect();
            out = single.clone();
            for _ in 1..n {
                out = convolve(&out, &single);
            }
        }
    }
    out
}

/// States of `n` particles with the given statistics in a single well —
/// Bose multisets, Fermi strict combinations or distinguishable tuples.
pub fn single_well_states(
    n: u32,
    statistics: Statistics,
    spectrum: &TruncatedSpectrum,
) -> StateList {
    StateList::from_map(group_map(n, statistics, &spectrum.exponents))
}

/// Exhaustive state list of a scenario over `spectrum` (the per-cell
/// spectrum for the unmixed stage, the full-well spectrum after mixing; both
/// cells share one spectrum because the sub-cells are equal).
///
/// Colored scenarios fix one identical group per side; the colorless
/// unmixed state sums every left/right split, including both-in-one-cell
/// classes.
pub fn enumerate_states(spectrum: &TruncatedSpectrum, scenario: &Scenario) -> Result<StateList> {
    scenario.validate()?;
    if spectrum.well != scenario.stage.well() {
        return Err(Error::WellStageMismatch);
    }
    let n = scenario.n_particles;
    let exps = &spectrum.exponents;
    let map = match (scenario.labels, scenario.stage) {
        (LabelMode::WithColors, _) => {
            let group = group_map(n / 2, scenario.statistics, exps);
            convolve(&group, &group)
        }
        (LabelMode::WithoutColors, Stage::Unmixed) => {
            let groups: Vec<_> = (0..=n)
                .map(|k| group_map(k, scenario.statistics, exps))
                .collect();
            let mut out = BTreeMap::new();
            for k in 0..=n as usize {
                for (&e, &m) in &convolve(&groups[k], &groups[n as usize - k]) {
                    bump(&mut out, e, m);
                }
            }
            out
        }
        (LabelMode::WithoutColors, Stage::Mixed) => group_map(n, scenario.statistics, exps),
    };
    Ok(StateList::from_map(map))
}

fn check_not_empty(states: &StateList) -> Result<()> {
    if states.entries.is_empty() {
        return Err(Error::EmptyStateList);
    }
    Ok(())
}

/// Direct partition sum over the enumerated states. Terms accumulate from
/// the largest exponent up so small contributions are not swallowed.
pub fn oracle_partition<F: Float>(states: &StateList, q: F) -> Result<F> {
    check_not_empty(states)?;
    let mut z = F::zero();
    for &(e, m) in states.entries.iter().rev() {
        z = z + cast::<F>(m as f64) * q.powi(e as i32);
    }
    Ok(z)
}

/// Direct `-sum p ln p` over the enumerated states, `p = q^e / Z` per state.
pub fn oracle_entropy<F: Float>(states: &StateList, q: F) -> Result<F> {
    let z = oracle_partition(states, q)?;
    let mut s = F::zero();
    for &(e, m) in states.entries.iter().rev() {
        let p = q.powi(e as i32) / z;
        if p > F::zero() {
            s = s - cast::<F>(m as f64) * p * p.ln();
        }
    }
    Ok(s)
}

/// Direct mean energy `sum p E` over the enumerated states, in the reduced
/// units of `config`.
pub fn oracle_energy<F: Float>(states: &StateList, config: &PhysicalConfig<F>) -> Result<F> {
    let q = config.boltzmann_base();
    let z = oracle_partition(states, q)?;
    let mut mean_exp = F::zero();
    for &(e, m) in states.entries.iter().rev() {
        mean_exp = mean_exp + cast::<F>(m as f64) * cast::<F>(e as f64) * q.powi(e as i32);
    }
    Ok(mean_exp / z * config.exponent_energy())
}

/// Spectrum cutoff policy for [`evaluate`].
#[derive(Clone, Copy, Debug)]
pub enum Cutoff {
    /// Grow `n_max` until the tail estimate drops below the relative budget
    /// (hard cap [`LEVEL_CAP`]).
    Auto,
    /// Use exactly this many levels; error out if the tail estimate says
    /// they are not enough.
    Fixed(u32),
}

/// Brute-force evaluation of one scenario.
#[derive(Clone, Copy, Debug)]
pub struct OracleEval<F> {
    pub z: F,
    pub entropy: F,
    pub mean_energy: F,
    pub n_max: u32,
    pub state_count: usize,
}

fn attempt<F: Float>(
    scenario: &Scenario,
    config: &PhysicalConfig<F>,
    rel_tol: F,
    n_max: u32,
) -> Result<OracleEval<F>> {
    let well = scenario.stage.well();
    let spectrum = TruncatedSpectrum::new(well, n_max)?;
    let states = enumerate_states(&spectrum, scenario)?;
    let q = config.boltzmann_base();
    let z = oracle_partition(&states, q)?;
    // Truncation defensibility: everything omitted has at least one particle
    // above the cutoff, so weigh the touched states by the next level.
    let next_exponent = level_weight_exponent(well, n_max + 1)?;
    let tail_estimate = q.powi(next_exponent as i32) * cast::<F>(states.entries.len() as f64 + 1.0);
    let budget = rel_tol * z;
    if tail_estimate > budget {
        return Err(Error::CutoffTooSmall {
            n_max,
            tail_estimate: tail_estimate.to_f64().unwrap_or(f64::NAN),
            budget: budget.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(OracleEval {
        z,
        entropy: oracle_entropy(&states, q)?,
        mean_energy: oracle_energy(&states, config)?,
        n_max,
        state_count: states.entries.len(),
    })
}

/// Enumerate and evaluate `scenario` at `config` under the given cutoff
/// policy.
pub fn evaluate<F: Float>(
    scenario: &Scenario,
    config: &PhysicalConfig<F>,
    rel_tol: F,
    cutoff: Cutoff,
) -> Result<OracleEval<F>> {
    match cutoff {
        Cutoff::Fixed(n_max) => attempt(scenario, config, rel_tol, n_max),
        Cutoff::Auto => {
            let mut n_max = 8u32;
            loop {
                match attempt(scenario, config, rel_tol, n_max) {
                    Err(Error::CutoffTooSmall { .. }) if n_max < LEVEL_CAP => {
                        n_max = (n_max * 2).min(LEVEL_CAP);
                    }
                    other => return other,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::zn_ideal;
    use crate::series::z1;
    use approx::assert_relative_eq;

    fn scenario(n: u32, labels: LabelMode, stat: Statistics, stage: Stage) -> Scenario {
        Scenario::new(n, labels, stat, stage).unwrap()
    }

    #[test]
    fn two_fermions_in_a_tiny_half_well() {
        let spec = TruncatedSpectrum::new(Well::Half, 2).unwrap();
        let states = single_well_states(2, Statistics::Fermi, &spec);
        assert_eq!(states.entries, vec![(20, 1)]);
    }

    #[test]
    fn two_bosons_in_a_tiny_half_well() {
        let spec = TruncatedSpectrum::new(Well::Half, 2).unwrap();
        let states = single_well_states(2, Statistics::Bose, &spec);
        assert_eq!(states.entries, vec![(8, 1), (20, 1), (32, 1)]);
    }

    #[test]
    fn two_distinguishable_in_a_tiny_full_well() {
        let spec = TruncatedSpectrum::new(Well::Full, 2).unwrap();
        let states = single_well_states(2, Statistics::Distinguishable, &spec);
        assert_eq!(states.entries, vec![(2, 1), (5, 2), (8, 1)]);
    }

    #[test]
    fn pair_counts_follow_combinatorics() {
        for m in [2u32, 5, 11, 40] {
            let spec = TruncatedSpectrum::new(Well::Full, m).unwrap();
            let m64 = u64::from(m);
            assert_eq!(
                single_well_states(2, Statistics::Bose, &spec).total_multiplicity(),
                m64 * (m64 + 1) / 2
            );
            assert_eq!(
                single_well_states(2, Statistics::Fermi, &spec).total_multiplicity(),
                m64 * (m64 - 1) / 2
            );
            assert_eq!(
                single_well_states(2, Statistics::Distinguishable, &spec).total_multiplicity(),
                m64 * m64
            );
        }
    }

    #[test]
    fn single_state_has_zero_entropy() {
        let states = StateList {
            entries: vec![(20, 1)],
        };
        let q = 0.37_f64;
        assert_relative_eq!(
            oracle_partition(&states, q).unwrap(),
            q.powi(20),
            max_relative = 1e-15
        );
        assert_eq!(oracle_entropy(&states, q).unwrap(), 0.0);
    }

    #[test]
    fn empty_state_list_is_an_error() {
        let spec = TruncatedSpectrum::new(Well::Full, 3).unwrap();
        let states = single_well_states(4, Statistics::Fermi, &spec);
        assert!(matches!(
            oracle_partition(&states, 0.5_f64),
            Err(Error::EmptyStateList)
        ));
    }

    #[test]
    fn colored_pair_matches_closed_form() {
        let config = PhysicalConfig::new(2.0 * std::f64::consts::LN_2, std::f64::consts::PI)
            .unwrap();
        let q = config.boltzmann_base();
        let spec = TruncatedSpectrum::new(Well::Half, 40).unwrap();
        let states = enumerate_states(
            &spec,
            &scenario(
                2,
                LabelMode::WithColors,
                Statistics::Bose,
                Stage::Unmixed,
            ),
        )
        .unwrap();
        let z = oracle_partition(&states, q).unwrap();
        let z1q4 = z1(q.powi(4), 1e-15).unwrap().value;
        assert_relative_eq!(z, z1q4 * z1q4, max_relative = 1e-10);
    }

    #[test]
    fn colorless_mixed_fermions_match_recursion() {
        let config = PhysicalConfig::new(2.0 * std::f64::consts::LN_2, std::f64::consts::PI)
            .unwrap();
        let q = config.boltzmann_base();
        let spec = TruncatedSpectrum::new(Well::Full, 30).unwrap();
        let states = enumerate_states(
            &spec,
            &scenario(
                4,
                LabelMode::WithoutColors,
                Statistics::Fermi,
                Stage::Mixed,
            ),
        )
        .unwrap();
        let z = oracle_partition(&states, q).unwrap();
        let zn = zn_ideal(4, Statistics::Fermi, Well::Full, q, 1e-14).unwrap();
        assert_relative_eq!(z, zn.value, max_relative = 1e-10);
    }

    #[test]
    fn forced_small_cutoff_is_diagnosed() {
        let config = PhysicalConfig::new(2.0 * std::f64::consts::LN_2, std::f64::consts::PI)
            .unwrap();
        let sc = scenario(2, LabelMode::WithColors, Statistics::Bose, Stage::Mixed);
        let r = evaluate(&sc, &config, 1e-12_f64, Cutoff::Fixed(3));
        assert!(matches!(r, Err(Error::CutoffTooSmall { .. })));
        let ok = evaluate(&sc, &config, 1e-12_f64, Cutoff::Auto).unwrap();
        assert!(ok.n_max > 3);
        assert!(ok.z > 0.0);
    }

    #[test]
    fn stage_well_mismatch_is_rejected() {
        let spec = TruncatedSpectrum::new(Well::Full, 10).unwrap();
        let r = enumerate_states(
            &spec,
            &scenario(
                2,
                LabelMode::WithColors,
                Statistics::Bose,
                Stage::Unmixed,
            ),
        );
        assert!(matches!(r, Err(Error::WellStageMismatch)));
    }
}
