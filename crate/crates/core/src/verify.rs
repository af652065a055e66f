//! Built-in consistency suite: the checks behind the CLI `verify`
//! subcommand.
//!
//! Five check groups, each pitting an independent route against the
//! production one:
//!
//! 1. theta duality — raw long summations on both sides of the modular
//!    identity, plus agreement of the production evaluator with the raw sum;
//! 2. cycle recursion vs the explicit 2-, 3- and 4-particle closed forms,
//!    both evaluated in exact exponent arithmetic;
//! 3. oracle equivalence — every mixing scenario against brute-force state
//!    enumeration (partition value, entropy, mean energy);
//! 4. species independence of the colored-pair mixing entropy;
//! 5. classical limits of the mixing entropy for 2 and 4 particles.

use crate::ensembles::{evaluate_scenario, zn_ideal};
use crate::error::Result;
use crate::model::{LabelMode, PhysicalConfig, Scenario, ScenarioPair, Stage, Statistics, Well};
use crate::oracle::{self, Cutoff};
use crate::qpoly::QPoly;
use crate::series::{default_tol, theta3};
use crate::thermo;

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Multiplier applied to every check tolerance (1.0 = the pinned
    /// defaults).
    pub tol_scale: f64,
    /// Cutoff policy handed to the oracle-equivalence check.
    pub oracle_cutoff: Cutoff,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol_scale: 1.0,
            oracle_cutoff: Cutoff::Auto,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn from_outcome(name: &'static str, outcome: Result<(bool, String)>) -> Self {
        match outcome {
            Ok((passed, detail)) => Self {
                name,
                passed,
                detail,
            },
            Err(e) => Self {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Run the whole suite with tolerances scaled by `opts.tol_scale`.
pub fn run_full_suite(opts: &VerifyOptions) -> VerifyReport {
    let s = opts.tol_scale;
    VerifyReport {
        checks: vec![
            duality_check(1e-12 * s),
            closed_forms_check(1e-12 * s),
            oracle_equivalence_check(1e-9 * s, opts.oracle_cutoff),
            species_equality_check(1e-12 * s),
            classical_limits_check(1e-3 * s),
        ],
    }
}

/// Raw theta sum with terms accumulated smallest-first.
fn theta3_brute(q: f64) -> f64 {
    if q == 0.0 {
        return 1.0;
    }
    let u = -q.ln();
    let n_max = ((745.0 / u).sqrt().ceil() as u32).clamp(1, 2_000_000);
    let mut acc = 0.0;
    for n in (1..=n_max).rev() {
        acc += q.powi((n * n) as i32);
    }
    1.0 + 2.0 * acc
}

/// Modular identity `sqrt(-ln q/pi) theta3(q) = theta3(exp(pi^2/ln q))`,
/// both sides by raw summation, plus production-vs-raw agreement.
pub fn duality_check(tol: f64) -> CheckResult {
    let run = || -> Result<(bool, String)> {
        let mut worst_identity: f64 = 0.0;
        let mut worst_prod: f64 = 0.0;
        for q in [0.05_f64, 0.2, 0.5, 0.9, 0.99] {
            let lhs = (-q.ln() / std::f64::consts::PI).sqrt() * theta3_brute(q);
            let rhs = theta3_brute((std::f64::consts::PI.powi(2) / q.ln()).exp());
            worst_identity = worst_identity.max((lhs - rhs).abs());
            let prod = theta3(q, 1e-14)?.value;
            worst_prod = worst_prod.max((prod - theta3_brute(q)).abs());
        }
        let passed = worst_identity <= tol && worst_prod <= tol;
        Ok((
            passed,
            format!("max |identity| = {worst_identity:.3e}, max |eval - raw| = {worst_prod:.3e}"),
        ))
    };
    CheckResult::from_outcome("theta duality identity", run())
}

/// Explicit small-n closed forms in exact exponent arithmetic, used as the
/// reference side of the recursion regression.
fn closed_form_value(n: u32, statistics: Statistics, q: f64) -> f64 {
    let cap = 800u64;
    let ln_q = q.ln();
    let l = |m: u64| QPoly::<f64>::z1_leaf(m, cap);
    let sign = match statistics {
        Statistics::Fermi => -1.0,
        _ => 1.0,
    };
    let poly = match n {
        2 => (l(1) * l(1) + l(2) * sign) * 0.5,
        3 => (l(1) * l(1) * l(1) + l(2) * l(1) * (3.0 * sign) + l(3) * 2.0) * (1.0 / 6.0),
        4 => (l(1) * l(1) * l(1) * l(1)
            + l(2) * l(2) * 3.0
            + l(4) * (6.0 * sign)
            + l(2) * l(1) * l(1) * (6.0 * sign)
            + l(3) * l(1) * 8.0)
            * (1.0 / 24.0),
        _ => unreachable!("closed forms cover n = 2..4"),
    };
    poly.eval(ln_q).value(ln_q)
}

/// Recursion-vs-closed-forms regression with an injectable recursion, so a
/// deliberately broken recursion can be shown to fail the check.
pub fn closed_forms_check_with<Zn>(mut zn: Zn, tol_rel: f64) -> CheckResult
where
    Zn: FnMut(u32, Statistics, f64, f64) -> Result<f64>,
{
    let mut run = || -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        for q in [0.1_f64, 0.5, 0.9] {
            for stat in [Statistics::Bose, Statistics::Fermi] {
                for n in [2u32, 3, 4] {
                    let expected = closed_form_value(n, stat, q);
                    let got = zn(n, stat, q, 1e-14)?;
                    worst = worst.max(((got - expected) / expected).abs());
                }
            }
        }
        Ok((worst <= tol_rel, format!("max rel diff = {worst:.3e}")))
    };
    CheckResult::from_outcome("cycle recursion vs closed forms", run())
}

pub fn closed_forms_check(tol_rel: f64) -> CheckResult {
    closed_forms_check_with(
        |n, stat, q, tol| zn_ideal(n, stat, Well::Full, q, tol).map(|sv| sv.value),
        tol_rel,
    )
}

fn all_scenarios() -> Vec<Scenario> {
    let mut out = Vec::new();
    for n in [2u32, 4] {
        for stage in [Stage::Unmixed, Stage::Mixed] {
            for stat in [
                Statistics::Bose,
                Statistics::Fermi,
                Statistics::Distinguishable,
            ] {
                out.push(Scenario {
                    n_particles: n,
                    labels: LabelMode::WithColors,
                    statistics: stat,
                    stage,
                });
            }
            for stat in [Statistics::Bose, Statistics::Fermi] {
                out.push(Scenario {
                    n_particles: n,
                    labels: LabelMode::WithoutColors,
                    statistics: stat,
                    stage,
                });
            }
        }
    }
    out
}

/// Every scenario against brute-force enumeration at q = 1/2: partition
/// value, entropy and mean energy, all to relative `tol_rel`.
pub fn oracle_equivalence_check(tol_rel: f64, cutoff: Cutoff) -> CheckResult {
    let run = || -> Result<(bool, String)> {
        let config =
            PhysicalConfig::new(2.0 * std::f64::consts::LN_2, std::f64::consts::PI)?;
        let mut worst: f64 = 0.0;
        for scenario in all_scenarios() {
            let series = evaluate_scenario(&scenario, &config, default_tol())?;
            let brute = oracle::evaluate(&scenario, &config, 1e-12_f64, cutoff)?;
            let mean_energy = -series.beta_dbeta_log_z / config.beta();
            for (a, b) in [
                (series.z.value, brute.z),
                (series.entropy, brute.entropy),
                (mean_energy, brute.mean_energy),
            ] {
                worst = worst.max(((a - b) / b).abs());
            }
        }
        Ok((
            worst <= tol_rel,
            format!("20 scenarios, max rel diff = {worst:.3e}"),
        ))
    };
    CheckResult::from_outcome("oracle equivalence", run())
}

/// Colored-pair mixing entropy must be bitwise-independent of statistics.
pub fn species_equality_check(tol_abs: f64) -> CheckResult {
    let run = || -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            for j in 0..10 {
                let beta = 0.1 + 4.9 * f64::from(i) / 9.0;
                let length = 1.0 + 49.0 * f64::from(j) / 9.0;
                let config = PhysicalConfig::new(beta, length)?;
                let ds: Vec<f64> = [
                    Statistics::Bose,
                    Statistics::Fermi,
                    Statistics::Distinguishable,
                ]
                .iter()
                .map(|&stat| {
                    let pair = ScenarioPair::new(2, LabelMode::WithColors, stat)?;
                    Ok(thermo::report(&pair, &config, default_tol())?.delta_s)
                })
                .collect::<Result<_>>()?;
                worst = worst
                    .max((ds[0] - ds[1]).abs())
                    .max((ds[0] - ds[2]).abs())
                    .max((ds[1] - ds[2]).abs());
            }
        }
        Ok((
            worst <= tol_abs,
            format!("10x10 grid, max pairwise |dS diff| = {worst:.3e}"),
        ))
    };
    CheckResult::from_outcome("species-independent mixing entropy", run())
}

/// Large-trap limits: 2 ln 2 for the colored pair, 4 ln 2 for four colored
/// particles, 0 for four colorless ones.
pub fn classical_limits_check(tol_abs: f64) -> CheckResult {
    let run = || -> Result<(bool, String)> {
        let config = PhysicalConfig::new(1.0, 1e4)?;
        let ds = |n: u32, labels: LabelMode, stat: Statistics| -> Result<f64> {
            let pair = ScenarioPair::new(n, labels, stat)?;
            Ok(thermo::report(&pair, &config, default_tol())?.delta_s)
        };
        let two_ln2 = 2.0 * std::f64::consts::LN_2;
        let four_ln2 = 4.0 * std::f64::consts::LN_2;
        let deviations = [
            (ds(2, LabelMode::WithColors, Statistics::Bose)? - two_ln2).abs(),
            (ds(4, LabelMode::WithColors, Statistics::Bose)? - four_ln2).abs(),
            (ds(4, LabelMode::WithColors, Statistics::Fermi)? - four_ln2).abs(),
            ds(4, LabelMode::WithoutColors, Statistics::Bose)?.abs(),
            ds(4, LabelMode::WithoutColors, Statistics::Fermi)?.abs(),
        ];
        let worst = deviations.iter().cloned().fold(0.0_f64, f64::max);
        Ok((
            worst <= tol_abs,
            format!("max |deviation from limit| = {worst:.3e} at l = 1e4"),
        ))
    };
    CheckResult::from_outcome("classical mixing-entropy limits", run())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let report = run_full_suite(&VerifyOptions::default());
        for check in &report.checks {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
        assert!(report.all_passed());
    }

    #[test]
    fn sign_flip_mutation_is_caught() {
        // Swap the Fermi and Bose branches of the recursion; the closed-form
        // regression must notice.
        let flipped = |n: u32, stat: Statistics, q: f64, tol: f64| {
            let swapped = match stat {
                Statistics::Fermi => Statistics::Bose,
                Statistics::Bose => Statistics::Fermi,
                other => other,
            };
            zn_ideal(n, swapped, Well::Full, q, tol).map(|sv| sv.value)
        };
        let check = closed_forms_check_with(flipped, 1e-12);
        assert!(!check.passed, "mutated recursion slipped through");
    }

    #[test]
    fn forced_small_cutoff_fails_oracle_check() {
        let check = oracle_equivalence_check(1e-9, Cutoff::Fixed(3));
        assert!(!check.passed);
        assert!(
            check.detail.contains("cutoff too small"),
            "detail: {}",
            check.detail
        );
    }
}
