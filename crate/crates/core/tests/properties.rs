//! Property tests spanning module boundaries.

use proptest::prelude::*;

use wellmix::ensembles::{scenario_partition, zn_ideal};
use wellmix::oracle::{self, Cutoff, TruncatedSpectrum};
use wellmix::series::{theta3, weighted_series, z1, DEFAULT_TOL};
use wellmix::thermo;
use wellmix::{LabelMode, PhysicalConfig, Scenario, ScenarioPair, Stage, Statistics, Well};

/// beta = 1 and the length that makes the Boltzmann base exactly `q`.
fn config_at_nome(q: f64) -> PhysicalConfig<f64> {
    let u = -q.ln();
    PhysicalConfig::new(1.0, std::f64::consts::PI / (2.0 * u).sqrt()).unwrap()
}

/// The brute-force enumeration and the series machinery agree for every
/// scenario at several nomes, not just the acceptance point q = 1/2.
#[test]
fn oracle_equivalence_across_nomes() {
    for q in [0.3_f64, 0.5, 0.7] {
        let config = config_at_nome(q);
        for n in [2u32, 4] {
            for stage in [Stage::Unmixed, Stage::Mixed] {
                for (labels, stats) in [
                    (
                        LabelMode::WithColors,
                        &[
                            Statistics::Bose,
                            Statistics::Fermi,
                            Statistics::Distinguishable,
                        ][..],
                    ),
                    (
                        LabelMode::WithoutColors,
                        &[Statistics::Bose, Statistics::Fermi][..],
                    ),
                ] {
                    for &stat in stats {
                        let scenario = Scenario::new(n, labels, stat, stage).unwrap();
                        let partition =
                            scenario_partition(&scenario, &config, DEFAULT_TOL).unwrap();
                        let brute =
                            oracle::evaluate(&scenario, &config, 1e-12, Cutoff::Auto).unwrap();
                        let z_rel = ((partition.z.value - brute.z) / brute.z).abs();
                        assert!(z_rel <= 1e-10, "Z mismatch {z_rel:.3e} at q={q} {scenario:?}");
                        let s = thermo::entropy(&partition, &config).unwrap();
                        // Relative where the entropy is sizable; an absolute
                        // floor where a near-pure ground state pushes S to
                        // the oracle's ln(1 - delta) resolution limit.
                        let s_tol = 1e-9 * brute.entropy.abs().max(1e-4);
                        assert!(
                            (s - brute.entropy).abs() <= s_tol,
                            "S mismatch {} vs {} at q={q} {scenario:?}",
                            s,
                            brute.entropy
                        );
                    }
                }
            }
        }
    }
}

/// Isothermal work equals the oracle's log-partition difference.
#[test]
fn work_matches_oracle_free_energy_difference() {
    let config = PhysicalConfig::new(0.5_f64, 10.0).unwrap();
    let q = config.boltzmann_base();
    let pair = ScenarioPair::new(2, LabelMode::WithoutColors, Statistics::Bose).unwrap();
    let unmixed = scenario_partition(&pair.unmixed(), &config, DEFAULT_TOL).unwrap();
    let mixed = scenario_partition(&pair.mixed(), &config, DEFAULT_TOL).unwrap();
    let w = thermo::work(&unmixed, &mixed, &config).unwrap();

    let states_u = oracle::enumerate_states(
        &TruncatedSpectrum::new(Well::Half, 60).unwrap(),
        &pair.unmixed(),
    )
    .unwrap();
    let states_m = oracle::enumerate_states(
        &TruncatedSpectrum::new(Well::Full, 60).unwrap(),
        &pair.mixed(),
    )
    .unwrap();
    let z_u: f64 = oracle::oracle_partition(&states_u, q).unwrap();
    let z_m: f64 = oracle::oracle_partition(&states_m, q).unwrap();
    let w_oracle = (z_u.ln() - z_m.ln()) / config.beta();
    assert!(
        ((w - w_oracle) / w_oracle).abs() <= 1e-10,
        "{w} vs {w_oracle}"
    );
}

/// Raw reference sum with ten times the term budget of the certified
/// evaluation.
fn z1_brute(tau: f64, terms: u64) -> f64 {
    let ln_tau = tau.ln();
    let mut acc = 0.0;
    for n in (1..=terms).rev() {
        let arg = (n * n) as f64 * ln_tau;
        if arg > -745.0 {
            acc += arg.exp();
        }
    }
    acc
}

fn s1_brute(tau: f64, terms: u64) -> f64 {
    let ln_tau = tau.ln();
    let mut acc = 0.0;
    for n in (1..=terms).rev() {
        let arg = (n * n) as f64 * ln_tau;
        if arg > -700.0 {
            acc += (n * n) as f64 * arg.exp();
        }
    }
    acc
}

proptest! {
    /// The reported error bound really bounds the truncation error, at any
    /// tolerance, on both sides of the duality threshold.
    #[test]
    fn tail_certificate_is_honest(
        tau in 0.0_f64..0.95,
        tol_exp in 4i32..13,
    ) {
        let tol = 10f64.powi(-tol_exp);
        let v = z1(tau, tol).unwrap();
        let terms = u64::from(v.terms_used) * 10 + 200;
        let reference = z1_brute(tau, terms);
        prop_assert!(
            (v.value - reference).abs() <= v.error_bound + 1e-14,
            "z1({tau}) = {} vs {reference}, bound {}", v.value, v.error_bound
        );
        prop_assert!(v.error_bound <= tol);

        let s = weighted_series(tau, tol).unwrap();
        let s_ref = s1_brute(tau, u64::from(s.terms_used) * 10 + 200);
        prop_assert!(
            (s.value - s_ref).abs() <= s.error_bound + 1e-12,
            "S1({tau}) = {} vs {s_ref}, bound {}", s.value, s.error_bound
        );
    }

    /// theta3 is strictly increasing in the nome.
    #[test]
    fn theta3_monotone(q1 in 0.0_f64..0.99, dq in 1e-6_f64..0.3) {
        let q2 = (q1 + dq).min(0.9999);
        let a = theta3(q1, DEFAULT_TOL).unwrap().value;
        let b = theta3(q2, DEFAULT_TOL).unwrap().value;
        prop_assert!(b > a, "theta3 not increasing: {a} at {q1}, {b} at {q2}");
    }

    /// z1 and theta3 stay consistent through both evaluation branches.
    #[test]
    fn z1_theta3_consistency(q in 0.0_f64..0.999) {
        let th = theta3(q, DEFAULT_TOL).unwrap().value;
        let zv = z1(q, DEFAULT_TOL).unwrap().value;
        prop_assert!((zv - (th - 1.0) / 2.0).abs() <= 1e-12 * th.max(1.0));
    }

    /// Colored-pair mixing entropy is identical for all three statistics —
    /// not merely close: the evaluation paths coincide.
    #[test]
    fn colored_pair_species_independent(
        beta in 0.05_f64..5.0,
        length in 1.0_f64..60.0,
    ) {
        let config = PhysicalConfig::new(beta, length).unwrap();
        let ds: Vec<f64> = [Statistics::Bose, Statistics::Fermi, Statistics::Distinguishable]
            .iter()
            .map(|&stat| {
                let pair = ScenarioPair::new(2, LabelMode::WithColors, stat).unwrap();
                thermo::report(&pair, &config, DEFAULT_TOL).unwrap().delta_s
            })
            .collect();
        prop_assert_eq!(ds[0], ds[1]);
        prop_assert_eq!(ds[0], ds[2]);
    }

    /// Colorless two-particle partitions match their theta-function forms.
    /// The nome is sampled away from 0 because the reference side computes
    /// `theta3(q^8) - 1`, which sheds digits once `q^8` drops toward machine
    /// epsilon.
    #[test]
    fn colorless_pair_theta_forms(u in 0.015_f64..1.6) {
        let length = std::f64::consts::PI / (2.0 * u).sqrt();
        let config = PhysicalConfig::new(1.0, length).unwrap();
        let q = config.boltzmann_base();
        let th = |m: i32| theta3(q.powi(m), 1e-15).unwrap().value;
        let cases = [
            (Statistics::Bose, wellmix::Stage::Unmixed,
             0.5 * (th(4) - 1.0).powi(2) + 0.5 * (th(8) - 1.0)),
            (Statistics::Fermi, wellmix::Stage::Unmixed,
             0.5 * (th(4) - 1.0).powi(2) - 0.5 * (th(8) - 1.0)),
            (Statistics::Bose, wellmix::Stage::Mixed,
             (th(1) - 1.0).powi(2) / 8.0 + (th(2) - 1.0) / 4.0),
            (Statistics::Fermi, wellmix::Stage::Mixed,
             (th(1) - 1.0).powi(2) / 8.0 - (th(2) - 1.0) / 4.0),
        ];
        for (stat, stage, expected) in cases {
            let scenario = wellmix::Scenario::new(2, LabelMode::WithoutColors, stat, stage).unwrap();
            let got = scenario_partition(&scenario, &config, DEFAULT_TOL).unwrap();
            let scale = expected.abs().max(1e-30);
            prop_assert!(
                ((got.z.value - expected) / scale).abs() <= 1e-9,
                "{stat} {stage}: {} vs {expected}", got.z.value
            );
        }
    }

    /// Bose majorizes Fermi for any particle number up to six.
    #[test]
    fn bose_dominates_fermi(q in 0.01_f64..0.97, n in 1u32..7) {
        let b = zn_ideal(n, Statistics::Bose, Well::Full, q, DEFAULT_TOL).unwrap().value;
        let f = zn_ideal(n, Statistics::Fermi, Well::Full, q, DEFAULT_TOL).unwrap().value;
        prop_assert!(b >= f);
    }

    /// Distinguishable particles factorize into single-particle powers
    /// within the certified truncation bounds of both evaluations.
    #[test]
    fn distinguishable_factorization(q in 0.01_f64..0.97, n in 1u32..7) {
        let single = zn_ideal(1, Statistics::Distinguishable, Well::Half, q, DEFAULT_TOL).unwrap();
        let many = zn_ideal(n, Statistics::Distinguishable, Well::Half, q, DEFAULT_TOL).unwrap();
        let mut pow = 1.0;
        let mut pow_bound = 0.0;
        for _ in 0..n {
            pow_bound = pow_bound * single.value + pow * single.error_bound;
            pow *= single.value;
        }
        let budget = (pow_bound + many.error_bound) * 1.01 + 1e-13 * pow;
        prop_assert!(
            (many.value - pow).abs() <= budget,
            "Z_{}^D = {} vs {}, budget {}", n, many.value, pow, budget
        );
    }
}
