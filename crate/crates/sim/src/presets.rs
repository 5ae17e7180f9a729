//! Canned experiment plans.
//!
//! Each preset bundles the scenarios and the output shape for one study:
//! convergence traces for a set of receivers, a BER or SINR sweep along
//! one axis, or a steady-state MSE versus SNR comparison against the
//! closed-form predictors. All presets share N = 15 chips, 250 training
//! symbols, 200 runs and seed 1 unless the study itself varies them.

use vfrls_core::filters::{CtvffParams, FfMechanism, GvffParams};
use vfrls_core::harness::{Algorithm, EntryEvent, ScenarioConfig, SweepAxis, SweepStatistic};

/// A scenario plus the name its rows carry in the output.
#[derive(Debug, Clone)]
pub struct LabeledScenario {
    pub label: String,
    pub config: ScenarioConfig,
}

/// What a plan computes from its scenarios.
#[derive(Debug, Clone)]
pub enum PlanKind {
    /// Per-symbol Monte Carlo traces; optionally also the closed-form
    /// steady-state prediction for each scenario.
    Traces { analytical: bool },
    /// One steady-state statistic per axis value per scenario.
    Sweep {
        axis: SweepAxis,
        values: Vec<f64>,
        statistic: SweepStatistic,
    },
    /// Steady-state MSE versus SNR, simulated and predicted.
    SnrAnalysis { snrs: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct RunPlan {
    pub name: &'static str,
    pub scenarios: Vec<LabeledScenario>,
    pub kind: PlanKind,
}

pub fn names() -> &'static [&'static str] {
    &["fig4", "fig5", "fig6", "fig7", "fig8a", "fig8b", "fig9", "fig10", "sweep-delta"]
}

fn ctvff(delta1: f64, delta2: f64, delta3: f64) -> Algorithm {
    Algorithm::Rls(FfMechanism::Ctvff(CtvffParams {
        delta1,
        delta2,
        delta3,
        lambda_min: 0.98,
        lambda_max: 0.99998,
        posterior_error: false,
    }))
}

fn gvff(mu: f64, lambda_min: f64) -> Algorithm {
    Algorithm::Rls(FfMechanism::Gvff(GvffParams {
        mu,
        lambda_init: 0.998,
        lambda_min,
        lambda_max: 0.99998,
    }))
}

fn fixed(lambda: f64) -> Algorithm {
    Algorithm::Rls(FfMechanism::Fixed { lambda })
}

fn sg() -> Algorithm {
    Algorithm::Sg { step: 0.025 }
}

fn base() -> ScenarioConfig {
    ScenarioConfig {
        code_length: 15,
        path_gains_db: vec![0.0, -6.0, -10.0],
        user_offsets_db: vec![0.0],
        snr_db: 15.0,
        doppler: 0.0,
        algorithm: ctvff(0.934, 0.005, 0.99),
        training_symbols: 250,
        total_symbols: 1500,
        events: Vec::new(),
        runs: 200,
        seed: 1,
    }
}

/// One labeled scenario per algorithm, labels taken from the algorithm
/// names so rows in a shared file stay distinguishable.
fn per_algorithm(template: &ScenarioConfig, algorithms: Vec<Algorithm>) -> Vec<LabeledScenario> {
    algorithms
        .into_iter()
        .map(|algorithm| {
            let mut config = template.clone();
            let label = String::from(algorithm.name());
            config.algorithm = algorithm;
            LabeledScenario { label, config }
        })
        .collect()
}

/// Dynamic multiuser scenario: three unequal interferers from the start,
/// four more entering at symbol 1000, slow fading.
fn entry_scenario() -> ScenarioConfig {
    let mut config = base();
    config.user_offsets_db = vec![0.0, 3.0, 3.0, 6.0, 0.0, 0.0];
    config.events = vec![EntryEvent { symbol: 1000, offsets_db: vec![3.0, 3.0, 6.0, 0.0] }];
    config.doppler = 1e-5;
    config.total_symbols = 2000;
    config
}

/// Five equal-power users over the default three-path profile.
fn equal_five(doppler: f64) -> ScenarioConfig {
    let mut config = base();
    config.user_offsets_db = vec![0.0; 5];
    config.doppler = doppler;
    config
}

/// Static six-user scenario on a milder power profile, used for the
/// convergence-speed comparisons.
fn static_six() -> ScenarioConfig {
    let mut config = base();
    config.path_gains_db = vec![0.0, -3.0, -6.0];
    config.user_offsets_db = vec![0.0; 6];
    config
}

/// The two branches the predictor studies use: a static channel and a
/// slowly fading one, each with CTVFF constants tuned for that regime.
fn predictor_branches() -> Vec<LabeledScenario> {
    let mut config = base();
    config.user_offsets_db = vec![0.0; 4];

    let mut fading = config.clone();
    config.algorithm = ctvff(0.99, 0.0035, 0.995);
    fading.doppler = 1e-5;
    fading.algorithm = ctvff(0.99, 0.0004, 0.99);
    vec![
        LabeledScenario { label: String::from("ctvff-static"), config },
        LabeledScenario { label: String::from("ctvff-fading"), config: fading },
    ]
}

pub fn by_name(name: &str) -> Option<RunPlan> {
    let plan = match name {
        "fig4" => RunPlan {
            name: "fig4",
            scenarios: per_algorithm(
                &entry_scenario(),
                vec![ctvff(0.934, 0.005, 0.99), gvff(0.0025, 0.992), fixed(0.997), sg()],
            ),
            kind: PlanKind::Traces { analytical: false },
        },
        "fig5" => RunPlan {
            name: "fig5",
            scenarios: per_algorithm(&entry_scenario(), vec![ctvff(0.934, 0.005, 0.99)]),
            kind: PlanKind::Traces { analytical: false },
        },
        "fig6" => RunPlan {
            name: "fig6",
            scenarios: per_algorithm(
                &static_six(),
                vec![ctvff(0.9879, 0.001, 0.99), gvff(0.006, 0.992), fixed(0.9995), sg()],
            ),
            kind: PlanKind::Traces { analytical: false },
        },
        "fig7" => RunPlan {
            name: "fig7",
            scenarios: per_algorithm(
                &equal_five(1e-4),
                vec![ctvff(0.988, 0.001, 0.99), gvff(0.003, 0.993), fixed(0.995), sg()],
            ),
            kind: PlanKind::Sweep {
                axis: SweepAxis::Doppler,
                values: vec![1e-5, 5e-5, 1e-4, 5e-4, 1e-3],
                statistic: SweepStatistic::Ber,
            },
        },
        "fig8a" => RunPlan {
            name: "fig8a",
            scenarios: per_algorithm(
                &equal_five(1e-4),
                vec![
                    ctvff(0.988, 0.001, 0.99),
                    gvff(0.0035, 0.992),
                    fixed(0.995),
                    sg(),
                    Algorithm::Rake,
                ],
            ),
            kind: PlanKind::Sweep {
                axis: SweepAxis::Snr,
                values: vec![0.0, 3.0, 6.0, 9.0, 12.0, 15.0],
                statistic: SweepStatistic::Ber,
            },
        },
        "fig8b" => RunPlan {
            name: "fig8b",
            scenarios: per_algorithm(
                &equal_five(1e-4),
                vec![
                    ctvff(0.988, 0.001, 0.99),
                    gvff(0.0035, 0.992),
                    fixed(0.995),
                    sg(),
                    Algorithm::Rake,
                ],
            ),
            kind: PlanKind::Sweep {
                axis: SweepAxis::Users,
                values: vec![2.0, 4.0, 6.0, 8.0, 10.0],
                statistic: SweepStatistic::Ber,
            },
        },
        "fig9" => RunPlan {
            name: "fig9",
            scenarios: predictor_branches(),
            kind: PlanKind::Traces { analytical: true },
        },
        "fig10" => RunPlan {
            name: "fig10",
            scenarios: predictor_branches(),
            kind: PlanKind::SnrAnalysis { snrs: vec![0.0, 3.0, 6.0, 9.0, 12.0, 15.0] },
        },
        "sweep-delta" => {
            let mut config = static_six();
            config.algorithm = ctvff(0.9819, 0.005, 0.99);
            RunPlan {
                name: "sweep-delta",
                scenarios: per_algorithm(&config, vec![config.algorithm.clone()]),
                kind: PlanKind::Sweep {
                    axis: SweepAxis::Delta1,
                    values: vec![
                        0.90, 0.92, 0.94, 0.95, 0.96, 0.97, 0.98, 0.9819, 0.985, 0.99, 0.995,
                        0.998,
                    ],
                    statistic: SweepStatistic::SteadySinrDb,
                },
            }
        }
        _ => return None,
    };
    Some(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_exists_and_validates() {
        for &name in names() {
            let plan = by_name(name).unwrap_or_else(|| panic!("{name} missing"));
            assert_eq!(plan.name, name);
            assert!(!plan.scenarios.is_empty(), "{name} has no scenarios");
            for sc in &plan.scenarios {
                sc.config
                    .validate()
                    .unwrap_or_else(|e| panic!("{name}/{}: {e}", sc.label));
            }
        }
        assert!(by_name("fig99").is_none());
    }

    #[test]
    fn labels_within_a_plan_are_unique() {
        for &name in names() {
            let plan = by_name(name).unwrap();
            let mut labels: Vec<&str> = plan.scenarios.iter().map(|s| s.label.as_str()).collect();
            labels.sort_unstable();
            labels.dedup();
            assert_eq!(labels.len(), plan.scenarios.len(), "{name} repeats a label");
        }
    }

    #[test]
    fn entry_preset_doubles_the_load_mid_run() {
        let plan = by_name("fig4").unwrap();
        let config = &plan.scenarios[0].config;
        assert_eq!(config.user_offsets_db.len(), 6);
        assert_eq!(config.events.len(), 1);
        assert_eq!(config.events[0].symbol, 1000);
        assert_eq!(config.total_users(), 10);
        assert_eq!(plan.scenarios.len(), 4);
    }

    #[test]
    fn sweep_axes_match_their_scenario_algorithms() {
        use vfrls_core::harness::apply_axis;
        for &name in names() {
            let plan = by_name(name).unwrap();
            let PlanKind::Sweep { axis, values, .. } = &plan.kind else { continue };
            for sc in &plan.scenarios {
                for &v in values {
                    let mut config = sc.config.clone();
                    apply_axis(&mut config, *axis, v)
                        .unwrap_or_else(|e| panic!("{name}/{}: {e}", sc.label));
                    config
                        .validate()
                        .unwrap_or_else(|e| panic!("{name}/{} at {v}: {e}", sc.label));
                }
            }
        }
    }
}
