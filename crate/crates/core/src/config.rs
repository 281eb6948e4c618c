//! Declarative experiment configuration.
//!
//! Configs deserialize from TOML (the CLI documents the syntax) and are
//! validated as a whole: `validate` returns every violation it can find,
//! not just the first. The same struct serializes into the experiment
//! summary so a run's provenance is embedded in its output.

use serde::{Deserialize, Serialize};

use crate::algo::AlgorithmSpec;
use crate::dist::DiscreteDistribution;
use crate::env::{ActionSet, EnvironmentInstance, SuperArm};
use crate::error::{Error, Result};
use crate::gaussian::GaussianParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Risk level α ∈ (0, 1).
    pub alpha: f64,
    /// Total rounds per run, init phase included.
    pub horizon: u64,
    /// Record every k-th round of each trace (cumulative regret stays
    /// exact at recorded points).
    #[serde(default = "default_thinning")]
    pub thinning: u64,
    /// Worker threads for the run grid.
    #[serde(default = "default_workers")]
    pub workers: usize,
    pub seeds: SeedSpec,
    pub environment: EnvironmentSpec,
    pub algorithms: Vec<AlgorithmConfig>,
}

fn default_thinning() -> u64 {
    1
}

fn default_workers() -> usize {
    1
}

fn default_seed_count() -> u64 {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    /// Number of independent runs per algorithm.
    #[serde(default = "default_seed_count")]
    pub count: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnvironmentSpec {
    Gaussian {
        arms: Vec<GaussianArmSpec>,
        variance_bounds: VarianceBounds,
        action_set: Vec<Vec<usize>>,
    },
    Bounded {
        arms: Vec<BoundedArmSpec>,
        action_set: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianArmSpec {
    pub mean: f64,
    pub std_dev: f64,
}

/// Known strict bounds N < σᵢ < M on every arm's standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Finite-support arm law as a literal atom list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedArmSpec {
    /// (value, mass) pairs.
    pub atoms: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    /// One of cucb-g, sdcb, d-sdcb, naive.
    pub name: String,
    /// d-sdcb only: grid step override; default is α/((L+1)·horizon).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// cucb-g only: use log(t) instead of log(t−1) in the radii.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unify_log_time: Option<bool>,
}

impl ExperimentConfig {
    /// Every violation in the config, with a path-like context prefix.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.alpha < 1.0) {
            v.push(format!("alpha: {} out of range (0, 1)", self.alpha));
        }
        if self.horizon < 1 {
            v.push("horizon: must be at least 1".to_string());
        }
        if self.thinning < 1 {
            v.push("thinning: must be at least 1".to_string());
        }
        if self.workers < 1 {
            v.push("workers: must be at least 1".to_string());
        }
        if self.seeds.count < 1 {
            v.push("seeds.count: must be at least 1".to_string());
        }
        if self.algorithms.is_empty() {
            v.push("algorithms: list is empty".to_string());
        }
        let gaussian_env = matches!(self.environment, EnvironmentSpec::Gaussian { .. });
        for (i, algo) in self.algorithms.iter().enumerate() {
            let ctx = format!("algorithms[{i}]");
            match AlgorithmSpec::parse(&algo.name) {
                Ok(spec) => {
                    let needs_gaussian = matches!(spec, AlgorithmSpec::CucbG { .. });
                    if needs_gaussian != gaussian_env {
                        v.push(format!(
                            "{ctx}: algorithm/environment kind mismatch: {} requires a {} environment",
                            algo.name,
                            if needs_gaussian { "gaussian" } else { "bounded" }
                        ));
                    }
                    if algo.epsilon.is_some() && !matches!(spec, AlgorithmSpec::DSdcb { .. }) {
                        v.push(format!("{ctx}: epsilon only applies to d-sdcb"));
                    }
                    if algo.unify_log_time.is_some()
                        && !matches!(spec, AlgorithmSpec::CucbG { .. })
                    {
                        v.push(format!("{ctx}: unify_log_time only applies to cucb-g"));
                    }
                    if let Some(eps) = algo.epsilon {
                        if !(eps.is_finite() && eps > 0.0) {
                            v.push(format!("{ctx}: epsilon must be positive, got {eps}"));
                        }
                    }
                }
                Err(_) => v.push(format!("{ctx}: unknown algorithm {:?}", algo.name)),
            }
        }
        match self.build_environment() {
            Ok(_) => {}
            Err(Error::InvalidEnvironment(violations)) => {
                v.extend(violations.into_iter().map(|s| format!("environment: {s}")));
            }
            Err(e) => v.push(format!("environment: {e}")),
        }
        v
    }

    pub fn build_environment(&self) -> Result<EnvironmentInstance> {
        match &self.environment {
            EnvironmentSpec::Gaussian {
                arms,
                variance_bounds,
                action_set,
            } => {
                let params: Vec<GaussianParams> = arms
                    .iter()
                    .map(|a| GaussianParams::new(a.mean, a.std_dev))
                    .collect::<Result<_>>()?;
                let actions = build_action_set(action_set, params.len())?;
                EnvironmentInstance::new_gaussian(
                    params,
                    variance_bounds.lower,
                    variance_bounds.upper,
                    actions,
                )
            }
            EnvironmentSpec::Bounded { arms, action_set } => {
                let laws: Vec<DiscreteDistribution> = arms
                    .iter()
                    .map(|a| DiscreteDistribution::new(a.atoms.iter().copied()))
                    .collect::<Result<_>>()?;
                let actions = build_action_set(action_set, laws.len())?;
                EnvironmentInstance::new_bounded(laws, actions)
            }
        }
    }

    pub fn algorithm_specs(&self) -> Result<Vec<AlgorithmSpec>> {
        self.algorithms
            .iter()
            .map(|a| {
                let spec = AlgorithmSpec::parse(&a.name)?;
                Ok(match spec {
                    AlgorithmSpec::DSdcb { .. } => AlgorithmSpec::DSdcb { epsilon: a.epsilon },
                    AlgorithmSpec::CucbG { .. } => AlgorithmSpec::CucbG {
                        unify_log_time: a.unify_log_time.unwrap_or(false),
                    },
                    other => other,
                })
            })
            .collect()
    }
}

fn build_action_set(lists: &[Vec<usize>], num_arms: usize) -> Result<ActionSet> {
    let super_arms = lists
        .iter()
        .map(|ids| SuperArm::new(ids.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    ActionSet::new(super_arms, num_arms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_gaussian() -> ExperimentConfig {
        ExperimentConfig {
            alpha: 0.3,
            horizon: 100,
            thinning: 1,
            workers: 1,
            seeds: SeedSpec {
                count: 2,
                master_seed: 7,
            },
            environment: EnvironmentSpec::Gaussian {
                arms: vec![
                    GaussianArmSpec {
                        mean: 1.0,
                        std_dev: 0.5,
                    },
                    GaussianArmSpec {
                        mean: 0.5,
                        std_dev: 0.5,
                    },
                ],
                variance_bounds: VarianceBounds {
                    lower: 0.25,
                    upper: 1.0,
                },
                action_set: vec![vec![0], vec![1], vec![0, 1]],
            },
            algorithms: vec![AlgorithmConfig {
                name: "cucb-g".to_string(),
                epsilon: None,
                unify_log_time: None,
            }],
        }
    }

    #[test]
    fn minimal_config_validates() {
        assert!(minimal_gaussian().validate().is_empty());
    }

    #[test]
    fn alpha_out_of_range_is_reported() {
        let mut cfg = minimal_gaussian();
        cfg.alpha = 1.5;
        let v = cfg.validate();
        assert!(v.iter().any(|s| s.contains("alpha")), "{v:?}");
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let mut cfg = minimal_gaussian();
        cfg.algorithms[0].name = "sdcb".to_string();
        let v = cfg.validate();
        assert!(
            v.iter().any(|s| s.contains("kind mismatch")),
            "{v:?}"
        );
    }

    #[test]
    fn multiple_violations_all_reported() {
        let mut cfg = minimal_gaussian();
        cfg.alpha = -1.0;
        cfg.horizon = 0;
        cfg.algorithms[0].name = "mystery".to_string();
        let v = cfg.validate();
        assert!(v.len() >= 3, "{v:?}");
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            alpha = 0.3
            horizon = 1000

            [seeds]
            count = 4
            master_seed = 99

            [environment]
            kind = "bounded"
            action_set = [[0, 1], [1, 2]]

            [[environment.arms]]
            atoms = [[0.0, 0.5], [1.0, 0.5]]

            [[environment.arms]]
            atoms = [[0.0, 0.3], [1.0, 0.7]]

            [[environment.arms]]
            atoms = [[0.5, 1.0]]

            [[algorithms]]
            name = "sdcb"

            [[algorithms]]
            name = "d-sdcb"
            epsilon = 1e-3
        "#;
        let cfg: ExperimentConfig = toml::from_str(text).unwrap();
        assert!(cfg.validate().is_empty(), "{:?}", cfg.validate());
        assert_eq!(cfg.thinning, 1);
        assert_eq!(cfg.workers, 1);
        let specs = cfg.algorithm_specs().unwrap();
        assert_eq!(specs[0], AlgorithmSpec::Sdcb);
        assert_eq!(
            specs[1],
            AlgorithmSpec::DSdcb {
                epsilon: Some(1e-3)
            }
        );
        // Serialized form reparses to an equal config.
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn bad_arm_reference_is_reported() {
        let mut cfg = minimal_gaussian();
        if let EnvironmentSpec::Gaussian { action_set, .. } = &mut cfg.environment {
            action_set.push(vec![5]);
        }
        let v = cfg.validate();
        assert!(v.iter().any(|s| s.contains("references arm 5")), "{v:?}");
    }
}
