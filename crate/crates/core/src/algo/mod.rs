//! Bandit algorithms: init-phase planning, action selection, state update.
//!
//! Selection never mutates state; only [`Algorithm::update`] does, and the
//! round counter advances exactly once per update regardless of how many
//! arms the chosen super arm contains.

mod cucb;
mod naive;
mod sdcb;

pub use cucb::{mean_ucb, variance_lcb, variance_penalty, CucbConfig, GaussianCucb, LogTime};
pub use naive::NaiveBaseline;
pub use sdcb::{dkw_radius, Sdcb};

use crate::env::{ActionSet, EnvironmentInstance};
use crate::error::{Error, Result};
use crate::dist::RiskLevel;

/// Outcome of one selection step: the chosen position in the action set,
/// every super arm's index value, and whether the maximum was tied.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionDecision {
    pub chosen: usize,
    pub index_values: Vec<f64>,
    pub tie: bool,
}

impl SelectionDecision {
    /// Argmax with ties broken toward the lowest position in the action
    /// set. A tie means the maximum is attained more than once (exact
    /// float equality; identical statistics produce identical indices).
    pub fn from_indices(index_values: Vec<f64>) -> Self {
        debug_assert!(!index_values.is_empty());
        let mut chosen = 0;
        let mut best = index_values[0];
        for (i, &v) in index_values.iter().enumerate().skip(1) {
            if v > best {
                best = v;
                chosen = i;
            }
        }
        let tie = index_values.iter().filter(|&&v| v == best).count() > 1;
        Self {
            chosen,
            index_values,
            tie,
        }
    }
}

/// Common interface the harness drives.
pub trait Algorithm {
    fn name(&self) -> &'static str;

    /// Super arms (positions in the action set) to play before regular
    /// selection starts, so that every statistic the algorithm needs is
    /// defined.
    fn init_plan(&self, actions: &ActionSet) -> Result<Vec<usize>>;

    /// Pick a super arm. Pure: calling twice without an update in between
    /// returns the same decision.
    fn select(&self, actions: &ActionSet) -> Result<SelectionDecision>;

    /// Incorporate semi-bandit feedback for the chosen super arm: one
    /// reward per constituent arm.
    fn update(
        &mut self,
        actions: &ActionSet,
        chosen: usize,
        rewards: &[(usize, f64)],
    ) -> Result<()>;
}

/// Greedy cover plan: repeatedly play the super arm containing the most
/// arms that still need pulls, until every arm has `required_pulls`
/// samples. Never longer than `required_pulls × |𝒜|` rounds, since a super
/// arm stops being useful after `required_pulls` plays.
pub fn plan_init_phase(actions: &ActionSet, required_pulls: u32) -> Result<Vec<usize>> {
    let mut pulls = vec![0u32; actions.num_arms()];
    let mut plan = Vec::new();
    loop {
        let mut best: Option<(usize, usize)> = None; // (covered, position)
        for (pos, sa) in actions.super_arms().iter().enumerate() {
            let covered = sa
                .arm_ids()
                .iter()
                .filter(|&&arm| pulls[arm] < required_pulls)
                .count();
            if covered > 0 && best.map_or(true, |(c, _)| covered > c) {
                best = Some((covered, pos));
            }
        }
        match best {
            Some((_, pos)) => {
                for &arm in actions.get(pos).arm_ids() {
                    pulls[arm] += 1;
                }
                plan.push(pos);
            }
            None => {
                // Either done, or an arm is unreachable.
                if let Some(arm) = pulls.iter().position(|&p| p < required_pulls) {
                    return Err(Error::UncoverableArm { arm });
                }
                return Ok(plan);
            }
        }
    }
}

/// Validate semi-bandit feedback against the chosen super arm: exactly one
/// reward per constituent arm, no foreigners, no duplicates.
pub(crate) fn check_rewards(
    actions: &ActionSet,
    chosen: usize,
    rewards: &[(usize, f64)],
) -> Result<()> {
    let sa = actions.get(chosen);
    if rewards.len() != sa.len() {
        return Err(Error::RewardCountMismatch {
            expected: sa.len(),
            got: rewards.len(),
        });
    }
    let mut seen = Vec::with_capacity(rewards.len());
    for &(arm, _) in rewards {
        if !sa.contains(arm) {
            return Err(Error::RewardArmMismatch { arm });
        }
        if seen.contains(&arm) {
            return Err(Error::RewardArmMismatch { arm });
        }
        seen.push(arm);
    }
    Ok(())
}

/// Which algorithm to run, with per-algorithm knobs.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmSpec {
    /// Gaussian-arm CVaR-UCB. `unify_log_time` switches the exploration
    /// radius from the default log(t−1) to log(t).
    CucbG { unify_log_time: bool },
    /// Stochastically dominant confidence bound for bounded arms.
    Sdcb,
    /// SDCB with ε-grid round-up before super-arm convolution. `epsilon`
    /// of `None` uses the default α/((L+1)·T).
    DSdcb { epsilon: Option<f64> },
    /// Treat each super arm as an independent arm.
    Naive,
}

impl AlgorithmSpec {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "cucb-g" => Ok(Self::CucbG {
                unify_log_time: false,
            }),
            "sdcb" => Ok(Self::Sdcb),
            "d-sdcb" => Ok(Self::DSdcb { epsilon: None }),
            "naive" => Ok(Self::Naive),
            other => Err(Error::UnknownAlgorithm(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CucbG { .. } => "cucb-g",
            Self::Sdcb => "sdcb",
            Self::DSdcb { .. } => "d-sdcb",
            Self::Naive => "naive",
        }
    }

    /// Default ε for the discretized variant given the horizon.
    pub fn default_epsilon(alpha: RiskLevel, max_super_arm_size: usize, horizon: u64) -> f64 {
        alpha.alpha() / ((max_super_arm_size as f64 + 1.0) * horizon as f64)
    }

    /// Instantiate algorithm state for an environment and horizon.
    pub fn build(
        &self,
        env: &EnvironmentInstance,
        alpha: RiskLevel,
        horizon: u64,
    ) -> Result<Box<dyn Algorithm>> {
        use crate::env::ArmLaws;
        let actions = env.action_set();
        match self {
            Self::CucbG { unify_log_time } => match env.laws() {
                ArmLaws::Gaussian {
                    std_dev_lower,
                    std_dev_upper,
                    ..
                } => Ok(Box::new(GaussianCucb::new(CucbConfig {
                    alpha,
                    std_dev_upper: *std_dev_upper,
                    std_dev_lower: *std_dev_lower,
                    max_super_arm_size: actions.max_size(),
                    log_time: if *unify_log_time {
                        LogTime::CurrentRound
                    } else {
                        LogTime::PreviousRound
                    },
                    num_arms: actions.num_arms(),
                }))),
                ArmLaws::Bounded { .. } => Err(Error::EnvironmentKindMismatch {
                    algorithm: "cucb-g",
                    required: "gaussian",
                }),
            },
            Self::Sdcb => {
                require_bounded(env, "sdcb")?;
                Ok(Box::new(Sdcb::new_plain(alpha, actions.num_arms())))
            }
            Self::DSdcb { epsilon } => {
                require_bounded(env, "d-sdcb")?;
                let eps = epsilon.unwrap_or_else(|| {
                    Self::default_epsilon(alpha, actions.max_size(), horizon)
                });
                Ok(Box::new(Sdcb::new_discretized(
                    alpha,
                    actions.num_arms(),
                    eps,
                )?))
            }
            Self::Naive => {
                require_bounded(env, "naive")?;
                Ok(Box::new(NaiveBaseline::new(
                    alpha,
                    actions.len(),
                    actions.max_size() as f64,
                )))
            }
        }
    }
}

fn require_bounded(env: &EnvironmentInstance, algorithm: &'static str) -> Result<()> {
    if env.is_gaussian() {
        Err(Error::EnvironmentKindMismatch {
            algorithm,
            required: "bounded",
        })
    } else {
        Ok(())
    }
}
