//! Ground-truth bandit instances.
//!
//! An environment pins down the true reward law of every arm, the action
//! set of feasible super arms, and — because the arm laws are known exactly
//! — the true CVaR of every super arm, the optimal one, and all gaps. Gap
//! tables are what make measured regret exact rather than estimated.

use crate::dist::{convolve_many, cvar_discrete, DiscreteDistribution, RiskLevel};
use crate::error::{Error, Result};
use crate::gaussian::{gaussian_cvar, GaussianParams};
use crate::rng::RewardStreams;

/// A feasible subset of arms, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuperArm {
    arm_ids: Vec<usize>,
}

impl SuperArm {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut arm_ids: Vec<usize> = ids.into_iter().collect();
        arm_ids.sort_unstable();
        arm_ids.dedup();
        if arm_ids.is_empty() {
            return Err(Error::Empty { what: "super arm" });
        }
        Ok(Self { arm_ids })
    }

    pub fn arm_ids(&self) -> &[usize] {
        &self.arm_ids
    }

    pub fn len(&self) -> usize {
        self.arm_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty sets
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.arm_ids.binary_search(&arm).is_ok()
    }
}

/// The constraint family: which super arms may be played.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSet {
    super_arms: Vec<SuperArm>,
    num_arms: usize,
    max_size: usize,
}

impl ActionSet {
    /// Validates that every super arm references arms below `num_arms` and
    /// that every arm occurs in at least one super arm (an arm no super arm
    /// can reach would be dead weight in the instance).
    pub fn new(super_arms: Vec<SuperArm>, num_arms: usize) -> Result<Self> {
        let violations = Self::check(&super_arms, num_arms);
        if !violations.is_empty() {
            return Err(Error::InvalidEnvironment(violations));
        }
        let max_size = super_arms.iter().map(SuperArm::len).max().unwrap_or(0);
        Ok(Self {
            super_arms,
            num_arms,
            max_size,
        })
    }

    pub(crate) fn check(super_arms: &[SuperArm], num_arms: usize) -> Vec<String> {
        let mut violations = Vec::new();
        if super_arms.is_empty() {
            violations.push("action set is empty".to_string());
        }
        if num_arms == 0 {
            violations.push("environment has no arms".to_string());
        }
        let mut covered = vec![false; num_arms];
        for (idx, sa) in super_arms.iter().enumerate() {
            for &arm in sa.arm_ids() {
                if arm >= num_arms {
                    violations.push(format!(
                        "super arm {idx} references arm {arm}, but only {num_arms} arms exist"
                    ));
                } else {
                    covered[arm] = true;
                }
            }
        }
        for (arm, seen) in covered.iter().enumerate() {
            if !seen {
                violations.push(format!("arm {arm} is not covered by any super arm"));
            }
        }
        violations
    }

    pub fn super_arms(&self) -> &[SuperArm] {
        &self.super_arms
    }

    pub fn len(&self) -> usize {
        self.super_arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.super_arms.is_empty()
    }

    pub fn get(&self, index: usize) -> &SuperArm {
        &self.super_arms[index]
    }

    /// Largest super-arm size L.
    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn position_of(&self, arm: &SuperArm) -> Option<usize> {
        self.super_arms.iter().position(|sa| sa == arm)
    }
}

/// True arm reward laws.
#[derive(Debug, Clone, PartialEq)]
pub enum ArmLaws {
    Gaussian {
        arms: Vec<GaussianParams>,
        /// Known strict lower bound N on every arm's std dev (N² < σ²).
        std_dev_lower: f64,
        /// Known strict upper bound M on every arm's std dev (σ² < M²).
        std_dev_upper: f64,
    },
    /// Finite-support laws on [0, 1]; true super-arm CVaR is exact via
    /// convolution.
    Bounded { arms: Vec<DiscreteDistribution> },
}

/// A fully specified bandit instance.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentInstance {
    laws: ArmLaws,
    action_set: ActionSet,
}

impl EnvironmentInstance {
    pub fn new_gaussian(
        arms: Vec<GaussianParams>,
        std_dev_lower: f64,
        std_dev_upper: f64,
        action_set: ActionSet,
    ) -> Result<Self> {
        let env = Self {
            laws: ArmLaws::Gaussian {
                arms,
                std_dev_lower,
                std_dev_upper,
            },
            action_set,
        };
        let violations = env.validate();
        if violations.is_empty() {
            Ok(env)
        } else {
            Err(Error::InvalidEnvironment(violations))
        }
    }

    pub fn new_bounded(arms: Vec<DiscreteDistribution>, action_set: ActionSet) -> Result<Self> {
        let env = Self {
            laws: ArmLaws::Bounded { arms },
            action_set,
        };
        let violations = env.validate();
        if violations.is_empty() {
            Ok(env)
        } else {
            Err(Error::InvalidEnvironment(violations))
        }
    }

    /// Re-check every invariant, returning all violations rather than the
    /// first.
    pub fn validate(&self) -> Vec<String> {
        let mut violations =
            ActionSet::check(self.action_set.super_arms(), self.action_set.num_arms());
        match &self.laws {
            ArmLaws::Gaussian {
                arms,
                std_dev_lower,
                std_dev_upper,
            } => {
                if arms.len() != self.action_set.num_arms() {
                    violations.push(format!(
                        "{} gaussian arms but action set expects {}",
                        arms.len(),
                        self.action_set.num_arms()
                    ));
                }
                let (n, m) = (*std_dev_lower, *std_dev_upper);
                if !(n.is_finite() && n > 0.0 && m.is_finite() && m > n) {
                    violations.push(format!(
                        "variance bounds must satisfy 0 < N < M, got N={n}, M={m}"
                    ));
                }
                for (i, arm) in arms.iter().enumerate() {
                    let var = arm.variance();
                    if var <= n * n || var >= m * m {
                        violations.push(format!(
                            "arm {i} variance {var} violates strict bounds N²={} < σ² < M²={}",
                            n * n,
                            m * m
                        ));
                    }
                }
            }
            ArmLaws::Bounded { arms } => {
                if arms.len() != self.action_set.num_arms() {
                    violations.push(format!(
                        "{} bounded arms but action set expects {}",
                        arms.len(),
                        self.action_set.num_arms()
                    ));
                }
                for (i, arm) in arms.iter().enumerate() {
                    if arm.min_value() < 0.0 || arm.max_value() > 1.0 {
                        violations.push(format!(
                            "arm {i} support [{}, {}] escapes [0, 1]",
                            arm.min_value(),
                            arm.max_value()
                        ));
                    }
                }
            }
        }
        violations
    }

    pub fn laws(&self) -> &ArmLaws {
        &self.laws
    }

    pub fn action_set(&self) -> &ActionSet {
        &self.action_set
    }

    pub fn num_arms(&self) -> usize {
        self.action_set.num_arms()
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.laws, ArmLaws::Gaussian { .. })
    }

    /// Semi-bandit draw: one independent reward per constituent arm,
    /// deterministic given the stream state.
    pub fn sample_super_arm(
        &self,
        arm: &SuperArm,
        streams: &mut RewardStreams,
    ) -> Result<Vec<(usize, f64)>> {
        let index = self
            .action_set
            .position_of(arm)
            .ok_or(Error::SuperArmNotInActionSet)?;
        Ok(self.sample_by_index(index, streams))
    }

    /// As [`sample_super_arm`](Self::sample_super_arm) but for a known
    /// position in the action set.
    pub fn sample_by_index(
        &self,
        index: usize,
        streams: &mut RewardStreams,
    ) -> Vec<(usize, f64)> {
        let sa = self.action_set.get(index);
        sa.arm_ids()
            .iter()
            .map(|&arm| (arm, self.draw_arm(arm, streams)))
            .collect()
    }

    fn draw_arm(&self, arm: usize, streams: &mut RewardStreams) -> f64 {
        let u = streams.draw_uniform(arm);
        match &self.laws {
            ArmLaws::Gaussian { arms, .. } => {
                let p = &arms[arm];
                p.mean()
                    + p.std_dev()
                        * crate::gaussian::std_normal_quantile(u)
                            .expect("uniform draw is inside (0,1)")
            }
            ArmLaws::Bounded { arms } => {
                // Inverse-CDF: pick the first atom whose cumulative mass
                // reaches u.
                let law = &arms[arm];
                let mut cum = 0.0;
                for atom in law.atoms() {
                    cum += atom.mass;
                    if u <= cum {
                        return atom.value;
                    }
                }
                law.max_value()
            }
        }
    }

    /// Exact CVaR of the super-arm reward sum under the true laws.
    pub fn true_cvar(&self, arm: &SuperArm, alpha: RiskLevel) -> Result<f64> {
        if self.action_set.position_of(arm).is_none() {
            return Err(Error::SuperArmNotInActionSet);
        }
        match &self.laws {
            ArmLaws::Gaussian { arms, .. } => {
                let mean: f64 = arm.arm_ids().iter().map(|&i| arms[i].mean()).sum();
                let var: f64 = arm.arm_ids().iter().map(|&i| arms[i].variance()).sum();
                Ok(gaussian_cvar(&GaussianParams::new(mean, var.sqrt())?, alpha))
            }
            ArmLaws::Bounded { arms } => {
                let laws: Vec<DiscreteDistribution> = arm
                    .arm_ids()
                    .iter()
                    .map(|&i| arms[i].clone())
                    .collect();
                Ok(cvar_discrete(&convolve_many(&laws)?, alpha))
            }
        }
    }

    /// Exhaustively evaluate the action set.
    pub fn gap_table(&self, alpha: RiskLevel) -> Result<GapTable> {
        let cvars: Vec<f64> = self
            .action_set
            .super_arms()
            .iter()
            .map(|sa| self.true_cvar(sa, alpha))
            .collect::<Result<_>>()?;
        Ok(GapTable::from_cvars(cvars))
    }
}

/// Per-super-arm true CVaRs, gaps to the optimum, and the optimal indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GapTable {
    cvars: Vec<f64>,
    gaps: Vec<f64>,
    optimal: Vec<usize>,
    best_cvar: f64,
    delta_min: Option<f64>,
    delta_max: f64,
}

impl GapTable {
    pub fn from_cvars(cvars: Vec<f64>) -> Self {
        assert!(!cvars.is_empty(), "gap table needs at least one super arm");
        let best_cvar = cvars.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gaps: Vec<f64> = cvars.iter().map(|&c| best_cvar - c).collect();
        let optimal: Vec<usize> = gaps
            .iter()
            .enumerate()
            .filter(|(_, &g)| g == 0.0)
            .map(|(i, _)| i)
            .collect();
        let delta_min = gaps
            .iter()
            .copied()
            .filter(|&g| g > 0.0)
            .fold(None, |acc: Option<f64>, g| {
                Some(acc.map_or(g, |a| a.min(g)))
            });
        let delta_max = gaps.iter().copied().fold(0.0, f64::max);
        Self {
            cvars,
            gaps,
            optimal,
            best_cvar,
            delta_min,
            delta_max,
        }
    }

    pub fn cvars(&self) -> &[f64] {
        &self.cvars
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn gap(&self, index: usize) -> f64 {
        self.gaps[index]
    }

    pub fn optimal_indices(&self) -> &[usize] {
        &self.optimal
    }

    pub fn is_optimal(&self, index: usize) -> bool {
        self.gaps[index] == 0.0
    }

    pub fn best_cvar(&self) -> f64 {
        self.best_cvar
    }

    /// None when every super arm is optimal (no nonzero gap exists).
    pub fn delta_min(&self) -> Option<f64> {
        self.delta_min
    }

    pub fn delta_max(&self) -> f64 {
        self.delta_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn risk(a: f64) -> RiskLevel {
        RiskLevel::new(a).unwrap()
    }

    fn pairs_action_set(pairs: &[[usize; 2]], num_arms: usize) -> ActionSet {
        let sas = pairs
            .iter()
            .map(|p| SuperArm::new(p.iter().copied()).unwrap())
            .collect();
        ActionSet::new(sas, num_arms).unwrap()
    }

    #[test]
    fn super_arm_sorts_and_dedups() {
        let sa = SuperArm::new([3, 1, 3, 0]).unwrap();
        assert_eq!(sa.arm_ids(), &[0, 1, 3]);
        assert!(SuperArm::new(std::iter::empty()).is_err());
    }

    #[test]
    fn action_set_rejects_uncovered_arms() {
        let sas = vec![SuperArm::new([0, 1]).unwrap()];
        match ActionSet::new(sas, 3) {
            Err(Error::InvalidEnvironment(v)) => {
                assert!(v.iter().any(|s| s.contains("arm 2")));
            }
            other => panic!("expected invalid environment, got {other:?}"),
        }
    }

    #[test]
    fn gaussian_bounds_must_be_strict() {
        let action_set = pairs_action_set(&[[0, 1]], 2);
        let arms = vec![
            GaussianParams::new(0.0, 1.0).unwrap(),
            GaussianParams::new(0.0, 1.0).unwrap(),
        ];
        // σ = M exactly: not strict.
        match EnvironmentInstance::new_gaussian(arms.clone(), 0.5, 1.0, action_set.clone()) {
            Err(Error::InvalidEnvironment(v)) => {
                assert!(v.iter().any(|s| s.contains("strict")));
            }
            other => panic!("expected violation, got {other:?}"),
        }
        assert!(EnvironmentInstance::new_gaussian(arms, 0.5, 2.0, action_set).is_ok());
    }

    #[test]
    fn bounded_support_must_fit_unit_interval() {
        let action_set = pairs_action_set(&[[0, 1]], 2);
        let arms = vec![
            DiscreteDistribution::point_mass(0.5),
            DiscreteDistribution::point_mass(1.5),
        ];
        match EnvironmentInstance::new_bounded(arms, action_set) {
            Err(Error::InvalidEnvironment(v)) => {
                assert!(v.iter().any(|s| s.contains("escapes")));
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn point_mass_arm_always_returns_its_value() {
        let action_set = pairs_action_set(&[[0, 1]], 2);
        let env = EnvironmentInstance::new_bounded(
            vec![
                DiscreteDistribution::point_mass(0.7),
                DiscreteDistribution::point_mass(0.2),
            ],
            action_set,
        )
        .unwrap();
        let mut streams = RewardStreams::new(9, 0, 2);
        for _ in 0..50 {
            let rewards = env.sample_by_index(0, &mut streams);
            assert_eq!(rewards[0], (0, 0.7));
            assert_eq!(rewards[1], (1, 0.2));
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let action_set = pairs_action_set(&[[0, 1]], 2);
        let env = EnvironmentInstance::new_gaussian(
            vec![
                GaussianParams::new(1.0, 0.5).unwrap(),
                GaussianParams::new(-1.0, 0.5).unwrap(),
            ],
            0.25,
            1.0,
            action_set,
        )
        .unwrap();
        let draw = |seed| {
            let mut streams = RewardStreams::new(seed, 0, 2);
            (0..20)
                .flat_map(|_| env.sample_by_index(0, &mut streams))
                .map(|(_, r)| r.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
        assert_ne!(draw(11), draw(12));
    }

    #[test]
    fn bernoulli_sampling_matches_rate() {
        let action_set = ActionSet::new(vec![SuperArm::new([0]).unwrap()], 1).unwrap();
        let env = EnvironmentInstance::new_bounded(
            vec![DiscreteDistribution::bernoulli(0.4).unwrap()],
            action_set,
        )
        .unwrap();
        let mut streams = RewardStreams::new(123, 0, 1);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += env.sample_by_index(0, &mut streams)[0].1;
        }
        let se = (0.4f64 * 0.6 / n as f64).sqrt();
        assert!(
            (sum / n as f64 - 0.4).abs() < 3.0 * se,
            "mean {} too far from 0.4",
            sum / n as f64
        );
    }

    #[test]
    fn true_cvar_gaussian_and_bounded() {
        let action_set = pairs_action_set(&[[0, 1]], 2);
        let env = EnvironmentInstance::new_gaussian(
            vec![
                GaussianParams::new(1.0, 1.0).unwrap(),
                GaussianParams::new(1.0, 1.0).unwrap(),
            ],
            0.5,
            2.0,
            action_set.clone(),
        )
        .unwrap();
        let sa = SuperArm::new([0, 1]).unwrap();
        let got = env.true_cvar(&sa, risk(0.5)).unwrap();
        let expected = gaussian_cvar(
            &GaussianParams::new(2.0, 2.0f64.sqrt()).unwrap(),
            risk(0.5),
        );
        assert!((got - expected).abs() < 1e-12);

        let env = EnvironmentInstance::new_bounded(
            vec![
                DiscreteDistribution::point_mass(0.3),
                DiscreteDistribution::point_mass(0.4),
            ],
            action_set.clone(),
        )
        .unwrap();
        for a in [0.1, 0.5, 0.9] {
            assert!((env.true_cvar(&sa, risk(a)).unwrap() - 0.7).abs() < 1e-12);
        }

        let env = EnvironmentInstance::new_bounded(
            vec![
                DiscreteDistribution::bernoulli(0.5).unwrap(),
                DiscreteDistribution::bernoulli(0.5).unwrap(),
            ],
            action_set,
        )
        .unwrap();
        assert!((env.true_cvar(&sa, risk(0.25)).unwrap() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn true_cvar_is_order_invariant_for_gaussians() {
        let sas = vec![SuperArm::new([0, 1, 2]).unwrap()];
        let action_set = ActionSet::new(sas, 3).unwrap();
        let env = EnvironmentInstance::new_gaussian(
            vec![
                GaussianParams::new(0.3, 0.6).unwrap(),
                GaussianParams::new(-0.2, 0.9).unwrap(),
                GaussianParams::new(1.1, 0.7).unwrap(),
            ],
            0.25,
            1.5,
            action_set,
        )
        .unwrap();
        let a = SuperArm::new([0, 1, 2]).unwrap();
        let b = SuperArm::new([2, 0, 1]).unwrap();
        let alpha = risk(0.3);
        assert_eq!(
            env.true_cvar(&a, alpha).unwrap(),
            env.true_cvar(&b, alpha).unwrap()
        );
    }

    #[test]
    fn rejects_membership_violations() {
        let action_set = pairs_action_set(&[[0, 1]], 2);
        let env = EnvironmentInstance::new_bounded(
            vec![
                DiscreteDistribution::bernoulli(0.5).unwrap(),
                DiscreteDistribution::bernoulli(0.5).unwrap(),
            ],
            action_set,
        )
        .unwrap();
        let foreign = SuperArm::new([0]).unwrap();
        assert!(matches!(
            env.true_cvar(&foreign, risk(0.5)),
            Err(Error::SuperArmNotInActionSet)
        ));
        let mut streams = RewardStreams::new(0, 0, 2);
        assert!(matches!(
            env.sample_super_arm(&foreign, &mut streams),
            Err(Error::SuperArmNotInActionSet)
        ));
    }

    #[test]
    fn gap_table_identifies_optima_and_extremes() {
        let table = GapTable::from_cvars(vec![1.0, 0.8, 0.5]);
        assert_eq!(table.optimal_indices(), &[0]);
        assert_eq!(table.gaps(), &[0.0, 0.19999999999999996, 0.5]);
        assert!((table.delta_min().unwrap() - 0.2).abs() < 1e-12);
        assert!((table.delta_max() - 0.5).abs() < 1e-12);

        let degenerate = GapTable::from_cvars(vec![0.4, 0.4, 0.4]);
        assert_eq!(degenerate.optimal_indices(), &[0, 1, 2]);
        assert_eq!(degenerate.delta_min(), None);
        assert_eq!(degenerate.delta_max(), 0.0);
    }
}
