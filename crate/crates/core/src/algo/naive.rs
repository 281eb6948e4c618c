//! Baseline that treats every super arm as an independent arm.
//!
//! Ignores arm sharing entirely: each super arm keeps its own multiset of
//! observed total rewards, gets the same dominant-CDF treatment as a single
//! bounded arm (upper bound L, the largest possible total), and is ranked
//! by the CVaR of that dominant distribution. Exists to quantify what the
//! structured algorithms gain.

use std::collections::BTreeMap;

use ordered_float::NotNan;

use crate::algo::{check_rewards, Algorithm, SelectionDecision};
use crate::algo::sdcb::dkw_radius;
use crate::dist::{cvar_discrete, dominant_shift, DiscreteDistribution, RiskLevel};
use crate::env::ActionSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NaiveBaseline {
    alpha: RiskLevel,
    /// Upper bound on a total reward: L rewards in [0, 1].
    upper_bound: f64,
    totals: Vec<BTreeMap<NotNan<f64>, u64>>,
    counts: Vec<u64>,
    t: u64,
}

impl NaiveBaseline {
    pub fn new(alpha: RiskLevel, num_super_arms: usize, upper_bound: f64) -> Self {
        Self {
            alpha,
            upper_bound,
            totals: vec![BTreeMap::new(); num_super_arms],
            counts: vec![0; num_super_arms],
            t: 1,
        }
    }

    pub fn plays(&self, super_arm: usize) -> u64 {
        self.counts[super_arm]
    }

    fn index_of(&self, super_arm: usize) -> Result<f64> {
        let n = self.counts[super_arm];
        if n == 0 {
            return Err(Error::UnplayedSuperArm { index: super_arm });
        }
        let empirical = DiscreteDistribution::new(
            self.totals[super_arm]
                .iter()
                .map(|(v, &c)| (v.into_inner(), c as f64 / n as f64)),
        )?;
        let c = dkw_radius((self.t as f64).ln().max(0.0), n);
        let dominant = dominant_shift(&empirical, c, self.upper_bound)?;
        Ok(cvar_discrete(&dominant, self.alpha))
    }
}

impl Algorithm for NaiveBaseline {
    fn name(&self) -> &'static str {
        "naive"
    }

    /// Every super arm once, in action-set order.
    fn init_plan(&self, actions: &ActionSet) -> Result<Vec<usize>> {
        Ok((0..actions.len()).collect())
    }

    fn select(&self, actions: &ActionSet) -> Result<SelectionDecision> {
        let indices: Vec<f64> = (0..actions.len())
            .map(|i| self.index_of(i))
            .collect::<Result<_>>()?;
        Ok(SelectionDecision::from_indices(indices))
    }

    fn update(
        &mut self,
        actions: &ActionSet,
        chosen: usize,
        rewards: &[(usize, f64)],
    ) -> Result<()> {
        check_rewards(actions, chosen, rewards)?;
        let total: f64 = rewards.iter().map(|&(_, x)| x).sum();
        let key = NotNan::new(total).map_err(|_| Error::InvalidParameter {
            what: "reward total",
            value: total,
        })?;
        *self.totals[chosen].entry(key).or_insert(0) += 1;
        self.counts[chosen] += 1;
        self.t += 1;
        Ok(())
    }
}
