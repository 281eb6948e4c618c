//! CVaR-UCB for Gaussian arms.
//!
//! Per arm, an upper confidence bound on the mean and a lower confidence
//! bound on the variance (clamped at the known floor N²) combine into an
//! optimistic super-arm CVaR index
//!
//! ```text
//! Σ_{i∈a} μ̃_i − √(Σ_{i∈a} s̃²_i)/α · φ(Φ⁻¹(α)).
//! ```

use crate::algo::{check_rewards, Algorithm, SelectionDecision};
use crate::dist::RiskLevel;
use crate::env::ActionSet;
use crate::error::{Error, Result};
use crate::gaussian::cvar_shortfall_factor;

/// Which round number feeds the logarithm in the exploration radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogTime {
    /// log(t−1): radii computed from the previous round (default).
    PreviousRound,
    /// log(t): the convention the bounded-arm algorithms use.
    CurrentRound,
}

#[derive(Debug, Clone)]
pub struct CucbConfig {
    pub alpha: RiskLevel,
    /// M with σ_i < M for all arms.
    pub std_dev_upper: f64,
    /// N with σ_i > N for all arms.
    pub std_dev_lower: f64,
    /// L, the largest super-arm size.
    pub max_super_arm_size: usize,
    pub log_time: LogTime,
    pub num_arms: usize,
}

/// Mean UCB: μ̂ + 2M√((L+1)·log_term / m).
pub fn mean_ucb(sample_mean: f64, m_upper: f64, l: usize, log_term: f64, count: u64) -> f64 {
    sample_mean + 2.0 * m_upper * ((l as f64 + 1.0) * log_term / count as f64).sqrt()
}

/// Width removed from the sample variance before clamping:
/// M²√(2(L+1)·log_term/(m−1) + 4(L+1)²·log_term²/(m−1)²).
pub fn variance_penalty(m_upper: f64, l: usize, log_term: f64, count: u64) -> f64 {
    let df = (count - 1) as f64;
    let lp1 = l as f64 + 1.0;
    m_upper
        * m_upper
        * (2.0 * lp1 * log_term / df + 4.0 * lp1 * lp1 * log_term * log_term / (df * df)).sqrt()
}

/// Variance LCB: max(ŝ² − penalty, N²).
pub fn variance_lcb(
    sample_variance: f64,
    m_upper: f64,
    n_lower: f64,
    l: usize,
    log_term: f64,
    count: u64,
) -> f64 {
    (sample_variance - variance_penalty(m_upper, l, log_term, count)).max(n_lower * n_lower)
}

/// Running per-arm statistics and the round counter.
#[derive(Debug, Clone)]
pub struct GaussianCucb {
    cfg: CucbConfig,
    /// φ(Φ⁻¹(α)), fixed per risk level.
    shortfall: f64,
    counts: Vec<u64>,
    means: Vec<f64>,
    /// Sums of squared deviations (Welford), so sample variance is
    /// `ssq / (m − 1)`.
    ssq: Vec<f64>,
    t: u64,
}

impl GaussianCucb {
    pub fn new(cfg: CucbConfig) -> Self {
        let shortfall = cvar_shortfall_factor(cfg.alpha);
        let k = cfg.num_arms;
        Self {
            cfg,
            shortfall,
            counts: vec![0; k],
            means: vec![0.0; k],
            ssq: vec![0.0; k],
            t: 1,
        }
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    pub fn sample_mean(&self, arm: usize) -> Result<f64> {
        if self.counts[arm] == 0 {
            return Err(Error::UnpulledArm { arm });
        }
        Ok(self.means[arm])
    }

    /// Sample variance with the n−1 denominator.
    pub fn sample_variance(&self, arm: usize) -> Result<f64> {
        if self.counts[arm] < 2 {
            return Err(Error::VarianceUndefined { arm });
        }
        Ok(self.ssq[arm] / (self.counts[arm] - 1) as f64)
    }

    /// log(t−1) or log(t) per configuration, clamped at zero so the first
    /// rounds stay well-defined.
    fn log_term(&self) -> f64 {
        let arg = match self.cfg.log_time {
            LogTime::PreviousRound => self.t.saturating_sub(1) as f64,
            LogTime::CurrentRound => self.t as f64,
        };
        arg.ln().max(0.0)
    }

    /// Mean UCB of one arm at the current round.
    pub fn arm_mean_ucb(&self, arm: usize) -> Result<f64> {
        if self.counts[arm] == 0 {
            return Err(Error::UnpulledArm { arm });
        }
        Ok(mean_ucb(
            self.means[arm],
            self.cfg.std_dev_upper,
            self.cfg.max_super_arm_size,
            self.log_term(),
            self.counts[arm],
        ))
    }

    /// Variance LCB of one arm at the current round.
    pub fn arm_variance_lcb(&self, arm: usize) -> Result<f64> {
        let s2 = self.sample_variance(arm)?;
        Ok(variance_lcb(
            s2,
            self.cfg.std_dev_upper,
            self.cfg.std_dev_lower,
            self.cfg.max_super_arm_size,
            self.log_term(),
            self.counts[arm],
        ))
    }

    /// Optimistic CVaR index of every super arm.
    pub fn index_values(&self, actions: &ActionSet) -> Result<Vec<f64>> {
        let mut mean_ucbs = Vec::with_capacity(self.cfg.num_arms);
        let mut var_lcbs = Vec::with_capacity(self.cfg.num_arms);
        for arm in 0..self.cfg.num_arms {
            mean_ucbs.push(self.arm_mean_ucb(arm)?);
            var_lcbs.push(self.arm_variance_lcb(arm)?);
        }
        let a = self.cfg.alpha.alpha();
        Ok(actions
            .super_arms()
            .iter()
            .map(|sa| {
                let mean: f64 = sa.arm_ids().iter().map(|&i| mean_ucbs[i]).sum();
                let var: f64 = sa.arm_ids().iter().map(|&i| var_lcbs[i]).sum();
                mean - var.sqrt() / a * self.shortfall
            })
            .collect())
    }
}

impl Algorithm for GaussianCucb {
    fn name(&self) -> &'static str {
        "cucb-g"
    }

    fn init_plan(&self, actions: &ActionSet) -> Result<Vec<usize>> {
        crate::algo::plan_init_phase(actions, 2)
    }

    fn select(&self, actions: &ActionSet) -> Result<SelectionDecision> {
        Ok(SelectionDecision::from_indices(
            self.index_values(actions)?,
        ))
    }

    fn update(
        &mut self,
        actions: &ActionSet,
        chosen: usize,
        rewards: &[(usize, f64)],
    ) -> Result<()> {
        check_rewards(actions, chosen, rewards)?;
        for &(arm, x) in rewards {
            self.counts[arm] += 1;
            let n = self.counts[arm] as f64;
            let delta = x - self.means[arm];
            self.means[arm] += delta / n;
            self.ssq[arm] += delta * (x - self.means[arm]);
        }
        self.t += 1;
        Ok(())
    }
}
