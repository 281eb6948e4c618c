//! Stochastically dominant confidence bounds for bounded arms.
//!
//! Each arm keeps its full sample multiset. At selection time the empirical
//! CDF is shifted down by the DKW-style radius √(3 log t / 2Tᵢ) with the
//! removed mass piled on the upper bound 1, producing a dominant
//! distribution whose CVaR is optimistic. Super-arm indices are the CVaR of
//! the convolved dominant distributions; the discretized variant snaps each
//! per-arm distribution onto an ε-grid first so the convolution support
//! cannot explode.

use std::collections::BTreeMap;

use ordered_float::NotNan;

use crate::algo::{check_rewards, Algorithm, SelectionDecision};
use crate::dist::{
    convolve_with_cap, cvar_discrete, dominant_shift, DiscreteDistribution, RiskLevel,
    DEFAULT_SUPPORT_CAP,
};
use crate::env::ActionSet;
use crate::error::{Error, Result};
use crate::grid::GridDistribution;

/// Confidence radius √(3·log_term/(2·count)).
pub fn dkw_radius(log_term: f64, count: u64) -> f64 {
    (3.0 * log_term / (2.0 * count as f64)).sqrt()
}

/// Sample multisets and counts for every arm, plus the round counter.
#[derive(Debug, Clone)]
pub struct Sdcb {
    alpha: RiskLevel,
    /// None: plain variant. Some(ε): round every dominant CDF up to the
    /// ε-grid before convolving.
    epsilon: Option<f64>,
    samples: Vec<BTreeMap<NotNan<f64>, u64>>,
    counts: Vec<u64>,
    t: u64,
    support_cap: usize,
}

impl Sdcb {
    pub fn new_plain(alpha: RiskLevel, num_arms: usize) -> Self {
        Self {
            alpha,
            epsilon: None,
            samples: vec![BTreeMap::new(); num_arms],
            counts: vec![0; num_arms],
            t: 1,
            support_cap: DEFAULT_SUPPORT_CAP,
        }
    }

    pub fn new_discretized(alpha: RiskLevel, num_arms: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidParameter {
                what: "epsilon",
                value: epsilon,
            });
        }
        Ok(Self {
            epsilon: Some(epsilon),
            ..Self::new_plain(alpha, num_arms)
        })
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// Empirical distribution of the samples observed from `arm`.
    pub fn empirical(&self, arm: usize) -> Result<DiscreteDistribution> {
        let n = self.counts[arm];
        if n == 0 {
            return Err(Error::UnpulledArm { arm });
        }
        DiscreteDistribution::new(
            self.samples[arm]
                .iter()
                .map(|(v, &c)| (v.into_inner(), c as f64 / n as f64)),
        )
    }

    /// The dominant (optimistic) distribution for `arm` at the current
    /// round: empirical CDF minus the DKW radius, deficit at 1.
    pub fn dominant_cdf(&self, arm: usize) -> Result<DiscreteDistribution> {
        let empirical = self.empirical(arm)?;
        let c = dkw_radius((self.t as f64).ln().max(0.0), self.counts[arm]);
        dominant_shift(&empirical, c, 1.0)
    }

    fn dominant_cdfs(&self) -> Result<Vec<DiscreteDistribution>> {
        (0..self.samples.len()).map(|i| self.dominant_cdf(i)).collect()
    }

    /// Plain indices: CVaR of the convolution of the dominant per-arm
    /// distributions of each super arm.
    pub fn indices_plain(&self, actions: &ActionSet) -> Result<Vec<f64>> {
        let dominants = self.dominant_cdfs()?;
        actions
            .super_arms()
            .iter()
            .map(|sa| {
                let mut acc = dominants[sa.arm_ids()[0]].clone();
                for &arm in &sa.arm_ids()[1..] {
                    acc = convolve_with_cap(&acc, &dominants[arm], self.support_cap)?;
                }
                Ok(cvar_discrete(&acc, self.alpha))
            })
            .collect()
    }

    /// Discretized indices: per-arm dominant distributions are rounded up
    /// to the ε-grid and convolved on integer grid indices.
    pub fn indices_discretized(&self, actions: &ActionSet, epsilon: f64) -> Result<Vec<f64>> {
        let dominants = self.dominant_cdfs()?;
        let grids: Vec<GridDistribution> = dominants
            .iter()
            .map(|d| GridDistribution::round_up(d, epsilon))
            .collect::<Result<_>>()?;
        Ok(actions
            .super_arms()
            .iter()
            .map(|sa| {
                let mut acc = grids[sa.arm_ids()[0]].clone();
                for &arm in &sa.arm_ids()[1..] {
                    acc = acc.convolve(&grids[arm]);
                }
                cvar_discrete(&acc.to_distribution(), self.alpha)
            })
            .collect())
    }
}

impl Algorithm for Sdcb {
    fn name(&self) -> &'static str {
        match self.epsilon {
            None => "sdcb",
            Some(_) => "d-sdcb",
        }
    }

    fn init_plan(&self, actions: &ActionSet) -> Result<Vec<usize>> {
        crate::algo::plan_init_phase(actions, 1)
    }

    fn select(&self, actions: &ActionSet) -> Result<SelectionDecision> {
        let indices = match self.epsilon {
            None => self.indices_plain(actions)?,
            Some(eps) => self.indices_discretized(actions, eps)?,
        };
        Ok(SelectionDecision::from_indices(indices))
    }

    fn update(
        &mut self,
        actions: &ActionSet,
        chosen: usize,
        rewards: &[(usize, f64)],
    ) -> Result<()> {
        check_rewards(actions, chosen, rewards)?;
        for &(arm, x) in rewards {
            let key = NotNan::new(x).map_err(|_| Error::InvalidParameter {
                what: "reward",
                value: x,
            })?;
            *self.samples[arm].entry(key).or_insert(0) += 1;
            self.counts[arm] += 1;
        }
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::SuperArm;

    fn actions(sets: &[&[usize]], num_arms: usize) -> ActionSet {
        ActionSet::new(
            sets.iter()
                .map(|s| SuperArm::new(s.iter().copied()).unwrap())
                .collect(),
            num_arms,
        )
        .unwrap()
    }

    fn risk(a: f64) -> RiskLevel {
        RiskLevel::new(a).unwrap()
    }

    #[test]
    fn dkw_radius_hand_value() {
        // T=6, log term 1 → √(3/12) = 0.5.
        assert!((dkw_radius(1.0, 6) - 0.5).abs() < 1e-15);
        assert_eq!(dkw_radius(0.0, 10), 0.0);
    }

    #[test]
    fn dominant_cdf_at_round_one_is_empirical() {
        // t = 1 ⇒ log 1 = 0 ⇒ zero radius.
        let a = actions(&[&[0]], 1);
        let mut s = Sdcb::new_plain(risk(0.3), 1);
        s.update(&a, 0, &[(0, 0.4)]).unwrap();
        s.t = 1; // keep the round at 1 to exercise the log(1) edge
        let dom = s.dominant_cdf(0).unwrap();
        assert_eq!(dom, s.empirical(0).unwrap());
    }

    #[test]
    fn dominant_cdf_saturates_when_radius_exceeds_one() {
        let a = actions(&[&[0]], 1);
        let mut s = Sdcb::new_plain(risk(0.3), 1);
        s.update(&a, 0, &[(0, 0.4)]).unwrap();
        s.t = 10_000; // C = √(3·ln(1e4)/2) > 1 with a single sample
        let dom = s.dominant_cdf(0).unwrap();
        assert_eq!(dom, DiscreteDistribution::point_mass(1.0));
    }

    #[test]
    fn point_mass_empiricals_rank_by_sum() {
        // Zero radius at t=1, point-mass samples: the index of each super
        // arm is the plain sum of observed values.
        let a = actions(&[&[0, 1], &[1, 2], &[0, 2]], 3);
        let mut s = Sdcb::new_plain(risk(0.5), 3);
        s.update(&a, 0, &[(0, 0.1), (1, 0.9)]).unwrap();
        s.update(&a, 1, &[(1, 0.9), (2, 0.5)]).unwrap();
        s.t = 1;
        let d = s.select(&a).unwrap();
        assert!((d.index_values[0] - 1.0).abs() < 1e-12);
        assert!((d.index_values[1] - 1.4).abs() < 1e-12);
        assert!((d.index_values[2] - 0.6).abs() < 1e-12);
        assert_eq!(d.chosen, 1);
    }

    #[test]
    fn single_super_arm_always_chosen() {
        let a = actions(&[&[0, 1]], 2);
        let mut s = Sdcb::new_plain(risk(0.4), 2);
        s.update(&a, 0, &[(0, 0.3), (1, 0.8)]).unwrap();
        for _ in 0..5 {
            let d = s.select(&a).unwrap();
            assert_eq!(d.chosen, 0);
            s.update(&a, 0, &[(0, 0.3), (1, 0.8)]).unwrap();
        }
    }

    #[test]
    fn index_against_enumeration_oracle() {
        // Convolved dominant CVaR must equal the value obtained by
        // enumerating all sum outcomes of the dominant distributions.
        let a = actions(&[&[0, 1]], 2);
        let mut s = Sdcb::new_plain(risk(0.35), 2);
        let rewards = [
            [(0, 0.2), (1, 0.9)],
            [(0, 0.5), (1, 0.1)],
            [(0, 0.2), (1, 0.6)],
            [(0, 0.8), (1, 0.6)],
        ];
        for r in &rewards {
            s.update(&a, 0, r).unwrap();
        }
        let dom = [s.dominant_cdf(0).unwrap(), s.dominant_cdf(1).unwrap()];
        let oracle = crate::oracles::enumerate_super_arm_cvar(&dom, risk(0.35)).unwrap();
        let d = s.select(&a).unwrap();
        assert!(
            (d.index_values[0] - oracle).abs() < 1e-9,
            "{} vs oracle {}",
            d.index_values[0],
            oracle
        );
    }

    #[test]
    fn selection_is_pure() {
        let a = actions(&[&[0, 1], &[1, 2]], 3);
        let mut s = Sdcb::new_plain(risk(0.3), 3);
        s.update(&a, 0, &[(0, 0.2), (1, 0.7)]).unwrap();
        s.update(&a, 1, &[(1, 0.4), (2, 0.9)]).unwrap();
        let d1 = s.select(&a).unwrap();
        let d2 = s.select(&a).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn dominant_index_exceeds_unshifted_index() {
        let a = actions(&[&[0, 1]], 2);
        let mut s = Sdcb::new_plain(risk(0.3), 2);
        for r in [[(0, 0.3), (1, 0.9)], [(0, 0.6), (1, 0.2)]] {
            s.update(&a, 0, &r).unwrap();
        }
        let alpha = risk(0.3);
        let shifted = s.select(&a).unwrap().index_values[0];
        let raw = cvar_discrete(
            &crate::dist::convolve(&s.empirical(0).unwrap(), &s.empirical(1).unwrap()).unwrap(),
            alpha,
        );
        assert!(shifted >= raw - 1e-12);
    }

    #[test]
    fn discretized_indices_sandwich_plain_ones() {
        let a = actions(&[&[0, 1], &[1, 2], &[0, 2]], 3);
        let mut s = Sdcb::new_plain(risk(0.3), 3);
        let rewards = [
            (0, [(0, 0.23), (1, 0.71)]),
            (1, [(1, 0.44), (2, 0.95)]),
            (2, [(0, 0.17), (2, 0.33)]),
            (0, [(0, 0.64), (1, 0.58)]),
        ];
        for (pos, r) in &rewards {
            s.update(&a, *pos, r).unwrap();
        }
        let eps = 1e-3;
        let l = a.max_size() as f64;
        let plain = s.indices_plain(&a).unwrap();
        let disc = s.indices_discretized(&a, eps).unwrap();
        for (p, d) in plain.iter().zip(&disc) {
            assert!(*d >= *p, "{d} < {p}");
            assert!(*d <= *p + eps * (l + 1.0) / 0.3 + 1e-12);
        }
    }

    #[test]
    fn huge_epsilon_degenerates_to_grid_ceiling() {
        // ε > 1: every dominant distribution rounds up to the single grid
        // point ⌈1/ε⌉·ε = ε; all indices are equal and the tie break picks
        // position 0.
        let a = actions(&[&[0, 1], &[1, 2]], 3);
        let mut s = Sdcb::new_discretized(risk(0.5), 3, 1.5).unwrap();
        s.update(&a, 0, &[(0, 0.2), (1, 0.7)]).unwrap();
        s.update(&a, 1, &[(1, 0.4), (2, 0.9)]).unwrap();
        let d = s.select(&a).unwrap();
        assert!(d.tie);
        assert_eq!(d.chosen, 0);
        assert!((d.index_values[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unpulled_arm_is_an_error() {
        let a = actions(&[&[0], &[1]], 2);
        let mut s = Sdcb::new_plain(risk(0.5), 2);
        s.update(&a, 0, &[(0, 0.5)]).unwrap();
        assert!(matches!(s.select(&a), Err(Error::UnpulledArm { arm: 1 })));
    }
}
