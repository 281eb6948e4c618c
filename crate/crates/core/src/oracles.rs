//! Independent brute-force reference computations.
//!
//! These are deliberately slow and structurally different from the fast
//! paths they check: the Monte Carlo CVaR never touches
//! [`cvar_discrete`](crate::dist::cvar_discrete), the nested-loop
//! convolution does not pre-sort, and the super-arm enumerator walks the
//! full outcome product space instead of convolving pairwise. They are
//! compiled into the library (not test-only) so the CLI `verify` subcommand
//! can run them in the field.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{Atom, DiscreteDistribution, RiskLevel, MERGE_TOLERANCE};
use crate::error::{Error, Result};

/// Largest outcome product space [`enumerate_super_arm_cvar`] will walk.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// A Monte Carlo estimate with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub sample_count: usize,
}

/// Estimate CVaR_α of a black-box sampler: sort the draws and average the
/// worst ⌈αn⌉ of them, giving the boundary order statistic only the
/// fractional weight needed to fill the α quantile exactly.
///
/// The standard error comes from batch means over 10 equal batches, so `n`
/// is truncated to a multiple of 10.
pub fn monte_carlo_cvar(
    mut sampler: impl FnMut(&mut ChaCha8Rng) -> f64,
    alpha: RiskLevel,
    n: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    if n < 1000 {
        return Err(Error::InvalidParameter {
            what: "monte carlo sample count (min 1000)",
            value: n as f64,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const BATCHES: usize = 10;
    let batch_len = n / BATCHES;
    let used = batch_len * BATCHES;

    let mut batch_values = Vec::with_capacity(BATCHES);
    let mut all: Vec<f64> = Vec::with_capacity(used);
    for _ in 0..BATCHES {
        let batch: Vec<f64> = (0..batch_len).map(|_| sampler(&mut rng)).collect();
        batch_values.push(sorted_tail_mean(batch.clone(), alpha));
        all.extend(batch);
    }
    let value = sorted_tail_mean(all, alpha);

    let mean_of_batches: f64 = batch_values.iter().sum::<f64>() / BATCHES as f64;
    let var: f64 = batch_values
        .iter()
        .map(|v| (v - mean_of_batches).powi(2))
        .sum::<f64>()
        / (BATCHES - 1) as f64;
    let standard_error = (var / BATCHES as f64).sqrt();

    Ok(OracleEstimate {
        value,
        standard_error,
        sample_count: used,
    })
}

/// Fractional-tail average of raw samples.
fn sorted_tail_mean(mut samples: Vec<f64>, alpha: RiskLevel) -> f64 {
    samples.sort_by(f64::total_cmp);
    let a = alpha.alpha();
    let n = samples.len() as f64;
    let k = (a * n).ceil() as usize;
    let k = k.clamp(1, samples.len());
    let full: f64 = samples[..k - 1].iter().sum();
    let boundary_weight = a * n - (k - 1) as f64;
    (full + boundary_weight * samples[k - 1]) / (a * n)
}

/// CVaR of an exact discrete distribution via the quantile integral
/// (1/α)∫₀^α VaR_p dp: walk atoms in order, spending each one's mass until
/// the α budget is exhausted, with a fractional share for the boundary atom.
pub fn fractional_tail_cvar(dist: &DiscreteDistribution, alpha: RiskLevel) -> f64 {
    let a = alpha.alpha();
    let mut remaining = a;
    let mut acc = 0.0;
    for atom in dist.atoms() {
        let take = atom.mass.min(remaining);
        acc += take * atom.value;
        remaining -= take;
        if remaining <= 0.0 {
            break;
        }
    }
    if remaining > 0.0 {
        // Mass sum can fall short of 1 by the construction tolerance.
        acc += remaining * dist.max_value();
    }
    acc / a
}

/// Nested-loop convolution oracle: accumulate each pairwise sum into the
/// output by linear search, no sorting shortcuts until the very end.
pub fn brute_force_convolve(
    d1: &DiscreteDistribution,
    d2: &DiscreteDistribution,
) -> DiscreteDistribution {
    let mut acc: Vec<(f64, f64)> = Vec::new();
    for a1 in d1.atoms() {
        for a2 in d2.atoms() {
            let v = a1.value + a2.value;
            let m = a1.mass * a2.mass;
            match acc
                .iter_mut()
                .find(|(existing, _)| (*existing - v).abs() <= MERGE_TOLERANCE)
            {
                Some((_, mass)) => *mass += m,
                None => acc.push((v, m)),
            }
        }
    }
    acc.sort_by(|a, b| a.0.total_cmp(&b.0));
    DiscreteDistribution::from_merged(
        acc.into_iter()
            .map(|(value, mass)| Atom { value, mass })
            .collect(),
    )
}

/// Exact super-arm CVaR by enumerating the full outcome product space:
/// every combination of per-arm atoms contributes one (sum, mass product)
/// outcome; outcomes are sorted and the discrete CVaR definition applied
/// directly, with no pairwise convolution anywhere.
pub fn enumerate_super_arm_cvar(
    arm_laws: &[DiscreteDistribution],
    alpha: RiskLevel,
) -> Result<f64> {
    if arm_laws.is_empty() {
        return Err(Error::Empty {
            what: "arm law list",
        });
    }
    let size: u128 = arm_laws
        .iter()
        .map(|d| d.support_size() as u128)
        .product();
    if size > ENUMERATION_CAP {
        return Err(Error::ProductTooLarge {
            size,
            cap: ENUMERATION_CAP,
        });
    }

    let mut outcomes: Vec<(f64, f64)> = Vec::with_capacity(size as usize);
    let mut counters = vec![0usize; arm_laws.len()];
    loop {
        let mut sum = 0.0;
        let mut mass = 1.0;
        for (law, &c) in arm_laws.iter().zip(&counters) {
            let atom = law.atoms()[c];
            sum += atom.value;
            mass *= atom.mass;
        }
        outcomes.push((sum, mass));

        // Odometer increment over the product space.
        let mut pos = 0;
        loop {
            if pos == counters.len() {
                break;
            }
            counters[pos] += 1;
            if counters[pos] < arm_laws[pos].support_size() {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
        if pos == counters.len() {
            break;
        }
    }

    outcomes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let a = alpha.alpha();
    let mut cum = 0.0;
    let mut acc = 0.0;
    let mut i = 0;
    while i < outcomes.len() {
        let (v, m) = outcomes[i];
        cum += m;
        acc += v * m;
        if cum >= a {
            // Include every remaining outcome tied at the VaR value.
            let mut j = i + 1;
            while j < outcomes.len() && outcomes[j].0 == v {
                cum += outcomes[j].1;
                acc += outcomes[j].0 * outcomes[j].1;
                j += 1;
            }
            return Ok((acc - (cum - a) * v) / a);
        }
        i += 1;
    }
    let last = outcomes.last().expect("outcomes nonempty").0;
    Ok((acc - (cum - a) * last) / a)
}
