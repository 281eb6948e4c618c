//! Self-verification suites: fast paths against independent oracles.
//!
//! Each check runs a batch of randomized instances, compares a primary
//! computation with its brute-force counterpart from [`crate::oracles`],
//! and reports the measured worst-case margin. The CLI `verify` subcommand
//! drives these; the acceptance tests run them at full scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::Normal;

use crate::dist::{
    convolve, convolve_many, cvar_discrete, DiscreteDistribution, RiskLevel,
};
use crate::gaussian::{gaussian_cvar, GaussianParams};
use crate::grid::GridDistribution;
use crate::oracles::{
    brute_force_convolve, enumerate_super_arm_cvar, fractional_tail_cvar, monte_carlo_cvar,
};

/// How much work the suite does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyScale {
    /// Laptop-friendly sample counts; finishes in seconds.
    Quick,
    /// Full acceptance-scale instance counts, including the 10⁶-sample
    /// Monte Carlo cross-check.
    Full,
}

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Measured margins, in a human-readable line.
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

/// Run every check at the given scale.
pub fn run_all(scale: VerifyScale, seed: u64) -> Vec<CheckOutcome> {
    let (mc_samples, cvar_instances, conv_pairs, conv_triples, sandwich_instances, roundup) =
        match scale {
            VerifyScale::Quick => (100_000, 50, 50, 25, 25, 20),
            VerifyScale::Full => (1_000_000, 200, 200, 100, 100, 50),
        };
    vec![
        gaussian_closed_form_check(mc_samples, seed ^ 0x01),
        discrete_cvar_check(cvar_discrete, cvar_instances, seed ^ 0x02),
        convolution_check(conv_pairs, conv_triples, seed ^ 0x03),
        sandwich_check(sandwich_instances, seed ^ 0x04),
        roundup_shift_check(roundup, seed ^ 0x05),
    ]
}

/// A random distribution with up to `max_atoms` distinct values in
/// [lo, hi] and uniform-normalized masses.
pub fn random_distribution(
    rng: &mut ChaCha8Rng,
    max_atoms: usize,
    lo: f64,
    hi: f64,
) -> DiscreteDistribution {
    let n = rng.gen_range(1..=max_atoms);
    let mut weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    DiscreteDistribution::new(values.into_iter().zip(weights))
        .expect("random atoms form a valid distribution")
}

/// Closed-form Gaussian CVaR against the frozen constant −2/√(2π) and a
/// Monte Carlo tail-mean estimate.
pub fn gaussian_closed_form_check(mc_samples: usize, seed: u64) -> CheckOutcome {
    const EXPECTED: f64 = -0.7978845608;
    let alpha = RiskLevel::new(0.5).expect("0.5 is a valid risk level");
    let params = GaussianParams::new(0.0, 1.0).expect("unit normal");
    let closed = gaussian_cvar(&params, alpha);
    let const_err = (closed - EXPECTED).abs();

    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let est = monte_carlo_cvar(|rng| rng.sample(normal), alpha, mc_samples, seed)
        .expect("sample count is above the minimum");
    let mc_err = (closed - est.value).abs();
    let mc_budget = 3.0 * est.standard_error;

    let passed = const_err <= 1e-6 && mc_err <= mc_budget;
    CheckOutcome::new(
        "gaussian-closed-form",
        passed,
        format!(
            "constant error {const_err:.2e} (tol 1e-6); monte carlo gap {mc_err:.2e} \
             vs 3·SE {mc_budget:.2e} at n={}",
            est.sample_count
        ),
    )
}

/// Discrete CVaR vs the fractional-tail oracle on random instances. The
/// function under test is a parameter so the suite's own sensitivity can
/// be demonstrated.
pub fn discrete_cvar_check(
    candidate: impl Fn(&DiscreteDistribution, RiskLevel) -> f64,
    instances: usize,
    seed: u64,
) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas = [0.05, 0.25, 0.5, 0.9];
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let d = random_distribution(&mut rng, 30, 0.0, 1.0);
        for a in alphas {
            let alpha = RiskLevel::new(a).expect("fixed alpha grid");
            let got = candidate(&d, alpha);
            let oracle = fractional_tail_cvar(&d, alpha);
            worst = worst.max((got - oracle).abs());
        }
    }
    CheckOutcome::new(
        "discrete-cvar-oracle",
        worst <= 1e-9,
        format!("worst |primary − oracle| = {worst:.2e} over {instances} instances (tol 1e-9)"),
    )
}

/// Convolution against the nested-loop oracle, and the n-ary route against
/// full outcome enumeration.
pub fn convolution_check(pairs: usize, triples: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_value: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    let mut shape_mismatch = false;
    for _ in 0..pairs {
        let d1 = random_distribution(&mut rng, 12, 0.0, 1.0);
        let d2 = random_distribution(&mut rng, 12, 0.0, 1.0);
        let fast = convolve(&d1, &d2).expect("small supports cannot explode");
        let slow = brute_force_convolve(&d1, &d2);
        if fast.support_size() != slow.support_size() {
            shape_mismatch = true;
            continue;
        }
        for (a, b) in fast.atoms().iter().zip(slow.atoms()) {
            worst_value = worst_value.max((a.value - b.value).abs());
            worst_mass = worst_mass.max((a.mass - b.mass).abs());
        }
    }
    let mut worst_cvar: f64 = 0.0;
    for _ in 0..triples {
        let laws: Vec<DiscreteDistribution> = (0..3)
            .map(|_| random_distribution(&mut rng, 8, 0.0, 1.0))
            .collect();
        let alpha = RiskLevel::new(rng.gen_range(0.05..0.95)).expect("alpha inside (0,1)");
        let enumerated =
            enumerate_super_arm_cvar(&laws, alpha).expect("8³ outcomes is under the cap");
        let convolved = cvar_discrete(
            &convolve_many(&laws).expect("small supports cannot explode"),
            alpha,
        );
        worst_cvar = worst_cvar.max((enumerated - convolved).abs());
    }
    let passed =
        !shape_mismatch && worst_value <= 1e-12 && worst_mass <= 1e-12 && worst_cvar <= 1e-9;
    CheckOutcome::new(
        "convolution-oracle",
        passed,
        format!(
            "atom value dev {worst_value:.2e}, mass dev {worst_mass:.2e} (tol 1e-12, {pairs} pairs); \
             enumeration cvar dev {worst_cvar:.2e} (tol 1e-9, {triples} triples)"
        ),
    )
}

/// Discretization sandwich on convolved sums:
/// 0 ≤ CVaR(⊕F′ᵢ) − CVaR(⊕F̃ᵢ) ≤ ε(L+1)/α.
pub fn sandwich_check(instances: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas = [0.1, 0.3, 0.7];
    let epsilons = [1e-2, 1e-3];
    let mut worst_low: f64 = 0.0; // how far below 0 the difference dipped
    let mut worst_frac: f64 = 0.0; // largest difference / bound ratio
    for i in 0..instances {
        let l = 2 + (i % 3);
        let arms: Vec<DiscreteDistribution> = (0..l)
            .map(|_| random_distribution(&mut rng, 10, 0.0, 1.0))
            .collect();
        let plain = convolve_many(&arms).expect("small supports cannot explode");
        for &eps in &epsilons {
            let grids: Vec<GridDistribution> = arms
                .iter()
                .map(|d| GridDistribution::round_up(d, eps).expect("eps is positive"))
                .collect();
            let mut acc = grids[0].clone();
            for g in &grids[1..] {
                acc = acc.convolve(g);
            }
            let snapped = acc.to_distribution();
            for a in alphas {
                let alpha = RiskLevel::new(a).expect("fixed alpha grid");
                let diff = cvar_discrete(&snapped, alpha) - cvar_discrete(&plain, alpha);
                let bound = eps * (l as f64 + 1.0) / a;
                worst_low = worst_low.max(-diff);
                worst_frac = worst_frac.max(diff / bound);
            }
        }
    }
    let passed = worst_low <= 0.0 && worst_frac <= 1.0;
    CheckOutcome::new(
        "discretization-sandwich",
        passed,
        format!(
            "lower-side violation {worst_low:.2e} (must be ≤ 0); worst diff/bound ratio \
             {worst_frac:.4} (must be ≤ 1) over {instances} instances"
        ),
    )
}

/// Round-up sum bound by exhaustive combination enumeration: every
/// discretized sum point lands within (l+1)ε to the right of its source.
pub fn roundup_shift_check(instances: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_frac: f64 = 0.0; // shift / ((l+1)·ε), must stay < 1
    let mut negative_shift: f64 = 0.0;
    for i in 0..instances {
        let l = 2 + (i % 3); // 2..=4 distributions
        let eps = [1e-2, 1e-3][i % 2];
        let arms: Vec<DiscreteDistribution> = (0..l)
            .map(|_| random_distribution(&mut rng, 4, 0.0, 1.0))
            .collect();
        // Walk every combination of source atoms and its rounded image
        // (per-atom round-up; grid merging only combines masses and never
        // changes the values being compared).
        let mut counters = vec![0usize; l];
        loop {
            let mut source = 0.0;
            let mut rounded = 0.0;
            for (j, &c) in counters.iter().enumerate() {
                let v = arms[j].atoms()[c].value;
                source += v;
                rounded += crate::grid::round_up_value(v, eps);
            }
            let shift = rounded - source;
            negative_shift = negative_shift.max(-shift);
            worst_frac = worst_frac.max(shift / ((l as f64 + 1.0) * eps));

            let mut pos = 0;
            loop {
                if pos == l {
                    break;
                }
                counters[pos] += 1;
                if counters[pos] < arms[pos].support_size() {
                    break;
                }
                counters[pos] = 0;
                pos += 1;
            }
            if pos == l {
                break;
            }
        }
    }
    let passed = negative_shift <= 0.0 && worst_frac < 1.0;
    CheckOutcome::new(
        "roundup-shift-bound",
        passed,
        format!(
            "worst shift/((l+1)ε) = {worst_frac:.4} (must be < 1); negative shift \
             {negative_shift:.2e} (must be ≤ 0) over {instances} instances"
        ),
    )
}

/// Convenience: all checks passed?
pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}
