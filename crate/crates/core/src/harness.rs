//! Full-episode simulation, regret accounting and multi-seed experiments.
//!
//! An episode plays the algorithm's init plan and then regular selections
//! until `horizon` rounds have elapsed; every round, including the init
//! phase, contributes its true gap to the cumulative regret. Runs are
//! independent units keyed by (master seed, run id), so a multi-worker
//! experiment produces traces identical to a sequential one.

use rayon::prelude::*;

use crate::algo::AlgorithmSpec;
use crate::config::ExperimentConfig;
use crate::dist::RiskLevel;
use crate::env::{EnvironmentInstance, GapTable};
use crate::error::{Error, Result};
use crate::rng::RewardStreams;

/// One recorded round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: u64,
    pub chosen: usize,
    pub instant_gap: f64,
    pub cum_regret: f64,
}

/// Full account of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub run_id: u64,
    pub algorithm: String,
    pub master_seed: u64,
    pub horizon: u64,
    /// Every `thinning`-th round; cumulative regret is exact at each
    /// recorded point.
    pub records: Vec<TraceRecord>,
    pub final_cum_regret: f64,
    /// Cumulative regret after round ⌊horizon/2⌋.
    pub cum_regret_at_half: f64,
    pub suboptimal_first_half: u64,
    pub suboptimal_second_half: u64,
    /// Optimal selections among the last ⌊horizon/10⌋ rounds.
    pub final_decile_optimal: u64,
    pub final_decile_len: u64,
}

impl RegretTrace {
    pub fn final_decile_optimal_rate(&self) -> f64 {
        if self.final_decile_len == 0 {
            return 1.0;
        }
        self.final_decile_optimal as f64 / self.final_decile_len as f64
    }
}

/// Everything one episode needs besides the environment.
#[derive(Debug, Clone)]
pub struct EpisodeSpec {
    pub algorithm: AlgorithmSpec,
    pub horizon: u64,
    pub alpha: RiskLevel,
    pub master_seed: u64,
    pub run_id: u64,
    pub thinning: u64,
}

/// Play one full episode.
pub fn run_episode(env: &EnvironmentInstance, episode: &EpisodeSpec) -> Result<RegretTrace> {
    let gap_table = env.gap_table(episode.alpha)?;
    run_episode_with_gaps(env, episode, &gap_table)
}

/// As [`run_episode`] with a precomputed gap table (the table depends only
/// on the environment and α, so experiments share one).
pub fn run_episode_with_gaps(
    env: &EnvironmentInstance,
    episode: &EpisodeSpec,
    gap_table: &GapTable,
) -> Result<RegretTrace> {
    let actions = env.action_set();
    let mut algo = episode
        .algorithm
        .build(env, episode.alpha, episode.horizon)?;
    let plan = algo.init_plan(actions)?;
    let horizon = episode.horizon;
    if (plan.len() as u64) > horizon {
        return Err(Error::HorizonTooShort {
            horizon,
            init_len: plan.len() as u64,
        });
    }
    let thinning = episode.thinning.max(1);
    let mut streams = RewardStreams::new(episode.master_seed, episode.run_id, env.num_arms());

    let half = horizon / 2;
    let decile_len = horizon / 10;
    let decile_start = horizon - decile_len; // optimal counted for t > this

    let mut records = Vec::with_capacity((horizon / thinning) as usize);
    let mut cum_regret = 0.0;
    let mut cum_at_half = 0.0;
    let mut subopt_first = 0;
    let mut subopt_second = 0;
    let mut decile_optimal = 0;

    for t in 1..=horizon {
        let chosen = if (t as usize) <= plan.len() {
            plan[(t - 1) as usize]
        } else {
            algo.select(actions)?.chosen
        };
        let rewards = env.sample_by_index(chosen, &mut streams);
        algo.update(actions, chosen, &rewards)?;

        let gap = gap_table.gap(chosen);
        cum_regret += gap;
        let optimal = gap_table.is_optimal(chosen);
        if t <= half {
            if !optimal {
                subopt_first += 1;
            }
            if t == half {
                cum_at_half = cum_regret;
            }
        } else if !optimal {
            subopt_second += 1;
        }
        if t > decile_start && optimal {
            decile_optimal += 1;
        }
        if t % thinning == 0 {
            records.push(TraceRecord {
                t,
                chosen,
                instant_gap: gap,
                cum_regret,
            });
        }
    }

    Ok(RegretTrace {
        run_id: episode.run_id,
        algorithm: algo.name().to_string(),
        master_seed: episode.master_seed,
        horizon,
        records,
        final_cum_regret: cum_regret,
        cum_regret_at_half: cum_at_half,
        suboptimal_first_half: subopt_first,
        suboptimal_second_half: subopt_second,
        final_decile_optimal: decile_optimal,
        final_decile_len: decile_len,
    })
}

/// Mean/standard-deviation regret curve across runs of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub times: Vec<u64>,
    pub mean: Vec<f64>,
    pub std_dev: Vec<f64>,
}

/// Per-algorithm aggregation over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub algorithm: String,
    pub curve: AggregateCurve,
    pub final_decile_optimal_rate: f64,
    pub mean_final_regret: f64,
    pub per_seed_final_regret: Vec<f64>,
}

/// Traces plus aggregates for a whole experiment grid.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub gap_table: GapTable,
    pub traces: Vec<RegretTrace>,
    pub aggregates: Vec<AggregateResult>,
}

/// Run the (algorithms × seeds) grid described by `config`, in parallel up
/// to `config.workers` threads. Scheduling cannot affect results: every
/// run's randomness is keyed by its (master seed, run id).
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let env = config.build_environment()?;
    let alpha = RiskLevel::new(config.alpha)?;
    let gap_table = env.gap_table(alpha)?;
    let specs = config.algorithm_specs()?;

    let episodes: Vec<EpisodeSpec> = specs
        .iter()
        .flat_map(|spec| {
            (0..config.seeds.count).map(|run_id| EpisodeSpec {
                algorithm: spec.clone(),
                horizon: config.horizon,
                alpha,
                master_seed: config.seeds.master_seed,
                run_id,
                thinning: config.thinning,
            })
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .expect("thread pool construction");
    let traces: Vec<RegretTrace> = pool.install(|| {
        episodes
            .par_iter()
            .map(|ep| {
                run_episode_with_gaps(&env, ep, &gap_table).map_err(|e| Error::RunFailed {
                    algorithm: ep.algorithm.name().to_string(),
                    run_id: ep.run_id,
                    source: Box::new(e),
                })
            })
            .collect::<Result<_>>()
    })?;

    let seeds = config.seeds.count as usize;
    let aggregates = specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let group = &traces[i * seeds..(i + 1) * seeds];
            aggregate(spec.name(), group)
        })
        .collect();

    Ok(ExperimentOutput {
        gap_table,
        traces,
        aggregates,
    })
}

/// Pointwise mean and sample standard deviation of the cumulative-regret
/// curves, plus the averaged final-decile optimal-selection rate.
pub fn aggregate(algorithm: &str, traces: &[RegretTrace]) -> AggregateResult {
    assert!(!traces.is_empty(), "aggregate needs at least one trace");
    let n = traces.len() as f64;
    let times: Vec<u64> = traces[0].records.iter().map(|r| r.t).collect();
    let points = times.len();
    let mut mean = vec![0.0; points];
    for trace in traces {
        debug_assert_eq!(trace.records.len(), points);
        for (m, r) in mean.iter_mut().zip(&trace.records) {
            *m += r.cum_regret;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut std_dev = vec![0.0; points];
    if traces.len() > 1 {
        for trace in traces {
            for (s, (m, r)) in std_dev.iter_mut().zip(mean.iter().zip(&trace.records)) {
                *s += (r.cum_regret - m).powi(2);
            }
        }
        for s in &mut std_dev {
            *s = (*s / (n - 1.0)).sqrt();
        }
    }
    let per_seed_final_regret: Vec<f64> = traces.iter().map(|t| t.final_cum_regret).collect();
    AggregateResult {
        algorithm: algorithm.to_string(),
        curve: AggregateCurve {
            times,
            mean,
            std_dev,
        },
        final_decile_optimal_rate: traces
            .iter()
            .map(RegretTrace::final_decile_optimal_rate)
            .sum::<f64>()
            / n,
        mean_final_regret: per_seed_final_regret.iter().sum::<f64>() / n,
        per_seed_final_regret,
    }
}

/// One round of the paired sdcb / d-sdcb comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedRound {
    pub t: u64,
    /// Smallest per-super-arm difference (discretized − plain) this round.
    pub min_diff: f64,
    /// Largest per-super-arm difference this round.
    pub max_diff: f64,
    pub decisions_differ: bool,
}

/// Result of driving both bounded-arm variants over one shared history.
#[derive(Debug, Clone)]
pub struct PairedComparison {
    pub epsilon: f64,
    /// The sandwich width ε(L+1)/α the differences must stay within.
    pub bound: f64,
    pub rounds: Vec<PairedRound>,
    pub disagreements: u64,
    pub compared_rounds: u64,
}

/// Feed one sample stream to a single sample bank and compute, each round,
/// both the plain and the discretized index vectors. The trajectory is
/// advanced with the plain algorithm's choice.
pub fn paired_index_comparison(
    env: &EnvironmentInstance,
    horizon: u64,
    alpha: RiskLevel,
    master_seed: u64,
    epsilon_override: Option<f64>,
) -> Result<PairedComparison> {
    use crate::algo::{Algorithm, Sdcb, SelectionDecision};

    if env.is_gaussian() {
        return Err(Error::EnvironmentKindMismatch {
            algorithm: "paired sdcb comparison",
            required: "bounded",
        });
    }
    let actions = env.action_set();
    let l = actions.max_size() as f64;
    let epsilon = epsilon_override
        .unwrap_or_else(|| AlgorithmSpec::default_epsilon(alpha, actions.max_size(), horizon));
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter {
            what: "epsilon",
            value: epsilon,
        });
    }
    let bound = epsilon * (l + 1.0) / alpha.alpha();

    let mut state = Sdcb::new_plain(alpha, env.num_arms());
    let plan = state.init_plan(actions)?;
    if (plan.len() as u64) > horizon {
        return Err(Error::HorizonTooShort {
            horizon,
            init_len: plan.len() as u64,
        });
    }
    let mut streams = RewardStreams::new(master_seed, 0, env.num_arms());
    let mut rounds = Vec::with_capacity((horizon as usize).saturating_sub(plan.len()));
    let mut disagreements = 0;

    for t in 1..=horizon {
        let chosen = if (t as usize) <= plan.len() {
            plan[(t - 1) as usize]
        } else {
            let plain = state.indices_plain(actions)?;
            let disc = state.indices_discretized(actions, epsilon)?;
            let mut min_diff = f64::INFINITY;
            let mut max_diff = f64::NEG_INFINITY;
            for (d, p) in disc.iter().zip(&plain) {
                let diff = d - p;
                min_diff = min_diff.min(diff);
                max_diff = max_diff.max(diff);
            }
            let plain_decision = SelectionDecision::from_indices(plain);
            let disc_decision = SelectionDecision::from_indices(disc);
            let differ = plain_decision.chosen != disc_decision.chosen;
            if differ {
                disagreements += 1;
            }
            rounds.push(PairedRound {
                t,
                min_diff,
                max_diff,
                decisions_differ: differ,
            });
            plain_decision.chosen
        };
        let rewards = env.sample_by_index(chosen, &mut streams);
        state.update(actions, chosen, &rewards)?;
    }

    let compared_rounds = rounds.len() as u64;
    Ok(PairedComparison {
        epsilon,
        bound,
        rounds,
        disagreements,
        compared_rounds,
    })
}
