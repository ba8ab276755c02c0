use std::path::PathBuf;

use rand::Rng;

use super::config::{AgentVariant, ExperimentConfig};
use super::metrics::{mean_over_seeds, EpochMetrics};
use super::output::{emit_csv, emit_svg};
use crate::dqn::DqnAgent;
use crate::eierl::{Orchestrator, Populations};
use crate::env::{run_episode, DomainSchema, Environment, EpisodeResult, RulePolicy};
use crate::error::Result;
use crate::nn::{NetworkShape, PolicyGenome};
use crate::replay::ReplayBuffer;
use crate::seeding::{fork, stream};

const INIT_STREAM: u64 = 1;
const WARM_STREAM: u64 = 2;
const TRAIN_STREAM: u64 = 3;
const TEST_STREAM: u64 = 4;

/// Pre-fill `buffer` with rule-policy dialogues, storing every transition.
/// Returns the number of transitions stored.
pub fn warm_start<R: Rng + ?Sized>(
    buffer: &mut ReplayBuffer,
    env: &Environment,
    episodes: usize,
    rng: &mut R,
) -> usize {
    let mut stored = 0;
    for _ in 0..episodes {
        let ep = run_episode(env, &RulePolicy, 0.0, rng);
        stored += ep.transitions.len();
        buffer.extend(ep.transitions);
    }
    stored
}

/// Greedy evaluation of `genome` over `episodes` dialogues. Nothing is stored.
pub fn test_phase<R: Rng + ?Sized>(
    genome: &PolicyGenome,
    env: &Environment,
    episodes: usize,
    epoch: usize,
    rng: &mut R,
) -> EpochMetrics {
    let results: Vec<EpisodeResult> = (0..episodes)
        .map(|_| run_episode(env, genome, 0.0, rng))
        .collect();
    EpochMetrics::from_episodes(epoch, &results)
}

/// Instrumentation collected alongside the learning curve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub warm_start_transitions: usize,
    pub injections: usize,
    pub evolutions: usize,
    /// Discriminator threshold after each epoch; empty for the DQN variant.
    pub thresholds: Vec<f64>,
    /// Training-phase success rate per epoch.
    pub train_success: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub metrics: Vec<EpochMetrics>,
    pub trace: RunTrace,
}

enum Learner {
    Population(Orchestrator),
    Single { dqn: DqnAgent, buffer: ReplayBuffer },
}

/// One complete run: warm start, then `epochs` rounds of training followed
/// by a greedy test phase.
pub fn run_seed(config: &ExperimentConfig, env: &Environment, seed: u64) -> Result<SeedRun> {
    config.validate()?;
    let shape = NetworkShape::new(env.obs_dim(), config.hidden.clone(), env.num_actions())?;
    let mut init_rng = stream(seed, INIT_STREAM);
    let theta_q = PolicyGenome::random(shape, &mut init_rng);

    let mut buffer = ReplayBuffer::new(config.buffer_capacity)?;
    let mut trace = RunTrace {
        warm_start_transitions: warm_start(
            &mut buffer,
            env,
            config.warm_start_episodes,
            &mut stream(seed, WARM_STREAM),
        ),
        ..RunTrace::default()
    };
    let dqn = DqnAgent::new(theta_q.clone(), config.dqn_config())?;
    let mut learner = if config.agent.uses_populations() {
        let pops = Populations::new(&theta_q, config.policy_population(), config.pop_evo, &mut init_rng);
        Learner::Population(Orchestrator::new(dqn, pops, buffer, config.orchestrator_config())?)
    } else {
        Learner::Single { dqn, buffer }
    };

    let mut train_rng = stream(seed, TRAIN_STREAM);
    let mut test_rng = stream(seed, TEST_STREAM);
    let mut metrics = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        // Each epoch's test dialogues come from their own fork so that every
        // variant is scored on the same goals.
        let mut epoch_test_rng = fork(&mut test_rng);
        let row = match &mut learner {
            Learner::Population(orch) => {
                let report = orch.run_epoch(env, &mut train_rng)?;
                trace.injections += report.injected as usize;
                trace.evolutions += report.evolved as usize;
                trace.thresholds.push(report.threshold);
                trace.train_success.push(report.successes as f64 / report.rollouts as f64);
                let genome = if config.agent == AgentVariant::EaOnly {
                    &report.best
                } else {
                    &orch.dqn.online
                };
                test_phase(genome, env, config.test_episodes, epoch, &mut epoch_test_rng)
            }
            Learner::Single { dqn, buffer } => {
                let ep = run_episode(env, &dqn.online, config.epsilon, &mut train_rng);
                trace.train_success.push(ep.success as u8 as f64);
                buffer.extend(ep.transitions);
                dqn.train_epoch(buffer, &mut train_rng)?;
                test_phase(&dqn.online, env, config.test_episodes, epoch, &mut epoch_test_rng)
            }
        };
        metrics.push(row);
    }
    Ok(SeedRun { seed, metrics, trace })
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub dir: PathBuf,
    /// Sorted by seed.
    pub runs: Vec<SeedRun>,
    pub mean: Vec<EpochMetrics>,
}

/// Run every seed and write `<seed>.csv`, `mean.csv` and `curve.svg` under
/// `<out>/<agent>/`. `on_seed` sees each run as it finishes.
pub fn run_experiment(
    config: &ExperimentConfig,
    mut on_seed: impl FnMut(&SeedRun),
) -> Result<ExperimentOutput> {
    config.validate()?;
    let schema = DomainSchema::resolve(&config.schema)?;
    let env = Environment::new(schema, config.kb_seed);
    let dir = config.variant_dir();

    let mut runs = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        let run = run_seed(config, &env, seed)?;
        emit_csv(&dir.join(format!("{seed}.csv")), &run.metrics)?;
        on_seed(&run);
        runs.push(run);
    }
    runs.sort_by_key(|r| r.seed);
    let curves: Vec<&[EpochMetrics]> = runs.iter().map(|r| r.metrics.as_slice()).collect();
    let mean = mean_over_seeds(&curves);
    emit_csv(&dir.join("mean.csv"), &mean)?;
    let label = match config.agent {
        AgentVariant::Dqn => format!("dqn (epsilon {})", config.epsilon),
        other => other.name().to_string(),
    };
    emit_svg(&dir.join("curve.svg"), &[(&label, &mean)])?;
    Ok(ExperimentOutput { dir, runs, mean })
}
