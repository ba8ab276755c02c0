//! Evolutionary reinforcement learning with elite individual injection for
//! task-oriented dialogue policies.
//!
//! The crate is organised bottom-up:
//!
//! * [`nn`]: a fixed-architecture ReLU Q-network stored as a flat genome, so
//!   gradient descent and evolution operate on the same parameter vector.
//! * [`env`]: a schema-driven slot-filling dialogue environment with an
//!   agenda-based user simulator.
//! * [`replay`]: bounded FIFO experience storage with 1/M subsampling.
//! * [`dqn`]: the gradient learner: TD targets, minibatch training, target
//!   synchronisation, and epsilon-greedy action selection.
//! * [`evolution`]: elitism, tournament selection, row crossover and the
//!   three-branch mutation operator.
//! * [`eierl`]: the population loop with the elite discriminator deciding
//!   between injection and evolution every epoch.
//! * [`experiment`]: configuration, seeded multi-run execution, test-phase
//!   evaluation, Welch's t-test and CSV/SVG output.

pub mod dqn;
pub mod eierl;
pub mod env;
mod error;
pub mod evolution;
pub mod experiment;
pub mod nn;
pub mod replay;
pub mod seeding;

pub use dqn::{select_action, td_targets, DqnAgent, DqnConfig};
pub use eierl::{
    evaluate, evolution_fitness_slice, load_policy_population, EliteDiscriminator, EpochReport,
    EvalConfig, Orchestrator, OrchestratorConfig, Populations,
};
pub use env::{
    DialogueState, DomainSchema, Environment, EpisodeResult, KnowledgeBase, Observation,
    SystemAction, UserGoal,
};
pub use error::{Error, Result};
pub use evolution::EvoConfig;
pub use experiment::{AgentVariant, EpochMetrics, ExperimentConfig};
pub use nn::{GradientVector, NetworkShape, PolicyGenome};
pub use replay::{ReplayBuffer, Transition};
