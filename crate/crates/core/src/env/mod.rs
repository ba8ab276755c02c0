//! Synthetic slot-filling dialogue environment.

mod dialogue;
mod episode;
mod goal;
mod kb;
mod schema;

pub use dialogue::{
    observation_dim, DialogueState, FailureKind, Observation, Outcome, StepResult, SystemAction,
    UserActType,
};
pub use episode::{
    epsilon_greedy, run_episode, warm_start_policy, ActionSelector, Environment, EpisodeResult,
    RulePolicy,
};
pub(crate) use episode::argmax;
pub use goal::UserGoal;
pub use kb::{KbEntry, KnowledgeBase};
pub use schema::{DomainSchema, Slot, BUILTIN_SCHEMAS, DEFAULT_MAX_TURNS};
