use std::sync::Arc;

use rand::Rng;

use super::dialogue::{observation_dim, DialogueState, Observation, Outcome, SystemAction};
use super::goal::UserGoal;
use super::kb::KnowledgeBase;
use super::schema::DomainSchema;
use crate::nn::PolicyGenome;
use crate::replay::Transition;

/// A domain schema with its knowledge base; hands out fresh dialogues.
#[derive(Debug, Clone)]
pub struct Environment {
    schema: Arc<DomainSchema>,
    kb: Arc<KnowledgeBase>,
}

impl Environment {
    pub fn new(schema: DomainSchema, kb_seed: u64) -> Self {
        let kb = KnowledgeBase::build(&schema, kb_seed);
        Environment {
            schema: Arc::new(schema),
            kb: Arc::new(kb),
        }
    }

    pub fn schema(&self) -> &DomainSchema {
        &self.schema
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn obs_dim(&self) -> usize {
        observation_dim(&self.schema)
    }

    pub fn num_actions(&self) -> usize {
        self.schema.num_actions()
    }

    pub fn max_turns(&self) -> usize {
        self.schema.max_turns
    }

    pub fn sample_goal<R: Rng + ?Sized>(&self, rng: &mut R) -> UserGoal {
        UserGoal::sample(&self.schema, &self.kb, rng)
    }

    pub fn reset<R: Rng + ?Sized>(&self, goal: UserGoal, rng: &mut R) -> (DialogueState, Observation) {
        DialogueState::reset(self.schema.clone(), self.kb.clone(), goal, rng)
    }

    /// Sample a goal and open a dialogue for it.
    pub fn start<R: Rng + ?Sized>(&self, rng: &mut R) -> (DialogueState, Observation) {
        let goal = self.sample_goal(rng);
        self.reset(goal, rng)
    }
}

/// Anything that picks a system action index for the current turn.
pub trait ActionSelector {
    fn choose(&self, state: &DialogueState, obs: &[f64]) -> usize;
}

/// Greedy argmax over Q-values; the lowest index wins ties.
impl ActionSelector for PolicyGenome {
    fn choose(&self, _state: &DialogueState, obs: &[f64]) -> usize {
        argmax(&self.forward_unchecked(obs))
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// With probability `epsilon` a uniformly random action, otherwise `greedy()`.
pub fn epsilon_greedy<R: Rng + ?Sized>(
    greedy: impl FnOnce() -> usize,
    num_actions: usize,
    epsilon: f64,
    rng: &mut R,
) -> usize {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        rng.random_range(0..num_actions)
    } else {
        greedy()
    }
}

/// The hand-written policy used to pre-fill the replay buffer.
#[derive(Debug, Clone, Copy, Default)]
pub struct RulePolicy;

impl ActionSelector for RulePolicy {
    fn choose(&self, state: &DialogueState, _obs: &[f64]) -> usize {
        warm_start_policy(state).index(state.schema())
    }
}

/// Answer an open user request; once the user has asked for something and
/// nothing is open, offer the match and then close; otherwise ask for the
/// next slot the user has not spoken about.
pub fn warm_start_policy(state: &DialogueState) -> SystemAction {
    if let Some(r) = state.pending_request() {
        return SystemAction::Inform(r);
    }
    let asked = state.user_requested().iter().any(|&b| b);
    if !asked {
        if let Some(s) = state.user_informed().iter().position(|&b| !b) {
            return SystemAction::Request(s);
        }
    }
    if state.offered() {
        SystemAction::Close
    } else {
        SystemAction::OfferMatch
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub transitions: Vec<Transition>,
    pub total_return: f64,
    pub success: bool,
    pub turns: usize,
}

/// Roll out one dialogue with a fresh goal, acting epsilon-greedily around
/// `policy`.
pub fn run_episode<P, R>(env: &Environment, policy: &P, epsilon: f64, rng: &mut R) -> EpisodeResult
where
    P: ActionSelector + ?Sized,
    R: Rng + ?Sized,
{
    assert!((0.0..=1.0).contains(&epsilon), "epsilon must lie in [0, 1]");
    let (mut state, mut obs) = env.start(rng);
    let n = env.num_actions();
    let mut transitions = Vec::with_capacity(env.max_turns());
    let mut total_return = 0.0;
    loop {
        let action = epsilon_greedy(|| policy.choose(&state, &obs), n, epsilon, rng);
        let step = state
            .step(SystemAction::from_index(action, env.schema()).expect("selector returned a valid index"))
            .expect("dialogue is live inside the loop");
        total_return += step.reward;
        transitions.push(Transition {
            state: std::mem::replace(&mut obs, step.observation.clone()),
            action,
            reward: step.reward,
            next_state: step.observation,
            done: step.done,
        });
        if step.done {
            break;
        }
    }
    EpisodeResult {
        turns: transitions.len(),
        transitions,
        total_return,
        success: state.outcome() == Some(Outcome::Success),
    }
}
