//! Agenda-based user simulator and dialogue state tracking.
//!
//! The user's agenda is its goal constraints in a shuffled order followed by
//! its requests in slot-name order. Rules, applied to every system action:
//!
//! * `request(s)`: the user states its value for `s`, or says it does not
//!   care when `s` is not one of its constraints.
//! * `inform(r)`: the system reads `r` from the first KB entry consistent
//!   with the constraints revealed so far. If that entry violates any goal
//!   constraint the user has been given wrong information and the dialogue
//!   fails; otherwise the user acknowledges.
//! * `offer_match`: accepted when the offered entry satisfies the goal;
//!   otherwise the user rejects it and states its next unrevealed constraint.
//! * `close`: succeeds only after every goal request was informed and a
//!   match was accepted; anything else is a failure.
//! * `greet`: acknowledged.
//!
//! When the user was only acknowledging, it volunteers its next unrevealed
//! constraint instead.
//!
//! Once every constraint is revealed, the user keeps asking for the
//! first (by name) request that has not been answered yet. Reaching `L`
//! turns without closing is a failure.
//!
//! Rewards are `-1` per system turn, plus `2L` on success or `-L` on failure
//! at the final turn.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::goal::UserGoal;
use super::kb::KnowledgeBase;
use super::schema::DomainSchema;
use crate::error::{Error, Result};

pub type Observation = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemAction {
    Greet,
    /// Ask the user for an informable slot.
    Request(usize),
    /// Tell the user a requestable slot's value.
    Inform(usize),
    OfferMatch,
    Close,
}

impl SystemAction {
    pub fn index(self, schema: &DomainSchema) -> usize {
        let ni = schema.num_informable();
        let nr = schema.num_requestable();
        match self {
            SystemAction::Greet => 0,
            SystemAction::Request(s) => 1 + s,
            SystemAction::Inform(r) => 1 + ni + r,
            SystemAction::OfferMatch => 1 + ni + nr,
            SystemAction::Close => 2 + ni + nr,
        }
    }

    pub fn from_index(index: usize, schema: &DomainSchema) -> Result<Self> {
        let ni = schema.num_informable();
        let nr = schema.num_requestable();
        Ok(match index {
            0 => SystemAction::Greet,
            i if i <= ni => SystemAction::Request(i - 1),
            i if i <= ni + nr => SystemAction::Inform(i - 1 - ni),
            i if i == ni + nr + 1 => SystemAction::OfferMatch,
            i if i == ni + nr + 2 => SystemAction::Close,
            i => {
                return Err(Error::invalid(format!(
                    "action index {i} out of range for {} actions",
                    schema.num_actions()
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UserActType {
    Inform,
    Request,
    DontCare,
    Affirm,
    Deny,
    Ack,
}

impl UserActType {
    pub const COUNT: usize = 6;

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Timeout,
    WrongInform,
    PrematureClose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failure(FailureKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub user_act: UserActType,
    pub outcome: Option<Outcome>,
}

/// Number of KB-match buckets: 0, 1, 2-5, more than 5.
const MATCH_BUCKETS: usize = 4;

/// Length of the observation vector for `schema`.
pub fn observation_dim(schema: &DomainSchema) -> usize {
    let ni = schema.num_informable();
    let nr = schema.num_requestable();
    UserActType::COUNT + ni + nr + schema.num_actions() + nr + MATCH_BUCKETS + 1
}

/// Live state of one dialogue.
#[derive(Debug, Clone)]
pub struct DialogueState {
    schema: Arc<DomainSchema>,
    kb: Arc<KnowledgeBase>,
    goal: UserGoal,
    /// Goal constraint slots in the order the user will volunteer them.
    agenda: Vec<usize>,
    /// Informable slots the user has spoken about (value or don't-care).
    user_informed: Vec<bool>,
    user_requested: Vec<bool>,
    system_informed: Vec<bool>,
    request_order: Vec<usize>,
    offered: bool,
    last_user_act: UserActType,
    last_system_action: Option<SystemAction>,
    turn: usize,
    outcome: Option<Outcome>,
}

impl DialogueState {
    pub fn reset<R: Rng + ?Sized>(
        schema: Arc<DomainSchema>,
        kb: Arc<KnowledgeBase>,
        goal: UserGoal,
        rng: &mut R,
    ) -> (Self, Observation) {
        let mut agenda: Vec<usize> = goal.constraints.iter().map(|&(s, _)| s).collect();
        agenda.shuffle(rng);
        let ni = schema.num_informable();
        let nr = schema.num_requestable();
        let request_order = schema.requestable_by_name();
        let mut state = DialogueState {
            schema,
            kb,
            goal,
            agenda,
            user_informed: vec![false; ni],
            user_requested: vec![false; nr],
            system_informed: vec![false; nr],
            request_order,
            offered: false,
            last_user_act: UserActType::Inform,
            last_system_action: None,
            turn: 0,
            outcome: None,
        };
        let opening = state.agenda[0];
        state.user_informed[opening] = true;
        state.advance_requests();
        let obs = state.observation();
        (state, obs)
    }

    pub fn schema(&self) -> &DomainSchema {
        &self.schema
    }

    pub fn goal(&self) -> &UserGoal {
        &self.goal
    }

    pub fn turn(&self) -> usize {
        self.turn
    }

    pub fn is_done(&self) -> bool {
        self.outcome.is_some()
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn offered(&self) -> bool {
        self.offered
    }

    pub fn user_informed(&self) -> &[bool] {
        &self.user_informed
    }

    pub fn user_requested(&self) -> &[bool] {
        &self.user_requested
    }

    pub fn system_informed(&self) -> &[bool] {
        &self.system_informed
    }

    /// First request (by name) the user asked for that is still unanswered.
    pub fn pending_request(&self) -> Option<usize> {
        self.request_order
            .iter()
            .copied()
            .find(|&r| self.user_requested[r] && !self.system_informed[r])
    }

    fn revealed_constraints(&self) -> Vec<(usize, usize)> {
        self.goal
            .constraints
            .iter()
            .copied()
            .filter(|&(s, _)| self.user_informed[s])
            .collect()
    }

    fn all_constraints_revealed(&self) -> bool {
        self.goal.constraints.iter().all(|&(s, _)| self.user_informed[s])
    }

    /// First KB entry consistent with what the user has said so far.
    pub fn current_match(&self) -> Option<usize> {
        let revealed = self.revealed_constraints();
        let first = self.kb.matching(&revealed).next();
        first
    }

    pub fn match_count(&self) -> usize {
        let revealed = self.revealed_constraints();
        let count = self.kb.matching(&revealed).count();
        count
    }

    fn unanswered_goal_request(&self) -> Option<usize> {
        self.request_order
            .iter()
            .copied()
            .find(|&r| self.goal.requests.contains(&r) && !self.system_informed[r])
    }

    fn next_agenda_slot(&self) -> Option<usize> {
        self.agenda.iter().copied().find(|&s| !self.user_informed[s])
    }

    /// Once constraints are exhausted the user asks for its next open request.
    /// Returns true when a request was (re-)issued.
    fn advance_requests(&mut self) -> bool {
        if !self.all_constraints_revealed() {
            return false;
        }
        match self.unanswered_goal_request() {
            Some(r) => {
                self.user_requested[r] = true;
                true
            }
            None => false,
        }
    }

    pub fn step(&mut self, action: SystemAction) -> Result<StepResult> {
        if self.is_done() {
            return Err(Error::invalid("step called on a finished dialogue"));
        }
        match action {
            SystemAction::Request(s) if s >= self.schema.num_informable() => {
                return Err(Error::invalid(format!("no informable slot {s}")))
            }
            SystemAction::Inform(r) if r >= self.schema.num_requestable() => {
                return Err(Error::invalid(format!("no requestable slot {r}")))
            }
            _ => {}
        }

        self.turn += 1;
        self.last_system_action = Some(action);
        let mut user_act = UserActType::Ack;
        let mut outcome = None;

        match action {
            SystemAction::Greet => {}
            SystemAction::Request(s) => {
                self.user_informed[s] = true;
                user_act = if self.goal.constraint_value(s).is_some() {
                    UserActType::Inform
                } else {
                    UserActType::DontCare
                };
            }
            SystemAction::Inform(r) => match self.current_match() {
                Some(entry) if self.goal.satisfied_by(&self.kb, entry) => {
                    self.system_informed[r] = true;
                }
                _ => outcome = Some(Outcome::Failure(FailureKind::WrongInform)),
            },
            SystemAction::OfferMatch => match self.current_match() {
                Some(entry) if self.goal.satisfied_by(&self.kb, entry) => {
                    self.offered = true;
                    user_act = UserActType::Affirm;
                }
                _ => {
                    user_act = UserActType::Deny;
                    if let Some(s) = self.next_agenda_slot() {
                        self.user_informed[s] = true;
                    }
                }
            },
            SystemAction::Close => {
                let answered = self.goal.requests.iter().all(|&r| self.system_informed[r]);
                outcome = Some(if answered && self.offered {
                    Outcome::Success
                } else {
                    Outcome::Failure(FailureKind::PrematureClose)
                });
            }
        }

        if outcome.is_none() && user_act == UserActType::Ack {
            // Nothing was asked of the user: it volunteers its next constraint.
            if let Some(s) = self.next_agenda_slot() {
                self.user_informed[s] = true;
                user_act = UserActType::Inform;
            }
        }
        if outcome.is_none() {
            if self.advance_requests() && user_act == UserActType::Ack {
                user_act = UserActType::Request;
            }
            if self.turn >= self.schema.max_turns {
                outcome = Some(Outcome::Failure(FailureKind::Timeout));
            }
        }

        self.last_user_act = user_act;
        self.outcome = outcome;
        let l = self.schema.max_turns as f64;
        let reward = -1.0
            + match outcome {
                Some(Outcome::Success) => 2.0 * l,
                Some(Outcome::Failure(_)) => -l,
                None => 0.0,
            };
        Ok(StepResult {
            observation: self.observation(),
            reward,
            done: outcome.is_some(),
            user_act,
            outcome,
        })
    }

    /// Feature vector, every entry in `[0, 1]`:
    /// last user act one-hot, user-informed bag, user-requested bag, last
    /// system action one-hot, system-informed bag, KB-match bucket one-hot,
    /// and `turn / L`.
    pub fn observation(&self) -> Observation {
        let schema = &self.schema;
        let mut obs = Vec::with_capacity(observation_dim(schema));
        let one_hot = |n: usize, hot: Option<usize>, obs: &mut Vec<f64>| {
            obs.extend((0..n).map(|i| if Some(i) == hot { 1.0 } else { 0.0 }));
        };
        one_hot(UserActType::COUNT, Some(self.last_user_act.index()), &mut obs);
        let bag = |flags: &[bool], obs: &mut Vec<f64>| {
            obs.extend(flags.iter().map(|&f| if f { 1.0 } else { 0.0 }));
        };
        bag(&self.user_informed, &mut obs);
        bag(&self.user_requested, &mut obs);
        one_hot(
            schema.num_actions(),
            self.last_system_action.map(|a| a.index(schema)),
            &mut obs,
        );
        bag(&self.system_informed, &mut obs);
        let bucket = match self.match_count() {
            0 => 0,
            1 => 1,
            2..=5 => 2,
            _ => 3,
        };
        one_hot(MATCH_BUCKETS, Some(bucket), &mut obs);
        obs.push(self.turn as f64 / schema.max_turns as f64);
        obs
    }
}
