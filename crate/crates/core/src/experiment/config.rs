//! Flat TOML experiment configuration. Every key is optional; omitted keys
//! take the defaults below.
//!
//! ```toml
//! schema = "movie"          # built-in name or path to a schema file
//! agent = "eierl"           # eierl | erl | ea | dqn
//! epsilon = 0.05            # exploration rate of the dqn variant
//! epochs = 500
//! seeds = [1, 2, 3, 4, 5]
//! warm_start_episodes = 120
//! test_episodes = 50
//! pop_evo = 3
//! pop_drl = 1
//! out = "runs"
//! ```
//!
//! The remaining keys mirror [`EvoConfig`], [`EvalConfig`] and [`DqnConfig`]
//! field by field, plus `buffer_capacity`, `hidden` (hidden layer widths) and
//! `kb_seed`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::dqn::DqnConfig;
use crate::eierl::{EvalConfig, OrchestratorConfig};
use crate::error::{Error, Result};
use crate::evolution::EvoConfig;
use crate::replay::DEFAULT_CAPACITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
pub enum AgentVariant {
    #[serde(rename = "eierl")]
    Eierl,
    /// Populations and evolution without elite injection.
    #[serde(rename = "erl")]
    Erl,
    /// Populations and evolution without gradient training.
    #[serde(rename = "ea")]
    EaOnly,
    /// A single epsilon-greedy DQN learner.
    #[serde(rename = "dqn")]
    Dqn,
}

impl AgentVariant {
    pub fn name(self) -> &'static str {
        match self {
            AgentVariant::Eierl => "eierl",
            AgentVariant::Erl => "erl",
            AgentVariant::EaOnly => "ea",
            AgentVariant::Dqn => "dqn",
        }
    }

    pub fn uses_populations(self) -> bool {
        self != AgentVariant::Dqn
    }
}

impl fmt::Display for AgentVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eierl" => Ok(AgentVariant::Eierl),
            "erl" => Ok(AgentVariant::Erl),
            "ea" => Ok(AgentVariant::EaOnly),
            "dqn" => Ok(AgentVariant::Dqn),
            other => Err(Error::Config(format!(
                "unknown agent '{other}' (expected eierl, erl, ea or dqn)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub agent: AgentVariant,
    pub epsilon: f64,
    pub epochs: usize,
    pub seeds: Vec<u64>,
    pub warm_start_episodes: usize,
    pub test_episodes: usize,
    pub kb_seed: u64,
    pub pop_evo: usize,
    pub pop_drl: usize,
    pub eval_episodes: usize,
    pub eval_epsilon_policy: f64,
    pub eval_epsilon_evo: f64,
    pub elite_fraction: f64,
    pub tournament_size: usize,
    pub mut_prob: f64,
    pub mut_frac: f64,
    pub supermut_prob: f64,
    pub reset_prob: f64,
    pub mut_strength: f64,
    pub gamma: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub grad_clip: f64,
    pub hidden: Vec<usize>,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let evo = EvoConfig::default();
        let eval = EvalConfig::default();
        let dqn = DqnConfig::default();
        ExperimentConfig {
            schema: "movie".into(),
            agent: AgentVariant::Eierl,
            epsilon: 0.05,
            epochs: 500,
            seeds: vec![1, 2, 3, 4, 5],
            warm_start_episodes: 120,
            test_episodes: 50,
            kb_seed: 0,
            pop_evo: 3,
            pop_drl: 1,
            eval_episodes: eval.episodes,
            eval_epsilon_policy: eval.epsilon_policy,
            eval_epsilon_evo: eval.epsilon_evo,
            elite_fraction: evo.elite_fraction,
            tournament_size: evo.tournament_size,
            mut_prob: evo.mut_prob,
            mut_frac: evo.mut_frac,
            supermut_prob: evo.supermut_prob,
            reset_prob: evo.reset_prob,
            mut_strength: evo.mut_strength,
            gamma: dqn.gamma,
            learning_rate: dqn.learning_rate,
            batch_size: dqn.batch_size,
            buffer_capacity: DEFAULT_CAPACITY,
            grad_clip: dqn.grad_clip,
            hidden: vec![80, 80],
            out: PathBuf::from("runs"),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("experiment config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn evo_config(&self) -> EvoConfig {
        EvoConfig {
            elite_fraction: self.elite_fraction,
            tournament_size: self.tournament_size,
            mut_prob: self.mut_prob,
            mut_frac: self.mut_frac,
            supermut_prob: self.supermut_prob,
            reset_prob: self.reset_prob,
            mut_strength: self.mut_strength,
        }
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            episodes: self.eval_episodes,
            epsilon_policy: self.eval_epsilon_policy,
            epsilon_evo: self.eval_epsilon_evo,
        }
    }

    pub fn dqn_config(&self) -> DqnConfig {
        DqnConfig {
            gamma: self.gamma,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            grad_clip: self.grad_clip,
        }
    }

    pub fn orchestrator_config(&self) -> OrchestratorConfig {
        OrchestratorConfig {
            evo: self.evo_config(),
            eval: self.eval_config(),
            injection: self.agent == AgentVariant::Eierl,
            train: self.agent != AgentVariant::EaOnly,
        }
    }

    /// Policy-population size actually used: an EA-only learner has no
    /// gradient learner to copy from.
    pub fn policy_population(&self) -> usize {
        match self.agent {
            AgentVariant::EaOnly | AgentVariant::Dqn => 0,
            _ => self.pop_drl,
        }
    }

    /// Directory receiving this variant's files.
    pub fn variant_dir(&self) -> PathBuf {
        self.out.join(self.agent.name())
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seed list is empty".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("seed list contains duplicates".into()));
        }
        if self.test_episodes == 0 {
            return Err(Error::Config("test_episodes must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.buffer_capacity == 0 {
            return Err(Error::Config("buffer_capacity must be positive".into()));
        }
        if self.hidden.contains(&0) {
            return Err(Error::Config("hidden layer widths must be positive".into()));
        }
        if self.agent.uses_populations() {
            if self.pop_evo == 0 {
                return Err(Error::Config("pop_evo must be at least 1".into()));
            }
            self.evo_config().validate()?;
            self.eval_config().validate()?;
        }
        self.dqn_config().validate()
    }
}
