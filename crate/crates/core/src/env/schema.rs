//! Declarative slot-filling domains.
//!
//! Schemas are TOML documents with the keys
//!
//! | key                     | meaning                                           |
//! |-------------------------|---------------------------------------------------|
//! | `name`                  | domain name                                       |
//! | `kb_size`               | number of knowledge-base entries                  |
//! | `max_turns`             | dialogue length limit `L` (default 30)            |
//! | `goal_constraint_range` | `[min, max]` constraints per user goal            |
//! | `goal_request_range`    | `[min, max]` requests per user goal               |
//! | `[[informable]]`        | `name` plus non-empty `values` vocabulary         |
//! | `[[requestable]]`       | `name` plus non-empty `values` vocabulary         |
//!
//! Informable slots are constraints the user states; requestable slots are
//! facts the user asks the system for. The two sets must be disjoint.

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_TURNS: usize = 30;

const MOVIE: &str = include_str!("../../schemas/movie.toml");
const RESTAURANT: &str = include_str!("../../schemas/restaurant.toml");
const TAXI: &str = include_str!("../../schemas/taxi.toml");

/// Names of the schemas compiled into the crate.
pub const BUILTIN_SCHEMAS: [&str; 3] = ["movie", "restaurant", "taxi"];

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slot {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSchema {
    pub name: String,
    pub kb_size: usize,
    #[serde(default = "default_max_turns")]
    pub max_turns: usize,
    pub goal_constraint_range: (usize, usize),
    pub goal_request_range: (usize, usize),
    pub informable: Vec<Slot>,
    pub requestable: Vec<Slot>,
}

fn default_max_turns() -> usize {
    DEFAULT_MAX_TURNS
}

impl DomainSchema {
    pub fn parse(text: &str) -> Result<Self> {
        let schema: DomainSchema =
            toml::from_str(text).map_err(|e| Error::Config(format!("schema: {e}")))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let schema: DomainSchema = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        let text = match name {
            "movie" => MOVIE,
            "restaurant" => RESTAURANT,
            "taxi" => TAXI,
            _ => return None,
        };
        Some(Self::parse(text).expect("shipped schemas are valid"))
    }

    /// A built-in schema name, or otherwise a path to a schema file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::builtin(name_or_path) {
            Some(schema) => Ok(schema),
            None => Self::load(name_or_path),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("schema '{}': {msg}", self.name)));
        if self.informable.is_empty() || self.requestable.is_empty() {
            return bad("needs at least one informable and one requestable slot".into());
        }
        let mut seen = HashSet::new();
        for slot in self.informable.iter().chain(&self.requestable) {
            if slot.values.is_empty() {
                return bad(format!("slot '{}' has an empty vocabulary", slot.name));
            }
            if !seen.insert(slot.name.as_str()) {
                return bad(format!("slot '{}' declared twice", slot.name));
            }
        }
        if self.kb_size == 0 {
            return bad("kb_size must be positive".into());
        }
        if self.max_turns == 0 {
            return bad("max_turns must be positive".into());
        }
        let (cmin, cmax) = self.goal_constraint_range;
        if cmin == 0 || cmin > cmax || cmax > self.informable.len() {
            return bad(format!(
                "goal_constraint_range [{cmin}, {cmax}] must lie within [1, {}]",
                self.informable.len()
            ));
        }
        let (rmin, rmax) = self.goal_request_range;
        if rmin == 0 || rmin > rmax || rmax > self.requestable.len() {
            return bad(format!(
                "goal_request_range [{rmin}, {rmax}] must lie within [1, {}]",
                self.requestable.len()
            ));
        }
        Ok(())
    }

    pub fn num_informable(&self) -> usize {
        self.informable.len()
    }

    pub fn num_requestable(&self) -> usize {
        self.requestable.len()
    }

    /// greet, one request per informable slot, one inform per requestable
    /// slot, offer_match, close.
    pub fn num_actions(&self) -> usize {
        2 + self.num_informable() + self.num_requestable() + 1
    }

    /// Requestable slot indices sorted by slot name.
    pub fn requestable_by_name(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.requestable.len()).collect();
        order.sort_by(|&a, &b| self.requestable[a].name.cmp(&self.requestable[b].name));
        order
    }
}
