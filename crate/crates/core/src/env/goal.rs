use rand::seq::index;
use rand::Rng;

use super::kb::KnowledgeBase;
use super::schema::DomainSchema;

/// What the simulated user wants: constraints to state and facts to ask for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserGoal {
    /// `(informable slot, value)` pairs sorted by slot.
    pub constraints: Vec<(usize, usize)>,
    /// Requestable slot indices, sorted.
    pub requests: Vec<usize>,
}

impl UserGoal {
    /// Constraints are copied from a uniformly chosen KB entry, so at least
    /// that entry satisfies the goal.
    pub fn sample<R: Rng + ?Sized>(schema: &DomainSchema, kb: &KnowledgeBase, rng: &mut R) -> Self {
        assert!(!kb.is_empty(), "goal sampling needs a non-empty knowledge base");
        let entry = &kb.entries()[rng.random_range(0..kb.len())];
        let (cmin, cmax) = schema.goal_constraint_range;
        let n_constraints = rng.random_range(cmin..=cmax);
        let mut slots = index::sample(rng, schema.num_informable(), n_constraints).into_vec();
        slots.sort_unstable();
        let constraints = slots.into_iter().map(|s| (s, entry.informable[s])).collect();

        let (rmin, rmax) = schema.goal_request_range;
        let n_requests = rng.random_range(rmin..=rmax);
        let mut requests = index::sample(rng, schema.num_requestable(), n_requests).into_vec();
        requests.sort_unstable();
        UserGoal {
            constraints,
            requests,
        }
    }

    pub fn constraint_value(&self, slot: usize) -> Option<usize> {
        self.constraints
            .iter()
            .find(|&&(s, _)| s == slot)
            .map(|&(_, v)| v)
    }

    pub fn satisfied_by(&self, kb: &KnowledgeBase, entry: usize) -> bool {
        let e = &kb.entries()[entry];
        self.constraints.iter().all(|&(s, v)| e.informable[s] == v)
    }
}
