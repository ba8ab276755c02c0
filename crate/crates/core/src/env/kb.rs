use rand::Rng;

use super::schema::DomainSchema;
use crate::seeding;

/// One database record: a value index for every informable and requestable slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbEntry {
    pub informable: Vec<usize>,
    pub requestable: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    entries: Vec<KbEntry>,
}

impl KnowledgeBase {
    /// Values drawn uniformly from each slot's vocabulary; deterministic in
    /// `(schema, kb_seed)`.
    pub fn build(schema: &DomainSchema, kb_seed: u64) -> Self {
        let mut rng = seeding::stream(kb_seed, 0x6b62);
        let entries = (0..schema.kb_size)
            .map(|_| KbEntry {
                informable: schema
                    .informable
                    .iter()
                    .map(|s| rng.random_range(0..s.values.len()))
                    .collect(),
                requestable: schema
                    .requestable
                    .iter()
                    .map(|s| rng.random_range(0..s.values.len()))
                    .collect(),
            })
            .collect();
        KnowledgeBase { entries }
    }

    pub fn entries(&self) -> &[KbEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indices of entries agreeing with every `(slot, value)` pair.
    pub fn matching<'a>(
        &'a self,
        constraints: &'a [(usize, usize)],
    ) -> impl Iterator<Item = usize> + 'a {
        self.entries.iter().enumerate().filter_map(move |(i, e)| {
            constraints
                .iter()
                .all(|&(slot, value)| e.informable[slot] == value)
                .then_some(i)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_sized_and_in_vocabulary() {
        let schema = DomainSchema::builtin("movie").unwrap();
        let a = KnowledgeBase::build(&schema, 4);
        assert_eq!(a, KnowledgeBase::build(&schema, 4));
        assert_ne!(a, KnowledgeBase::build(&schema, 5));
        assert_eq!(a.len(), 100);
        for e in a.entries() {
            for (slot, &v) in schema.informable.iter().zip(&e.informable) {
                assert!(v < slot.values.len());
            }
            for (slot, &v) in schema.requestable.iter().zip(&e.requestable) {
                assert!(v < slot.values.len());
            }
        }
    }

    #[test]
    fn every_vocabulary_value_eventually_appears() {
        let schema = DomainSchema::builtin("taxi").unwrap();
        let kb = KnowledgeBase::build(&schema, 0);
        for (s, slot) in schema.informable.iter().enumerate() {
            for v in 0..slot.values.len() {
                assert!(kb.entries().iter().any(|e| e.informable[s] == v));
            }
        }
    }
}
