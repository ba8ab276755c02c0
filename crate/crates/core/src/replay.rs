//! Bounded FIFO experience replay.

use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;

use crate::env::Observation;
use crate::error::{Error, Result};

pub const DEFAULT_CAPACITY: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Observation,
    pub action: usize,
    pub reward: f64,
    pub next_state: Observation,
    pub done: bool,
}

#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    storage: VecDeque<Transition>,
    inserted: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::invalid("replay capacity must be positive"));
        }
        Ok(ReplayBuffer {
            capacity,
            storage: VecDeque::with_capacity(capacity),
            inserted: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    /// Total transitions ever stored, including evicted ones.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn evicted(&self) -> usize {
        self.inserted - self.storage.len()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &Transition> {
        self.storage.iter()
    }

    pub fn get(&self, i: usize) -> Option<&Transition> {
        self.storage.get(i)
    }

    pub fn push(&mut self, transition: Transition) {
        if self.storage.len() == self.capacity {
            self.storage.pop_front();
        }
        self.storage.push_back(transition);
        self.inserted += 1;
    }

    pub fn extend(&mut self, transitions: impl IntoIterator<Item = Transition>) {
        for t in transitions {
            self.push(t);
        }
    }

    /// Keep each transition independently with probability `1/m`.
    /// Returns how many were stored.
    pub fn push_subsampled<R: Rng + ?Sized>(
        &mut self,
        transitions: impl IntoIterator<Item = Transition>,
        m: usize,
        rng: &mut R,
    ) -> Result<usize> {
        if m == 0 {
            return Err(Error::invalid("subsampling divisor M must be at least 1"));
        }
        let p = 1.0 / m as f64;
        let mut stored = 0;
        for t in transitions {
            if m == 1 || rng.random::<f64>() < p {
                self.push(t);
                stored += 1;
            }
        }
        Ok(stored)
    }

    /// Indices of a uniform minibatch drawn without replacement.
    pub fn sample_indices<R: Rng + ?Sized>(
        &self,
        batch_size: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        if batch_size > self.len() {
            return Err(Error::invalid(format!(
                "minibatch of {batch_size} requested from a buffer of {}",
                self.len()
            )));
        }
        Ok(index::sample(rng, self.len(), batch_size).into_vec())
    }

    pub fn sample_minibatch<R: Rng + ?Sized>(
        &self,
        batch_size: usize,
        rng: &mut R,
    ) -> Result<Vec<&Transition>> {
        Ok(self
            .sample_indices(batch_size, rng)?
            .into_iter()
            .map(|i| &self.storage[i])
            .collect())
    }
}
