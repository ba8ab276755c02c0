//! The gradient learner: online/target Q-networks trained on replayed
//! transitions with one-step TD targets.

use rand::Rng;

use crate::env::{argmax, epsilon_greedy, Observation};
use crate::error::{Error, Result};
use crate::nn::{PolicyGenome, QSample};
use crate::replay::{ReplayBuffer, Transition};

#[derive(Debug, Clone, PartialEq)]
pub struct DqnConfig {
    pub gamma: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub grad_clip: f64,
}

impl Default for DqnConfig {
    fn default() -> Self {
        DqnConfig {
            gamma: 0.99,
            learning_rate: 0.001,
            batch_size: 16,
            grad_clip: 10.0,
        }
    }
}

impl DqnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be positive".into()));
        }
        if !(self.grad_clip > 0.0) {
            return Err(Error::Config("gradient clip must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DqnAgent {
    pub online: PolicyGenome,
    pub target: PolicyGenome,
    pub config: DqnConfig,
}

impl DqnAgent {
    /// Target starts as an exact copy of `online`.
    pub fn new(online: PolicyGenome, config: DqnConfig) -> Result<Self> {
        config.validate()?;
        Ok(DqnAgent {
            target: online.clone(),
            online,
            config,
        })
    }

    /// One pass of `floor(|D| / batch)` minibatch steps against the target
    /// network as it stood at the start of the epoch, then `target <- online`.
    /// Returns the mean minibatch loss, or 0 when no batch ran.
    pub fn train_epoch<R: Rng + ?Sized>(&mut self, buffer: &ReplayBuffer, rng: &mut R) -> Result<f64> {
        let batches = buffer.len() / self.config.batch_size;
        let mut total = 0.0;
        for _ in 0..batches {
            let batch = buffer.sample_minibatch(self.config.batch_size, rng)?;
            total += self.train_batch(&batch)?;
        }
        self.sync_target();
        Ok(if batches == 0 { 0.0 } else { total / batches as f64 })
    }

    /// One clipped gradient step on a minibatch. Returns the pre-step loss.
    pub fn train_batch(&mut self, batch: &[&Transition]) -> Result<f64> {
        let targets = td_targets(batch, &self.target, self.config.gamma)?;
        let samples: Vec<QSample<'_>> = batch
            .iter()
            .zip(&targets)
            .map(|(t, &y)| QSample {
                obs: &t.state,
                action: t.action,
                target: y,
            })
            .collect();
        let (loss, mut grad) = self.online.loss_and_gradient(&samples)?;
        grad.clip_norm(self.config.grad_clip);
        self.online.sgd_step(&grad, self.config.learning_rate)?;
        Ok(loss)
    }

    pub fn sync_target(&mut self) {
        self.target
            .copy_from(&self.online)
            .expect("online and target share a shape");
    }
}

/// `y = r` for terminal transitions, `r + gamma * max_a' Q'(s', a')` otherwise.
pub fn td_targets(batch: &[&Transition], target: &PolicyGenome, gamma: f64) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::invalid("TD targets need a non-empty batch"));
    }
    let live: Vec<&[f64]> = batch
        .iter()
        .filter(|t| !t.done)
        .map(|t| t.next_state.as_slice())
        .collect();
    let bootstrap = if live.is_empty() {
        Vec::new()
    } else {
        target.forward_batch(&live)?
    };
    let mut next = bootstrap.iter();
    Ok(batch
        .iter()
        .map(|t| {
            if t.done {
                t.reward
            } else {
                let q = next.next().expect("one bootstrap row per live transition");
                t.reward + gamma * q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        })
        .collect())
}

/// Epsilon-greedy over `genome`'s Q-values with lowest-index tie-breaking.
pub fn select_action<R: Rng + ?Sized>(
    genome: &PolicyGenome,
    obs: &Observation,
    epsilon: f64,
    rng: &mut R,
) -> Result<usize> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let q = genome.forward(obs)?;
    Ok(epsilon_greedy(|| argmax(&q), q.len(), epsilon, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::NetworkShape;
    use crate::seeding::stream;

    fn transition(state: Vec<f64>, action: usize, reward: f64, next: Vec<f64>, done: bool) -> Transition {
        Transition { state, action, reward, next_state: next, done }
    }

    /// Linear single-layer net whose Q-values equal its output biases.
    fn bias_net(q: &[f64]) -> PolicyGenome {
        let shape = NetworkShape::new(1, vec![], q.len()).unwrap();
        let mut params = vec![0.0; q.len()];
        params.extend_from_slice(q);
        PolicyGenome::from_params(shape, params).unwrap()
    }

    #[test]
    fn terminal_target_is_reward() {
        let t = transition(vec![0.0], 0, 44.0, vec![0.0], true);
        let y = td_targets(&[&t], &bias_net(&[100.0, 3.0]), 0.99).unwrap();
        assert_eq!(y, vec![44.0]);
    }

    #[test]
    fn bootstrapped_target() {
        let t = transition(vec![0.0], 0, -1.0, vec![0.0], false);
        let y = td_targets(&[&t], &bias_net(&[2.0, 10.0]), 0.99).unwrap();
        assert!((y[0] - 8.9).abs() < 1e-12);
    }

    #[test]
    fn zero_target_network_gives_rewards() {
        let ts: Vec<Transition> = (0..5)
            .map(|i| transition(vec![i as f64], 0, i as f64 - 2.0, vec![1.0], i % 2 == 0))
            .collect();
        let refs: Vec<&Transition> = ts.iter().collect();
        let zero = PolicyGenome::zeros(NetworkShape::new(1, vec![4], 3).unwrap());
        let y = td_targets(&refs, &zero, 0.99).unwrap();
        assert_eq!(y, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(td_targets(&[], &zero, 0.99).is_err());
    }

    #[test]
    fn underfull_buffer_only_syncs() {
        let mut rng = stream(0, 0);
        let shape = NetworkShape::new(2, vec![4], 2).unwrap();
        let mut agent = DqnAgent::new(PolicyGenome::random(shape.clone(), &mut rng), DqnConfig::default()).unwrap();
        agent.target = PolicyGenome::zeros(shape);
        let before = agent.online.clone();
        let mut buf = ReplayBuffer::new(100).unwrap();
        buf.extend((0..10).map(|_| transition(vec![1.0, 0.0], 0, 1.0, vec![0.0, 1.0], true)));
        let loss = agent.train_epoch(&buf, &mut rng).unwrap();
        assert_eq!(loss, 0.0);
        assert!(agent.online.bit_eq(&before));
        assert!(agent.target.bit_eq(&agent.online));
    }

    #[test]
    fn target_equals_online_after_epoch_and_loss_falls() {
        let mut rng = stream(1, 0);
        let shape = NetworkShape::new(3, vec![8, 8], 2).unwrap();
        let mut agent = DqnAgent::new(PolicyGenome::random(shape, &mut rng), DqnConfig::default()).unwrap();
        let mut buf = ReplayBuffer::new(100).unwrap();
        // terminal transitions: fixed regression targets
        for i in 0..16 {
            let s = vec![(i % 4) as f64 / 4.0, (i / 4) as f64 / 4.0, 1.0];
            buf.push(transition(s.clone(), i % 2, (i as f64) / 4.0 - 2.0, s, true));
        }
        let first = agent.train_epoch(&buf, &mut rng).unwrap();
        assert!(agent.target.bit_eq(&agent.online));
        let mut last = first;
        for _ in 0..9 {
            last = agent.train_epoch(&buf, &mut rng).unwrap();
        }
        assert!(last < first, "{last} !< {first}");
    }

    #[test]
    fn targets_frozen_within_an_epoch() {
        let mut rng = stream(2, 0);
        let shape = NetworkShape::new(2, vec![6], 2).unwrap();
        let mut agent = DqnAgent::new(PolicyGenome::random(shape, &mut rng), DqnConfig { learning_rate: 0.05, ..DqnConfig::default() }).unwrap();
        let mut buf = ReplayBuffer::new(100).unwrap();
        for i in 0..64 {
            buf.push(transition(vec![1.0, (i % 2) as f64], i % 2, 1.0, vec![(i % 3) as f64, 1.0], false));
        }
        let probe = transition(vec![0.0, 0.0], 0, 0.0, vec![1.0, 1.0], false);
        let before = td_targets(&[&probe], &agent.target, 0.99).unwrap();
        for _ in 0..buf.len() / 16 {
            let batch = buf.sample_minibatch(16, &mut rng).unwrap();
            agent.train_batch(&batch).unwrap();
            assert_eq!(td_targets(&[&probe], &agent.target, 0.99).unwrap(), before);
        }
        agent.sync_target();
        assert_ne!(td_targets(&[&probe], &agent.target, 0.99).unwrap(), before);
    }

    #[test]
    fn greedy_selection_and_ties() {
        let mut rng = stream(3, 0);
        assert_eq!(select_action(&bias_net(&[1.0, 3.0, 2.0]), &vec![0.0], 0.0, &mut rng).unwrap(), 1);
        assert_eq!(select_action(&bias_net(&[2.0, 2.0, 0.0]), &vec![0.0], 0.0, &mut rng).unwrap(), 0);
        assert!(select_action(&bias_net(&[0.0]), &vec![0.0], 1.5, &mut rng).is_err());
    }

    #[test]
    fn full_exploration_is_uniform() {
        let mut rng = stream(4, 0);
        let net = bias_net(&[0.0, 5.0, 0.0, 0.0]);
        let mut counts = [0usize; 4];
        let n = 10000;
        for _ in 0..n {
            counts[select_action(&net, &vec![0.0], 1.0, &mut rng).unwrap()] += 1;
        }
        let p: f64 = 0.25;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * p).abs() < 5.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn greedy_frequency_interpolates() {
        let mut rng = stream(5, 0);
        let net = bias_net(&[0.0, 0.0, 1.0, 0.0, 0.0]);
        for eps in [0.05, 0.3, 0.8] {
            let n = 10000;
            let hits = (0..n)
                .filter(|_| select_action(&net, &vec![0.0], eps, &mut rng).unwrap() == 2)
                .count();
            let p = (1.0 - eps) + eps / 5.0;
            let sd = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((hits as f64 - n as f64 * p).abs() < 5.0 * sd, "eps {eps}: {hits}");
        }
    }
}
