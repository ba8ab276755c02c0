use crate::env::EpisodeResult;

/// Per-epoch evaluation summary; one CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub success_rate: f64,
    pub avg_reward: f64,
    pub avg_turns: f64,
}

impl EpochMetrics {
    pub fn from_episodes<'a>(epoch: usize, episodes: impl IntoIterator<Item = &'a EpisodeResult>) -> Self {
        let (mut n, mut wins, mut reward, mut turns) = (0usize, 0usize, 0.0, 0usize);
        for ep in episodes {
            n += 1;
            wins += ep.success as usize;
            reward += ep.total_return;
            turns += ep.turns;
        }
        assert!(n > 0, "metrics over zero episodes");
        let n = n as f64;
        EpochMetrics {
            epoch,
            success_rate: wins as f64 / n,
            avg_reward: reward / n,
            avg_turns: turns as f64 / n,
        }
    }
}

/// Epoch-wise arithmetic mean of equally long runs, in the order given.
pub fn mean_over_seeds(runs: &[&[EpochMetrics]]) -> Vec<EpochMetrics> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let k = runs.len() as f64;
    (0..first.len())
        .map(|e| {
            let rows = runs.iter().map(|r| &r[e]);
            let (mut s, mut rw, mut t) = (0.0, 0.0, 0.0);
            for row in rows {
                s += row.success_rate;
                rw += row.avg_reward;
                t += row.avg_turns;
            }
            EpochMetrics {
                epoch: first[e].epoch,
                success_rate: s / k,
                avg_reward: rw / k,
                avg_turns: t / k,
            }
        })
        .collect()
}

/// Mean success rate over the last `window` epochs.
pub fn final_window_mean(metrics: &[EpochMetrics], window: usize) -> f64 {
    let tail = &metrics[metrics.len().saturating_sub(window)..];
    tail.iter().map(|m| m.success_rate).sum::<f64>() / tail.len() as f64
}

/// First epoch whose success rate reaches `level`.
pub fn epochs_to_reach(metrics: &[EpochMetrics], level: f64) -> Option<usize> {
    metrics.iter().find(|m| m.success_rate >= level).map(|m| m.epoch)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(success: bool, turns: usize) -> EpisodeResult {
        let l = 30.0;
        EpisodeResult {
            transitions: Vec::new(),
            total_return: if success { 2.0 * l } else { -l } - turns as f64,
            success,
            turns,
        }
    }

    #[test]
    fn all_successes_in_sixteen_turns() {
        let eps = vec![ep(true, 16); 50];
        let m = EpochMetrics::from_episodes(1, &eps);
        assert_eq!((m.success_rate, m.avg_reward, m.avg_turns), (1.0, 44.0, 16.0));
    }

    #[test]
    fn all_timeouts() {
        let eps = vec![ep(false, 30); 50];
        let m = EpochMetrics::from_episodes(1, &eps);
        assert_eq!((m.success_rate, m.avg_reward, m.avg_turns), (0.0, -60.0, 30.0));
    }

    #[test]
    fn mean_and_windows() {
        let a: Vec<EpochMetrics> = (1..=4)
            .map(|e| EpochMetrics { epoch: e, success_rate: e as f64 / 4.0, avg_reward: 0.0, avg_turns: 10.0 })
            .collect();
        let b: Vec<EpochMetrics> = a
            .iter()
            .map(|m| EpochMetrics { success_rate: 0.0, avg_turns: 20.0, ..m.clone() })
            .collect();
        let mean = mean_over_seeds(&[&a, &b]);
        assert_eq!(mean[3].success_rate, 0.5);
        assert_eq!(mean[0].avg_turns, 15.0);
        assert_eq!(final_window_mean(&a, 2), (0.75 + 1.0) / 2.0);
        assert_eq!(epochs_to_reach(&a, 0.6), Some(3));
        assert_eq!(epochs_to_reach(&b, 0.6), None);
    }
}
