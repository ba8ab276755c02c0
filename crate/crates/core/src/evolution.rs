//! Genetic operators over [`PolicyGenome`]s: elitism, tournament selection,
//! row-wise crossover and the three-branch mutation.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::nn::PolicyGenome;

#[derive(Debug, Clone, PartialEq)]
pub struct EvoConfig {
    /// Fraction of the population kept as elites (at least one is kept).
    pub elite_fraction: f64,
    pub tournament_size: usize,
    /// Probability that an offspring is mutated at all.
    pub mut_prob: f64,
    /// Point mutations per weight matrix, as a fraction of its entries.
    pub mut_frac: f64,
    pub supermut_prob: f64,
    pub reset_prob: f64,
    /// Standard deviation of the relative perturbation.
    pub mut_strength: f64,
}

impl Default for EvoConfig {
    fn default() -> Self {
        EvoConfig {
            elite_fraction: 0.2,
            tournament_size: 3,
            mut_prob: 0.9,
            mut_frac: 0.1,
            supermut_prob: 0.05,
            reset_prob: 0.1,
            mut_strength: 0.1,
        }
    }
}

impl EvoConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {p} is not a probability")))
            }
        };
        if !(self.elite_fraction > 0.0 && self.elite_fraction < 1.0) {
            return Err(Error::Config("elite_fraction must lie in (0, 1)".into()));
        }
        if self.tournament_size == 0 {
            return Err(Error::Config("tournament_size must be at least 1".into()));
        }
        prob("mut_prob", self.mut_prob)?;
        prob("mut_frac", self.mut_frac)?;
        prob("supermut_prob", self.supermut_prob)?;
        prob("reset_prob", self.reset_prob)?;
        if self.supermut_prob + self.reset_prob > 1.0 {
            return Err(Error::Config("supermut_prob + reset_prob exceeds 1".into()));
        }
        if !(self.mut_strength > 0.0) {
            return Err(Error::Config("mut_strength must be positive".into()));
        }
        Ok(())
    }

    pub fn elite_count(&self, pop_size: usize) -> usize {
        ((self.elite_fraction * pop_size as f64).floor() as usize).max(1)
    }
}

/// Indices ordered best-first; ties go to the lower index.
pub fn rank(fitnesses: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitnesses.len()).collect();
    order.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]).then(a.cmp(&b)));
    order
}

/// `(elite indices, full ranking)` with `max(1, floor(psi * m))` elites.
pub fn rank_and_elites(fitnesses: &[f64], elite_fraction: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    if fitnesses.is_empty() {
        return Err(Error::invalid("cannot rank an empty population"));
    }
    let ranked = rank(fitnesses);
    let e = ((elite_fraction * fitnesses.len() as f64).floor() as usize)
        .max(1)
        .min(fitnesses.len());
    Ok((ranked[..e].to_vec(), ranked))
}

/// Best of `k` uniform draws with replacement; the lower index wins ties.
pub fn tournament_select<R: Rng + ?Sized>(fitnesses: &[f64], k: usize, rng: &mut R) -> usize {
    assert!(!fitnesses.is_empty() && k >= 1);
    let mut best = rng.random_range(0..fitnesses.len());
    for _ in 1..k {
        let c = rng.random_range(0..fitnesses.len());
        if fitnesses[c] > fitnesses[best] || (fitnesses[c] == fitnesses[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Each unit's incoming weight row and its bias come from either parent with
/// probability 1/2.
pub fn crossover<R: Rng + ?Sized>(
    parent_a: &PolicyGenome,
    parent_b: &PolicyGenome,
    rng: &mut R,
) -> Result<PolicyGenome> {
    if parent_a.shape() != parent_b.shape() {
        return Err(Error::invalid("crossover parents differ in shape"));
    }
    let mut child = parent_a.clone();
    let from_b = parent_b.params();
    let spans = parent_a.shape().layers();
    let params = child.params_mut();
    for span in spans {
        for row in 0..span.fan_out {
            if rng.random_bool(0.5) {
                let w = span.weight_offset + row * span.fan_in;
                params[w..w + span.fan_in].copy_from_slice(&from_b[w..w + span.fan_in]);
                params[span.bias_offset + row] = from_b[span.bias_offset + row];
            }
        }
    }
    Ok(child)
}

/// Per-branch event counts of one [`mutate`] call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MutationStats {
    pub applied: bool,
    /// Point mutations performed on each weight matrix, in layer order.
    pub events_per_matrix: Vec<usize>,
    pub supermutations: usize,
    pub resets: usize,
    pub normal: usize,
}

/// Mutate `genome` in place.
///
/// With probability `mut_prob` every weight matrix `M` receives
/// `floor(mut_frac * |M|)` point mutations at uniformly drawn entries (with
/// replacement). Each event draws `u`: `u < supermut_prob` adds
/// `w * N(0, 100 sigma)`, the next `reset_prob` of mass sets `w ~ N(0, 1)`,
/// and the remainder adds `w * N(0, sigma)`. Biases are left untouched.
pub fn mutate<R: Rng + ?Sized>(genome: &mut PolicyGenome, cfg: &EvoConfig, rng: &mut R) -> MutationStats {
    let mut stats = MutationStats::default();
    if rng.random::<f64>() >= cfg.mut_prob {
        return stats;
    }
    stats.applied = true;
    let normal = Normal::new(0.0, cfg.mut_strength).expect("positive strength");
    let super_normal = Normal::new(0.0, 100.0 * cfg.mut_strength).expect("positive strength");
    let spans = genome.shape().layers();
    let params = genome.params_mut();
    for span in spans {
        let size = span.weight_len();
        let events = (cfg.mut_frac * size as f64).floor() as usize;
        stats.events_per_matrix.push(events);
        for _ in 0..events {
            let k = span.weight_offset + rng.random_range(0..size);
            let u: f64 = rng.random();
            let w = &mut params[k];
            if u < cfg.supermut_prob {
                *w += *w * super_normal.sample(rng);
                stats.supermutations += 1;
            } else if u < cfg.supermut_prob + cfg.reset_prob {
                *w = StandardNormal.sample(rng);
                stats.resets += 1;
            } else {
                *w += *w * normal.sample(rng);
                stats.normal += 1;
            }
        }
    }
    stats
}

/// One generation: elites survive unchanged; the remaining `m - e` slots are
/// filled by crossing a random elite with a tournament winner and mutating
/// the child.
pub fn evolve<R: Rng + ?Sized>(
    population: &[PolicyGenome],
    fitnesses: &[f64],
    cfg: &EvoConfig,
    rng: &mut R,
) -> Result<Vec<PolicyGenome>> {
    let m = population.len();
    if m < 2 {
        return Err(Error::invalid("evolution needs a population of at least 2"));
    }
    if fitnesses.len() != m {
        return Err(Error::DimensionMismatch {
            context: "fitness vector",
            expected: m,
            actual: fitnesses.len(),
        });
    }
    let (elites, _) = rank_and_elites(fitnesses, cfg.elite_fraction)?;
    let e = elites.len().min(m - 1);
    let elites = &elites[..e];

    let selected: Vec<usize> = (0..m - e)
        .map(|_| tournament_select(fitnesses, cfg.tournament_size, rng))
        .collect();

    let mut next: Vec<PolicyGenome> = elites.iter().map(|&i| population[i].clone()).collect();
    for &s in &selected {
        let elite = elites[rng.random_range(0..e)];
        let mut child = crossover(&population[elite], &population[s], rng)?;
        mutate(&mut child, cfg, rng);
        next.push(child);
    }
    Ok(next)
}
