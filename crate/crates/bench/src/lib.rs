//! Fixtures shared by the criterion benchmarks.

use eierl_core::experiment::warm_start;
use eierl_core::seeding::{stream, StreamRng};
use eierl_core::{DomainSchema, Environment, NetworkShape, PolicyGenome, ReplayBuffer};

pub struct Fixture {
    pub env: Environment,
    pub genome: PolicyGenome,
    /// Warm-started with 120 rule-policy dialogues.
    pub buffer: ReplayBuffer,
    pub rng: StreamRng,
}

/// Movie schema, default network shape, a warm-started buffer.
pub fn movie_fixture(seed: u64) -> Fixture {
    let env = Environment::new(DomainSchema::builtin("movie").expect("built-in schema"), 0);
    let mut rng = stream(seed, 0);
    let shape = NetworkShape::dialogue_default(env.obs_dim(), env.num_actions()).expect("valid shape");
    let genome = PolicyGenome::random(shape, &mut rng);
    let mut buffer = ReplayBuffer::new(5000).expect("positive capacity");
    warm_start(&mut buffer, &env, 120, &mut rng);
    Fixture { env, genome, buffer, rng }
}
