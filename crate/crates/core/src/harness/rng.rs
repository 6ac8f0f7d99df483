//! Reproducible randomness.
//!
//! Every replication draws from ChaCha8 seeded with the root seed, on stream
//! `(replication << 8) | purpose`. Purposes are [`TYPES`] (type profiles) and
//! [`LEADER_ACTION`] (the realized leader action), so changing how often one
//! purpose is consumed never shifts the other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::game::MixedStrategy;

pub const TYPES: u64 = 0;
pub const LEADER_ACTION: u64 = 1;

pub fn stream(root_seed: u64, replication: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream((replication << 8) | purpose);
    rng
}

/// Dirichlet(1, ..., 1) probabilities, via normalized exponentials.
pub fn dirichlet_uniform<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let sum: f64 = v.iter().sum();
    for p in v.iter_mut() {
        *p /= sum;
    }
    v
}

/// A uniformly random point of the simplex.
pub fn random_simplex_point<R: Rng + ?Sized>(rng: &mut R, len: usize) -> MixedStrategy {
    MixedStrategy::from_solver(dirichlet_uniform(rng, len))
}
