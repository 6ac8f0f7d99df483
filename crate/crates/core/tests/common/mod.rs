#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stackelberg_core::game::{GameInstance, MixedStrategy};
use stackelberg_core::harness::generators::{
    gen_dominant_instance, gen_random_instance, gen_single_follower_hard, DistKind,
};
use stackelberg_core::harness::rng::random_simplex_point;

/// One follower, types (+1, -1), epsilon 0.2, sigma = (+1).
pub fn g1() -> GameInstance {
    gen_single_follower_hard(1, 0.2, &[1]).unwrap()
}

/// Every type has a strictly dominant action.
pub fn g2() -> GameInstance {
    gen_dominant_instance(1, 2, 2, 2, 11).unwrap()
}

pub fn random(n: usize, l: usize, a: usize, k: usize, seed: u64) -> GameInstance {
    gen_random_instance(n, l, a, k, DistKind::General, seed).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point(rng: &mut ChaCha8Rng, l: usize) -> MixedStrategy {
    random_simplex_point(rng, l)
}

pub fn x(p: &[f64]) -> MixedStrategy {
    MixedStrategy::new(p.to_vec()).unwrap()
}

/// The small random shapes used by the cross-oracle checks: n <= 2, K <= 3,
/// A = 2, L in {2, 3}.
pub fn small_shape(seed: u64) -> (usize, usize, usize, usize) {
    let n = 1 + (seed % 2) as usize;
    let k = 1 + ((seed / 2) % 3) as usize;
    let l = 2 + ((seed / 6) % 2) as usize;
    (n, l, 2, k)
}
