//! Brute-force oracles used to cross-check the exact solvers.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{leader_expected_utility, MixedStrategy, PublicView, TypeDistribution};
use crate::geometry::{classify, BestResponseMapping};
use crate::harness::rng::random_simplex_point;

pub const BRUTE_FORCE_MAX_ACTIONS: usize = 4;
const MAX_LATTICE_POINTS: u128 = 50_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Maximizes the leader utility over the simplex lattice of spacing
/// `grid_step` (rounded to the nearest `1/m`). The first maximum in
/// lexicographic lattice order is returned.
pub fn brute_force_optimal(view: &PublicView, dist: &TypeDistribution, grid_step: f64) -> Result<(MixedStrategy, f64)> {
    let l = view.sizes().leader_actions;
    if l > BRUTE_FORCE_MAX_ACTIONS {
        return Err(Error::GridTooLarge(format!("{l} leader actions (max {BRUTE_FORCE_MAX_ACTIONS})")));
    }
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::InvalidArgument(format!("grid step {grid_step} outside (0, 1]")));
    }
    let m = (1.0 / grid_step).round().max(1.0) as usize;
    let points = binomial((m + l - 1) as u128, (l - 1) as u128);
    if points > MAX_LATTICE_POINTS {
        return Err(Error::GridTooLarge(format!("{points} lattice points")));
    }
    let mut best: Option<(MixedStrategy, f64)> = None;
    let mut counts = vec![0usize; l];
    counts[l - 1] = m;
    loop {
        let x = MixedStrategy::from_solver(counts.iter().map(|&c| c as f64 / m as f64).collect());
        let value = leader_expected_utility(&x, dist, view)?;
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((x, value));
        }
        if !next_composition(&mut counts) {
            break;
        }
    }
    Ok(best.expect("lattice is nonempty"))
}

/// Next composition of `sum(counts)` in lexicographic order of the leading
/// entries; the last entry absorbs the remainder.
fn next_composition(counts: &mut [usize]) -> bool {
    let l = counts.len();
    if l < 2 {
        return false;
    }
    let total: usize = counts.iter().sum();
    // find the rightmost position (before the last) that can grow
    let mut i = l - 1;
    while i > 0 {
        i -= 1;
        let prefix: usize = counts[..=i].iter().sum();
        if prefix < total {
            counts[i] += 1;
            for c in counts[i + 1..].iter_mut() {
                *c = 0;
            }
            let used: usize = counts[..l - 1].iter().sum();
            counts[l - 1] = total - used;
            return true;
        }
    }
    false
}

/// Distinct classifications of `num_samples` uniform simplex points.
pub fn sample_regions(view: &PublicView, num_samples: usize, seed: u64) -> BTreeSet<BestResponseMapping> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = view.sizes().leader_actions;
    (0..num_samples).map(|_| classify(view, &random_simplex_point(&mut rng, l))).collect()
}

/// Upper bound on full-dimensional regions: cells of an arrangement of
/// `nK * C(A, 2)` hyperplanes in `L - 1` dimensions.
pub fn full_dimensional_region_bound(n: usize, k: usize, a: usize, l: usize) -> u128 {
    let m = (n * k) as u128 * binomial(a as u128, 2);
    (0..l as u128).map(|i| binomial(m, i)).fold(0u128, u128::saturating_add)
}

/// Upper bound on all nonempty regions, `min((nKA^2)^L, A^(nK))`.
pub fn region_count_bound(n: usize, k: usize, a: usize, l: usize) -> u128 {
    let poly = ((n * k * a * a) as u128).checked_pow(l as u32).unwrap_or(u128::MAX);
    let all = (a as u128).checked_pow((n * k) as u32).unwrap_or(u128::MAX);
    poly.min(all)
}
