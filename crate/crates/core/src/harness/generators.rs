//! Instance generators: random instances, the class-C distributions and the
//! hard single- and multi-follower families, plus a dominant-action fixture.
//!
//! In the class-C and hard single-follower constructions, type and leader
//! action `s` stand for `+j` when `s = 2(j-1)` and `-j` when
//! `s = 2(j-1) + 1`, so `s ^ 1` is the partner of `s`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{
    checked_count, decode_profile, GameInstance, LeaderEvaluator, LeaderUtility, MixedStrategy, PublicView, Sizes,
    TypeDistribution, DENSE_LEADER_CAP, PROFILE_CAP,
};
use crate::harness::rng::dirichlet_uniform;

pub const GOOD: usize = 0;
pub const BAD: usize = 1;
/// The always-available outside action of the multi-follower family.
pub const OUTSIDE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistKind {
    General,
    Independent,
}

fn follower_index(s: Sizes, i: usize, l: usize, a: usize, k: usize) -> usize {
    ((i * s.leader_actions + l) * s.actions + a) * s.types + k
}

/// Uniform `[0, 1]` utilities and a Dirichlet(1) distribution (joint or per
/// follower); deterministic in `seed`.
pub fn gen_random_instance(
    n: usize,
    l: usize,
    a: usize,
    k: usize,
    kind: DistKind,
    seed: u64,
) -> Result<GameInstance> {
    let sizes = Sizes::new(n, l, a, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profiles = checked_count(a, n, DENSE_LEADER_CAP)?;
    let leader: Vec<f64> = (0..profiles * l).map(|_| rng.random::<f64>()).collect();
    let follower: Vec<f64> = (0..sizes.follower_table_len()).map(|_| rng.random::<f64>()).collect();
    let dist = match kind {
        DistKind::General => {
            let count = checked_count(k, n, PROFILE_CAP)?;
            TypeDistribution::general(n, k, dirichlet_uniform(&mut rng, count))?
        }
        DistKind::Independent => {
            TypeDistribution::independent((0..n).map(|_| dirichlet_uniform(&mut rng, k)).collect())?
        }
    };
    GameInstance::new(PublicView::new(sizes, LeaderUtility::Dense(leader), follower)?, dist)
}

/// Parses a sign pattern such as `"+-+"`.
pub fn parse_sigma(text: &str) -> Result<Vec<i8>> {
    text.chars()
        .map(|ch| match ch {
            '+' => Ok(1),
            '-' => Ok(-1),
            other => Err(Error::Parse(format!("sigma entry {other:?} is not + or -"))),
        })
        .collect()
}

fn check_class_c(c: usize, epsilon: f64, sigma: &[i8]) -> Result<()> {
    if c == 0 {
        return Err(Error::InvalidArgument("class C needs c >= 1".into()));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside [0, 1)")));
    }
    if sigma.len() != c {
        return Err(Error::ShapeMismatch(format!("sigma has {} signs, c = {c}", sigma.len())));
    }
    if sigma.iter().any(|s| *s != 1 && *s != -1) {
        return Err(Error::InvalidArgument("sigma entries must be +1 or -1".into()));
    }
    Ok(())
}

/// Probabilities `((1 + s e) / 2c, (1 - s e) / 2c)` for each pair.
fn class_c_table(c: usize, epsilon: f64, sigma: &[i8]) -> Vec<f64> {
    let mut p = Vec::with_capacity(2 * c);
    for &s in sigma {
        let s = f64::from(s);
        p.push((1.0 + s * epsilon) / (2 * c) as f64);
        p.push((1.0 - s * epsilon) / (2 * c) as f64);
    }
    p
}

/// Class-C distribution over `2c` types of a single follower.
pub fn gen_class_c(c: usize, epsilon: f64, sigma: &[i8]) -> Result<TypeDistribution> {
    check_class_c(c, epsilon, sigma)?;
    TypeDistribution::general(1, 2 * c, class_c_table(c, epsilon, sigma))
}

/// The class-C member whose sign pattern agrees with the order of `x`:
/// `sigma_j = +1` iff `x(+j) >= x(-j)`.
pub fn rounded_class_c(x: &MixedStrategy, c: usize, epsilon: f64) -> Result<TypeDistribution> {
    if x.len() != 2 * c {
        return Err(Error::ShapeMismatch(format!("strategy of length {} for c = {c}", x.len())));
    }
    let p = x.probs();
    let sigma: Vec<i8> = (0..c).map(|j| if p[2 * j] >= p[2 * j + 1] { 1 } else { -1 }).collect();
    gen_class_c(c, epsilon, &sigma)
}

/// One follower with `2c` types, the leader choosing among the same `2c`
/// labels. Type `s` earns 1 from Good when the leader plays `s` and from Bad
/// when the leader plays the partner of `s`; the leader earns 1 exactly when
/// the follower plays Good.
pub fn gen_single_follower_hard(c: usize, epsilon: f64, sigma: &[i8]) -> Result<GameInstance> {
    let dist = gen_class_c(c, epsilon, sigma)?;
    let m = 2 * c;
    let sizes = Sizes::new(1, m, 2, m)?;
    let mut follower = vec![0.0; sizes.follower_table_len()];
    for s in 0..m {
        follower[follower_index(sizes, 0, s, GOOD, s)] = 1.0;
        follower[follower_index(sizes, 0, s ^ 1, BAD, s)] = 1.0;
    }
    let mut leader = vec![0.0; 2 * m];
    for l in 0..m {
        leader[GOOD * m + l] = 1.0;
    }
    GameInstance::new(PublicView::new(sizes, LeaderUtility::Dense(leader), follower)?, dist)
}

/// Number of `j` whose order in `x` contradicts the larger half of pair `j`
/// in `dist`.
pub fn disagree(x: &MixedStrategy, dist: &TypeDistribution) -> Result<usize> {
    let (_, _, p) = class_c_parameters(dist)?;
    if x.len() != p.len() {
        return Err(Error::ShapeMismatch(format!("strategy of length {} for {} types", x.len(), p.len())));
    }
    let xp = x.probs();
    Ok((0..p.len() / 2)
        .filter(|&j| (xp[2 * j] >= xp[2 * j + 1]) != (p[2 * j] >= p[2 * j + 1]))
        .count())
}

/// Recovers `(c, epsilon, table)` of a class-C distribution.
pub fn class_c_parameters(dist: &TypeDistribution) -> Result<(usize, f64, Vec<f64>)> {
    let not_c = |why: &str| Error::InvalidDistribution(format!("not a class-C distribution: {why}"));
    if dist.followers() != 1 || dist.types() % 2 != 0 {
        return Err(not_c("needs one follower with an even number of types"));
    }
    let p = dist.to_joint()?;
    let c = p.len() / 2;
    let epsilon = (p[0] - p[1]).abs() * c as f64;
    for j in 0..c {
        let (plus, minus) = (p[2 * j], p[2 * j + 1]);
        if ((plus + minus) * c as f64 - 1.0).abs() > 1e-9 {
            return Err(not_c("pair masses differ"));
        }
        if ((plus - minus).abs() * c as f64 - epsilon).abs() > 1e-9 {
            return Err(not_c("pair gaps differ"));
        }
    }
    Ok((c, epsilon, p))
}

/// Embeds a class-C single-follower instance over `nK` types into `n`
/// followers with `K + 1` types and actions (Good, Bad, outside).
///
/// Type 0 of follower `i` has probability `1 - 1/(100n)` and always takes the
/// outside action; type `j >= 1` stands for the base type `s = iK + j - 1`
/// with probability `D(s)/100`. The leader earns 1 iff exactly one follower
/// plays Good and all others take the outside action. Follower utilities are
/// the base utilities with `-1` penalties, mapped into `[0, 1]` by
/// `v -> (v + 1) / 2`.
pub fn gen_multi_follower_hard(n: usize, k: usize, base: &TypeDistribution) -> Result<GameInstance> {
    let (_, _, p) = class_c_parameters(base)?;
    if n == 0 || k == 0 || p.len() != n * k {
        return Err(Error::ShapeMismatch(format!(
            "base distribution has {} types, need n*K = {}",
            p.len(),
            n * k
        )));
    }
    let l = n * k;
    let sizes = Sizes::new(n, l, 3, k + 1)?;
    let mut follower = vec![0.0; sizes.follower_table_len()];
    for i in 0..n {
        for ell in 0..l {
            follower[follower_index(sizes, i, ell, OUTSIDE, 0)] = 1.0;
            for j in 1..=k {
                let s = i * k + j - 1;
                let good = if ell == s { 1.0 } else { 0.0 };
                let bad = if ell == (s ^ 1) { 1.0 } else { 0.0 };
                follower[follower_index(sizes, i, ell, GOOD, j)] = (good + 1.0) / 2.0;
                follower[follower_index(sizes, i, ell, BAD, j)] = (bad + 1.0) / 2.0;
            }
        }
    }
    let rest = 1.0 - 1.0 / (100 * n) as f64;
    let marginals: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut m = vec![rest];
            m.extend((0..k).map(|j| p[i * k + j] / 100.0));
            m
        })
        .collect();
    let dist = TypeDistribution::independent(marginals)?;
    let leader = multi_leader_utility(n, l)?;
    GameInstance::new(PublicView::new(sizes, leader, follower)?, dist)
}

fn exactly_one_good(actions: &[usize]) -> bool {
    actions.iter().filter(|&&a| a == GOOD).count() == 1 && actions.iter().all(|&a| a == GOOD || a == OUTSIDE)
}

fn multi_leader_utility(n: usize, l: usize) -> Result<LeaderUtility> {
    match checked_count(3, n, DENSE_LEADER_CAP) {
        Ok(profiles) => {
            let mut table = vec![0.0; profiles * l];
            for idx in 0..profiles {
                if exactly_one_good(&decode_profile(idx, n, 3)) {
                    table[idx * l..(idx + 1) * l].fill(1.0);
                }
            }
            Ok(LeaderUtility::Dense(table))
        }
        Err(_) => {
            let eval: LeaderEvaluator = Arc::new(|_, a: &[usize]| if exactly_one_good(a) { 1.0 } else { 0.0 });
            Ok(LeaderUtility::Evaluator(eval))
        }
    }
}

/// Every (follower, type) has a strictly dominant action `(i + k) mod A`,
/// whatever the leader plays, and the leader utility depends only on the
/// followers' joint action, so the leader's expected utility is the same at
/// every strategy. Remaining values and the distribution are random.
pub fn gen_dominant_instance(n: usize, l: usize, a: usize, k: usize, seed: u64) -> Result<GameInstance> {
    let base = gen_random_instance(n, l, a, k, DistKind::General, seed)?;
    let sizes = base.sizes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd0d0);
    let mut follower = vec![0.0; sizes.follower_table_len()];
    for i in 0..n {
        for ell in 0..l {
            for act in 0..a {
                for kk in 0..k {
                    let v = if act == (i + kk) % a {
                        0.6 + 0.4 * rng.random::<f64>()
                    } else {
                        0.4 * rng.random::<f64>()
                    };
                    follower[follower_index(sizes, i, ell, act, kk)] = v;
                }
            }
        }
    }
    let profiles = checked_count(a, n, DENSE_LEADER_CAP)?;
    let mut leader = vec![0.0; profiles * l];
    for chunk in leader.chunks_mut(l) {
        chunk.fill(rng.random::<f64>());
    }
    let view = PublicView::new(sizes, LeaderUtility::Dense(leader), follower)?;
    GameInstance::new(view, base.distribution().clone())
}
