//! Game instances, strategies, type distributions and the exact utility,
//! best-response and distance primitives everything else is built on.
//!
//! Index conventions are fixed for file-format stability:
//!
//! * joint type and action profiles are linearized row-major with follower 0
//!   the most significant digit;
//! * the dense leader table is indexed `profile_index(a) * L + l`;
//! * follower tables are indexed `((i * L + l) * A + a) * K + k`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance on the simplex constraints of a [`MixedStrategy`].
pub const SIMPLEX_EPS: f64 = 1e-9;
/// Two follower utilities closer than this are treated as tied.
pub const TIE_EPS: f64 = 1e-9;
/// Largest number of joint type profiles summed exactly.
pub const PROFILE_CAP: usize = 1_000_000;
/// Largest joint action space stored as a dense leader table.
pub const DENSE_LEADER_CAP: usize = 1_000_000;
/// Largest product of per-follower argmax sets enumerated when ties occur.
pub const JOINT_TIE_CAP: usize = 10_000;

const DIST_EPS: f64 = 1e-9;

/// `base^n`, failing with [`Error::ProfileCapExceeded`] above `cap`.
pub fn checked_count(base: usize, n: usize, cap: usize) -> Result<usize> {
    let count = (base as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::ProfileCapExceeded { count, cap });
    }
    Ok(count as usize)
}

/// Row-major index of a profile, follower 0 most significant.
pub fn profile_index(entries: &[usize], base: usize) -> usize {
    entries.iter().fold(0, |acc, &e| acc * base + e)
}

/// Inverse of [`profile_index`].
pub fn decode_profile(mut index: usize, n: usize, base: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

/// Sizes `(n, L, A, K)` of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sizes {
    pub followers: usize,
    pub leader_actions: usize,
    pub actions: usize,
    pub types: usize,
}

impl Sizes {
    pub fn new(followers: usize, leader_actions: usize, actions: usize, types: usize) -> Result<Self> {
        if followers < 1 {
            return Err(Error::InvalidInstance("need at least one follower".into()));
        }
        if leader_actions < 2 {
            return Err(Error::InvalidInstance("leader needs at least two actions".into()));
        }
        if actions < 2 {
            return Err(Error::InvalidInstance("followers need at least two actions".into()));
        }
        if types < 1 {
            return Err(Error::InvalidInstance("need at least one type".into()));
        }
        Ok(Self { followers, leader_actions, actions, types })
    }

    /// `K^n`, capped at [`PROFILE_CAP`].
    pub fn type_profiles(&self) -> Result<usize> {
        checked_count(self.types, self.followers, PROFILE_CAP)
    }

    pub fn follower_table_len(&self) -> usize {
        self.followers * self.leader_actions * self.actions * self.types
    }
}

/// A point on the leader's simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    /// Validates `probs`; entries down to `-SIMPLEX_EPS` are clamped to zero.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("empty probability vector".into()));
        }
        let mut probs = probs;
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -SIMPLEX_EPS {
                return Err(Error::InvalidStrategy(format!("entry {p} is not a probability")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_EPS {
            return Err(Error::InvalidStrategy(format!("entries sum to {sum}")));
        }
        Ok(Self(probs))
    }

    /// Strategy from a numerical solver: clamps tiny negatives and renormalizes.
    pub(crate) fn from_solver(mut probs: Vec<f64>) -> Self {
        for p in probs.iter_mut() {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if sum > 0.0 && (sum - 1.0).abs() > f64::EPSILON {
            for p in probs.iter_mut() {
                *p /= sum;
            }
        }
        Self(probs)
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    pub fn pure(len: usize, action: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[action] = 1.0;
        Self(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    /// Samples a leader action `l ~ x`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (l, &p) in self.0.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = l;
            if u < acc {
                return l;
            }
        }
        last
    }
}

impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| format!("{p:.6}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// One type per follower.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeProfile(Vec<usize>);

impl TypeProfile {
    pub fn new(types: Vec<usize>, type_count: usize) -> Result<Self> {
        if let Some(&bad) = types.iter().find(|&&k| k >= type_count) {
            return Err(Error::IndexOutOfRange { what: "type", index: bad, limit: type_count });
        }
        Ok(Self(types))
    }

    pub fn from_index(index: usize, followers: usize, type_count: usize) -> Self {
        Self(decode_profile(index, followers, type_count))
    }

    pub fn types(&self) -> &[usize] {
        &self.0
    }

    pub fn index(&self, type_count: usize) -> usize {
        profile_index(&self.0, type_count)
    }
}

/// One action per follower.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionProfile(Vec<usize>);

impl ActionProfile {
    pub fn new(actions: Vec<usize>, action_count: usize) -> Result<Self> {
        if let Some(&bad) = actions.iter().find(|&&a| a >= action_count) {
            return Err(Error::IndexOutOfRange { what: "action", index: bad, limit: action_count });
        }
        Ok(Self(actions))
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn index(&self, action_count: usize) -> usize {
        profile_index(&self.0, action_count)
    }
}

/// An `n x K` table assigning an action to every (follower, type) pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BestResponseMapping {
    followers: usize,
    types: usize,
    entries: Vec<usize>,
}

impl BestResponseMapping {
    pub fn new(followers: usize, types: usize, entries: Vec<usize>) -> Result<Self> {
        if entries.len() != followers * types {
            return Err(Error::ShapeMismatch(format!(
                "mapping needs {} entries, got {}",
                followers * types,
                entries.len()
            )));
        }
        Ok(Self { followers, types, entries })
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let types = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != types) {
            return Err(Error::ShapeMismatch("ragged mapping rows".into()));
        }
        Self::new(rows.len(), types, rows.concat())
    }

    /// Action of follower `i` with type `k`.
    pub fn get(&self, i: usize, k: usize) -> usize {
        self.entries[i * self.types + k]
    }

    pub fn set(&mut self, i: usize, k: usize, action: usize) {
        self.entries[i * self.types + k] = action;
    }

    pub fn followers(&self) -> usize {
        self.followers
    }

    pub fn types(&self) -> usize {
        self.types
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// The joint action `W(theta)`.
    pub fn joint_action(&self, theta: &[usize]) -> Vec<usize> {
        theta.iter().enumerate().map(|(i, &k)| self.get(i, k)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.entries.chunks(self.types).map(<[usize]>::to_vec).collect()
    }
}

impl fmt::Display for BestResponseMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(usize::to_string).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Callback form of the leader utility `u(l, a)` for joint action spaces too
/// large to tabulate.
pub type LeaderEvaluator = Arc<dyn Fn(usize, &[usize]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum LeaderUtility {
    /// `A^n * L` entries, see the module docs for the layout.
    Dense(Vec<f64>),
    Evaluator(LeaderEvaluator),
}

impl fmt::Debug for LeaderUtility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeaderUtility::Dense(t) => f.debug_tuple("Dense").field(&t.len()).finish(),
            LeaderUtility::Evaluator(_) => f.write_str("Evaluator(..)"),
        }
    }
}

/// Everything a learner may see: the instance without its type distribution.
#[derive(Debug, Clone)]
pub struct PublicView {
    sizes: Sizes,
    leader: LeaderUtility,
    follower: Vec<f64>,
}

impl PublicView {
    pub fn new(sizes: Sizes, leader: LeaderUtility, follower: Vec<f64>) -> Result<Self> {
        if follower.len() != sizes.follower_table_len() {
            return Err(Error::ShapeMismatch(format!(
                "follower table needs {} entries, got {}",
                sizes.follower_table_len(),
                follower.len()
            )));
        }
        check_unit_interval("follower utility", &follower)?;
        if let LeaderUtility::Dense(table) = &leader {
            let profiles = checked_count(sizes.actions, sizes.followers, DENSE_LEADER_CAP)
                .map_err(|_| {
                    Error::InvalidInstance(
                        "joint action space too large for a dense leader table; supply an evaluator".into(),
                    )
                })?;
            if table.len() != profiles * sizes.leader_actions {
                return Err(Error::ShapeMismatch(format!(
                    "leader table needs {} entries, got {}",
                    profiles * sizes.leader_actions,
                    table.len()
                )));
            }
            check_unit_interval("leader utility", table)?;
        }
        Ok(Self { sizes, leader, follower })
    }

    pub fn sizes(&self) -> Sizes {
        self.sizes
    }

    pub fn leader_table(&self) -> Option<&[f64]> {
        match &self.leader {
            LeaderUtility::Dense(t) => Some(t),
            LeaderUtility::Evaluator(_) => None,
        }
    }

    pub fn follower_table(&self) -> &[f64] {
        &self.follower
    }

    pub fn leader_utility(&self) -> &LeaderUtility {
        &self.leader
    }

    /// `u(l, a)`.
    pub fn leader(&self, l: usize, actions: &[usize]) -> f64 {
        match &self.leader {
            LeaderUtility::Dense(t) => {
                t[profile_index(actions, self.sizes.actions) * self.sizes.leader_actions + l]
            }
            LeaderUtility::Evaluator(f) => f(l, actions),
        }
    }

    /// The vector `(u(1, a), ..., u(L, a))`.
    pub fn leader_column(&self, actions: &[usize]) -> Vec<f64> {
        let l_count = self.sizes.leader_actions;
        match &self.leader {
            LeaderUtility::Dense(t) => {
                let base = profile_index(actions, self.sizes.actions) * l_count;
                t[base..base + l_count].to_vec()
            }
            LeaderUtility::Evaluator(f) => (0..l_count).map(|l| f(l, actions)).collect(),
        }
    }

    /// `u(x, a) = sum_l x(l) u(l, a)`.
    pub fn leader_mixed(&self, x: &MixedStrategy, actions: &[usize]) -> f64 {
        let l_count = self.sizes.leader_actions;
        match &self.leader {
            LeaderUtility::Dense(t) => {
                let base = profile_index(actions, self.sizes.actions) * l_count;
                x.dot(&t[base..base + l_count])
            }
            LeaderUtility::Evaluator(f) => {
                x.probs().iter().enumerate().map(|(l, p)| p * f(l, actions)).sum()
            }
        }
    }

    /// `v_i(l, a, k)`.
    pub fn follower(&self, i: usize, l: usize, a: usize, k: usize) -> f64 {
        let s = &self.sizes;
        self.follower[((i * s.leader_actions + l) * s.actions + a) * s.types + k]
    }

    fn check_strategy(&self, x: &MixedStrategy) -> Result<()> {
        if x.len() != self.sizes.leader_actions {
            return Err(Error::ShapeMismatch(format!(
                "strategy has {} entries, leader has {} actions",
                x.len(),
                self.sizes.leader_actions
            )));
        }
        Ok(())
    }

    /// `v_i(x, a, k) = sum_l x(l) v_i(l, a, k)`.
    pub fn follower_expected_utility(&self, x: &MixedStrategy, i: usize, a: usize, k: usize) -> Result<f64> {
        self.check_strategy(x)?;
        let s = &self.sizes;
        if i >= s.followers {
            return Err(Error::IndexOutOfRange { what: "follower", index: i, limit: s.followers });
        }
        if a >= s.actions {
            return Err(Error::IndexOutOfRange { what: "action", index: a, limit: s.actions });
        }
        if k >= s.types {
            return Err(Error::IndexOutOfRange { what: "type", index: k, limit: s.types });
        }
        Ok(self.follower_mixed(x, i, a, k))
    }

    fn follower_mixed(&self, x: &MixedStrategy, i: usize, a: usize, k: usize) -> f64 {
        x.probs()
            .iter()
            .enumerate()
            .map(|(l, p)| p * self.follower(i, l, a, k))
            .sum()
    }
}

fn check_unit_interval(what: &str, values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
        return Err(Error::InvalidInstance(format!("{what} {v} outside [0, 1]")));
    }
    Ok(())
}

/// Per-(follower, type) argmax sets of the follower utilities at a fixed `x`.
#[derive(Debug, Clone)]
pub struct ResponseTable {
    types: usize,
    sets: Vec<Vec<usize>>,
}

impl ResponseTable {
    pub fn new(view: &PublicView, x: &MixedStrategy) -> Self {
        let s = view.sizes();
        let mut sets = Vec::with_capacity(s.followers * s.types);
        let mut values = vec![0.0; s.actions];
        for i in 0..s.followers {
            for k in 0..s.types {
                for (a, v) in values.iter_mut().enumerate() {
                    *v = view.follower_mixed(x, i, a, k);
                }
                let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                sets.push((0..s.actions).filter(|&a| values[a] >= best - TIE_EPS).collect());
            }
        }
        Self { types: s.types, sets }
    }

    /// Actions tied for best for follower `i` with type `k`, ascending.
    pub fn argmax(&self, i: usize, k: usize) -> &[usize] {
        &self.sets[i * self.types + k]
    }

    pub fn is_best(&self, i: usize, k: usize, a: usize) -> bool {
        self.argmax(i, k).contains(&a)
    }

    /// Joint response to `theta`; see [`best_response_toward`].
    pub fn respond(
        &self,
        view: &PublicView,
        x: &MixedStrategy,
        theta: &[usize],
        target: Option<&BestResponseMapping>,
    ) -> Vec<usize> {
        let mut candidates: Vec<&[usize]> = Vec::with_capacity(theta.len());
        let mut forced: Vec<[usize; 1]> = vec![[0]; theta.len()];
        for (i, &k) in theta.iter().enumerate() {
            if let Some(w) = target {
                let a = w.get(i, k);
                if self.is_best(i, k, a) {
                    forced[i] = [a];
                }
            }
        }
        for (i, &k) in theta.iter().enumerate() {
            let own = self.argmax(i, k);
            let pinned = target.is_some_and(|w| self.is_best(i, k, w.get(i, k)));
            candidates.push(if pinned { &forced[i][..] } else { own });
        }
        joint_leader_favorable(view, x, &candidates)
    }
}

fn joint_leader_favorable(view: &PublicView, x: &MixedStrategy, candidates: &[&[usize]]) -> Vec<usize> {
    let first: Vec<usize> = candidates.iter().map(|c| c[0]).collect();
    let mut size: usize = 1;
    for c in candidates {
        size = size.saturating_mul(c.len());
    }
    if size == 1 || size > JOINT_TIE_CAP {
        return first;
    }
    let mut best = first.clone();
    let mut best_value = view.leader_mixed(x, &first);
    let mut digits = vec![0usize; candidates.len()];
    let mut current = first;
    // odometer over the product of argmax sets, lexicographic order
    loop {
        let mut pos = candidates.len();
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < candidates[pos].len() {
                current[pos] = candidates[pos][digits[pos]];
                break;
            }
            digits[pos] = 0;
            current[pos] = candidates[pos][0];
        }
        let value = view.leader_mixed(x, &current);
        if value > best_value {
            best_value = value;
            best.clone_from(&current);
        }
    }
}

/// Followers' best responses at `x` with ties broken in favor of the leader.
///
/// Each follower restricts to its argmax set (within [`TIE_EPS`]); among the
/// product of those sets the joint action maximizing `u(x, a)` is returned,
/// the lexicographically first on exact ties. Beyond [`JOINT_TIE_CAP`]
/// candidates every follower takes its smallest argmax.
pub fn best_response(x: &MixedStrategy, theta: &TypeProfile, view: &PublicView) -> ActionProfile {
    best_response_toward(x, theta, view, None)
}

/// [`best_response`] where a follower whose `target` action is among its
/// best responses plays it. This is how a leader committing to `x` inside
/// `R(W)` induces the responses `W(theta)` on the region boundary.
pub fn best_response_toward(
    x: &MixedStrategy,
    theta: &TypeProfile,
    view: &PublicView,
    target: Option<&BestResponseMapping>,
) -> ActionProfile {
    let table = ResponseTable::new(view, x);
    ActionProfile(table.respond(view, x, theta.types(), target))
}

/// Hidden joint law of the follower types.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeDistribution {
    /// Probability table over all `K^n` profiles in row-major order.
    General { followers: usize, types: usize, joint: Vec<f64> },
    /// Product of per-follower marginals.
    Independent { marginals: Vec<Vec<f64>> },
}

fn check_probability_table(what: &str, table: &[f64]) -> Result<()> {
    if let Some(p) = table.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!("{what} has entry {p}")));
    }
    let sum: f64 = table.iter().sum();
    if (sum - 1.0).abs() > DIST_EPS {
        return Err(Error::InvalidDistribution(format!("{what} sums to {sum}")));
    }
    Ok(())
}

impl TypeDistribution {
    pub fn general(followers: usize, types: usize, joint: Vec<f64>) -> Result<Self> {
        let count = checked_count(types, followers, PROFILE_CAP)?;
        if joint.len() != count {
            return Err(Error::ShapeMismatch(format!(
                "joint table needs {count} entries, got {}",
                joint.len()
            )));
        }
        check_probability_table("joint distribution", &joint)?;
        Ok(TypeDistribution::General { followers, types, joint })
    }

    pub fn independent(marginals: Vec<Vec<f64>>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::InvalidDistribution("no marginals".into()));
        }
        let types = marginals[0].len();
        if types == 0 || marginals.iter().any(|m| m.len() != types) {
            return Err(Error::ShapeMismatch("marginals must share one nonzero length".into()));
        }
        for (i, m) in marginals.iter().enumerate() {
            check_probability_table(&format!("marginal {i}"), m)?;
        }
        Ok(TypeDistribution::Independent { marginals })
    }

    pub fn followers(&self) -> usize {
        match self {
            TypeDistribution::General { followers, .. } => *followers,
            TypeDistribution::Independent { marginals } => marginals.len(),
        }
    }

    pub fn types(&self) -> usize {
        match self {
            TypeDistribution::General { types, .. } => *types,
            TypeDistribution::Independent { marginals } => marginals[0].len(),
        }
    }

    /// `D(theta)` for the profile with row-major index `index`.
    pub fn prob_index(&self, index: usize) -> f64 {
        match self {
            TypeDistribution::General { joint, .. } => joint[index],
            TypeDistribution::Independent { marginals } => {
                let types = marginals[0].len();
                let mut rest = index;
                let mut p = 1.0;
                for m in marginals.iter().rev() {
                    p *= m[rest % types];
                    rest /= types;
                }
                p
            }
        }
    }

    pub fn prob(&self, theta: &TypeProfile) -> f64 {
        self.prob_index(theta.index(self.types()))
    }

    /// Dense joint table, row-major.
    pub fn to_joint(&self) -> Result<Vec<f64>> {
        match self {
            TypeDistribution::General { joint, .. } => Ok(joint.clone()),
            TypeDistribution::Independent { .. } => {
                let count = checked_count(self.types(), self.followers(), PROFILE_CAP)?;
                Ok((0..count).map(|idx| self.prob_index(idx)).collect())
            }
        }
    }

    /// Per-follower marginal tables.
    pub fn marginals(&self) -> Vec<Vec<f64>> {
        match self {
            TypeDistribution::Independent { marginals } => marginals.clone(),
            TypeDistribution::General { followers, types, joint } => {
                let mut out = vec![vec![0.0; *types]; *followers];
                for (idx, &p) in joint.iter().enumerate() {
                    for (i, k) in decode_profile(idx, *followers, *types).into_iter().enumerate() {
                        out[i][k] += p;
                    }
                }
                out
            }
        }
    }

    /// Precomputed sampler; draws are a deterministic function of the RNG.
    pub fn sampler(&self) -> TypeSampler {
        match self {
            TypeDistribution::General { followers, types, joint } => TypeSampler::Joint {
                followers: *followers,
                types: *types,
                cumulative: cumulative(joint),
            },
            TypeDistribution::Independent { marginals } => TypeSampler::Product {
                cumulative: marginals.iter().map(|m| cumulative(m)).collect(),
            },
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.followers() != other.followers() || self.types() != other.types() {
            return Err(Error::ShapeMismatch(format!(
                "distributions over {}^{} and {}^{} profiles",
                self.types(),
                self.followers(),
                other.types(),
                other.followers()
            )));
        }
        Ok(())
    }
}

fn cumulative(table: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    table
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw(cumulative: &[f64], u: f64) -> usize {
    let scaled = u * cumulative.last().copied().unwrap_or(1.0);
    let idx = cumulative.partition_point(|&c| c <= scaled);
    idx.min(cumulative.len() - 1)
}

#[derive(Debug, Clone)]
pub enum TypeSampler {
    Joint { followers: usize, types: usize, cumulative: Vec<f64> },
    Product { cumulative: Vec<Vec<f64>> },
}

impl TypeSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TypeProfile {
        match self {
            TypeSampler::Joint { followers, types, cumulative } => {
                let idx = draw(cumulative, rng.random());
                TypeProfile::from_index(idx, *followers, *types)
            }
            TypeSampler::Product { cumulative } => {
                TypeProfile(cumulative.iter().map(|c| draw(c, rng.random())).collect())
            }
        }
    }
}

/// A full instance: public utilities plus the hidden type distribution.
#[derive(Debug, Clone)]
pub struct GameInstance {
    view: PublicView,
    distribution: TypeDistribution,
}

impl GameInstance {
    pub fn new(view: PublicView, distribution: TypeDistribution) -> Result<Self> {
        let s = view.sizes();
        if distribution.followers() != s.followers || distribution.types() != s.types {
            return Err(Error::ShapeMismatch(format!(
                "distribution covers {} followers with {} types, instance has {} and {}",
                distribution.followers(),
                distribution.types(),
                s.followers,
                s.types
            )));
        }
        Ok(Self { view, distribution })
    }

    pub fn view(&self) -> &PublicView {
        &self.view
    }

    pub fn distribution(&self) -> &TypeDistribution {
        &self.distribution
    }

    pub fn sizes(&self) -> Sizes {
        self.view.sizes()
    }
}

/// `U_D(x)`: the leader's expected utility against best-responding followers.
pub fn leader_expected_utility(x: &MixedStrategy, dist: &TypeDistribution, view: &PublicView) -> Result<f64> {
    leader_expected_utility_toward(x, None, dist, view)
}

/// `U_D(x)` when ties are resolved toward `target` (see [`best_response_toward`]).
pub fn leader_expected_utility_toward(
    x: &MixedStrategy,
    target: Option<&BestResponseMapping>,
    dist: &TypeDistribution,
    view: &PublicView,
) -> Result<f64> {
    view.check_strategy(x)?;
    let s = view.sizes();
    if dist.followers() != s.followers || dist.types() != s.types {
        return Err(Error::ShapeMismatch("distribution does not match the instance".into()));
    }
    let count = s.type_profiles()?;
    let table = ResponseTable::new(view, x);
    let mut total = 0.0;
    for idx in 0..count {
        let p = dist.prob_index(idx);
        if p == 0.0 {
            continue;
        }
        let theta = decode_profile(idx, s.followers, s.types);
        let actions = table.respond(view, x, &theta, target);
        total += p * view.leader_mixed(x, &actions);
    }
    Ok(total)
}

/// Total variation distance, half the L1 distance over all profiles.
pub fn tv_distance(d1: &TypeDistribution, d2: &TypeDistribution) -> Result<f64> {
    d1.check_same_shape(d2)?;
    let (p, q) = (d1.to_joint()?, d2.to_joint()?);
    Ok(0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Hellinger distance `(1/sqrt 2) * ||sqrt D1 - sqrt D2||_2`.
pub fn hellinger_distance(d1: &TypeDistribution, d2: &TypeDistribution) -> Result<f64> {
    d1.check_same_shape(d2)?;
    let (p, q) = (d1.to_joint()?, d2.to_joint()?);
    let sq: f64 = p.iter().zip(&q).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum();
    Ok((sq / 2.0).sqrt().min(1.0))
}

/// Joint table of the product of `marginals`.
pub fn product_distribution(marginals: &[Vec<f64>]) -> Result<TypeDistribution> {
    let independent = TypeDistribution::independent(marginals.to_vec())?;
    let joint = independent.to_joint()?;
    Ok(TypeDistribution::General {
        followers: independent.followers(),
        types: independent.types(),
        joint,
    })
}
