//! Best-response regions: advantage halfspaces, weak feasibility,
//! classification of strategies, breadth-first region enumeration and
//! vertex enumeration.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, PublicView, ResponseTable};
use crate::harness::rng::random_simplex_point;
use crate::linprog::{lp_feasible_point, Halfspace, FEAS_EPS};

pub use crate::game::BestResponseMapping;

/// Extra random classifications seeding the breadth-first search.
pub const SEED_POINTS: usize = 32;
const SEED_RNG: u64 = 0x5eed_0f_b0b5;
const VERTEX_DEDUP: f64 = 1e-7;
const SINGULAR_PIVOT: f64 = 1e-12;

/// A weakly feasible best-response region.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub mapping: BestResponseMapping,
    pub halfspaces: Vec<Halfspace>,
    pub witness: MixedStrategy,
    /// Normalized max-slack value; `0` marks a boundary-only region.
    pub slack: f64,
}

impl Region {
    pub fn is_full_dimensional(&self) -> bool {
        self.slack > FEAS_EPS
    }

    pub fn contains(&self, x: &MixedStrategy) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x.probs(), FEAS_EPS))
    }
}

/// `d(l) = v_i(l, a, k) - v_i(l, a2, k)`.
pub fn advantage_vector(view: &PublicView, i: usize, k: usize, a: usize, a2: usize) -> Result<Vec<f64>> {
    let s = view.sizes();
    if i >= s.followers {
        return Err(Error::IndexOutOfRange { what: "follower", index: i, limit: s.followers });
    }
    if k >= s.types {
        return Err(Error::IndexOutOfRange { what: "type", index: k, limit: s.types });
    }
    for act in [a, a2] {
        if act >= s.actions {
            return Err(Error::IndexOutOfRange { what: "action", index: act, limit: s.actions });
        }
    }
    if a == a2 {
        return Err(Error::InvalidArgument("advantage of an action over itself".into()));
    }
    Ok(advantage(view, i, k, a, a2))
}

fn advantage(view: &PublicView, i: usize, k: usize, a: usize, a2: usize) -> Vec<f64> {
    (0..view.sizes().leader_actions)
        .map(|l| view.follower(i, l, a, k) - view.follower(i, l, a2, k))
        .collect()
}

fn check_mapping(view: &PublicView, w: &BestResponseMapping) -> Result<()> {
    let s = view.sizes();
    if w.followers() != s.followers || w.types() != s.types {
        return Err(Error::ShapeMismatch(format!(
            "mapping is {}x{}, instance has {} followers and {} types",
            w.followers(),
            w.types(),
            s.followers,
            s.types
        )));
    }
    if let Some(&bad) = w.entries().iter().find(|&&a| a >= s.actions) {
        return Err(Error::IndexOutOfRange { what: "action", index: bad, limit: s.actions });
    }
    Ok(())
}

/// The `n * K * (A - 1)` halfspaces `d(i, k, w_i(k), a')`, `a' != w_i(k)`,
/// ordered by follower, type, then `a'`.
pub fn region_halfspaces(view: &PublicView, w: &BestResponseMapping) -> Result<Vec<Halfspace>> {
    check_mapping(view, w)?;
    let s = view.sizes();
    let mut out = Vec::with_capacity(s.followers * s.types * (s.actions - 1));
    for i in 0..s.followers {
        for k in 0..s.types {
            let a = w.get(i, k);
            for a2 in (0..s.actions).filter(|&b| b != a) {
                out.push(Halfspace::new(advantage(view, i, k, a, a2)));
            }
        }
    }
    Ok(out)
}

/// The region of `w` if it is weakly feasible.
pub fn region_feasible(view: &PublicView, w: &BestResponseMapping) -> Result<Option<Region>> {
    let halfspaces = region_halfspaces(view, w)?;
    let point = lp_feasible_point(view.sizes().leader_actions, &halfspaces)?;
    Ok(point.map(|p| Region { mapping: w.clone(), halfspaces, witness: p.x, slack: p.slack }))
}

/// The mapping whose region contains `x`.
///
/// Every entry is a best response of follower `i` with type `k` at `x`.
/// Among tied actions a single follower takes the one best for the leader;
/// with several followers the comparison averages the leader utility
/// uniformly over the other followers' joint actions, since a mapping entry
/// cannot depend on the others' realized types.
pub fn classify(view: &PublicView, x: &MixedStrategy) -> BestResponseMapping {
    let table = ResponseTable::new(view, x);
    classify_with(view, x, &table)
}

pub(crate) fn classify_with(view: &PublicView, x: &MixedStrategy, table: &ResponseTable) -> BestResponseMapping {
    let s = view.sizes();
    let mut entries = Vec::with_capacity(s.followers * s.types);
    let mut score_cache: Vec<Option<Vec<f64>>> = vec![None; s.followers];
    for i in 0..s.followers {
        for k in 0..s.types {
            let set = table.argmax(i, k);
            if set.len() == 1 {
                entries.push(set[0]);
                continue;
            }
            let scores = score_cache[i].get_or_insert_with(|| tie_scores(view, x, i));
            let mut best = set[0];
            for &a in &set[1..] {
                if scores[a] > scores[best] {
                    best = a;
                }
            }
            entries.push(best);
        }
    }
    BestResponseMapping::new(s.followers, s.types, entries).expect("shape is consistent")
}

/// Leader utility at `x` when follower `i` plays `a`, averaged over the
/// other followers' joint actions.
fn tie_scores(view: &PublicView, x: &MixedStrategy, i: usize) -> Vec<f64> {
    let s = view.sizes();
    if s.followers == 1 {
        return (0..s.actions).map(|a| view.leader_mixed(x, &[a])).collect();
    }
    let others = s.followers - 1;
    let count = (s.actions as u128).pow(others as u32);
    let mut scores = vec![0.0; s.actions];
    let mut profile = vec![0usize; s.followers];
    if count > crate::game::JOINT_TIE_CAP as u128 {
        // too many profiles to average: fall back to the others' first action
        for (a, score) in scores.iter_mut().enumerate() {
            profile[i] = a;
            *score = view.leader_mixed(x, &profile);
        }
        return scores;
    }
    for idx in 0..count as usize {
        let rest = crate::game::decode_profile(idx, others, s.actions);
        let mut r = rest.iter();
        for (j, slot) in profile.iter_mut().enumerate() {
            if j != i {
                *slot = *r.next().expect("length matches");
            }
        }
        for (a, score) in scores.iter_mut().enumerate() {
            profile[i] = a;
            *score += view.leader_mixed(x, &profile);
        }
    }
    scores
}

/// All weakly feasible regions, sorted by mapping.
///
/// Breadth-first search over mappings differing in one entry, started from
/// the classification of the barycenter and of [`SEED_POINTS`] further
/// random strategies drawn from a fixed internal seed. Boundary-only
/// regions are kept (their slack is `0`).
pub fn enumerate_regions(view: &PublicView) -> Result<Vec<Region>> {
    let s = view.sizes();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_RNG);
    let mut seeds = vec![classify(view, &MixedStrategy::uniform(s.leader_actions))];
    for _ in 0..SEED_POINTS {
        let x = random_simplex_point(&mut rng, s.leader_actions);
        seeds.push(classify(view, &x));
    }
    let mut visited: HashSet<BestResponseMapping> = HashSet::new();
    let mut found: Vec<Region> = Vec::new();
    let mut queue: VecDeque<Region> = VecDeque::new();
    for w in seeds {
        if !visited.insert(w.clone()) {
            continue;
        }
        if let Some(r) = region_feasible(view, &w)? {
            queue.push_back(r.clone());
            found.push(r);
        }
        while let Some(region) = queue.pop_front() {
            for i in 0..s.followers {
                for k in 0..s.types {
                    let current = region.mapping.get(i, k);
                    for a in (0..s.actions).filter(|&a| a != current) {
                        let mut next = region.mapping.clone();
                        next.set(i, k, a);
                        if !visited.insert(next.clone()) {
                            continue;
                        }
                        if let Some(r) = region_feasible(view, &next)? {
                            queue.push_back(r.clone());
                            found.push(r);
                        }
                    }
                }
            }
        }
    }
    found.sort_by(|a, b| a.mapping.cmp(&b.mapping));
    Ok(found)
}

/// Position of `w` in a region list sorted by mapping.
pub fn region_index(regions: &[Region], w: &BestResponseMapping) -> Option<usize> {
    regions.binary_search_by(|r| r.mapping.cmp(w)).ok()
}

/// Vertices of the region polytope.
///
/// Every `(L - 1)`-subset of the distinct constraint normals (halfspaces and
/// simplex facets) is solved together with `sum x = 1`; singular systems are
/// skipped and solutions outside the region or within `1e-7` of an earlier
/// vertex are dropped.
pub fn region_vertices(region: &Region) -> Vec<MixedStrategy> {
    let l = region.witness.len();
    let mut pool: Vec<Vec<f64>> = Vec::new();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let bits = |v: &[f64]| v.iter().map(|x| ((x * 1e12).round() as i64) as u64).collect::<Vec<_>>();
    for h in &region.halfspaces {
        if let Some(d) = h.normalized() {
            if seen.insert(bits(&d)) {
                pool.push(d);
            }
        }
    }
    let normals = pool.clone();
    for k in 0..l {
        let mut e = vec![0.0; l];
        e[k] = 1.0;
        if seen.insert(bits(&e)) {
            pool.push(e);
        }
    }
    let feasible = |x: &[f64]| {
        x.iter().all(|&v| v >= -FEAS_EPS)
            && normals.iter().all(|d| d.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() >= -FEAS_EPS)
    };
    let mut vertices: Vec<MixedStrategy> = Vec::new();
    let mut subset: Vec<usize> = (0..l - 1).collect();
    if pool.len() < l - 1 {
        return vertices;
    }
    loop {
        let mut matrix: Vec<Vec<f64>> = subset.iter().map(|&j| pool[j].clone()).collect();
        let mut rhs = vec![0.0; l - 1];
        matrix.push(vec![1.0; l]);
        rhs.push(1.0);
        if let Some(x) = solve_square(matrix, rhs) {
            if feasible(&x) {
                let x = MixedStrategy::from_solver(x);
                let dup = vertices.iter().any(|v| {
                    v.probs().iter().zip(x.probs()).all(|(a, b)| (a - b).abs() <= VERTEX_DEDUP)
                });
                if !dup {
                    vertices.push(x);
                }
            }
        }
        if !next_subset(&mut subset, pool.len()) {
            break;
        }
    }
    vertices
}

fn next_subset(subset: &mut [usize], n: usize) -> bool {
    let r = subset.len();
    if r == 0 {
        return false;
    }
    let mut i = r;
    while i > 0 {
        i -= 1;
        if subset[i] < n - r + i {
            subset[i] += 1;
            for j in i + 1..r {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[pivot][col].abs() < SINGULAR_PIVOT {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[row][j] -= f * a[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|j| a[row][j] * x[j]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}
