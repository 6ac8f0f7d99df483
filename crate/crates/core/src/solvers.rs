//! Offline equilibrium computation: per-region linear programs, the maximum
//! over regions, the empirical optimum over observed profiles, and the joint
//! (mapping, action) reformulation used as an independent cross-check.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{checked_count, decode_profile, MixedStrategy, PublicView, TypeDistribution, TypeProfile};
use crate::geometry::{enumerate_regions, region_halfspaces, region_vertices, BestResponseMapping, Region};
use crate::linprog::{lp_maximize, solve_standard, LpResult, StandardLp, StandardOutcome};

/// Variable cap of the joint reformulation, `A^(nK) * L`.
pub const REFORM_VARIABLE_CAP: usize = 100_000;
const PARALLEL_REGIONS: usize = 64;
const REGION_TIE: f64 = 1e-12;
const WEIGHT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub x_star: MixedStrategy,
    /// Leader utility of `x_star` when followers respond with `mapping`.
    pub value: f64,
    pub mapping: BestResponseMapping,
}

/// A sparse distribution over type profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedProfiles {
    entries: Vec<(TypeProfile, f64)>,
}

impl WeightedProfiles {
    pub fn new(entries: Vec<(TypeProfile, f64)>) -> Result<Self> {
        if entries.iter().any(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("negative or non-finite weight".into()));
        }
        let sum: f64 = entries.iter().map(|(_, w)| w).sum();
        if (sum - 1.0).abs() > WEIGHT_EPS {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self { entries })
    }

    /// Uniform weights on `samples`, duplicates counted by multiplicity.
    pub fn from_samples(samples: &[TypeProfile]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        let mut counts: BTreeMap<&TypeProfile, usize> = BTreeMap::new();
        for s in samples {
            *counts.entry(s).or_default() += 1;
        }
        Ok(Self::from_counts(counts.into_iter().map(|(p, c)| (p.clone(), c)), samples.len()))
    }

    /// Empirical weights from `(profile, count)` pairs totalling `total`.
    pub fn from_counts(counts: impl IntoIterator<Item = (TypeProfile, usize)>, total: usize) -> Self {
        let t = total as f64;
        Self { entries: counts.into_iter().map(|(p, c)| (p, c as f64 / t)).collect() }
    }

    /// Every profile with positive probability under `dist`.
    pub fn from_distribution(dist: &TypeDistribution) -> Result<Self> {
        let (n, k) = (dist.followers(), dist.types());
        let count = checked_count(k, n, crate::game::PROFILE_CAP)?;
        let entries = (0..count)
            .filter_map(|idx| {
                let p = dist.prob_index(idx);
                (p > 0.0).then(|| (TypeProfile::from_index(idx, n, k), p))
            })
            .collect();
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(TypeProfile, f64)] {
        &self.entries
    }
}

/// `c(l) = sum_theta p(theta) u(l, W(theta))`.
pub fn region_objective(view: &PublicView, w: &BestResponseMapping, weights: &WeightedProfiles) -> Vec<f64> {
    let mut c = vec![0.0; view.sizes().leader_actions];
    for (theta, p) in weights.entries() {
        let column = view.leader_column(&w.joint_action(theta.types()));
        for (ci, u) in c.iter_mut().zip(column) {
            *ci += p * u;
        }
    }
    c
}

pub fn optimal_in_region(view: &PublicView, w: &BestResponseMapping, weights: &WeightedProfiles) -> Result<LpResult> {
    let halfspaces = region_halfspaces(view, w)?;
    lp_maximize(&region_objective(view, w, weights), &halfspaces)
}

fn optimal_in(view: &PublicView, region: &Region, weights: &WeightedProfiles) -> Result<Option<(MixedStrategy, f64)>> {
    let r = lp_maximize(&region_objective(view, &region.mapping, weights), &region.halfspaces)?;
    Ok(r.x.map(|x| (x, r.value)))
}

/// Best per-region optimum over `regions` (assumed sorted by mapping); the
/// earliest region wins unless a later one is better by more than `1e-12`.
pub fn optimal_over_regions(view: &PublicView, regions: &[Region], weights: &WeightedProfiles) -> Result<Equilibrium> {
    let solved: Vec<Result<Option<(MixedStrategy, f64)>>> = if regions.len() >= PARALLEL_REGIONS {
        regions.par_iter().map(|r| optimal_in(view, r, weights)).collect()
    } else {
        regions.iter().map(|r| optimal_in(view, r, weights)).collect()
    };
    let mut best: Option<Equilibrium> = None;
    for (region, res) in regions.iter().zip(solved) {
        let Some((x, value)) = res? else { continue };
        if best.as_ref().is_none_or(|b| value > b.value + REGION_TIE) {
            best = Some(Equilibrium { x_star: x, value, mapping: region.mapping.clone() });
        }
    }
    best.ok_or(Error::Infeasible)
}

/// Regions paired with their vertex sets, for repeated optimization under
/// changing weights: a linear objective over a polytope peaks at a vertex,
/// so each region optimum is a scan instead of a linear program.
#[derive(Debug, Clone)]
pub struct RegionPolytopes {
    regions: Vec<Region>,
    vertices: Vec<Vec<MixedStrategy>>,
}

impl RegionPolytopes {
    pub fn new(regions: Vec<Region>) -> Self {
        let vertices = regions.iter().map(region_vertices).collect();
        Self { regions, vertices }
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn vertices(&self, r: usize) -> &[MixedStrategy] {
        &self.vertices[r]
    }

    /// Same value as [`optimal_over_regions`]; the first best vertex of the
    /// first best region is returned.
    pub fn optimum(&self, view: &PublicView, weights: &WeightedProfiles) -> Result<Equilibrium> {
        let mut best: Option<Equilibrium> = None;
        for (region, vertices) in self.regions.iter().zip(&self.vertices) {
            let c = region_objective(view, &region.mapping, weights);
            let candidate = if vertices.is_empty() {
                optimal_in(view, region, weights)?
            } else {
                let mut top: Option<(usize, f64)> = None;
                for (i, v) in vertices.iter().enumerate() {
                    let value = v.dot(&c);
                    if top.is_none_or(|(_, t)| value > t + REGION_TIE) {
                        top = Some((i, value));
                    }
                }
                top.map(|(i, value)| (vertices[i].clone(), value))
            };
            let Some((x, value)) = candidate else { continue };
            if best.as_ref().is_none_or(|b| value > b.value + REGION_TIE) {
                best = Some(Equilibrium { x_star: x, value, mapping: region.mapping.clone() });
            }
        }
        best.ok_or(Error::Infeasible)
    }
}

/// The Stackelberg equilibrium under `dist`: the best region optimum.
pub fn offline_optimal(view: &PublicView, dist: &TypeDistribution) -> Result<Equilibrium> {
    let weights = WeightedProfiles::from_distribution(dist)?;
    let regions = enumerate_regions(view)?;
    optimal_over_regions(view, &regions, &weights)
}

/// [`offline_optimal`] under the empirical distribution of `samples`.
pub fn empirical_optimal(view: &PublicView, samples: &[TypeProfile]) -> Result<Equilibrium> {
    let weights = WeightedProfiles::from_samples(samples)?;
    let regions = enumerate_regions(view)?;
    optimal_over_regions(view, &regions, &weights)
}

/// Result of the joint reformulation together with the objective after each
/// mass-transfer step (first entry: the raw LP optimum).
#[derive(Debug, Clone)]
pub struct ReformSolution {
    pub equilibrium: Equilibrium,
    pub transfer_objectives: Vec<f64>,
    pub nonzero_rows: usize,
}

/// Equilibrium via the linear program over joint variables `x(W, l)`.
pub fn lp_reform_optimal(view: &PublicView, dist: &TypeDistribution) -> Result<Equilibrium> {
    lp_reform_solve(view, dist).map(|s| s.equilibrium)
}

/// Solves the joint LP over `x(W, l)` (variables ordered by mapping
/// row-major, then `l`) with incentive constraints for every mapping, then
/// merges all nonzero rows into the one with the best conditional utility
/// until a single row remains.
pub fn lp_reform_solve(view: &PublicView, dist: &TypeDistribution) -> Result<ReformSolution> {
    let s = view.sizes();
    let cells = s.followers * s.types;
    let mappings = (s.actions as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
    let vars = mappings.saturating_mul(s.leader_actions as u128);
    if vars > REFORM_VARIABLE_CAP as u128 {
        return Err(Error::VariableCapExceeded { count: vars, cap: REFORM_VARIABLE_CAP });
    }
    let (mappings, l_count) = (mappings as usize, s.leader_actions);
    let vars = mappings * l_count;
    let weights = WeightedProfiles::from_distribution(dist)?;

    let all: Vec<BestResponseMapping> = (0..mappings)
        .map(|m| BestResponseMapping::new(s.followers, s.types, decode_profile(m, cells, s.actions)))
        .collect::<Result<_>>()?;
    let mut lp = StandardLp { objective: vec![0.0; vars], ..Default::default() };
    let mut row_objectives = Vec::with_capacity(mappings);
    for (m, w) in all.iter().enumerate() {
        let c = region_objective(view, w, &weights);
        lp.objective[m * l_count..(m + 1) * l_count].copy_from_slice(&c);
        row_objectives.push(c);
        for h in region_halfspaces(view, w)? {
            let Some(d) = h.normalized() else { continue };
            let mut row = vec![0.0; vars];
            for (l, dl) in d.iter().enumerate() {
                row[m * l_count + l] = -dl;
            }
            lp.le.push((row, 0.0));
        }
    }
    lp.eq.push((vec![1.0; vars], 1.0));
    let StandardOutcome::Optimal { x, value } = solve_standard(&lp) else {
        return Err(Error::Infeasible);
    };

    let rows: Vec<&[f64]> = x.chunks(l_count).collect();
    let mass: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    let live: Vec<usize> = (0..mappings).filter(|&m| mass[m] > 1e-12).collect();
    let conditional = |m: usize| -> f64 {
        rows[m].iter().zip(&row_objectives[m]).map(|(a, c)| a * c).sum::<f64>() / mass[m]
    };
    let mut keep = live[0];
    for &m in &live[1..] {
        if conditional(m) > conditional(keep) + REGION_TIE {
            keep = m;
        }
    }
    // transfer rows into `keep` one at a time, tracking the objective
    let keep_u = conditional(keep);
    let mut total_mass = mass[keep];
    let mut objective = value;
    let mut transfer_objectives = vec![objective];
    for &m in live.iter().filter(|&&m| m != keep) {
        objective += mass[m] * (keep_u - conditional(m));
        total_mass += mass[m];
        transfer_objectives.push(objective);
    }
    let scale = total_mass / mass[keep];
    let row: Vec<f64> = rows[keep].iter().map(|v| v * scale).collect();
    let x_star = MixedStrategy::from_solver(row);
    let value = x_star.dot(&row_objectives[keep]);
    Ok(ReformSolution {
        equilibrium: Equilibrium { x_star, value, mapping: all[keep].clone() },
        transfer_objectives,
        nonzero_rows: live.len(),
    })
}
