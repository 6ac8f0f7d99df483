//! JSON instance files.
//!
//! ```json
//! {"n": 1, "L": 2, "A": 2, "K": 2,
//!  "leader_utility": [...],          // profile-major, l fastest
//!  "follower_utilities": [[[[...]]]], // [i][l][a][k]
//!  "distribution": {"kind": "general", "joint": [...]}}
//! ```
//!
//! `distribution` may instead be `{"kind": "independent", "marginals": [[...], ...]}`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use stackelberg_core::game::{
    checked_count, decode_profile, GameInstance, LeaderUtility, PublicView, Sizes, TypeDistribution, DENSE_LEADER_CAP,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionFile {
    General { joint: Vec<f64> },
    Independent { marginals: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub leader_utility: Vec<f64>,
    pub follower_utilities: Vec<Vec<Vec<Vec<f64>>>>,
    pub distribution: DistributionFile,
}

impl InstanceFile {
    pub fn from_instance(g: &GameInstance) -> Result<Self> {
        let s = g.sizes();
        let view = g.view();
        let leader_utility = match view.leader_table() {
            Some(t) => t.to_vec(),
            None => {
                let profiles = checked_count(s.actions, s.followers, DENSE_LEADER_CAP)
                    .context("leader utility is too large to write out densely")?;
                let mut t = Vec::with_capacity(profiles * s.leader_actions);
                for idx in 0..profiles {
                    let a = decode_profile(idx, s.followers, s.actions);
                    t.extend(view.leader_column(&a));
                }
                t
            }
        };
        let follower_utilities = (0..s.followers)
            .map(|i| {
                (0..s.leader_actions)
                    .map(|l| (0..s.actions).map(|a| (0..s.types).map(|k| view.follower(i, l, a, k)).collect()).collect())
                    .collect()
            })
            .collect();
        let distribution = match g.distribution() {
            TypeDistribution::General { joint, .. } => DistributionFile::General { joint: joint.clone() },
            TypeDistribution::Independent { marginals } => DistributionFile::Independent { marginals: marginals.clone() },
        };
        Ok(Self { n: s.followers, l: s.leader_actions, a: s.actions, k: s.types, leader_utility, follower_utilities, distribution })
    }

    pub fn to_instance(&self) -> Result<GameInstance> {
        let sizes = Sizes::new(self.n, self.l, self.a, self.k)?;
        if self.follower_utilities.len() != self.n {
            bail!("follower_utilities has {} followers, n = {}", self.follower_utilities.len(), self.n);
        }
        let mut follower = Vec::with_capacity(sizes.follower_table_len());
        for (i, per_l) in self.follower_utilities.iter().enumerate() {
            if per_l.len() != self.l {
                bail!("follower {i}: expected {} leader actions, got {}", self.l, per_l.len());
            }
            for (l, per_a) in per_l.iter().enumerate() {
                if per_a.len() != self.a {
                    bail!("follower {i}, leader action {l}: expected {} actions, got {}", self.a, per_a.len());
                }
                for (a, per_k) in per_a.iter().enumerate() {
                    if per_k.len() != self.k {
                        bail!("follower {i}, leader action {l}, action {a}: expected {} types, got {}", self.k, per_k.len());
                    }
                    follower.extend_from_slice(per_k);
                }
            }
        }
        let view = PublicView::new(sizes, LeaderUtility::Dense(self.leader_utility.clone()), follower)?;
        let dist = match &self.distribution {
            DistributionFile::General { joint } => TypeDistribution::general(self.n, self.k, joint.clone())?,
            DistributionFile::Independent { marginals } => {
                if marginals.len() != self.n || marginals.iter().any(|m| m.len() != self.k) {
                    bail!("marginals must be {} lists of {} probabilities", self.n, self.k);
                }
                TypeDistribution::independent(marginals.clone())?
            }
        };
        Ok(GameInstance::new(view, dist)?)
    }

    pub fn load(path: &Path) -> Result<GameInstance> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let file: InstanceFile =
            serde_json::from_str(&text).with_context(|| format!("{} is not a valid instance file", path.display()))?;
        file.to_instance().with_context(|| format!("invalid instance in {}", path.display()))
    }

    pub fn save(g: &GameInstance, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&Self::from_instance(g)?)?;
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}
