use std::collections::BTreeMap;

use super::{wrong_feedback, Feedback, FeedbackMode, Learner, Play};
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, PublicView};
use crate::geometry::{enumerate_regions, Region};
use crate::linprog::lp_maximize;

/// Confidence bonus `sqrt(4 (L + 1) ln(3T) / N)`.
pub fn ucb_bonus(visits: usize, horizon: usize, leader_actions: usize) -> f64 {
    (4.0 * (leader_actions as f64 + 1.0) * (3.0 * horizon as f64).ln() / visits as f64).sqrt()
}

/// Statistics of one region: visits, observed joint actions and the
/// current empirical optimum.
#[derive(Debug, Clone, Default)]
pub struct UcbRegionState {
    pub visits: usize,
    /// Joint action profile index -> count.
    pub action_counts: BTreeMap<usize, usize>,
    /// Running `sum_s u(., a^s)`.
    utility_sums: Vec<f64>,
    pub empirical: Option<(MixedStrategy, f64)>,
}

/// Optimism over best-response regions with action feedback.
#[derive(Debug, Clone, Default)]
pub struct Ucb {
    view: Option<PublicView>,
    regions: Vec<Region>,
    states: Vec<UcbRegionState>,
    horizon: usize,
    round: usize,
}

impl Ucb {
    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn states(&self) -> &[UcbRegionState] {
        &self.states
    }

    /// `u_hat + bonus` of region `r`, once it has been visited.
    pub fn index(&self, r: usize) -> Option<f64> {
        let s = &self.states[r];
        let (_, value) = s.empirical.as_ref()?;
        let l = self.view.as_ref()?.sizes().leader_actions;
        Some(value + ucb_bonus(s.visits, self.horizon, l))
    }

    /// Region played in the current round.
    pub fn current_region(&self) -> usize {
        if self.round < self.regions.len() {
            return self.round;
        }
        let mut best = 0;
        let mut best_index = f64::NEG_INFINITY;
        for r in 0..self.regions.len() {
            if let Some(v) = self.index(r) {
                if v > best_index {
                    best_index = v;
                    best = r;
                }
            }
        }
        best
    }
}

impl Learner for Ucb {
    fn name(&self) -> &'static str {
        "ucb"
    }

    fn accepts(&self, mode: FeedbackMode) -> bool {
        mode == FeedbackMode::Action
    }

    fn reset(&mut self, view: &PublicView, horizon: usize) -> Result<()> {
        let regions = enumerate_regions(view)?;
        if horizon < regions.len() {
            return Err(Error::HorizonTooSmall { horizon, regions: regions.len() });
        }
        let l = view.sizes().leader_actions;
        self.states = (0..regions.len())
            .map(|_| UcbRegionState { utility_sums: vec![0.0; l], ..Default::default() })
            .collect();
        self.regions = regions;
        self.view = Some(view.clone());
        self.horizon = horizon;
        self.round = 0;
        Ok(())
    }

    fn choose(&self) -> Play {
        let r = self.current_region();
        let region = &self.regions[r];
        let strategy = if self.round < self.regions.len() {
            region.witness.clone()
        } else {
            self.states[r].empirical.as_ref().expect("visited").0.clone()
        };
        Play { strategy, target: Some(region.mapping.clone()) }
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        let Feedback::Action { actions, .. } = feedback else {
            return Err(wrong_feedback(self.name(), feedback));
        };
        let view = self.view.as_ref().ok_or_else(|| Error::InvalidArgument("learner used before reset".into()))?;
        let r = self.current_region();
        let state = &mut self.states[r];
        state.visits += 1;
        *state.action_counts.entry(actions.index(view.sizes().actions)).or_default() += 1;
        for (sum, u) in state.utility_sums.iter_mut().zip(view.leader_column(actions.actions())) {
            *sum += u;
        }
        let n = state.visits as f64;
        let c: Vec<f64> = state.utility_sums.iter().map(|s| s / n).collect();
        let result = lp_maximize(&c, &self.regions[r].halfspaces)?;
        let x = result.x.ok_or(Error::Infeasible)?;
        state.empirical = Some((x, result.value));
        self.round += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bonus_value_and_monotonicity() {
        assert!((ucb_bonus(4, 100, 2) - (12.0 * 300f64.ln() / 4.0).sqrt()).abs() < 1e-12);
        assert!((ucb_bonus(4, 100, 2) - 4.1366).abs() < 1e-4);
        for n in 1..200 {
            assert!(ucb_bonus(n + 1, 100, 2) < ucb_bonus(n, 100, 2));
        }
    }
}
