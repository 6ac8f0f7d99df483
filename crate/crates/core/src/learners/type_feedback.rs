use std::collections::BTreeMap;

use super::{wrong_feedback, Feedback, FeedbackMode, Learner, Play};
use crate::error::{Error, Result};
use crate::game::{product_distribution, MixedStrategy, PublicView, TypeProfile};
use crate::geometry::enumerate_regions;
use crate::solvers::{RegionPolytopes, WeightedProfiles};

fn not_reset() -> Error {
    Error::InvalidArgument("learner used before reset".into())
}

/// Plays the empirical optimum of all observed type profiles.
#[derive(Debug, Clone, Default)]
pub struct TypeFeedbackGeneral {
    view: Option<PublicView>,
    regions: Option<RegionPolytopes>,
    counts: BTreeMap<TypeProfile, usize>,
    rounds: usize,
    next: Option<Play>,
}

impl TypeFeedbackGeneral {
    pub fn observed(&self) -> usize {
        self.rounds
    }
}

impl Learner for TypeFeedbackGeneral {
    fn name(&self) -> &'static str {
        "tf-general"
    }

    fn accepts(&self, mode: FeedbackMode) -> bool {
        mode == FeedbackMode::Type
    }

    fn reset(&mut self, view: &PublicView, _horizon: usize) -> Result<()> {
        self.regions = Some(RegionPolytopes::new(enumerate_regions(view)?));
        self.view = Some(view.clone());
        self.counts.clear();
        self.rounds = 0;
        self.next = Some(Play::untargeted(MixedStrategy::uniform(view.sizes().leader_actions)));
        Ok(())
    }

    fn choose(&self) -> Play {
        self.next.clone().expect("choose called before reset")
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        let Feedback::Type(theta) = feedback else {
            return Err(wrong_feedback(self.name(), feedback));
        };
        let view = self.view.as_ref().ok_or_else(not_reset)?;
        *self.counts.entry(theta.clone()).or_default() += 1;
        self.rounds += 1;
        let weights = WeightedProfiles::from_counts(self.counts.iter().map(|(p, &c)| (p.clone(), c)), self.rounds);
        let eq = self.regions.as_ref().ok_or_else(not_reset)?.optimum(view, &weights)?;
        self.next = Some(Play { strategy: eq.x_star, target: Some(eq.mapping) });
        Ok(())
    }
}

/// Plays the optimum under the product of empirical type marginals.
#[derive(Debug, Clone, Default)]
pub struct TypeFeedbackIndependent {
    view: Option<PublicView>,
    regions: Option<RegionPolytopes>,
    counts: Vec<Vec<usize>>,
    rounds: usize,
    next: Option<Play>,
}

impl TypeFeedbackIndependent {
    /// Empirical marginals of the observations so far.
    pub fn marginals(&self) -> Vec<Vec<f64>> {
        let t = self.rounds.max(1) as f64;
        self.counts.iter().map(|c| c.iter().map(|&x| x as f64 / t).collect()).collect()
    }
}

impl Learner for TypeFeedbackIndependent {
    fn name(&self) -> &'static str {
        "tf-independent"
    }

    fn accepts(&self, mode: FeedbackMode) -> bool {
        mode == FeedbackMode::Type
    }

    fn reset(&mut self, view: &PublicView, _horizon: usize) -> Result<()> {
        let s = view.sizes();
        s.type_profiles()?;
        self.regions = Some(RegionPolytopes::new(enumerate_regions(view)?));
        self.view = Some(view.clone());
        self.counts = vec![vec![0; s.types]; s.followers];
        self.rounds = 0;
        self.next = Some(Play::untargeted(MixedStrategy::uniform(s.leader_actions)));
        Ok(())
    }

    fn choose(&self) -> Play {
        self.next.clone().expect("choose called before reset")
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        let Feedback::Type(theta) = feedback else {
            return Err(wrong_feedback(self.name(), feedback));
        };
        let view = self.view.as_ref().ok_or_else(not_reset)?;
        for (i, &k) in theta.types().iter().enumerate() {
            self.counts[i][k] += 1;
        }
        self.rounds += 1;
        let joint = product_distribution(&self.marginals())?;
        let weights = WeightedProfiles::from_distribution(&joint)?;
        let eq = self.regions.as_ref().ok_or_else(not_reset)?.optimum(view, &weights)?;
        self.next = Some(Play { strategy: eq.x_star, target: Some(eq.mapping) });
        Ok(())
    }
}
