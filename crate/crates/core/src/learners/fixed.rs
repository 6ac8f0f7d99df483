use super::{FeedbackMode, Feedback, Learner, Play};
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, PublicView};

/// Plays one strategy forever; a regret baseline.
#[derive(Debug, Clone)]
pub struct FixedLearner {
    strategy: MixedStrategy,
}

impl FixedLearner {
    pub fn new(strategy: MixedStrategy) -> Self {
        Self { strategy }
    }
}

impl Learner for FixedLearner {
    fn name(&self) -> &'static str {
        "fixed"
    }

    fn accepts(&self, _mode: FeedbackMode) -> bool {
        true
    }

    fn reset(&mut self, view: &PublicView, _horizon: usize) -> Result<()> {
        let l = view.sizes().leader_actions;
        if self.strategy.len() != l {
            return Err(Error::ShapeMismatch(format!(
                "fixed strategy has {} entries, leader has {l} actions",
                self.strategy.len()
            )));
        }
        Ok(())
    }

    fn choose(&self) -> Play {
        Play::untargeted(self.strategy.clone())
    }

    fn observe(&mut self, _feedback: &Feedback) -> Result<()> {
        Ok(())
    }
}
