//! Online learners behind one contract: `reset`, then alternating
//! `choose` / `observe` for `T` rounds. Learners only ever see the
//! [`PublicView`] and the per-round [`Feedback`].

mod fixed;
mod linbandit;
mod type_feedback;
mod ucb;

use std::fmt;
use std::str::FromStr;

pub use fixed::FixedLearner;
pub use linbandit::{phi_map, region_phi, LinBandit, OfulState, OFUL_CAP};
pub use type_feedback::{TypeFeedbackGeneral, TypeFeedbackIndependent};
pub use ucb::{ucb_bonus, Ucb, UcbRegionState};

use crate::error::{Error, Result};
use crate::game::{ActionProfile, BestResponseMapping, MixedStrategy, PublicView, TypeProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackMode {
    Type,
    Action,
}

impl FeedbackMode {
    pub fn name(self) -> &'static str {
        match self {
            FeedbackMode::Type => "type",
            FeedbackMode::Action => "action",
        }
    }
}

impl FromStr for FeedbackMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "type" => Ok(FeedbackMode::Type),
            "action" => Ok(FeedbackMode::Action),
            other => Err(Error::InvalidArgument(format!("unknown feedback mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feedback {
    Type(TypeProfile),
    Action { actions: ActionProfile, leader_action: usize, realized_utility: f64 },
}

impl Feedback {
    pub fn mode(&self) -> FeedbackMode {
        match self {
            Feedback::Type(_) => FeedbackMode::Type,
            Feedback::Action { .. } => FeedbackMode::Action,
        }
    }
}

/// A round's commitment: the strategy, and optionally the region it is
/// meant to induce. Followers that are indifferent on a region boundary
/// respond as `target` prescribes.
#[derive(Debug, Clone, PartialEq)]
pub struct Play {
    pub strategy: MixedStrategy,
    pub target: Option<BestResponseMapping>,
}

impl Play {
    pub fn untargeted(strategy: MixedStrategy) -> Self {
        Self { strategy, target: None }
    }
}

pub trait Learner: Send {
    fn name(&self) -> &'static str;

    /// Feedback modes this learner can consume.
    fn accepts(&self, mode: FeedbackMode) -> bool;

    fn reset(&mut self, view: &PublicView, horizon: usize) -> Result<()>;

    /// The current round's play. Never mutates state.
    fn choose(&self) -> Play;

    fn observe(&mut self, feedback: &Feedback) -> Result<()>;
}

pub(crate) fn wrong_feedback(learner: &'static str, got: &Feedback) -> Error {
    Error::WrongFeedback { learner, got: got.mode().name() }
}

/// A learner named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum LearnerSpec {
    TypeFeedbackGeneral,
    TypeFeedbackIndependent,
    Ucb,
    LinBandit,
    /// Always plays the given probabilities.
    Fixed(Vec<f64>),
}

impl LearnerSpec {
    pub fn build(&self) -> Result<Box<dyn Learner>> {
        Ok(match self {
            LearnerSpec::TypeFeedbackGeneral => Box::new(TypeFeedbackGeneral::default()),
            LearnerSpec::TypeFeedbackIndependent => Box::new(TypeFeedbackIndependent::default()),
            LearnerSpec::Ucb => Box::new(Ucb::default()),
            LearnerSpec::LinBandit => Box::new(LinBandit::default()),
            LearnerSpec::Fixed(p) => Box::new(FixedLearner::new(MixedStrategy::new(p.clone())?)),
        })
    }
}

impl FromStr for LearnerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tf-general" => Ok(LearnerSpec::TypeFeedbackGeneral),
            "tf-independent" => Ok(LearnerSpec::TypeFeedbackIndependent),
            "ucb" => Ok(LearnerSpec::Ucb),
            "linbandit" => Ok(LearnerSpec::LinBandit),
            other => {
                let probs = other
                    .strip_prefix("fixed:")
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown learner {other:?}")))?;
                let probs: std::result::Result<Vec<f64>, _> = probs.split(',').map(|p| p.trim().parse()).collect();
                let probs = probs.map_err(|_| Error::InvalidArgument(format!("bad fixed strategy {other:?}")))?;
                MixedStrategy::new(probs.clone())?;
                Ok(LearnerSpec::Fixed(probs))
            }
        }
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerSpec::TypeFeedbackGeneral => f.write_str("tf-general"),
            LearnerSpec::TypeFeedbackIndependent => f.write_str("tf-independent"),
            LearnerSpec::Ucb => f.write_str("ucb"),
            LearnerSpec::LinBandit => f.write_str("linbandit"),
            LearnerSpec::Fixed(p) => {
                let parts: Vec<String> = p.iter().map(f64::to_string).collect();
                write!(f, "fixed:{}", parts.join(","))
            }
        }
    }
}
