use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{leader_expected_utility_toward, ActionProfile, GameInstance, MixedStrategy, ResponseTable};
use crate::geometry::{classify_with, enumerate_regions, region_index, BestResponseMapping, Region};
use crate::harness::rng::{stream, LEADER_ACTION, TYPES};
use crate::learners::{Feedback, FeedbackMode, Learner, LearnerSpec, Play};
use crate::solvers::{offline_optimal, Equilibrium};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub learner: LearnerSpec,
    pub feedback: FeedbackMode,
    pub horizon: usize,
    pub seed: u64,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based.
    pub round: usize,
    pub strategy: MixedStrategy,
    /// Index of the induced region in the sorted region list.
    pub region_index: Option<usize>,
    pub expected_regret: f64,
    pub realized_utility: f64,
    pub cumulative_regret: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub replication: usize,
    pub rounds: Vec<RoundRecord>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.cumulative_regret)
    }
}

/// Precomputed per-instance context shared by all replications.
pub struct Experiment<'a> {
    instance: &'a GameInstance,
    optimum: Equilibrium,
    regions: Vec<Region>,
}

impl<'a> Experiment<'a> {
    pub fn new(instance: &'a GameInstance) -> Result<Self> {
        let optimum = offline_optimal(instance.view(), instance.distribution())?;
        let regions = enumerate_regions(instance.view())?;
        Ok(Self { instance, optimum, regions })
    }

    pub fn optimum(&self) -> &Equilibrium {
        &self.optimum
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Exact expected utility of a play.
    pub fn play_value(&self, play: &Play) -> Result<f64> {
        leader_expected_utility_toward(
            &play.strategy,
            play.target.as_ref(),
            self.instance.distribution(),
            self.instance.view(),
        )
    }

    fn induced_region(&self, play: &Play, table: &ResponseTable) -> Option<usize> {
        let w: BestResponseMapping = match &play.target {
            Some(w) => w.clone(),
            None => classify_with(self.instance.view(), &play.strategy, table),
        };
        region_index(&self.regions, &w)
    }

    /// Runs one replication with a fresh learner.
    pub fn run_replication(&self, cfg: &ExperimentConfig, replication: usize) -> Result<RegretTrace> {
        let mut learner = cfg.learner.build()?;
        self.run_with(learner.as_mut(), cfg, replication)
    }

    /// Runs one replication with a caller-supplied learner.
    pub fn run_with(&self, learner: &mut dyn Learner, cfg: &ExperimentConfig, replication: usize) -> Result<RegretTrace> {
        if !learner.accepts(cfg.feedback) {
            return Err(Error::WrongFeedback { learner: learner.name(), got: cfg.feedback.name() });
        }
        let view = self.instance.view();
        learner.reset(view, cfg.horizon)?;
        let sampler = self.instance.distribution().sampler();
        let mut type_rng = stream(cfg.seed, replication as u64, TYPES);
        let mut action_rng = stream(cfg.seed, replication as u64, LEADER_ACTION);
        let mut rounds = Vec::with_capacity(cfg.horizon);
        let mut cumulative = 0.0;
        let mut cached: Option<(Play, f64, ResponseTable, Option<usize>)> = None;
        for t in 1..=cfg.horizon {
            let play = learner.choose();
            if cached.as_ref().is_none_or(|(p, ..)| *p != play) {
                let value = self.play_value(&play)?;
                let table = ResponseTable::new(view, &play.strategy);
                let region = self.induced_region(&play, &table);
                cached = Some((play.clone(), value, table, region));
            }
            let (_, value, table, region) = cached.as_ref().expect("just filled");
            let theta = sampler.sample(&mut type_rng);
            let actions = table.respond(view, &play.strategy, theta.types(), play.target.as_ref());
            let leader_action = play.strategy.sample(&mut action_rng);
            let realized = view.leader(leader_action, &actions);
            let regret = self.optimum.value - value;
            cumulative += regret;
            rounds.push(RoundRecord {
                round: t,
                strategy: play.strategy.clone(),
                region_index: *region,
                expected_regret: regret,
                realized_utility: realized,
                cumulative_regret: cumulative,
            });
            let feedback = match cfg.feedback {
                FeedbackMode::Type => Feedback::Type(theta),
                FeedbackMode::Action => Feedback::Action {
                    actions: ActionProfile::new(actions, view.sizes().actions)?,
                    leader_action,
                    realized_utility: realized,
                },
            };
            learner.observe(&feedback)?;
        }
        Ok(RegretTrace { replication, rounds })
    }
}

/// Runs `cfg.replications` independent replications in parallel.
pub fn run_experiment(instance: &GameInstance, cfg: &ExperimentConfig) -> Result<Vec<RegretTrace>> {
    if cfg.horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    if cfg.replications == 0 {
        return Err(Error::InvalidArgument("need at least one replication".into()));
    }
    let probe = cfg.learner.build()?;
    if !probe.accepts(cfg.feedback) {
        return Err(Error::WrongFeedback { learner: probe.name(), got: cfg.feedback.name() });
    }
    let experiment = Experiment::new(instance)?;
    (0..cfg.replications)
        .into_par_iter()
        .map(|rep| experiment.run_replication(cfg, rep))
        .collect()
}

/// Per-round mean and standard deviation of a column across traces.
pub fn round_statistics(traces: &[RegretTrace], column: impl Fn(&RoundRecord) -> f64) -> Vec<(f64, f64)> {
    let horizon = traces.iter().map(|t| t.rounds.len()).min().unwrap_or(0);
    let n = traces.len() as f64;
    (0..horizon)
        .map(|r| {
            let values: Vec<f64> = traces.iter().map(|t| column(&t.rounds[r])).collect();
            let mean = values.iter().sum::<f64>() / n;
            let var = if traces.len() > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            (mean, var.sqrt())
        })
        .collect()
}
