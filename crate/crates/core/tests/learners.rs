mod common;

use common::{g1, point, random, rng, x};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use stackelberg_core::game::*;
use stackelberg_core::geometry::enumerate_regions;
use stackelberg_core::harness::generators::GOOD;
use stackelberg_core::harness::{Experiment, ExperimentConfig};
use stackelberg_core::learners::*;
use stackelberg_core::Error;

/// One protocol round driven from the test side; returns the play and the
/// feedback the learner received.
fn step(learner: &mut dyn Learner, g: &GameInstance, mode: FeedbackMode, r: &mut ChaCha8Rng) -> (Play, Feedback) {
    let view = g.view();
    let play = learner.choose();
    let theta = g.distribution().sampler().sample(r);
    let table = ResponseTable::new(view, &play.strategy);
    let actions = table.respond(view, &play.strategy, theta.types(), play.target.as_ref());
    let l = play.strategy.sample(r);
    let feedback = match mode {
        FeedbackMode::Type => Feedback::Type(theta),
        FeedbackMode::Action => Feedback::Action {
            realized_utility: view.leader(l, &actions),
            actions: ActionProfile::new(actions, view.sizes().actions).unwrap(),
            leader_action: l,
        },
    };
    learner.observe(&feedback).unwrap();
    (play, feedback)
}

fn all_specs() -> [(LearnerSpec, FeedbackMode); 4] {
    [
        (LearnerSpec::TypeFeedbackGeneral, FeedbackMode::Type),
        (LearnerSpec::TypeFeedbackIndependent, FeedbackMode::Type),
        (LearnerSpec::Ucb, FeedbackMode::Action),
        (LearnerSpec::LinBandit, FeedbackMode::Action),
    ]
}

#[test]
fn type_feedback_learners_start_uniform() {
    for g in [g1(), random(2, 3, 2, 2, 4)] {
        let l = g.sizes().leader_actions;
        for spec in [LearnerSpec::TypeFeedbackGeneral, LearnerSpec::TypeFeedbackIndependent] {
            let mut learner = spec.build().unwrap();
            learner.reset(g.view(), 10).unwrap();
            let play = learner.choose();
            assert_eq!(play.strategy, MixedStrategy::uniform(l));
            assert!(play.target.is_none());
        }
    }
}

#[test]
fn tf_general_after_three_observations_on_g1() {
    let g = g1();
    let mut learner = TypeFeedbackGeneral::default();
    learner.reset(g.view(), 10).unwrap();
    for k in [0, 0, 1] {
        learner.observe(&Feedback::Type(TypeProfile::new(vec![k], 2).unwrap())).unwrap();
    }
    assert_eq!(learner.observed(), 3);
    let p = learner.choose().strategy;
    assert!(p.probs()[0] >= p.probs()[1]);
}

#[test]
fn tf_independent_marginals() {
    let g = random(2, 2, 2, 2, 1);
    let mut learner = TypeFeedbackIndependent::default();
    learner.reset(g.view(), 10).unwrap();
    for t in [[0, 1], [0, 0]] {
        learner.observe(&Feedback::Type(TypeProfile::new(t.to_vec(), 2).unwrap())).unwrap();
    }
    let m = learner.marginals();
    assert_eq!(m, vec![vec![1.0, 0.0], vec![0.5, 0.5]]);
    assert_eq!(product_distribution(&m).unwrap().to_joint().unwrap(), vec![0.5, 0.5, 0.0, 0.0]);
}

#[test]
fn identical_observations_give_identical_plays() {
    let g = random(2, 2, 2, 3, 6);
    for (spec, mode) in all_specs() {
        let mut a = spec.build().unwrap();
        let mut b = spec.build().unwrap();
        a.reset(g.view(), 100).unwrap();
        b.reset(g.view(), 100).unwrap();
        let mut r = rng(3);
        for _ in 0..60 {
            let (play, feedback) = step(a.as_mut(), &g, mode, &mut r);
            assert_eq!(b.choose(), play);
            b.observe(&feedback).unwrap();
        }
    }
}

#[test]
fn learners_never_see_the_distribution() {
    // same public view, different hidden distributions, same feedback
    let g = random(2, 2, 2, 2, 9);
    let other = GameInstance::new(g.view().clone(), TypeDistribution::general(2, 2, vec![0.7, 0.1, 0.1, 0.1]).unwrap()).unwrap();
    for (spec, mode) in all_specs() {
        let mut a = spec.build().unwrap();
        let mut b = spec.build().unwrap();
        a.reset(g.view(), 50).unwrap();
        b.reset(other.view(), 50).unwrap();
        let mut r = rng(4);
        for _ in 0..50 {
            let (_, feedback) = step(a.as_mut(), &g, mode, &mut r);
            b.observe(&feedback).unwrap();
            assert_eq!(a.choose(), b.choose());
        }
    }
}

#[test]
fn choose_has_no_side_effects() {
    let g = random(2, 2, 2, 2, 12);
    for (spec, mode) in all_specs() {
        let mut learner = spec.build().unwrap();
        learner.reset(g.view(), 100).unwrap();
        let mut r = rng(5);
        for _ in 0..30 {
            let first = learner.choose();
            for _ in 0..3 {
                assert_eq!(learner.choose(), first);
            }
            step(learner.as_mut(), &g, mode, &mut r);
        }
    }
}

#[test]
fn wrong_feedback_is_rejected() {
    let g = g1();
    let typed = Feedback::Type(TypeProfile::new(vec![0], 2).unwrap());
    let acted = Feedback::Action { actions: ActionProfile::new(vec![0], 2).unwrap(), leader_action: 0, realized_utility: 1.0 };
    for (spec, mode) in all_specs() {
        let mut learner = spec.build().unwrap();
        learner.reset(g.view(), 10).unwrap();
        assert!(learner.accepts(mode));
        let wrong = if mode == FeedbackMode::Type { &acted } else { &typed };
        assert!(matches!(learner.observe(wrong), Err(Error::WrongFeedback { .. })));
    }
    let experiment = Experiment::new(&g).unwrap();
    let cfg = ExperimentConfig {
        learner: LearnerSpec::Ucb,
        feedback: FeedbackMode::Type,
        horizon: 10,
        seed: 0,
        replications: 1,
    };
    assert!(matches!(experiment.run_replication(&cfg, 0), Err(Error::WrongFeedback { .. })));
}

#[test]
fn ucb_initialization_plays_every_witness() {
    let g = g1();
    let mut ucb = Ucb::default();
    ucb.reset(g.view(), 100).unwrap();
    let regions = ucb.regions().to_vec();
    assert_eq!(regions.len(), 4);
    let mut r = rng(6);
    for region in &regions {
        let (play, _) = step(&mut ucb, &g, FeedbackMode::Action, &mut r);
        assert_eq!(play.strategy, region.witness);
        assert_eq!(play.target.as_ref(), Some(&region.mapping));
    }
    assert!(ucb.states().iter().all(|s| s.visits == 1));
}

#[test]
fn ucb_visit_counts_track_rounds() {
    let g = random(2, 2, 2, 2, 13);
    let mut ucb = Ucb::default();
    ucb.reset(g.view(), 300).unwrap();
    let mut r = rng(7);
    for t in 1..=300 {
        assert_eq!(ucb.states().iter().map(|s| s.visits).sum::<usize>(), t - 1);
        let chosen = ucb.current_region();
        let before = ucb.states()[chosen].visits;
        step(&mut ucb, &g, FeedbackMode::Action, &mut r);
        assert_eq!(ucb.states()[chosen].visits, before + 1);
        let counted: usize = ucb.states()[chosen].action_counts.values().sum();
        assert_eq!(counted, before + 1);
    }
}

#[test]
fn ucb_needs_a_long_enough_horizon() {
    let g = g1();
    let mut ucb = Ucb::default();
    assert_eq!(ucb.reset(g.view(), 3).unwrap_err(), Error::HorizonTooSmall { horizon: 3, regions: 4 });
    assert!(ucb.reset(g.view(), 4).is_ok());
}

#[test]
fn ucb_bonus_values() {
    assert!((ucb_bonus(4, 100, 2) - (12.0 * 300f64.ln() / 4.0).sqrt()).abs() < 1e-12);
    assert!((ucb_bonus(4, 100, 2) - 4.1366).abs() < 1e-4);
    for n in 1..500 {
        assert!(ucb_bonus(n + 1, 2000, 3) < ucb_bonus(n, 2000, 3));
    }
}

#[test]
fn ucb_picks_the_highest_index_after_initialization() {
    let g = random(2, 2, 2, 2, 14);
    let mut ucb = Ucb::default();
    ucb.reset(g.view(), 200).unwrap();
    let mut r = rng(8);
    let w = ucb.regions().len();
    for t in 0..200 {
        if t >= w {
            let chosen = ucb.current_region();
            let best = (0..w).map(|i| ucb.index(i).unwrap()).fold(f64::MIN, f64::max);
            assert_eq!(ucb.index(chosen).unwrap(), best);
            assert!((0..chosen).all(|i| ucb.index(i).unwrap() < best));
        }
        step(&mut ucb, &g, FeedbackMode::Action, &mut r);
    }
}

#[test]
fn phi_examples() {
    let g = g1();
    assert_eq!(phi_map(g.view(), &x(&[0.7, 0.3])).unwrap(), vec![-1.0, 0.0]);
    let zero = PublicView::new(g.sizes(), LeaderUtility::Dense(vec![0.0; 4]), g.view().follower_table().to_vec()).unwrap();
    assert!(phi_map(&zero, &x(&[0.4, 0.6])).unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn phi_cap() {
    let sizes = Sizes::new(7, 2, 2, 4).unwrap();
    let eval: LeaderEvaluator = std::sync::Arc::new(|_, _| 0.0);
    let view = PublicView::new(sizes, LeaderUtility::Evaluator(eval), vec![0.0; sizes.follower_table_len()]).unwrap();
    assert!(phi_map(&view, &MixedStrategy::uniform(2)).is_err());
}

#[test]
fn linbandit_arms_on_g1() {
    let g = g1();
    let mut lin = LinBandit::default();
    lin.reset(g.view(), 100).unwrap();
    let mut arms: Vec<Vec<f64>> = lin.state().unwrap().arms().to_vec();
    arms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(arms, vec![vec![-1.0, -1.0], vec![-1.0, 0.0], vec![0.0, -1.0], vec![0.0, 0.0]]);
    assert!(arms.iter().flatten().all(|&v| (-1.0..=0.0).contains(&v)));
}

#[test]
fn linbandit_first_choice_is_widest_arm() {
    let g = random(2, 2, 2, 2, 15);
    let mut lin = LinBandit::default();
    lin.reset(g.view(), 100).unwrap();
    let state = lin.state().unwrap();
    assert!(state.estimate().iter().all(|&v| v == 0.0));
    let norms: Vec<f64> = state.arms().iter().map(|a| a.iter().map(|v| v * v).sum::<f64>()).collect();
    let best = norms.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(norms[state.select()], best);
}

#[test]
fn gram_matrix_stays_symmetric_and_well_conditioned() {
    let g = random(2, 2, 2, 3, 16);
    let mut lin = LinBandit::default();
    lin.reset(g.view(), 400).unwrap();
    let mut r = rng(9);
    for t in 0..400 {
        step(&mut lin, &g, FeedbackMode::Action, &mut r);
        if t % 50 == 49 {
            let state = lin.state().unwrap();
            let d = state.dim();
            let v = DMatrix::from_row_slice(d, d, state.gram());
            assert_eq!(v, v.transpose());
            let min = v.symmetric_eigen().eigenvalues.min();
            assert!(min >= 1.0 - 1e-9, "minimum eigenvalue {min}");
        }
    }
}

#[test]
fn linbandit_regret_on_g1_is_within_envelope() {
    let g = g1();
    let experiment = Experiment::new(&g).unwrap();
    let cfg = ExperimentConfig {
        learner: LearnerSpec::LinBandit,
        feedback: FeedbackMode::Action,
        horizon: 2000,
        seed: 11,
        replications: 1,
    };
    let trace = experiment.run_replication(&cfg, 0).unwrap();
    let t = 2000f64;
    let envelope = 25.0 * 2.0 * t.sqrt() * t.ln();
    assert!(trace.final_regret() <= envelope);
}

#[test]
fn tf_independent_settles_in_an_optimal_region() {
    let g = stackelberg_core::harness::genspec::generate(stackelberg_core::harness::genspec::FIG2_SPEC).unwrap();
    let experiment = Experiment::new(&g).unwrap();
    let cfg = ExperimentConfig {
        learner: LearnerSpec::TypeFeedbackIndependent,
        feedback: FeedbackMode::Type,
        horizon: 2000,
        seed: 12,
        replications: 1,
    };
    let trace = experiment.run_replication(&cfg, 0).unwrap();
    let late = &trace.rounds[1900..];
    assert!(late.iter().all(|r| r.expected_regret <= 1e-6));
}

#[test]
fn spec_strings() {
    for s in ["tf-general", "tf-independent", "ucb", "linbandit", "fixed:0.25,0.75"] {
        let spec: LearnerSpec = s.parse().unwrap();
        assert_eq!(spec.to_string(), s);
    }
    assert!("fixed:0.5,0.6".parse::<LearnerSpec>().is_err());
    assert!("oful".parse::<LearnerSpec>().is_err());
    assert_eq!("action".parse::<FeedbackMode>().unwrap(), FeedbackMode::Action);
    assert!("both".parse::<FeedbackMode>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expected_loss_is_negative_utility(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let n = r.random_range(1..=2);
        let l = r.random_range(2..=3);
        let k = r.random_range(1..=3);
        let g = random(n, l, 2, k, seed);
        let xs = point(&mut r, l);
        let phi = phi_map(g.view(), &xs).unwrap();
        let d = g.distribution().to_joint().unwrap();
        let loss: f64 = phi.iter().zip(&d).map(|(a, b)| a * b).sum();
        let u = leader_expected_utility(&xs, g.distribution(), g.view()).unwrap();
        prop_assert!((loss + u).abs() <= 1e-12);
    }

    #[test]
    fn region_loss_matches_targeted_utility(seed in 0u64..10_000) {
        let g = random(2, 2, 2, 2, seed);
        let regions = enumerate_regions(g.view()).unwrap();
        let region = &regions[seed as usize % regions.len()];
        let phi = region_phi(g.view(), &region.witness, &region.mapping).unwrap();
        let d = g.distribution().to_joint().unwrap();
        let loss: f64 = phi.iter().zip(&d).map(|(a, b)| a * b).sum();
        let u = leader_expected_utility_toward(&region.witness, Some(&region.mapping), g.distribution(), g.view()).unwrap();
        prop_assert!((loss + u).abs() <= 1e-12);
    }
}

#[test]
fn g1_good_is_leader_payoff() {
    let g = g1();
    assert_eq!(g.view().leader(0, &[GOOD]), 1.0);
}
