//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{g1, g2, point, random, rng, small_shape};
use rand::Rng;
use stackelberg_core::game::*;
use stackelberg_core::geometry::{classify, enumerate_regions, region_index, region_vertices};
use stackelberg_core::harness::generators::*;
use stackelberg_core::harness::genspec::{generate, FIG2_SPEC};
use stackelberg_core::harness::oracles::*;
use stackelberg_core::harness::rng::{stream, TYPES};
use stackelberg_core::harness::{round_statistics, run_experiment, Experiment, ExperimentConfig, RegretTrace};
use stackelberg_core::learners::{Feedback, FeedbackMode, Learner, LearnerSpec, Ucb};
use stackelberg_core::solvers::{lp_reform_optimal, offline_optimal};

const SEEDS: u64 = 50;
const HORIZON: usize = 2000;
const REPS: usize = 200;
const SIM_SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn instances() -> Vec<GameInstance> {
    (0..SEEDS)
        .map(|seed| {
            let (n, l, a, k) = small_shape(seed);
            random(n, l, a, k, 1000 + seed)
        })
        .collect()
}

fn c1_oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in instances() {
        let exact = offline_optimal(g.view(), g.distribution()).unwrap().value;
        let (_, grid) = brute_force_optimal(g.view(), g.distribution(), 0.005).unwrap();
        worst = worst.max((exact - grid).abs());
    }
    outcome(worst <= 2e-3, format!("max |offline - grid| = {worst:.3e} (tol 2e-3)"))
}

fn c2_reform_cross_check() -> Outcome {
    let mut list: Vec<GameInstance> = (0..25).map(|seed| random(1, 2, 2, 1 + (seed % 2) as usize, 2000 + seed)).collect();
    list.push(g1());
    list.push(g2());
    let mut worst: f64 = 0.0;
    for g in &list {
        let a = lp_reform_optimal(g.view(), g.distribution()).unwrap().value;
        let b = offline_optimal(g.view(), g.distribution()).unwrap().value;
        worst = worst.max((a - b).abs());
    }
    outcome(worst <= 1e-6, format!("max |reform - offline| = {worst:.3e} over {} instances (tol 1e-6)", list.len()))
}

fn c3_region_enumeration() -> Outcome {
    let mut problems = Vec::new();
    for (seed, g) in instances().iter().enumerate() {
        let s = g.sizes();
        let regions = enumerate_regions(g.view()).unwrap();
        let listed: BTreeSet<_> = regions.iter().map(|r| r.mapping.clone()).collect();
        let sampled = sample_regions(g.view(), 10_000, seed as u64);
        if !sampled.is_subset(&listed) {
            problems.push(format!("seed {seed}: sampled region missing"));
        }
        for r in regions.iter().filter(|r| r.is_full_dimensional()) {
            if classify(g.view(), &r.witness) != r.mapping {
                problems.push(format!("seed {seed}: witness of {} misclassified", r.mapping));
            }
        }
        let full = regions.iter().filter(|r| r.is_full_dimensional()).count() as u128;
        let (n, l, a, k) = (s.followers, s.leader_actions, s.actions, s.types);
        if full > full_dimensional_region_bound(n, k, a, l) || regions.len() as u128 > region_count_bound(n, k, a, l) {
            problems.push(format!("seed {seed}: {} regions exceed the bound", regions.len()));
        }
    }
    let detail = if problems.is_empty() { "50 instances sound and complete".to_string() } else { problems.join("; ") };
    outcome(problems.is_empty(), detail)
}

fn c4_identities() -> Outcome {
    let mut r = rng(4);
    let mut worst_u: f64 = 0.0;
    let mut worst_tv: f64 = 0.0;
    for c in 1..=4 {
        for eps in [0.05, 0.2] {
            let sigma: Vec<i8> = (0..c).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
            let g = gen_single_follower_hard(c, eps, &sigma).unwrap();
            let d = g.distribution();
            let at_d = MixedStrategy::new(d.to_joint().unwrap()).unwrap();
            let best = leader_expected_utility(&at_d, d, g.view()).unwrap();
            for _ in 0..100 {
                let xs = point(&mut r, 2 * c);
                let gap = eps / c as f64 * disagree(&xs, d).unwrap() as f64;
                let u = leader_expected_utility(&xs, d, g.view()).unwrap();
                worst_u = worst_u.max((best - u - gap).abs());
                let rounded = rounded_class_c(&xs, c, eps).unwrap();
                worst_tv = worst_tv.max((tv_distance(&rounded, d).unwrap() - gap).abs());
            }
        }
    }
    let mut worst_scale: f64 = 0.0;
    for n in [2usize, 3] {
        let k = 2;
        let c = n * k / 2;
        let sigma: Vec<i8> = (0..c).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect();
        let base = gen_class_c(c, 0.2, &sigma).unwrap();
        let single = gen_single_follower_hard(c, 0.2, &sigma).unwrap();
        let multi = gen_multi_follower_hard(n, k, &base).unwrap();
        let factor = (1.0 - 1.0 / (100 * n) as f64).powi(n as i32 - 1) / 100.0;
        for _ in 0..100 {
            let xs = point(&mut r, n * k);
            let u = leader_expected_utility(&xs, single.distribution(), single.view()).unwrap();
            let ut = leader_expected_utility(&xs, multi.distribution(), multi.view()).unwrap();
            worst_scale = worst_scale.max((ut - factor * u).abs());
        }
    }
    outcome(
        worst_u <= 1e-12 && worst_tv <= 1e-12 && worst_scale <= 1e-9,
        format!("utility gap {worst_u:.1e}, tv gap {worst_tv:.1e} (tol 1e-12); multi-follower scaling {worst_scale:.1e} (tol 1e-9)"),
    )
}

struct Curve {
    final_mean: f64,
    ratio: f64,
}

fn curve(instance: &GameInstance, learner: LearnerSpec, feedback: FeedbackMode) -> Curve {
    let cfg = ExperimentConfig { learner, feedback, horizon: HORIZON, seed: SIM_SEED, replications: REPS };
    let traces = run_experiment(instance, &cfg).unwrap();
    let stats = round_statistics(&traces, |r| r.expected_regret);
    let window = |from: usize, to: usize| stats[from..to].iter().map(|s| s.0).sum::<f64>() / (to - from) as f64;
    let early = window(0, 200);
    let late = window(HORIZON - 200, HORIZON);
    let final_mean = traces.iter().map(RegretTrace::final_regret).sum::<f64>() / traces.len() as f64;
    Curve { final_mean, ratio: if early > 0.0 { late / early } else { 0.0 } }
}

fn comparison(better: (&str, Curve), worse: (&str, Curve)) -> Outcome {
    let ordered = better.1.final_mean <= worse.1.final_mean;
    let sublinear = better.1.ratio < 0.5 && worse.1.ratio < 0.5;
    outcome(
        ordered && sublinear,
        format!(
            "final regret {} {:.3} vs {} {:.3} (ordered: {ordered}); late/early per-round ratio {:.3} / {:.3} (need < 0.5)",
            better.0, better.1.final_mean, worse.0, worse.1.final_mean, better.1.ratio, worse.1.ratio
        ),
    )
}

fn c5_type_feedback_curves() -> Outcome {
    let g = generate(FIG2_SPEC).unwrap();
    let indep = curve(&g, LearnerSpec::TypeFeedbackIndependent, FeedbackMode::Type);
    let general = curve(&g, LearnerSpec::TypeFeedbackGeneral, FeedbackMode::Type);
    comparison(("tf-independent", indep), ("tf-general", general))
}

fn c6_action_feedback_curves() -> Outcome {
    let g = generate(FIG2_SPEC).unwrap();
    let ucb = curve(&g, LearnerSpec::Ucb, FeedbackMode::Action);
    let lin = curve(&g, LearnerSpec::LinBandit, FeedbackMode::Action);
    comparison(("ucb", ucb), ("linbandit", lin))
}

fn band_failures() -> usize {
    let g = generate(FIG2_SPEC).unwrap();
    let (view, dist) = (g.view(), g.distribution());
    let regions = enumerate_regions(view).unwrap();
    let vertices: Vec<MixedStrategy> = regions.iter().flat_map(region_vertices).collect();
    let exact: Vec<f64> = vertices.iter().map(|v| leader_expected_utility(v, dist, view).unwrap()).collect();
    let t = 4096usize;
    let tf = t as f64;
    let l = view.sizes().leader_actions as f64;
    let band = (2.0 * l * (3.0 * tf).ln() / tf).sqrt() + ((regions.len() as f64 / 0.05).ln() / (2.0 * tf)).sqrt();
    let sampler = dist.sampler();
    let profiles = view.sizes().type_profiles().unwrap();
    (0..100u64)
        .filter(|&trial| {
            let mut r = stream(7, trial, TYPES);
            let mut counts = vec![0usize; profiles];
            for _ in 0..t {
                counts[sampler.sample(&mut r).index(view.sizes().types)] += 1;
            }
            let sup = vertices
                .iter()
                .zip(&exact)
                .map(|(v, &u)| {
                    let emp: f64 = counts
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c > 0)
                        .map(|(idx, &c)| {
                            let theta = TypeProfile::from_index(idx, view.sizes().followers, view.sizes().types);
                            c as f64 * view.leader_mixed(v, best_response(v, &theta, view).actions())
                        })
                        .sum::<f64>()
                        / tf;
                    (emp - u).abs()
                })
                .fold(0.0, f64::max);
            sup > band
        })
        .count()
}

/// Fraction of rounds, pooled over runs, in which the optimal region's
/// index falls below the optimal value.
fn optimism_failure_fraction() -> f64 {
    let g = g1();
    let (view, dist) = (g.view(), g.distribution());
    let experiment = Experiment::new(&g).unwrap();
    let star = experiment.optimum().clone();
    let horizon = 500;
    let sampler = dist.sampler();
    let mut below = 0usize;
    let mut total = 0usize;
    for run in 0..100u64 {
        let mut ucb = Ucb::default();
        ucb.reset(view, horizon).unwrap();
        let r_star = region_index(ucb.regions(), &star.mapping).expect("optimal region is enumerated");
        let mut types = stream(99, run, TYPES);
        let mut leader = rng(1000 + run);
        for _ in 0..horizon {
            let play = ucb.choose();
            let theta = sampler.sample(&mut types);
            let table = ResponseTable::new(view, &play.strategy);
            let actions = table.respond(view, &play.strategy, theta.types(), play.target.as_ref());
            let l = play.strategy.sample(&mut leader);
            let realized = view.leader(l, &actions);
            let feedback = Feedback::Action {
                actions: ActionProfile::new(actions, view.sizes().actions).unwrap(),
                leader_action: l,
                realized_utility: realized,
            };
            ucb.observe(&feedback).unwrap();
            total += 1;
            if ucb.index(r_star).is_some_and(|v| v < star.value) {
                below += 1;
            }
        }
    }
    below as f64 / total as f64
}

fn c7_concentration() -> Outcome {
    let failures = band_failures();
    let optimism = optimism_failure_fraction();
    let band_ok = failures as f64 / 100.0 <= 0.05 + 0.05;
    let optimism_ok = optimism <= 0.10;
    outcome(
        band_ok && optimism_ok,
        format!("empirical-utility band exceeded in {failures}/100 trials (max 10); optimism violated in {:.2}% of rounds (max 10%)", 100.0 * optimism),
    )
}

fn c8_fixed_learner_regret() -> Outcome {
    let g = g1();
    let horizon = 1000;
    let cfg = ExperimentConfig {
        learner: LearnerSpec::Fixed(vec![0.0, 1.0]),
        feedback: FeedbackMode::Type,
        horizon,
        seed: 8,
        replications: 1,
    };
    let trace = &run_experiment(&g, &cfg).unwrap()[0];
    let expected = 0.2 * horizon as f64;
    let got = trace.final_regret();
    outcome((got - expected).abs() <= 1e-9, format!("cumulative regret {got:.9} after T = {horizon}, expected {expected:.9}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("LP reformulation cross-check", c2_reform_cross_check),
        ("region enumeration", c3_region_enumeration),
        ("hard-instance identities", c4_identities),
        ("type-feedback regret curves", c5_type_feedback_curves),
        ("action-feedback regret curves", c6_action_feedback_curves),
        ("concentration checks", c7_concentration),
        ("fixed-strategy regret", c8_fixed_learner_regret),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("{id} [{name}]: {verdict} — {} ({:.1}s)", out.detail, start.elapsed().as_secs_f64());
        if !out.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
