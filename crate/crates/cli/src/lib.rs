//! Command-line front end: solve instances, list best-response regions,
//! simulate learners and run the regret benchmark.

pub mod instance;
pub mod trace;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use stackelberg_core::game::{leader_expected_utility_toward, GameInstance};
use stackelberg_core::geometry::{classify, enumerate_regions};
use stackelberg_core::harness::genspec::generate;
use stackelberg_core::harness::oracles::{brute_force_optimal, sample_regions, BRUTE_FORCE_MAX_ACTIONS};
use stackelberg_core::harness::{round_statistics, run_experiment, ExperimentConfig, RegretTrace};
use stackelberg_core::learners::{FeedbackMode, LearnerSpec};
use stackelberg_core::solvers::{lp_reform_optimal, offline_optimal};

use crate::instance::InstanceFile;
use crate::trace::{write_traces, CurveRow};

#[derive(Debug, Parser)]
#[command(name = "stackelberg", version, about = "Bayesian Stackelberg games with multiple followers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the optimal leader strategy.
    Solve {
        #[command(flatten)]
        source: Source,
    },
    /// List the non-empty best-response regions.
    Regions {
        #[command(flatten)]
        source: Source,
    },
    /// Run a learner and write its per-round trace as CSV.
    Simulate(SimulateArgs),
    /// Compare the learners on the benchmark instance; writes mean
    /// cumulative regret with 90% intervals per round as CSV.
    Bench(BenchArgs),
    /// Cross-check the exact solvers against brute-force oracles.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
struct Source {
    /// Instance file (JSON).
    #[arg(long, value_name = "PATH", conflicts_with = "gen")]
    instance: Option<PathBuf>,
    /// Generator spec, e.g. `hard-single:c=1,eps=0.2,sigma=+`.
    #[arg(long = "gen", value_name = "SPEC")]
    gen: Option<String>,
    /// Also write the instance to this JSON file.
    #[arg(long, value_name = "PATH")]
    save: Option<PathBuf>,
}

impl Source {
    fn load(&self, default: Option<&str>) -> Result<GameInstance> {
        let g = match (&self.instance, &self.gen, default) {
            (Some(path), _, _) => InstanceFile::load(path)?,
            (None, Some(spec), _) => generate(spec)?,
            (None, None, Some(spec)) => generate(spec)?,
            (None, None, None) => bail!("one of --instance or --gen is required"),
        };
        if let Some(path) = &self.save {
            InstanceFile::save(&g, path)?;
        }
        Ok(g)
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    /// tf-general, tf-independent, ucb, linbandit or fixed:p1,p2,...
    #[arg(long)]
    learner: LearnerSpec,
    /// type or action (default: what the learner consumes).
    #[arg(long)]
    feedback: Option<FeedbackMode>,
    /// Horizon.
    #[arg(short = 'T', long = "horizon", default_value_t = 1000)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Output CSV (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Benchmark instance (default: the `fig2` preset).
    #[command(flatten)]
    source: Source,
    #[arg(short = 'T', long = "horizon", default_value_t = 2000)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    /// Output CSV (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Instance to check (default: a suite of small random instances).
    #[command(flatten)]
    source: Source,
    /// Lattice spacing of the brute-force search.
    #[arg(long, default_value_t = 0.005)]
    grid: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn default_feedback(spec: &LearnerSpec) -> FeedbackMode {
    match spec {
        LearnerSpec::Ucb | LearnerSpec::LinBandit => FeedbackMode::Action,
        _ => FeedbackMode::Type,
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn solve(source: &Source) -> Result<()> {
    let g = source.load(None)?;
    let eq = offline_optimal(g.view(), g.distribution())?;
    println!("x* = {}", eq.x_star);
    println!("value {:.6}", eq.value);
    println!("mapping {}", eq.mapping);
    Ok(())
}

fn regions(source: &Source) -> Result<()> {
    let g = source.load(None)?;
    let regions = enumerate_regions(g.view())?;
    let full = regions.iter().filter(|r| r.is_full_dimensional()).count();
    println!("{} regions ({} full-dimensional, {} with slack 0)", regions.len(), full, regions.len() - full);
    for (i, r) in regions.iter().enumerate() {
        println!("#{i} {} slack {:.6} witness {}", r.mapping, r.slack.max(0.0), r.witness);
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let g = args.source.load(None)?;
    let cfg = ExperimentConfig {
        learner: args.learner.clone(),
        feedback: args.feedback.unwrap_or_else(|| default_feedback(&args.learner)),
        horizon: args.horizon,
        seed: args.seed,
        replications: args.reps,
    };
    let traces = run_experiment(&g, &cfg)?;
    write_traces(output(&args.out)?, &traces)
}

fn curve(name: &LearnerSpec, feedback: FeedbackMode, traces: &[RegretTrace]) -> Vec<CurveRow> {
    let z = 1.645 / (traces.len() as f64).sqrt();
    round_statistics(traces, |r| r.cumulative_regret)
        .into_iter()
        .enumerate()
        .map(|(t, (mean, sd))| CurveRow {
            learner: name.to_string(),
            feedback: feedback.name().to_string(),
            round: t + 1,
            mean_cumulative_regret: mean,
            ci_low: mean - z * sd,
            ci_high: mean + z * sd,
        })
        .collect()
}

fn bench(args: &BenchArgs) -> Result<()> {
    let g = args.source.load(Some("fig2"))?;
    let mut w = csv::Writer::from_writer(output(&args.out)?);
    let pairs = [
        (FeedbackMode::Type, [LearnerSpec::TypeFeedbackGeneral, LearnerSpec::TypeFeedbackIndependent]),
        (FeedbackMode::Action, [LearnerSpec::Ucb, LearnerSpec::LinBandit]),
    ];
    for (feedback, learners) in pairs {
        for learner in learners {
            let cfg = ExperimentConfig {
                learner: learner.clone(),
                feedback,
                horizon: args.horizon,
                seed: args.seed,
                replications: args.reps,
            };
            let traces = run_experiment(&g, &cfg)?;
            let rows = curve(&learner, feedback, &traces);
            if let Some(last) = rows.last() {
                eprintln!(
                    "{learner} ({} feedback): final regret {:.3} [{:.3}, {:.3}]",
                    feedback.name(),
                    last.mean_cumulative_regret,
                    last.ci_low,
                    last.ci_high
                );
            }
            for row in rows {
                w.serialize(row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

struct Check {
    failures: usize,
}

impl Check {
    fn report(&mut self, name: &str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failures += 1;
        }
    }
}

fn check_instance(label: &str, g: &GameInstance, grid: f64, seed: u64, check: &mut Check) -> Result<()> {
    let (view, dist) = (g.view(), g.distribution());
    let eq = offline_optimal(view, dist)?;
    let realized = leader_expected_utility_toward(&eq.x_star, Some(&eq.mapping), dist, view)?;
    check.report(
        &format!("{label} equilibrium value"),
        (realized - eq.value).abs() <= 1e-7,
        format!("reported {:.9}, realized {:.9}", eq.value, realized),
    );
    if view.sizes().leader_actions <= BRUTE_FORCE_MAX_ACTIONS {
        let (_, best) = brute_force_optimal(view, dist, grid)?;
        let gap = eq.value - best;
        check.report(
            &format!("{label} offline vs grid"),
            gap >= -1e-9 && gap <= grid,
            format!("offline {:.6}, grid {:.6}, gap {gap:.2e} (allowed [0, {grid}])", eq.value, best),
        );
    } else {
        println!("SKIP {label} offline vs grid: more than {BRUTE_FORCE_MAX_ACTIONS} leader actions");
    }
    match lp_reform_optimal(view, dist) {
        Ok(reform) => {
            let gap = (reform.value - eq.value).abs();
            check.report(&format!("{label} reformulation"), gap <= 1e-6, format!("|reform - offline| = {gap:.2e}"));
        }
        Err(e) if e.is_capacity() => println!("SKIP {label} reformulation: {e}"),
        Err(e) => return Err(e.into()),
    }
    let regions = enumerate_regions(view)?;
    let sampled = sample_regions(view, 10_000, seed);
    let missing = sampled.iter().filter(|m| !regions.iter().any(|r| &r.mapping == *m)).count();
    let misclassified = regions
        .iter()
        .filter(|r| r.is_full_dimensional() && classify(view, &r.witness) != r.mapping)
        .count();
    check.report(
        &format!("{label} regions"),
        missing == 0 && misclassified == 0,
        format!("{} enumerated, {} sampled, {missing} missing, {misclassified} misclassified witnesses", regions.len(), sampled.len()),
    );
    Ok(())
}

fn oracle_check(args: &OracleArgs) -> Result<()> {
    let mut check = Check { failures: 0 };
    if args.source.instance.is_some() || args.source.gen.is_some() {
        let g = args.source.load(None)?;
        check_instance("instance", &g, args.grid, args.seed, &mut check)?;
    } else {
        for i in 0..12u64 {
            let (n, l, k) = (1 + (i % 2) as usize, 2 + ((i / 2) % 2) as usize, 1 + ((i / 4) % 3) as usize);
            let spec = format!("random:n={n},L={l},A=2,K={k},seed={}", args.seed + i);
            check_instance(&spec, &generate(&spec)?, args.grid, args.seed, &mut check)?;
        }
    }
    if check.failures > 0 {
        bail!(CheckFailed(check.failures));
    }
    Ok(())
}

#[derive(Debug)]
struct CheckFailed(usize);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} oracle checks failed", self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Solve { source } => solve(source),
        Command::Regions { source } => regions(source),
        Command::Simulate(args) => simulate(args),
        Command::Bench(args) => bench(args),
        Command::OracleCheck(args) => oracle_check(args),
    }
}

/// Exit code for an error: 2 for cap and horizon violations, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let capacity = err
        .chain()
        .filter_map(|e| e.downcast_ref::<stackelberg_core::Error>())
        .any(stackelberg_core::Error::is_capacity);
    if capacity {
        2
    } else {
        1
    }
}

pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
