use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use heatlab::{output, report, suite, ExperimentKind, Outcome, ScenarioConfig};
use heatlab_core::Settings;

#[derive(Parser, Debug)]
#[command(name = "heatlab", version, about = "Boundary behaviour of heat solutions: verification runs and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML). Without it each subcommand runs its built-in set.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for JSON reports and CSV tables.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for the random identity draws.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Overrides the evaluation tolerance `tol_eval`.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Heat field on a space-time grid.
    Eval,
    /// Symmetric, strong and distribution-function derivatives.
    Derivative,
    /// Limit along a parabolic ray.
    Ray,
    /// Limits over parabolic regions.
    Limit,
    /// Limits along two rays.
    TwoRay,
    /// Maximal-function sandwich.
    Sandwich,
    /// Forward and converse limit checks.
    Verify,
    /// The indicator of [0, 1] at 0.
    Counterexample,
    /// Dilation, translation and duality identities.
    Identities,
    /// Every built-in set.
    All,
}

const DEFAULT_OUT: &str = "heatlab-out";
const DEFAULT_SEED: u64 = 0;

impl Command {
    fn accepts(self, kind: ExperimentKind) -> bool {
        use ExperimentKind as K;
        matches!(
            (self, kind),
            (Command::Eval, K::EvalGrid)
                | (Command::Derivative, K::Derivative)
                | (Command::Ray, K::Ray)
                | (Command::Limit, K::ParabolicLimit)
                | (Command::TwoRay, K::TwoRay)
                | (Command::Sandwich, K::Sandwich)
                | (Command::Verify, K::VerifyForward | K::VerifyConverse)
                | (Command::Counterexample, K::Counterexample)
                | (Command::Identities, K::Identities)
                | (Command::All, _)
        )
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let cfg = match &cli.config {
        Some(p) => Some(ScenarioConfig::load(p)?),
        None => None,
    };
    let mut settings = cfg.as_ref().map(|c| c.settings.clone()).unwrap_or_else(Settings::default);
    if let Some(t) = cli.tol {
        settings.tol_eval = t;
    }
    settings.validate().context("invalid settings")?;
    let seed = cli.seed.or(cfg.as_ref().and_then(|c| c.seed)).unwrap_or(DEFAULT_SEED);
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.as_ref().and_then(|c| c.output.dir.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));

    let start = Instant::now();
    let outcome: Outcome = match (&cfg, cli.command) {
        (_, Command::All) => suite::all(seed, &settings)?,
        (Some(c), cmd) => {
            if !cmd.accepts(c.experiment) {
                bail!(
                    "scenario experiment `{}` does not match subcommand {:?}",
                    c.experiment.as_str(),
                    cmd
                );
            }
            suite::from_config(c, seed, &settings)?
        }
        (None, Command::Eval) => suite::eval(&settings)?,
        (None, Command::Derivative) => suite::derivative(&settings)?,
        (None, Command::Ray) => suite::ray(&settings)?,
        (None, Command::Limit) => suite::limit(&settings)?,
        (None, Command::TwoRay) => suite::two_ray(&settings)?,
        (None, Command::Sandwich) => suite::sandwich(&settings)?,
        (None, Command::Verify) => suite::verify(&settings)?,
        (None, Command::Counterexample) => suite::counterexample(&settings)?,
        (None, Command::Identities) => suite::identities(seed, &settings)?,
    };
    let elapsed = start.elapsed();
    output::write_outcome(&out_dir, &outcome, seed)?;
    print!("{}", report::summary_text(&outcome.reports));
    println!(
        "{} reports in {:.2} s, written to {}",
        outcome.reports.len(),
        elapsed.as_secs_f64(),
        out_dir.display()
    );
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
