//! Batch experiment driver: load models, run named experiments with fixed
//! seeds and truncation policies, emit CSV/JSON artifacts and a pass/fail
//! summary. Exit code 0 means every gate of the command passed, 1 means a
//! gate failed, 2 means the request itself was invalid.

mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use experiments::CommandOutcome;

#[derive(Parser)]
#[command(name = "levysup", version, about = "Supremum-law verification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Preset name (A, B, C, D, A-gammaC, brownY) or a section of --config.
    #[arg(long, env = "LEVYSUP_MODEL", default_value = "A")]
    model: String,

    /// Model definition file (key–value sections); presets are used when absent.
    #[arg(long, env = "LEVYSUP_CONFIG")]
    config: Option<PathBuf>,

    /// Master seed; every replication derives its own RNG stream from it.
    #[arg(long, env = "LEVYSUP_SEED", default_value_t = 42)]
    seed: u64,

    /// Number of replications.
    #[arg(long, env = "LEVYSUP_REPS", default_value_t = 100_000)]
    reps: usize,

    /// Output directory for CSV/JSON artifacts.
    #[arg(long, env = "LEVYSUP_OUT", default_value = "out")]
    out: PathBuf,

    /// Worker threads (default: available parallelism).
    #[arg(long, env = "LEVYSUP_WORKERS")]
    workers: Option<usize>,

    /// Gap threshold K for truncation policies.
    #[arg(long, env = "LEVYSUP_GAP_K", default_value_t = 40.0)]
    gap_k: f64,

    /// Minimum time before gap truncation may fire.
    #[arg(long, env = "LEVYSUP_MIN_TIME", default_value_t = 0.0)]
    min_time: f64,

    /// Hard per-replication event cap.
    #[arg(long, env = "LEVYSUP_EVENT_CAP", default_value_t = 10_000_000)]
    event_cap: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the geometric sup-Y sampler with the pathwise σ-stopped
    /// supremum; exit 0 iff they are statistically indistinguishable.
    VerifyTheorem {
        #[command(flatten)]
        common: Common,
        /// KS significance level for the two-sample gate.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Truncation level n for an infinite-activity C measure.
        #[arg(long)]
        trunc_level: Option<u32>,
    },
    /// In the μ_Z < c < μ_Z + μ_C regime the laws must differ; exit 0 iff
    /// the comparison rejects and the never-σ frequency matches 1 - p.
    VerifyCounterexample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// First-passage attribution and overshoot-law gates.
    VerifyCrossing {
        #[command(flatten)]
        common: Common,
        /// KS significance level for the overshoot-law gate.
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Distributional convergence across truncation/approximation levels.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// gamma-c (small-jump truncation of C) or brownian (diffusion atom).
        #[arg(long, default_value = "gamma-c")]
        scheme: String,
        /// Comma-separated levels.
        #[arg(long)]
        levels: Option<String>,
    },
    /// Endpoint-conditional positivity experiment.
    Takacs {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.0)]
        t: f64,
        #[arg(long, default_value_t = 0.25)]
        bin_width: f64,
        #[arg(long, default_value_t = 200)]
        min_bin_count: usize,
        /// Gate on the max per-bin deviation.
        #[arg(long, default_value_t = 0.02)]
        max_dev: f64,
    },
    /// Empirical downward hitting probability against e^(Φ(0)·y).
    Hitting {
        #[command(flatten)]
        common: Common,
        /// Target level y < 0.
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        level: f64,
    },
    /// Empirical Laplace transform of sup Y against -γλ/ψ(λ).
    Laplace {
        #[command(flatten)]
        common: Common,
        /// Comma-separated λ grid.
        #[arg(long, default_value = "0.5,1,2,5")]
        grid: String,
    },
    /// Write a raw sample set (CSV + JSON sidecar) without gates.
    Sample {
        #[command(flatten)]
        common: Common,
        /// sigma (pathwise) or geometric (sup-Y representation).
        #[arg(long, default_value = "sigma")]
        sampler: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, Box<dyn FnOnce() -> anyhow::Result<CommandOutcome> + Send>) =
        match &cli.command {
            Command::VerifyTheorem { common, alpha, trunc_level } => {
                let (c, a, t) = (common.clone(), *alpha, *trunc_level);
                (common, Box::new(move || experiments::verify_theorem(&c, a, t)))
            }
            Command::VerifyCounterexample { common, alpha } => {
                let (c, a) = (common.clone(), *alpha);
                (common, Box::new(move || experiments::verify_counterexample(&c, a)))
            }
            Command::VerifyCrossing { common, alpha } => {
                let (c, a) = (common.clone(), *alpha);
                (common, Box::new(move || experiments::verify_crossing(&c, a)))
            }
            Command::Convergence { common, scheme, levels } => {
                let (c, s, l) = (common.clone(), scheme.clone(), levels.clone());
                (common, Box::new(move || experiments::convergence(&c, &s, l.as_deref())))
            }
            Command::Takacs { common, t, bin_width, min_bin_count, max_dev } => {
                let (c, t, w, m, d) = (common.clone(), *t, *bin_width, *min_bin_count, *max_dev);
                (common, Box::new(move || experiments::takacs(&c, t, w, m, d)))
            }
            Command::Hitting { common, level } => {
                let (c, y) = (common.clone(), *level);
                (common, Box::new(move || experiments::hitting(&c, y)))
            }
            Command::Laplace { common, grid } => {
                let (c, g) = (common.clone(), grid.clone());
                (common, Box::new(move || experiments::laplace(&c, &g)))
            }
            Command::Sample { common, sampler } => {
                let (c, s) = (common.clone(), sampler.clone());
                (common, Box::new(move || experiments::sample(&c, &s)))
            }
        };

    let outcome = match common.workers {
        Some(w) if w > 0 => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: failed to build worker pool: {e}");
                    return ExitCode::from(2);
                }
            };
            pool.install(run)
        }
        _ => run(),
    };

    match outcome {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            if outcome.passed {
                println!("RESULT: PASS");
                ExitCode::SUCCESS
            } else {
                println!("RESULT: FAIL");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
