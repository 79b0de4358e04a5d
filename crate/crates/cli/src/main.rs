//! `reproforge`: extract reproduction steps from bug-report text and search
//! a simulated app model for a crash-reproducing event sequence.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use reproforge_cli::commands;
use reproforge_cli::config::{InputMode, Policy, RunConfig};

#[derive(Parser)]
#[command(
    name = "reproforge",
    about = "Crash reproduction from bug-report steps over a simulated app model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonOpts {
    /// Bug report file (plain sentences, or bracketed trees with --input trees).
    #[arg(long)]
    report: Option<PathBuf>,
    /// App model file.
    #[arg(long = "app-model")]
    app_model: Option<PathBuf>,
    /// Word-vector file; the bundled vectors are used when omitted.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Config file; overrides defaults, overridden by flags.
    /// Falls back to the REPROFORGE_CONFIG environment variable.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed for the matcher.
    #[arg(long)]
    seed: Option<u64>,
    /// No-op budget per episode (bridges missing steps).
    #[arg(long = "noop-budget")]
    noop_budget: Option<u32>,
    /// Episode budget.
    #[arg(long)]
    episodes: Option<usize>,
    /// Matching policy.
    #[arg(long, value_parser = ["rl", "greedy"])]
    policy: Option<String>,
    /// Crash message that counts as a successful reproduction.
    #[arg(long = "crash-message")]
    crash_message: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report input mode.
    #[arg(long, value_parser = ["text", "trees"])]
    input: Option<String>,
    /// Optional wall-clock timeout in seconds (disables determinism).
    #[arg(long = "timeout-secs")]
    timeout_secs: Option<u64>,
}

impl CommonOpts {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        let config_path = self
            .config
            .clone()
            .or_else(|| std::env::var_os("REPROFORGE_CONFIG").map(PathBuf::from));
        if let Some(path) = config_path {
            config.apply_file(&path)?;
        }
        if let Some(p) = &self.report {
            config.report_path = Some(p.clone());
        }
        if let Some(p) = &self.app_model {
            config.app_model_path = Some(p.clone());
        }
        if let Some(p) = &self.embeddings {
            config.embeddings_path = Some(p.clone());
        }
        if let Some(seed) = self.seed {
            config.hyper.seed = seed;
        }
        if let Some(n0) = self.noop_budget {
            config.hyper.n0 = n0;
        }
        if let Some(episodes) = self.episodes {
            config.hyper.episode_budget = episodes;
        }
        if let Some(policy) = &self.policy {
            config.policy = Policy::parse(policy)?;
        }
        if let Some(message) = &self.crash_message {
            config.crash_message = Some(message.clone());
        }
        if let Some(out) = &self.out {
            config.out_path = Some(out.clone());
        }
        if let Some(input) = &self.input {
            config.input_mode = InputMode::parse(input)?;
        }
        if let Some(secs) = self.timeout_secs {
            config.hyper.wall_clock_timeout = Some(std::time::Duration::from_secs(secs));
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract structured steps from a bug report.
    Extract {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Extract steps and search the app model for a reproducing trace.
    Reproduce {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Re-execute a trace through the app model and verify the crash.
    Replay {
        #[command(flatten)]
        common: CommonOpts,
        /// Trace file produced by `reproduce`.
        #[arg(long)]
        trace: PathBuf,
    },
    /// Run the bundled corpus: extraction metrics and scenario matrix.
    Bench {
        #[command(flatten)]
        common: CommonOpts,
        /// Corpus directory (with extraction/ and scenarios/ subdirories).
        #[arg(long)]
        corpus: PathBuf,
    },
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Extract { common } => {
            let config = common.resolve()?;
            let (_, code) = commands::cmd_extract(&config)?;
            Ok(code)
        }
        Command::Reproduce { common } => {
            let config = common.resolve()?;
            let (_, trace, code) = commands::cmd_reproduce(&config)?;
            eprintln!(
                "reproduce: {} after {} episode(s)",
                if trace.success { "success" } else { "failure" },
                trace.episodes_used
            );
            Ok(code)
        }
        Command::Replay { common, trace } => {
            let config = common.resolve()?;
            let (_, code) = commands::cmd_replay(&config, &trace)?;
            Ok(code)
        }
        Command::Bench { common, corpus } => {
            let config = common.resolve()?;
            let (_, code) = commands::cmd_bench(&config, &corpus)?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code.clamp(0, 255) as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}
