//! `vfrls`: run canned or file-described receiver experiments.
//!
//! `run` executes a preset plan or a TOML scenario and writes CSV plus a
//! metadata sidecar; `validate` resolves a scenario file and echoes it
//! with every default filled in. Exit codes: 0 on success, 2 for usage
//! and configuration problems, 3 when every Monte Carlo trial diverged,
//! 1 for runtime failures such as unwritable output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use vfrls_core::harness::HarnessError;
use vfrls_sim::config::{ConfigError, ScenarioFile};
use vfrls_sim::output::MetaSidecar;
use vfrls_sim::presets::{self, LabeledScenario, PlanKind, RunPlan};
use vfrls_sim::runner::{execute, RunError};

#[derive(Parser)]
#[command(
    name = "vfrls",
    version,
    about = "DS-CDMA adaptive receiver simulator with variable forgetting-factor RLS"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a scenario file and write CSV results.
    Run(RunArgs),
    /// Resolve a scenario file and print it with all defaults filled.
    Validate {
        /// TOML scenario file.
        path: PathBuf,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
struct RunArgs {
    /// Named experiment plan; see `--preset help` for the list.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// TOML scenario file, run as a single trace experiment.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Results file; a `<out>.meta.toml` sidecar lands next to it.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,

    /// Override the Monte Carlo run count of every scenario.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    runs: Option<u64>,

    /// Override the master seed of every scenario.
    #[arg(long)]
    seed: Option<u64>,

    /// Keep only these algorithms (comma-separated names).
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    algorithms: Option<Vec<String>>,

    /// Channel experiments behind each weight-increment covariance
    /// estimate used by the fading predictions.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    q_experiments: u64,
}

/// Error plus the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: String) -> Failure {
    Failure { code: 2, message }
}

fn config_failure(e: ConfigError) -> Failure {
    usage(e.to_string())
}

fn run_failure(e: RunError) -> Failure {
    let code = match &e {
        RunError::Harness(HarnessError::AllTrialsDiverged { .. }) => 3,
        _ => 1,
    };
    Failure { code, message: e.to_string() }
}

const ALGORITHM_NAMES: [&str; 5] = ["ctvff", "gvff", "fixed", "sg", "rake"];

fn init_threads() -> Result<(), Failure> {
    let Some(raw) = std::env::var_os("VFRLS_THREADS") else {
        return Ok(());
    };
    let text = raw.to_string_lossy();
    let n: usize = text
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| usage(format!("VFRLS_THREADS must be a positive integer, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("VFRLS_THREADS: {e}")))
}

fn build_plan(args: &RunArgs) -> Result<RunPlan, Failure> {
    let mut plan = if let Some(name) = &args.preset {
        presets::by_name(name).ok_or_else(|| {
            usage(format!("unknown preset `{name}` (available: {})", presets::names().join(", ")))
        })?
    } else {
        let path = args.config.as_ref().expect("clap requires preset or config");
        let config = ScenarioFile::load(path)
            .and_then(|f| f.resolve())
            .map_err(config_failure)?;
        let label = String::from(config.algorithm.name());
        RunPlan {
            name: "config",
            scenarios: vec![LabeledScenario { label, config }],
            kind: PlanKind::Traces { analytical: false },
        }
    };

    if let Some(keep) = &args.algorithms {
        for name in keep {
            if !ALGORITHM_NAMES.contains(&name.as_str()) {
                return Err(usage(format!(
                    "unknown algorithm `{name}` (available: {})",
                    ALGORITHM_NAMES.join(", ")
                )));
            }
        }
        plan.scenarios.retain(|sc| keep.iter().any(|n| n == sc.config.algorithm.name()));
        if plan.scenarios.is_empty() {
            return Err(usage(format!(
                "preset `{}` has none of the requested algorithms",
                plan.name
            )));
        }
    }
    for sc in &mut plan.scenarios {
        if let Some(runs) = args.runs {
            sc.config.runs = runs as usize;
        }
        if let Some(seed) = args.seed {
            sc.config.seed = seed;
        }
    }
    Ok(plan)
}

fn run(args: &RunArgs) -> Result<(), Failure> {
    let plan = build_plan(args)?;
    let mut meta =
        execute(&plan, &args.out, args.q_experiments as usize).map_err(run_failure)?;
    meta.preset = args.preset.clone();
    meta.config_path = args.config.as_ref().map(|p| p.display().to_string());
    meta.write(&args.out).map_err(|e| Failure { code: 1, message: e.to_string() })?;
    eprintln!("wrote {} and {}", args.out.display(), MetaSidecar::path_for(&args.out).display());
    Ok(())
}

fn validate(path: &PathBuf) -> Result<(), Failure> {
    let config = ScenarioFile::load(path)
        .and_then(|f| f.resolve())
        .map_err(config_failure)?;
    print!("{}", ScenarioFile::from_config(&config).to_toml());
    Ok(())
}

fn dispatch() -> Result<(), Failure> {
    let cli = Cli::parse();
    init_threads()?;
    match &cli.command {
        Command::Run(args) => run(args),
        Command::Validate { path } => validate(path),
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
