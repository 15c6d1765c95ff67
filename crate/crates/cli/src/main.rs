use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mvframe_cli::config::{Construction, ExperimentConfig, Params};
use mvframe_cli::output::{with_suffix, write_json};
use mvframe_cli::{properties, run_counterexamples, run_experiment, write_outcome, CliError};

#[derive(Parser)]
#[command(name = "mvframe", version, about = "Matrix-valued Riesz basis and frame lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one JSON experiment config.
    Run {
        config: PathBuf,
        /// Output prefix; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entry swap, image family and transpose counterexamples on Z_n, s = r = 2.
    Counterexamples {
        /// Comma-separated group orders.
        #[arg(long, value_delimiter = ',', default_value = "4")]
        group: Vec<usize>,
        #[arg(long, default_value = "counterexamples")]
        out: PathBuf,
    },
    /// Randomized property trials.
    Properties {
        #[arg(long, default_value_t = 32)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compose every Holub generator with the entry swap. On shapes with
        /// s >= 2 this breaks adjointability and must be caught.
        #[arg(long)]
        corrupt: bool,
        #[arg(long, default_value = "properties")]
        out: PathBuf,
    },
    /// Parameter sweeps.
    Sweep {
        #[command(subcommand)]
        sweep: Sweep,
    },
}

#[derive(Subcommand)]
enum Sweep {
    /// Frame bounds of T^(1/2^(n-1)) for n = 1..=n_max.
    SqrtChain {
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        #[arg(long, value_delimiter = ',', default_value = "8")]
        group: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "sqrt_chain")]
        out: PathBuf,
    },
}

fn verdict(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn run_config(config: ExperimentConfig, out: &Path) -> Result<ExitCode, CliError> {
    let validated = config.validate()?;
    let outcome = run_experiment(&validated);
    write_outcome(out, &outcome)?;
    let r = &outcome.report;
    let failed = r.verdicts.iter().filter(|v| !v.pass).count();
    println!("{} on {}: {} checks, {} failed", validated.config.construction, r.space, r.verdicts.len(), failed);
    if let Some(e) = &r.error {
        eprintln!("error: {e}");
    }
    for v in r.verdicts.iter().filter(|v| !v.pass) {
        eprintln!("FAIL {}: {:?} > {:?}", v.name, v.value, v.limit);
    }
    println!("report: {}", with_suffix(out, "report.json").display());
    Ok(verdict(r.passed))
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let out = out.unwrap_or_else(|| PathBuf::from(&cfg.output));
            run_config(cfg, &out)
        }
        Command::Counterexamples { group, out } => {
            if let Some(&bad) = group.iter().find(|&&n| n == 0) {
                return Err(CliError::Config { path: "--group".into(), message: format!("group order {bad} must be positive") });
            }
            let run = run_counterexamples(&group)?;
            let path = with_suffix(&out, "report.json");
            write_json(&path, &run)?;
            for s in &run.suites {
                println!("{}: {}", s.space, if s.all_hold() { "all separations hold" } else { "FAILED" });
            }
            println!("report: {}", path.display());
            Ok(verdict(run.passed))
        }
        Command::Properties { trials, seed, corrupt, out } => {
            if trials == 0 {
                return Err(CliError::Config { path: "--trials".into(), message: "must be at least 1".into() });
            }
            let (report, replay) = properties::run_properties(trials, seed, corrupt);
            write_json(&with_suffix(&out, "report.json"), &report)?;
            for p in &report.properties {
                println!("{:<28} max residual {:.3e} (limit {:.0e}), {} failures", p.name, p.max_residual, p.limit, p.failures);
            }
            if let Some(replay) = replay {
                let path = with_suffix(&out, "replay.json");
                write_json(&path, &replay)?;
                eprintln!("FAIL {} at trial seed {}; replay: {}", replay.property, replay.trial_seed, replay.command);
                eprintln!("replay file: {}", path.display());
            }
            Ok(verdict(report.passed))
        }
        Command::Sweep { sweep: Sweep::SqrtChain { n_max, group, s, r, seed, out } } => {
            let cfg = ExperimentConfig {
                group,
                s,
                r,
                construction: Construction::SqrtChain,
                params: Params { n: Some(n_max), ..Params::default() },
                seed,
                tolerances: Default::default(),
                output: out.display().to_string(),
            };
            run_config(cfg, &out)
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MVFRAME_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Config {
        path: "MVFRAME_THREADS".into(),
        message: format!("expected a positive integer, got {raw:?}"),
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| CliError::Config {
        path: "MVFRAME_THREADS".into(),
        message: e.to_string(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| dispatch(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
