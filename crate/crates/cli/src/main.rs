use std::path::PathBuf;
use std::process::ExitCode;

use aircomp::commands::{run_analyze, run_mc, run_simulate, run_topology};
use aircomp::config::ExperimentConfig;
use aircomp::pool::ThreadPoolExecutor;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "aircomp",
    about = "Multi-cell non-coherent over-the-air majority-vote simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the two-hop training protocol and write metrics.csv.
    Simulate(RunArgs),
    /// Evaluate the closed-form probabilities and the convergence bound.
    Analyze(RunArgs),
    /// Compare the closed forms against their Monte-Carlo estimators.
    Mc(RunArgs),
    /// Build the deployment and write the node table.
    Topology(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; any value yields byte-identical results.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Overrides the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("{}: {e}", args.config.display()))?;
    let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<String, String> {
    let args = match &cli.command {
        Command::Simulate(a) | Command::Analyze(a) | Command::Mc(a) | Command::Topology(a) => a,
    };
    let cfg = load_config(args)?;
    let pool = ThreadPoolExecutor::new(args.workers.max(1));
    match cli.command {
        Command::Simulate(ref a) => {
            let summary = run_simulate(&cfg, &a.out, &pool).map_err(|e| e.to_string())?;
            Ok(format!(
                "simulate: {} rounds, {} devices, final mean accuracy {:.4} (metrics.csv written)",
                summary.rounds, summary.device_count, summary.final_acc_all.mean
            ))
        }
        Command::Analyze(ref a) => {
            let summary = run_analyze(&cfg, &a.out).map_err(|e| e.to_string())?;
            Ok(format!("analyze: {} rows (analysis.tsv written)", summary.rows))
        }
        Command::Mc(ref a) => {
            let summary = run_mc(&cfg, &a.out, &pool).map_err(|e| e.to_string())?;
            Ok(format!("mc: {} rows (mc.tsv written)", summary.rows))
        }
        Command::Topology(ref a) => {
            let summary = run_topology(&cfg, &a.out).map_err(|e| e.to_string())?;
            if !summary.isolated_servers.is_empty() || !summary.isolated_devices.is_empty() {
                eprintln!(
                    "warning: isolated nodes at the configured threshold \
                     (servers {:?}, devices {:?})",
                    summary.isolated_servers, summary.isolated_devices
                );
            }
            Ok(format!(
                "topology: {} servers, {} devices, K_c={} S_c={} (deployment.tsv written)",
                summary.server_count,
                summary.device_count,
                summary.typical_devices_per_server,
                summary.typical_servers_per_device
            ))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(message) => {
            println!("{message}");
            ExitCode::SUCCESS
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
