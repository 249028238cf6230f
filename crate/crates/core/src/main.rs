//! Command-line entry point: one subcommand per experiment, plus trace
//! simulation and config validation.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use mobrti::config::{validate_config, ExperimentConfig};
use mobrti::pipeline::{
    run_energy_gap, run_localization, run_presence, run_simulate, PipelineError, RunReport,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mobrti",
    about = "Through-wall device-free localization with mobile UWB transceivers, on synthetic channel data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Root seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Config override KEY=VALUE (repeatable), e.g. --override detector.tau=0.02
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write raw channel traces plus the derived feature CSV.
    Simulate(RunArgs),
    /// Empty-room vs link-line-presence energy sweep.
    EnergyGap(RunArgs),
    /// Oscillating-receiver presence detection experiment.
    Presence(RunArgs),
    /// Mobile-receiver tomographic localization campaign.
    Localize(RunArgs),
    /// Parse and validate a config, printing the resolved values.
    Validate {
        /// Experiment configuration file (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Config override KEY=VALUE (repeatable).
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config, overrides } => match validate_config(&config, &overrides) {
            Ok(cfg) => {
                print_resolved(&cfg);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Simulate(args) => run(args, run_simulate),
        Command::EnergyGap(args) => run(args, run_energy_gap),
        Command::Presence(args) => run(args, run_presence),
        Command::Localize(args) => run(args, run_localization),
    }
}

fn run(
    args: RunArgs,
    runner: fn(&ExperimentConfig, &std::path::Path) -> Result<RunReport, PipelineError>,
) -> ExitCode {
    let mut overrides = args.overrides.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    let cfg = match validate_config(&args.config, &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match runner(&cfg, &args.out) {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            println!("artifacts written to {}", report.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(PipelineError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn print_resolved(cfg: &ExperimentConfig) {
    println!("kind: {}", cfg.kind.as_str());
    println!("seed: {}", cfg.seed);
    println!(
        "scene: {} ({} walls)",
        cfg.scene_path.display(),
        cfg.scene.walls.len()
    );
    println!(
        "channel: fc {} Hz, bw {} Hz, Ts {} s, noise_rel {}, rho {}, early window {} s, max order {}",
        cfg.channel.center_freq_hz,
        cfg.channel.bandwidth_hz,
        cfg.channel.sample_period_s,
        cfg.channel.noise_rel,
        cfg.channel.rho,
        cfg.channel.early_window_s,
        cfg.channel.max_reflection_order
    );
    println!(
        "person: radius {} m, shadow loss {} dB",
        cfg.person.radius_m, cfg.person.shadow_loss_db
    );
    println!(
        "detector: tau {}, buffers {}/{}, events {}/{}",
        cfg.detector.tau,
        cfg.detector.short_len,
        cfg.detector.long_len,
        cfg.detector.event_count_threshold,
        cfg.detector.event_window
    );
    println!(
        "rti: lambda {} m, voxel {} m, reg {}, prior var {}, corr dist {} m, ref spacing {} m, cutoff {} m",
        cfg.rti.excess_path_len_m,
        cfg.rti.voxel_size_m,
        cfg.rti.reg_weight,
        cfg.rti.prior_variance,
        cfg.rti.corr_distance_m,
        cfg.rti.ref_max_spacing_m,
        cfg.rti.assoc_cutoff_m
    );
    if !cfg.overrides.is_empty() {
        for ov in &cfg.overrides {
            println!("override: {ov}");
        }
    }
}
