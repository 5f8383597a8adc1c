//! Command-line front end for the experiment campaigns.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qauth::experiments::{emit_to_path, parse_adversary, run_experiment, ExperimentConfig, ExperimentError, ExperimentKind, OutputFormat};
use qauth::KeyMaterial;

#[derive(Parser)]
#[command(name = "qauth", version, about = "Authenticated quantum teleportation campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detection rate against an intercept-resend repeater.
    Fig2Success(Common),
    /// Mean authentication rounds until detection.
    Fig3Rounds(Common),
    /// Mean data qubits leaked before detection.
    Fig4Leakage(Common),
    /// Authentication-to-data qubit ratio on an honest path.
    Fig5Overhead(Common),
    /// Closed-form detection probabilities per round count.
    Analytic(Common),
    /// Data qubits one key pass supports.
    Capacity(Common),
    /// Anything else, usually driven by --config.
    Custom(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Transfer lengths, comma separated or repeated.
    #[arg(long = "transfer-length", short = 't', value_delimiter = ',')]
    transfer_lengths: Vec<u32>,
    #[arg(long)]
    trials: Option<usize>,
    /// Data qubits each session tries to deliver.
    #[arg(long = "data-qubits")]
    data_qubits: Option<u64>,
    #[arg(long = "key-length")]
    key_length: Option<usize>,
    /// Fixed key: "0110..." or "0x<hex>:<bits>".
    #[arg(long)]
    key: Option<String>,
    /// honest, random-zx, always-z or always-x.
    #[arg(long)]
    adversary: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rows of the analytic table.
    #[arg(long)]
    rounds: Option<u32>,
    #[arg(long = "reverse-auth")]
    reverse_auth: bool,
}

fn load(kind: ExperimentKind, args: &Common) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
            let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
            let obj = value
                .as_object_mut()
                .ok_or_else(|| ExperimentError::Config("config must be a JSON object".into()))?;
            // The subcommand names the experiment unless it is `custom`.
            if kind != ExperimentKind::Custom || !obj.contains_key("experiment") {
                obj.insert("experiment".into(), serde_json::to_value(kind)?);
            }
            serde_json::from_value(value).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::new(kind),
    };
    if !args.transfer_lengths.is_empty() {
        cfg.transfer_lengths = args.transfer_lengths.clone();
    }
    if let Some(n) = args.trials {
        cfg.trials = n;
    }
    if let Some(n) = args.data_qubits {
        cfg.data_target = Some(n);
    }
    if let Some(n) = args.key_length {
        cfg.key_length = n;
    }
    if let Some(k) = &args.key {
        cfg.key = Some(k.parse::<KeyMaterial>().map_err(|e| ExperimentError::Config(e.to_string()))?);
    }
    if let Some(a) = &args.adversary {
        cfg.adversary = Some(parse_adversary(a).map_err(ExperimentError::Config)?);
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(r) = args.rounds {
        cfg.analytic_rounds = r;
    }
    if args.reverse_auth {
        cfg.reverse_auth = true;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Fig2Success(a) => (ExperimentKind::Fig2Success, a),
        Command::Fig3Rounds(a) => (ExperimentKind::Fig3Rounds, a),
        Command::Fig4Leakage(a) => (ExperimentKind::Fig4Leakage, a),
        Command::Fig5Overhead(a) => (ExperimentKind::Fig5Overhead, a),
        Command::Analytic(a) => (ExperimentKind::Analytic, a),
        Command::Capacity(a) => (ExperimentKind::Capacity, a),
        Command::Custom(a) => (ExperimentKind::Custom, a),
    };
    let result = load(kind, &args).and_then(|cfg| {
        let report = run_experiment(&cfg)?;
        emit_to_path(&report, cfg.format, args.out.as_deref())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qauth: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
