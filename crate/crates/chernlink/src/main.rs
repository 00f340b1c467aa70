use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chernlink::commands::{self, EmitOptions};
use chernlink::config::{parse_config, RunConfig};

/// Chern numbers of separable two-band models: Berry-flux quadrature,
/// static loop linking, and quench-dynamics linking, side by side.
#[derive(Parser)]
#[command(name = "chernlink", version)]
struct Cli {
    /// Run configuration (`section.key = value` lines); defaults apply when
    /// omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Also write a JSON mirror of every CSV.
    #[arg(long, global = true)]
    json: bool,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Random seed (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Chern number three ways for one model.
    Invariants,
    /// Run the two-chain quench and emit the linking-number time series.
    Quench,
    /// Sweep the potential and tabulate the phase diagram.
    Sweep,
    /// Check the real-space construction against the momentum-space form.
    Verify {
        /// Deliberately corrupt one bond to confirm the check can fail.
        #[arg(long)]
        corrupt: bool,
    },
    /// Dump the static chain loops as CSV for plotting.
    Loops,
}

fn load_config(cli: &Cli) -> Result<RunConfig, chernlink::Error> {
    let mut cfg = match &cli.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), chernlink::Error> {
    let cfg = load_config(cli)?;
    let emit = EmitOptions {
        out_dir: cfg.output_dir.clone(),
        json: cli.json,
    };
    match cli.command {
        Command::Invariants => {
            commands::cmd_invariants(&cfg, &emit)?;
        }
        Command::Quench => {
            commands::cmd_quench(&cfg, &emit)?;
        }
        Command::Sweep => {
            commands::cmd_sweep(&cfg, &emit)?;
        }
        Command::Verify { corrupt } => {
            let report = commands::cmd_verify(&cfg, &emit, corrupt)?;
            if !report.pass {
                // a detected deviation is a failed verification
                std::process::exit(1);
            }
        }
        Command::Loops => {
            commands::cmd_loops(&cfg, &emit)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e) as u8)
        }
    }
}
