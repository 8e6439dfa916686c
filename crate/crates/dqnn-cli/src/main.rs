//! `dqnn`: config-driven runner for the DQNN error-correction experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dqnn_cli::runner::{self, CliError};

#[derive(Parser)]
#[command(name = "dqnn", version, about = "Dissipative QNN training and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the training sessions of an experiment config.
    Train {
        /// TOML experiment config (see presets/).
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a checkpoint over a Bloch mesh.
    Eval {
        checkpoint: PathBuf,
        /// TOML evaluation spec (mesh size, mode, cases, channel).
        evalspec: PathBuf,
        /// Output directory for colormaps and the summary.
        #[arg(long, default_value = "eval_out")]
        out: PathBuf,
    },
    /// Report the learned logical basis of an encoding layer.
    ExtractCodeword {
        checkpoint: PathBuf,
        /// Mesh size for the per-case conditional fidelities.
        #[arg(long, default_value_t = 20)]
        mesh_n: usize,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare against the classical syndrome decoder over a p sweep.
    Oracle {
        /// Comma-separated flip probabilities, e.g. 0,0.1,0.2.
        #[arg(long)]
        p: String,
        /// Optional checkpoint supplying the model column.
        #[arg(long)]
        ckpt: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        mesh_n: usize,
        /// Write the table here instead of stdout only.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train { config, seed } => {
            let outcome = runner::cmd_train(&config, seed, None)?;
            println!(
                "trained {} epochs, final validation cost {:.6}, artifacts in {}",
                outcome.record.epochs.len(),
                outcome.final_val_cost,
                outcome.out_dir.display()
            );
            Ok(())
        }
        Command::Eval { checkpoint, evalspec, out } => {
            let summary = runner::cmd_eval(&checkpoint, &evalspec, &out)?;
            print!("{summary}");
            Ok(())
        }
        Command::ExtractCodeword { checkpoint, mesh_n, out } => {
            let report = runner::cmd_extract_codeword(&checkpoint, mesh_n)?;
            print!("{report}");
            if let Some(path) = out {
                std::fs::write(&path, &report).map_err(|e| {
                    CliError::Io(anyhow::anyhow!("writing {}: {e}", path.display()))
                })?;
            }
            Ok(())
        }
        Command::Oracle { p, ckpt, mesh_n, out } => {
            let ps = runner::parse_p_list(&p).map_err(CliError::Config)?;
            let csv = runner::cmd_oracle(&ps, ckpt.as_deref(), mesh_n, out.as_deref())?;
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
