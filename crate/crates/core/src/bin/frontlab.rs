use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use frontlab::cli::{report_command, run_command, validate_reaction_command, RunOptions};

#[derive(Parser)]
#[command(name = "frontlab", version, about = "Reaction-diffusion front experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.directory`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the randomized enclosing-ball algorithm.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check the reaction term against the KPP, superposition and lower-bound hypotheses.
    ValidateReaction {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-derive verdicts from an existing report.csv.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out, seed, threads } => run_command(&config, &RunOptions { out, seed, threads }),
        Command::ValidateReaction { config } => validate_reaction_command(&config, &mut std::io::stdout()),
        Command::Report { config, out } => report_command(&config, out.as_deref()),
    };
    ExitCode::from(code as u8)
}
