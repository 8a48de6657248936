use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sftkit_cli::*;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "sftkit", version, about = "Conjugacy tools for one-sided shifts of finite type")]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Longest word used by `ck-check`.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_WORD_LEN)]
    max_word_len: usize,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Include wall time in the report. Reports are no longer byte-stable.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a graph or matrix file and check that it presents a shift.
    Validate { path: PathBuf },
    /// Decide one-sided conjugacy by total amalgamation. Exit 0 if conjugate, 1 if not.
    Conjugacy { a: PathBuf, b: PathBuf },
    /// Verify a conjugacy or eventual-conjugacy witness between two shifts.
    EventualCheck {
        a: PathBuf,
        b: PathBuf,
        witness: PathBuf,
        /// Replace the lag written in the witness file.
        #[arg(long)]
        lag: Option<usize>,
    },
    /// Print the total amalgamation with its move log.
    Amalgamate {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "first")]
        order: Order,
    },
    /// Seeded random checks of the groupoid axioms, the cocycle and ε.
    GroupoidCheck {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Cuntz-Krieger relations and d∘τ = φ on words up to `--max-word-len`.
    CkCheck { path: PathBuf },
    /// The E/F example from embedded data: not conjugate, eventually conjugate.
    #[command(name = "paper-example")]
    EfExample {
        /// Use this file for E instead of the embedded graph.
        #[arg(long)]
        graph_e: Option<PathBuf>,
        /// Use this file for F instead of the embedded graph.
        #[arg(long)]
        graph_f: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed;
    let result = timed(cli.timing, || match &cli.command {
        Command::Validate { path } => cmd_validate(path, seed),
        Command::Conjugacy { a, b } => cmd_conjugacy(a, b, seed),
        Command::EventualCheck { a, b, witness, lag } => cmd_eventual(a, b, witness, *lag, seed),
        Command::Amalgamate { path, order } => cmd_amalgamate(path, *order, seed),
        Command::GroupoidCheck { path, trials } => cmd_groupoid_verify(path, *trials, seed),
        Command::CkCheck { path } => cmd_ck_verify(path, cli.max_word_len, seed),
        Command::EfExample { graph_e, graph_f } => cmd_ef_example(graph_e.as_deref(), graph_f.as_deref(), seed),
    });
    match result {
        Ok(report) => {
            let out = match cli.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            print!("{out}");
            ExitCode::from(report.exit_code() as u8)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
