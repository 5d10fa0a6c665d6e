//! `trl`: toral rank bounds and Hasse diagrams from the command line.
//!
//! Exit codes: 0 success, 2 mathematical rejection, 3 search incomplete
//! (budget exhausted or nothing found in the given library), 1 usage or
//! input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "trl", version, about = "Rational toral rank bounds and Hasse diagrams")]
struct Cli {
    /// Add wall-clock timings to reports.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model file and check D∘D = 0, minimality, purity and ellipticity.
    ModelCheck {
        path: PathBuf,
        /// Also compute cohomology dimensions in degrees 0..=N.
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long, env = "TRL_MAX_BASIS", default_value_t = trl_core::sullivan::DEFAULT_MAX_BASIS)]
        max_basis: usize,
    },
    /// Bound the toral rank: witness search from below, counting from above.
    Rank {
        path: PathBuf,
        #[arg(long)]
        max_r: Option<usize>,
        /// Node budget for the witness search.
        #[arg(long, env = "TRL_BUDGET_NODES")]
        budget: Option<u64>,
        /// Comma separated coefficients, e.g. `0,1,-1,1/2`.
        #[arg(long)]
        coeff_set: Option<String>,
    },
    /// Build the Hasse diagram from a witness library manifest.
    Diagram {
        library: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List all admissible diagram shapes of total rank N.
    Enumerate {
        #[arg(long)]
        rank: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Reconstruct lattice coordinates of a based graph (JSON or DOT).
    Embed {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Decide whether two based graphs are isomorphic.
    Iso { first: PathBuf, second: PathBuf },
    /// Look for a leaf on a square of a library's diagram.
    Leaves {
        library: PathBuf,
        /// Corners a b c d as `s,t`, with a at the bottom and c at the top.
        #[arg(long, num_args = 4, value_names = ["A", "B", "C", "D"])]
        square: Vec<String>,
    },
}

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = std::time::Instant::now();
    let result = match cli.command {
        Command::ModelCheck { path, max_degree, max_basis } => commands::model_check(&path, max_degree, max_basis),
        Command::Rank { path, max_r, budget, coeff_set } => commands::rank(&path, max_r, budget, coeff_set.as_deref()),
        Command::Diagram { library, format } => commands::diagram(&library, format),
        Command::Enumerate { rank, format } => commands::enumerate(rank, format),
        Command::Embed { graph, format } => commands::embed(&graph, format),
        Command::Iso { first, second } => commands::iso(&first, &second),
        Command::Leaves { library, square } => commands::leaves(&library, &square),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
            if cli.timings {
                eprintln!("elapsed_ms: {}", start.elapsed().as_millis());
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
