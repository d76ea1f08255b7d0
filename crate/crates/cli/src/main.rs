use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use groupcast::commands::{self, Options, Report};
use groupcast_core::geometry::Pruning;

#[derive(Parser)]
#[command(name = "groupcast", version, about = "Achievable-rate regions for groupcast broadcast channels")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// Superposition order override: inclusion or discrete.
    #[arg(long, global = true)]
    order: Option<String>,
    /// Variables or groups (splits, hats, tildes, aux) to project out.
    #[arg(long, global = true, value_delimiter = ',')]
    eliminate: Vec<String>,
    /// Numeric tolerance for comparisons and checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Redundancy::Syntactic)]
    redundancy: Redundancy,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Resource cap: FM rows, joint-table cells or codebook bits, by verb.
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Entropy values used to compare or prune (distribution, admissible
    /// input, entropy table or combination network).
    #[arg(long, global = true)]
    assign: Option<PathBuf>,
    /// Where to write the JSON artifact.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verb {
    /// Build an inequality system from a problem description.
    Build { input: PathBuf },
    /// Project variables out of a system.
    Eliminate { input: PathBuf },
    /// Decide whether two systems describe the same region.
    Compare { first: PathBuf, second: PathBuf },
    /// Tabulate the covering function over the up-sets of an order.
    Gamma { input: PathBuf },
    /// Check that a joint law follows the generation law of an order.
    Admissible { input: PathBuf },
    /// Estimate the covering probability of a random codebook.
    Covering { input: PathBuf },
    /// Run a packaged example end to end.
    Demo { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Redundancy {
    None,
    Syntactic,
    Exact,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let opts = Options {
        order: cli.order.clone(),
        eliminate: cli.eliminate.clone(),
        tol: cli.tol,
        redundancy: match cli.redundancy {
            Redundancy::None => Pruning::None,
            Redundancy::Syntactic => Pruning::Syntactic,
            Redundancy::Exact => Pruning::Exact,
        },
        seed: cli.seed,
        cap: cli.cap,
        assign: cli.assign.clone(),
    };
    let result = match &cli.verb {
        Verb::Build { input } => commands::build(input, &opts),
        Verb::Eliminate { input } => commands::eliminate(input, &opts),
        Verb::Compare { first, second } => commands::compare(first, second, &opts),
        Verb::Gamma { input } => commands::gamma(input, &opts),
        Verb::Admissible { input } => commands::admissible(input, &opts),
        Verb::Covering { input } => commands::covering(input, &opts),
        Verb::Demo { name } => commands::demo(name, &opts),
    };
    match result.and_then(|r| emit(r, cli.output.as_deref())) {
        Ok(negative) => ExitCode::from(if negative { 1 } else { 0 }),
        Err(e) => {
            log::error!("{e:#}");
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e) as u8)
        }
    }
}

fn emit(report: Report, output: Option<&std::path::Path>) -> anyhow::Result<bool> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", report.text.trim_end()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
        _ => {}
    }
    if let (Some(path), Some(json)) = (output, &report.json) {
        groupcast::io::write_atomic(path, json)?;
    }
    Ok(report.negative)
}
