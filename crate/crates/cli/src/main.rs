//! `psl2`: invariants, censuses, table checks, prime-triple searches,
//! Bateman-Horn estimates and the Heath-Brown scan from the command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage error,
//! 3 resource abort.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::BoolishValueParser;
use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "psl2", version, about = "Subgroup-class invariants of PSL(2,p) and related prime searches")]
struct Cli {
    /// Output format (hb defaults to csv, everything else to table).
    #[arg(long, global = true, value_enum, env = "PSL2_FORMAT")]
    format: Option<Format>,

    /// Worker threads for parallel scans.
    #[arg(long, global = true, env = "PSL2_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Profile and (i, c, s, n) for one prime.
    Invariants { p: u64 },
    /// Conjugacy classes of subgroups by type.
    Census(CensusArgs),
    /// Recompute the golden table of invariants.
    VerifyTable(VerifyArgs),
    /// Count t with three prime linear forms.
    Search(SearchArgs),
    /// Bateman-Horn estimate for a case or a polynomial family.
    Bhc(BhcArgs),
    /// Primes p = 5 mod 72 with few prime factors in p -/+ 1.
    Hb(HbArgs),
}

#[derive(Debug, Args)]
struct CensusArgs {
    p: u64,
    /// Also build the census by brute force and print the difference.
    #[arg(long, env = "PSL2_ORACLE", value_parser = BoolishValueParser::new())]
    oracle: bool,
    /// Allow the brute-force path for p = 17 and 19.
    #[arg(long, env = "PSL2_ALLOW_LARGE", value_parser = BoolishValueParser::new())]
    allow_large: bool,
    /// Include the full class lattice in JSON output.
    #[arg(long, env = "PSL2_LATTICE", value_parser = BoolishValueParser::new())]
    lattice: bool,
    /// Abort once this many subgroups have been found.
    #[arg(long, env = "PSL2_SUBGROUP_CAP", default_value_t = psl2::oracle::DEFAULT_SUBGROUP_CAP)]
    subgroup_cap: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Treat known issues as mismatches.
    #[arg(long, env = "PSL2_STRICT", value_parser = BoolishValueParser::new())]
    strict: bool,
    /// Also check the rows p = 3, 5, 7, 11, 13 by brute force.
    #[arg(long, env = "PSL2_ORACLE_ROWS", value_parser = BoolishValueParser::new())]
    oracle_rows: bool,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// a, b, c or d.
    case: String,
    #[arg(long, env = "PSL2_T_MAX")]
    t_max: u64,
    /// Largest number of hits kept; counts stay exact.
    #[arg(long, env = "PSL2_HIT_CAP", default_value_t = 10_000)]
    hit_cap: usize,
    #[arg(long, env = "PSL2_BLOCK_SIZE", default_value_t = 1 << 16)]
    block_size: u64,
    /// Hits shown in table output.
    #[arg(long, env = "PSL2_SHOW", default_value_t = 20)]
    show: usize,
    /// No progress on standard error.
    #[arg(long, short, env = "PSL2_QUIET", value_parser = BoolishValueParser::new())]
    quiet: bool,
}

#[derive(Debug, Args)]
struct BhcArgs {
    /// a, b, c or d; omit when --family is given.
    case: Option<String>,
    /// Polynomials as ascending coefficients, e.g. "5,12;1,3;1,2" or JSON.
    #[arg(long, env = "PSL2_FAMILY", conflicts_with = "case")]
    family: Option<String>,
    #[arg(long, env = "PSL2_X", default_value = "1e9")]
    x: String,
    /// Truncation bound P for the singular series.
    #[arg(long, env = "PSL2_TRUNC", default_value = "1e7")]
    trunc: String,
    /// JSON output of `search` for the same family and x; adds the relative error.
    #[arg(long, env = "PSL2_Q_FILE")]
    q_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HbArgs {
    #[arg(long, env = "PSL2_LIMIT", default_value_t = 1_000_000)]
    limit: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match cli.command {
        Command::Invariants { p } => commands::invariants(p, cli.format),
        Command::Census(a) => commands::census(&a, cli.format),
        Command::VerifyTable(a) => commands::verify_table(&a, cli.format),
        Command::Search(a) => commands::search(&a, cli.format),
        Command::Bhc(a) => commands::bhc(&a, cli.format),
        Command::Hb(a) => commands::hb(&a, cli.format),
    };
    match result {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Mismatch) => ExitCode::from(1),
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
