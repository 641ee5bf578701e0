//! `collatz-stairs` command-line driver.
//!
//! Exit codes: 0 success, 1 verification rejected, 2 bad arguments,
//! 3 step budget exhausted, 4 coverage scan left values unplaced.

mod records;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use collatz_stairs::{
    coverage_scan_range, generate_stair, stair_index_icltz, stair_index_iu, tree_dot, verify_bvc, Bvc, Error,
    Execution, Nat, Rejection, ScanConfig, TreeRoot, DEFAULT_MAX_STEPS,
};

use records::{write_records, Format, Record};

const EXIT_REJECTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INCOMPLETE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "collatz-stairs",
    version,
    about = "Generate and verify Collatz convergence stairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the candidates of one or more subtree stairs.
    Gen(GenArgs),
    /// Check a value against its binary verification code.
    Verify(VerifyArgs),
    /// Forward stair index of a value.
    Index(IndexArgs),
    /// Classify every value in 2..=max by forward simulation.
    Coverage(CoverageArgs),
    /// Render a backward reachability tree.
    Tree(TreeArgs),
}

/// Inclusive range written as `N` or `A-B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Span {
    lo: u32,
    hi: u32,
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
        let (lo, hi) = match s.split_once(['-', ':']) {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Span { lo, hi })
    }
}

#[derive(Args, Debug)]
struct Workers {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Subtree index, or an inclusive range such as 2-6.
    #[arg(long)]
    k: Span,
    /// Stair index, or an inclusive range such as 1-14.
    #[arg(long)]
    j: Span,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Also emit rejected candidates with their reason.
    #[arg(long)]
    include_rejected: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    workers: Workers,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    value: String,
    /// Code over {0,1}; may be empty.
    #[arg(long, default_value = "")]
    bvc: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Invariant {
    /// The cycle {1, 2, 4}.
    Icltz,
    /// All powers of two.
    Iu,
}

#[derive(Args, Debug)]
struct IndexArgs {
    #[arg(long)]
    n: String,
    #[arg(long, value_enum, default_value_t = Invariant::Iu)]
    invariant: Invariant,
    #[arg(long, env = "COLLATZ_STAIRS_BUDGET", default_value_t = DEFAULT_MAX_STEPS,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
}

#[derive(Args, Debug)]
struct CoverageArgs {
    /// Largest value to classify.
    #[arg(long = "max")]
    max: u64,
    #[arg(long, env = "COLLATZ_STAIRS_BUDGET", default_value_t = DEFAULT_MAX_STEPS,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Values per work unit. Reports depend on this, not on --workers.
    #[arg(long, default_value_t = collatz_stairs::coverage::DEFAULT_CHUNK_SIZE,
          value_parser = clap::value_parser!(u64).range(1..))]
    chunk_size: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    workers: Workers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Dot,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("root").required(true).args(["icltz", "k"])))]
struct TreeArgs {
    /// Stairs with respect to {1, 2, 4}.
    #[arg(long)]
    icltz: bool,
    /// Subtree rooted at (2^(2k) - 1)/3.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
    #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
    format: GraphFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure that maps to a specific exit code.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Exit(EXIT_USAGE, msg.into()).into()
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs `f` on a pool with the requested worker count.
fn with_workers<T: Send>(workers: &Workers, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers.workers {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n.into()).build()?;
        return Ok(pool.install(f));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    Ok(f())
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode> {
    if args.k.lo < 2 {
        return Err(usage(format!("--k must be >= 2 (got {})", args.k.lo)));
    }
    if args.j.lo < 1 {
        return Err(usage("--j must be >= 1"));
    }
    let records = with_workers(&args.workers, || -> Result<Vec<Record>> {
        let mut out = Vec::new();
        for k in args.k.lo..=args.k.hi {
            for j in args.j.lo..=args.j.hi {
                let stair = generate_stair(k, j)?;
                out.extend(
                    stair
                        .terms
                        .iter()
                        .filter(|t| args.include_rejected || t.is_accepted())
                        .map(Record::from_term),
                );
            }
        }
        Ok(out)
    })??;
    write_records(output(args.out.as_ref())?, args.format, &records)?;
    Ok(ExitCode::SUCCESS)
}

fn describe(r: &Rejection) -> String {
    match r {
        Rejection::NotNatural => "not-natural".into(),
        Rejection::PowerOfTwo => "power-of-two".into(),
        Rejection::AncestorPowerOfTwo { bit } => format!("ancestor power-of-two at bit {bit}"),
        Rejection::ParityViolation { bit, rule } => {
            format!("parity violation at bit {bit} ({})", rule.code())
        }
        Rejection::NonIntegerAncestor { bit } => format!("non-integer ancestor at bit {bit}"),
    }
}

fn looks_numeric(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, "0"));
    !int.is_empty()
        && !frac.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.bytes().all(|b| b.is_ascii_digit())
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let code: Bvc = args.bvc.parse().map_err(|e: Error| usage(e.to_string()))?;
    let result = match args.value.parse::<Nat>() {
        Ok(x) => verify_bvc(&x, &code),
        // Numeric but not a natural: an input the verifier itself rejects.
        Err(_) if looks_numeric(&args.value) => {
            println!("invalid: {}", describe(&Rejection::NotNatural));
            return Ok(ExitCode::from(EXIT_REJECTED));
        }
        Err(e) => return Err(usage(e.to_string())),
    };
    match result.rejection {
        None => {
            println!("valid");
            Ok(ExitCode::SUCCESS)
        }
        Some(r) => {
            println!("invalid: {}", describe(&r));
            println!("reason: {r}");
            Ok(ExitCode::from(EXIT_REJECTED))
        }
    }
}

fn cmd_index(args: &IndexArgs) -> Result<ExitCode> {
    let n: Nat = args.n.parse().map_err(|e: Error| usage(e.to_string()))?;
    if n.is_zero() {
        return Err(usage("--n must be >= 1"));
    }
    let outcome = match args.invariant {
        Invariant::Icltz => stair_index_icltz(&n, args.budget).map(|j| match j {
            0 => "invariant".to_string(),
            j => j.to_string(),
        }),
        Invariant::Iu => stair_index_iu(&n, args.budget).map(|idx| idx.to_string()),
    };
    match outcome {
        Ok(line) => {
            println!("{line}");
            Ok(ExitCode::SUCCESS)
        }
        Err(Error::BudgetExceeded { budget, .. }) => {
            println!("budget-exceeded steps={budget}");
            Ok(ExitCode::from(EXIT_BUDGET))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_coverage(args: &CoverageArgs) -> Result<ExitCode> {
    if args.max < 2 {
        return Err(usage("--max must be >= 2"));
    }
    let config = ScanConfig {
        budget: args.budget,
        chunk_size: args.chunk_size,
        execution: Execution::default(),
    };
    let report = with_workers(&args.workers, || coverage_scan_range(2, args.max, &config))??;
    let mut out = output(args.out.as_ref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    out.write_all(b"\n")?;
    out.flush()?;
    if report.complete() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} value(s) exhausted the step budget", report.budget_exceeded.len());
        Ok(ExitCode::from(EXIT_INCOMPLETE))
    }
}

fn cmd_tree(args: &TreeArgs) -> Result<ExitCode> {
    let root = match (args.icltz, args.k) {
        (true, None) => TreeRoot::Cycle,
        (false, Some(k)) if k >= 2 => TreeRoot::Subtree(k),
        (false, Some(k)) => return Err(usage(format!("--k must be >= 2 (got {k})"))),
        _ => bail!(usage("give exactly one of --icltz or --k")),
    };
    let GraphFormat::Dot = args.format;
    let dot = tree_dot(root, args.depth)?;
    let mut out = output(args.out.as_ref())?;
    out.write_all(dot.as_bytes())?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Index(a) => cmd_index(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Tree(a) => cmd_tree(a),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<Exit>().map_or(EXIT_USAGE, |e| e.0);
            ExitCode::from(code)
        }
    }
}
