//! Command-line surface over the attachable-memory library.
//!
//! Exit codes are a stable contract for CI: 0 success, 1 semantic or
//! verification failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use attachmem::bench::{
    csv_header, render_table, report_to_csv_row, report_to_json, run_benchmark, run_suite,
    BenchReport, SuiteParams, WorkloadSpec,
};
use attachmem::fuzz::{run_fuzz, FuzzParams};
use attachmem::loader::{DirBookSource, LoadContext};
use attachmem::memory::{MemoryKind, MemoryParams};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "attachmem", version, about = "Attachable memory models: benchmarks, book loading, fuzzing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single benchmark row.
    Bench(BenchArgs),
    /// Run the six-row suite: {symmetric, asymmetric, attached} x {low, high}.
    Suite(SuiteArgs),
    /// Load a book file and print its invocation trace.
    Load(LoadArgs),
    /// Replay random operations through every model against the oracle.
    Fuzz(FuzzArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Args)]
struct ParamArgs {
    /// Symmetric address-space width in bits.
    #[arg(long, default_value_t = 32)]
    addr_bits: u32,
    /// Symmetric page size exponent.
    #[arg(long, default_value_t = 12)]
    page_bits: u32,
    /// Asymmetric flat-region length in bytes (power of two).
    #[arg(long, default_value_t = 1 << 24)]
    flat_len: u64,
}

impl ParamArgs {
    fn to_params(&self) -> MemoryParams {
        MemoryParams {
            addr_bits: self.addr_bits,
            page_bits: self.page_bits,
            flat_len: self.flat_len,
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Memory model to benchmark.
    #[arg(long)]
    model: MemoryKindArg,
    /// Base address: a number, or `low` (0) or `high` (6 x range).
    #[arg(long, default_value = "low")]
    base: String,
    /// Range length in bytes (power of two).
    #[arg(long, default_value_t = 1 << 24)]
    range: u64,
    /// Number of writes.
    #[arg(long, default_value_t = 20_000)]
    writes: u64,
    /// Byte value to write.
    #[arg(long, default_value_t = 1)]
    value: u8,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum MemoryKindArg {
    Oracle,
    Symmetric,
    Asymmetric,
    Attached,
}

impl From<MemoryKindArg> for MemoryKind {
    fn from(arg: MemoryKindArg) -> Self {
        match arg {
            MemoryKindArg::Oracle => MemoryKind::Oracle,
            MemoryKindArg::Symmetric => MemoryKind::Symmetric,
            MemoryKindArg::Asymmetric => MemoryKind::Asymmetric,
            MemoryKindArg::Attached => MemoryKind::Attached,
        }
    }
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 20_000)]
    writes: u64,
    #[arg(long, default_value_t = 1 << 24)]
    range: u64,
    /// Base address of the high rows.
    #[arg(long, default_value_t = 6 << 24)]
    high_base: u64,
    #[arg(long, default_value_t = 1)]
    value: u8,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Run one thread per row.
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct LoadArgs {
    /// Book file to load; includes resolve relative to its directory.
    path: PathBuf,
}

#[derive(Args)]
struct FuzzArgs {
    /// Total operations across all cases.
    #[arg(long, default_value_t = 100_000)]
    ops: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Operations per case (each case runs on fresh instances).
    #[arg(long, default_value_t = 1000)]
    case_ops: u64,
    /// Address universe (power of two).
    #[arg(long, default_value_t = 1 << 22)]
    addr_space: u64,
    #[command(flatten)]
    params: ParamArgs,
}

fn parse_base(base: &str, range: u64) -> Result<u64, String> {
    match base {
        "low" => Ok(0),
        "high" => range
            .checked_mul(6)
            .ok_or_else(|| "high base overflows for this range".to_string()),
        other => other.parse().map_err(|_| format!("bad --base value `{other}`")),
    }
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn print_reports(reports: &[BenchReport], format: Format) {
    match format {
        Format::Table => print!("{}", render_table(reports)),
        Format::Csv => {
            println!("{}", csv_header());
            for report in reports {
                println!("{}", report_to_csv_row(report));
            }
        }
        Format::Json => {
            for report in reports {
                println!("{}", report_to_json(report));
            }
        }
    }
}

fn cmd_bench(args: &BenchArgs) -> ExitCode {
    let base_addr = match parse_base(&args.base, args.range) {
        Ok(base) => base,
        Err(message) => return usage_error(message),
    };
    let spec = WorkloadSpec {
        n_writes: args.writes,
        base_addr,
        range_len: args.range,
        value: args.value,
        seed: args.seed,
        model: args.model.into(),
        params: args.params.to_params(),
    };
    if let Err(e) = spec.validate() {
        return usage_error(e);
    }
    match run_benchmark(&spec) {
        Ok(report) => {
            print_reports(std::slice::from_ref(&report), args.format);
            if report.verified {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: read-back verification failed");
                ExitCode::from(EXIT_FAILURE)
            }
        }
        Err(e) => usage_error(e),
    }
}

fn cmd_suite(args: &SuiteArgs) -> ExitCode {
    let sp = SuiteParams {
        n_writes: args.writes,
        range_len: args.range,
        high_base: args.high_base,
        value: args.value,
        seed: args.seed,
        params: args.params.to_params(),
        parallel: args.parallel,
    };
    match run_suite(&sp) {
        Ok(reports) => {
            print_reports(&reports, args.format);
            if reports.iter().all(|r| r.verified) {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: read-back verification failed");
                ExitCode::from(EXIT_FAILURE)
            }
        }
        Err(e) => usage_error(e),
    }
}

fn cmd_load(args: &LoadArgs) -> ExitCode {
    let root = args.path.parent().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    let book = match args.path.file_name().and_then(|n| n.to_str()) {
        Some(name) => name.to_string(),
        None => return usage_error(format!("bad book path `{}`", args.path.display())),
    };
    let source = DirBookSource::new(root);
    let mut ctx = LoadContext::new();
    match ctx.load_book(&source, &book) {
        Ok(()) => {
            for record in ctx.trace_log() {
                println!("{record}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn cmd_fuzz(args: &FuzzArgs) -> ExitCode {
    let params = FuzzParams {
        ops: args.ops,
        seed: args.seed,
        case_ops: args.case_ops,
        addr_space: args.addr_space,
        params: args.params.to_params(),
    };
    match run_fuzz(&params) {
        Ok(outcome) => match outcome.divergence {
            None => {
                println!(
                    "fuzz: {} ops in {} cases, all models agree with the oracle",
                    outcome.ops_run, outcome.cases_run
                );
                ExitCode::SUCCESS
            }
            Some(divergence) => {
                eprintln!("error: {divergence}");
                ExitCode::from(EXIT_FAILURE)
            }
        },
        Err(e) => usage_error(e),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Bench(args) => cmd_bench(&args),
        Command::Suite(args) => cmd_suite(&args),
        Command::Load(args) => cmd_load(&args),
        Command::Fuzz(args) => cmd_fuzz(&args),
    }
}
