use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use curvegerm::germ::{ReportFormat, DEFAULT_TRUNC_MAX};
use curvegerm::pipeline::EXIT_USAGE;
use curvegerm::{parse_instance, render_report, run, Stage};

#[derive(Parser)]
#[command(name = "curvegerm", version, about = "Invariants and A_e-codimension of parametrized curve germs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finiteness, primitivity and the conductor certificate only.
    Check(Opts),
    /// Ring invariants: δ, conductor, μ, m1, e, type.
    Invariants(Opts),
    /// Cotangent dimensions with formula and inequality checks.
    Codim(Opts),
    /// The full check suite, including ideal-assisted identities.
    Verify(Opts),
    /// Same computations as `verify`.
    Report(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct Opts {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// First truncation order (default max(8, 4 mt)).
    #[arg(long, value_parser = clap::value_parser!(u64).range(4..))]
    trunc_start: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_TRUNC_MAX as u64, value_parser = clap::value_parser!(u64).range(4..=1_000_000))]
    trunc_max: u64,
    /// Assert that the germ is quasihomogeneous.
    #[arg(long)]
    quasihomogeneous: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let (stage, opts) = match cli.command {
        Command::Check(o) => (Stage::Check, o),
        Command::Invariants(o) => (Stage::Invariants, o),
        Command::Codim(o) => (Stage::Codim, o),
        Command::Verify(o) | Command::Report(o) => (Stage::Full, o),
    };
    let text = match std::fs::read_to_string(&opts.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", opts.file.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let mut inst = match parse_instance(&text) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("{}:{}:{}: {}: {}", opts.file.display(), e.line, e.col, e.kind, e.message);
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    if opts.trunc_start.is_some_and(|s| s > opts.trunc_max) {
        eprintln!("error: --trunc-start exceeds --trunc-max");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    inst.options.trunc_start = opts.trunc_start.map(|s| s as usize);
    inst.options.trunc_max = opts.trunc_max as usize;
    inst.options.quasihomogeneous = opts.quasihomogeneous;
    inst.options.format = match opts.format {
        Format::Table => ReportFormat::Table,
        Format::Json => ReportFormat::Json,
    };
    let outcome = run(&inst, stage);
    print!("{}", render_report(&outcome, inst.options.format));
    ExitCode::from(outcome.exit_code as u8)
}
