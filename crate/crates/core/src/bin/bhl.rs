use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bhlab::harness::{
    error_exit_code, run_scan, run_spectrum, run_verify, write_result, Overrides, RunConfig, ScanKind, SuiteResult,
};
use bhlab::Result;

#[derive(Parser)]
#[command(name = "bhl", about = "Truncated Bose-Hubbard exact-diagonalization checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration (defaults apply to missing fields).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest basis dimension allowed.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite on the configured grid.
    Verify(Common),
    /// Run a parameter scan.
    Scan {
        #[arg(long, default_value = "condensation")]
        kind: String,
        #[command(flatten)]
        common: Common,
    },
    /// Write the spectrum of the base model.
    Spectrum {
        #[arg(long)]
        cutoff: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    Version,
}

fn load(c: &Common) -> Result<RunConfig> {
    let cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    Ok(cfg.apply(&Overrides {
        output: c.out.clone(),
        jobs: c.jobs,
        seed: c.seed,
        cap: c.cap,
    }))
}

fn finish(cfg: &RunConfig, result: SuiteResult) -> Result<i32> {
    write_result(&result, cfg, &cfg.output)?;
    for c in &result.checks {
        println!("{:<24} {:<12} {:>6} rows  {:.2}s", c.name, c.status.as_str(), c.count, c.runtime_s);
    }
    println!("output: {}", cfg.output.display());
    Ok(result.exit_code())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify(c) => {
            let cfg = load(&c)?;
            let r = run_verify(&cfg)?;
            finish(&cfg, r)
        }
        Command::Scan { kind, common } => {
            let cfg = load(&common)?;
            let kind: ScanKind = kind.parse()?;
            let r = run_scan(&cfg, kind)?;
            finish(&cfg, r)
        }
        Command::Spectrum { cutoff, common } => {
            let cfg = load(&common)?;
            let r = run_spectrum(&cfg, cutoff)?;
            finish(&cfg, r)
        }
        Command::Version => {
            println!("bhl {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
