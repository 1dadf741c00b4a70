use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::Format;
use crate::error::{CliError, EXIT_USAGE};
use crate::run::{prepare, print_summary, run, trace, Overrides};
use crate::verify::{print_table, verify};

#[derive(Debug, Parser)]
#[command(name = "subqsl", version, about = "Speed limits for evolving subspaces")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Compute bound reports, summaries and angle traces.
    Run(RunArgs),
    /// Check numerical invariants on every instance.
    Verify(RunArgs),
    /// Write angle traces only.
    Trace(RunArgs),
    /// Print the version.
    Version,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// TOML run configuration.
    config: PathBuf,
    /// Output directory, relative to the working directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for the ensemble and the dispersion optimizer.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            output: self.output.clone(),
            seed: self.seed,
            jobs: self.jobs.map(|j| j as usize),
            formats: self.format.map(|f| match f {
                FormatArg::Csv => vec![Format::Csv],
                FormatArg::Json => vec![Format::Json],
                FormatArg::Both => vec![Format::Csv, Format::Json],
            }),
        }
    }
}

fn execute(verb: Verb) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let out_err = |e: std::io::Error| CliError::Output(e.to_string());
    match verb {
        Verb::Version => {
            writeln!(stdout.lock(), "subqsl {}", env!("CARGO_PKG_VERSION")).map_err(out_err)?;
            Ok(())
        }
        Verb::Run(args) => {
            let prepared = prepare(&args.config, &args.overrides())?;
            let outcome = run(&prepared)?;
            print_summary(&mut stdout.lock(), &outcome.summary).map_err(out_err)?;
            outcome.failure.map_or(Ok(()), Err)
        }
        Verb::Trace(args) => {
            let prepared = prepare(&args.config, &args.overrides())?;
            let outcome = trace(&prepared)?;
            writeln!(stdout.lock(), "traces written for {} instance(s)", outcome.results.len()).map_err(out_err)?;
            outcome.failure.map_or(Ok(()), Err)
        }
        Verb::Verify(args) => {
            let prepared = prepare(&args.config, &args.overrides())?;
            let rows = verify(&prepared)?;
            print_table(&mut stdout.lock(), &rows).map_err(out_err)?;
            let failed = rows.iter().filter(|r| r.failed > 0).count();
            if failed > 0 {
                Err(CliError::VerificationFailed { failed })
            } else {
                Ok(())
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command; returns the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(cli.verb) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
