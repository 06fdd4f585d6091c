use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dsieve::scanner::{
    conjecture_rates, emit_report, regression_suite, scan_range, FailurePolicy, ReportFormat, ScanError, StrongMatch,
};
use dsieve::sieve::{build_sieve, format_dump};
use dsieve::symmetry::{compute_symmetry_group, decompose};

#[derive(Parser)]
#[command(
    name = "dsieve",
    version,
    about = "Goldbach dihedral sieve and its affine symmetry groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the sieve complement and prime split for even N.
    Sieve { n: u64 },
    /// Print the symmetry group G_N.
    Group { n: u64 },
    /// Classify every even N in a range and write a report.
    Scan {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Worker threads; 0 uses the available parallelism.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
        /// Exit 1 if any strong-conjecture field is false.
        #[arg(long)]
        strict: bool,
        /// Stop the whole scan on the first failing N.
        #[arg(long)]
        abort_on_error: bool,
    },
    /// Run a regression suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Jsonl => ReportFormat::Jsonl,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Published values and structural claims for small N.
    Paper,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e @ ScanError::Range { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode, ScanError> {
    match command {
        Command::Sieve { n } => {
            print!("{}", format_dump(&build_sieve(n)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Group { n } => {
            let g = compute_symmetry_group(&build_sieve(n)?)?;
            let d = decompose(&g);
            println!("N={n}");
            println!("order={}", g.order());
            println!("name={}", g.descriptor.name);
            println!("g1={}", g.g1_generator.unwrap_or(0));
            let h: Vec<String> = g.unit_part.iter().map(u64::to_string).collect();
            println!("H={}", h.join(","));
            println!("regime={}", d.regime);
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan {
            from,
            to,
            jobs,
            format,
            out,
            strict,
            abort_on_error,
        } => {
            let policy = if abort_on_error {
                FailurePolicy::AbortAll
            } else {
                FailurePolicy::Continue
            };
            let outcome = scan_range(from, to, jobs, policy)?;
            for s in &outcome.skipped {
                eprintln!("skipped N={}: {}", s.n, s.reason);
            }
            emit_report(&outcome.records, format.into(), &out)?;
            let rates = conjecture_rates(&outcome.records);
            eprintln!(
                "{} records; strong match 4|N {}/{}, 2 mod 4 {}/{}; weak failures {}",
                outcome.records.len(),
                rates.four_divides.matches,
                rates.four_divides.applicable,
                rates.two_mod_four.matches,
                rates.two_mod_four.applicable,
                rates.weak_failures,
            );
            let mismatch = outcome
                .records
                .iter()
                .any(|r| r.strong_conjecture_match == StrongMatch::Applicable(false));
            Ok(if strict && mismatch {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Verify { suite: Suite::Paper } => {
            let mut all = true;
            for c in regression_suite() {
                all &= c.passed;
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {:>2} {}: {}", c.id, c.name, c.detail);
            }
            Ok(if all { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
