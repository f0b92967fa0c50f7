use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cvsep::cli::{self, ExitStatus};
use cvsep::oracle::{self, RandomSpec};
use cvsep::verify;

#[derive(Parser)]
#[command(name = "cvsep", version, about = "Two-mode Gaussian separability and squeezing analysis")]
struct Args {
    /// Classification tolerance
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for the verification suite
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a covariance matrix or standard form read from a file or stdin (`-`)
    Analyze { input: String },
    /// Analytic squeezers and bound on one ray
    Squeeze { a: f64, b: f64, t: f64 },
    /// Tabulate the boundary over a uniform t grid
    Scan {
        a: f64,
        b: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Shorthand for `--format csv`
        #[arg(long)]
        csv: bool,
    },
    /// Run the invariant suite
    Verify {
        #[arg(long, default_value_t = verify::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = verify::DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Draw seeded standard forms from a generator document
    Random {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(ExitStatus::InputError.code() as u8)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn read_input(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::InputError.code() } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if !(args.tol.is_finite() && args.tol >= 0.0) {
        return fail(format!("--tol must be a non-negative number, got {}", args.tol));
    }

    match args.command {
        Command::Analyze { input } => {
            let text = match read_input(&input) {
                Ok(t) => t,
                Err(e) => return fail(format!("{input}: {e}")),
            };
            let report = match cli::run_analyze(&text, args.tol) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            match args.format {
                Format::Text => print!("{}", cli::report_text(&report)),
                _ => print_json(&report),
            }
            ExitCode::from(report.exit_status().code() as u8)
        }
        Command::Squeeze { a, b, t } => match cli::run_squeeze(a, b, t) {
            Ok(r) => {
                match args.format {
                    Format::Json => print_json(&r),
                    _ => {
                        println!("r1 = {}", cli::fmt_float(r.r1));
                        println!("r2 = {}", cli::fmt_float(r.r2));
                        println!("c1sq_max = {}", cli::fmt_float(r.c1sq_max));
                        println!("c2sq_max = {}", cli::fmt_float(r.c2sq_max));
                    }
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Scan { a, b, steps, csv } => match cli::run_scan(a, b, steps) {
            Ok(rows) => {
                let format = if csv { Format::Csv } else { args.format };
                match format {
                    Format::Json => print_json(&rows),
                    Format::Csv => print!("{}", cli::scan_csv(&rows)),
                    Format::Text => print!("{}", cli::scan_text(a, b, &rows)),
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { grid, samples } => {
            let summary = verify::run_verify(grid, args.seed, samples);
            match args.format {
                Format::Json => print_json(&summary),
                _ => {
                    for c in &summary.checks {
                        let status = if c.passed { "PASS" } else { "FAIL" };
                        println!("{status} {:<40} {} ({} cases)", c.name, cli::fmt_float(c.max_residual), c.cases);
                    }
                }
            }
            if summary.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Random { spec, count } => {
            let text = match std::fs::read_to_string(&spec) {
                Ok(t) => t,
                Err(e) => return fail(format!("{}: {e}", spec.display())),
            };
            let spec: RandomSpec = match serde_json::from_str(&text) {
                Ok(s) => s,
                Err(e) => return fail(format!("line {}, column {}: {e}", e.line(), e.column())),
            };
            if let Err(e) = spec.validate() {
                return fail(e);
            }
            let mut rng = oracle::seed_state(spec.seed);
            let samples: Vec<_> = (0..count).map(|_| oracle::random_sample(&spec, &mut rng)).collect();
            match args.format {
                Format::Json => print_json(&samples),
                _ => {
                    println!("a,b,c1,c2,kind");
                    for s in &samples {
                        let sf = s.standard_form;
                        println!(
                            "{},{},{},{},{:?}",
                            cli::fmt_float(sf.a()),
                            cli::fmt_float(sf.b()),
                            cli::fmt_float(sf.c1()),
                            cli::fmt_float(sf.c2()),
                            s.kind
                        );
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
