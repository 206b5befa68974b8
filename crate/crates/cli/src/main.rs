use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbilift::group::ClosureOptions;
use orbilift_cli::{parse, run, validate_thm37, Record, RunOptions};

#[derive(Parser)]
#[command(name = "orbilift", version, about = "Lift tensors and connections through orbit maps of finite linear groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the commands of a session file.
    Run {
        file: PathBuf,
        /// Emit one JSON object per command instead of text.
        #[arg(long)]
        json: bool,
        /// Largest group order accepted by closure.
        #[arg(long, default_value_t = ClosureOptions::default().cap)]
        cap: usize,
        /// Largest cyclotomic conductor accepted by closure.
        #[arg(long, default_value_t = ClosureOptions::default().conductor_max)]
        conductor_max: u32,
    },
    /// Built-in validation sweeps.
    Validate {
        #[command(subcommand)]
        which: Validation,
    },
}

#[derive(Subcommand)]
enum Validation {
    /// Compare the adapted-chart and pullback lifting routes on `y^m g(y)`
    /// tensors over cyclic groups.
    Thm37 {
        #[arg(long, default_value_t = 6)]
        rmax: u32,
        #[arg(long, default_value_t = 2)]
        pqmax: u32,
        /// Inclusive range `a..b` of orders `m`.
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true, value_parser = parse_range)]
        mrange: (i64, i64),
        #[arg(long)]
        json: bool,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or("expected a range a..b")?;
    let a: i64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            file,
            json,
            cap,
            conductor_max,
        } => {
            let src = match std::fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let session = match parse(&src) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions {
                closure: ClosureOptions { cap, conductor_max },
            };
            let report = match run(&session, &opts) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            print!("{}", if json { report.to_json_lines() } else { report.to_text() });
            if report.has_errors() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Validate {
            which: Validation::Thm37 { rmax, pqmax, mrange, json },
        } => {
            let outcome = validate_thm37(rmax, pqmax, mrange).map_err(|e| orbilift_cli::CommandError {
                span: Default::default(),
                message: e.to_string(),
            });
            let passed = matches!(&outcome, Ok(v) if v["passed"] == true);
            let record = Record {
                index: 1,
                command: "validate",
                input: format!("validate thm37 rmax {rmax} pqmax {pqmax} mrange {}..{}", mrange.0, mrange.1),
                outcome,
            };
            if json {
                println!("{}", record.to_json());
            } else {
                print!("{}", record.to_text());
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
