//! `wiperbench`: assemble, disassemble and run rain scenarios.
//!
//! Exit status: 0 on success, 1 when a scenario assertion fails or the
//! emulator halts, 2 for usage errors and unreadable or invalid inputs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wiperbench::asm::{assemble, disassemble, emit_hex, parse_hex, ObjectImage};
use wiperbench::bench::{self, render_summary, TraceFormat, TraceOutput};
use wiperbench::firmware;

#[derive(Parser)]
#[command(
    name = "wiperbench",
    version,
    about = "8051 rain-wiper co-simulation bench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble a source file to Intel HEX.
    Asm {
        source: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write a listing.
        #[arg(long)]
        listing: Option<PathBuf>,
    },
    /// Disassemble an Intel HEX file to stdout.
    Disasm { hex: PathBuf },
    /// Run one scenario file.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        firmware: PathBuf,
        #[command(flatten)]
        traces: TraceArgs,
    },
    /// Run every .scn file in a directory.
    Check {
        dir: PathBuf,
        /// Intel HEX image; the built-in controller when omitted.
        #[arg(long)]
        firmware: Option<PathBuf>,
        #[command(flatten)]
        traces: TraceArgs,
    },
}

#[derive(Args)]
struct TraceArgs {
    /// Directory for trace dumps.
    #[arg(long, env = "WIPERBENCH_TRACE_DIR")]
    trace_dir: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = ["csv", "vcd"])]
    format: String,
}

impl TraceArgs {
    fn output(&self) -> Option<TraceOutput> {
        let format = self.format.parse().unwrap_or(TraceFormat::Csv);
        self.trace_dir.as_ref().map(|dir| TraceOutput {
            dir: dir.clone(),
            format,
        })
    }
}

/// Failure with the exit status it maps to.
struct Failure {
    code: u8,
    msg: String,
}

fn input_error(msg: impl ToString) -> Failure {
    Failure {
        code: 2,
        msg: msg.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_hex(path: &Path) -> Result<ObjectImage, Failure> {
    parse_hex(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Asm {
            source,
            output,
            listing,
        } => {
            let asm = assemble(&read(&source)?)
                .map_err(|e| input_error(format!("{}: {e}", source.display())))?;
            for w in &asm.warnings {
                eprintln!("{}: warning: {w}", source.display());
            }
            write(&output, &emit_hex(&asm.image))?;
            if let Some(l) = listing {
                write(&l, &asm.listing)?;
            }
            Ok(())
        }
        Command::Disasm { hex } => {
            print!("{}", disassemble(&load_hex(&hex)?));
            Ok(())
        }
        Command::Run {
            scenario,
            firmware,
            traces,
        } => {
            let image = load_hex(&firmware)?;
            let sc = bench::load_scenario(&scenario).map_err(input_error)?;
            let report =
                bench::run_one(&sc, &image, traces.output().as_ref()).map_err(input_error)?;
            print!("{}", report.render());
            eprintln!("wall clock {:.3} s", report.wall_clock.as_secs_f64());
            if report.passed() {
                Ok(())
            } else {
                Err(Failure {
                    code: 1,
                    msg: format!("scenario {} failed", sc.name),
                })
            }
        }
        Command::Check {
            dir,
            firmware: hex,
            traces,
        } => {
            let image = match hex {
                Some(p) => load_hex(&p)?,
                None => firmware::build().map_err(input_error)?.image,
            };
            let started = std::time::Instant::now();
            let reports =
                bench::check_dir(&dir, &image, traces.output().as_ref()).map_err(input_error)?;
            print!("{}", render_summary(&reports));
            eprintln!("wall clock {:.3} s", started.elapsed().as_secs_f64());
            let failed: Vec<&str> = reports
                .iter()
                .filter(|r| !r.passed())
                .map(|r| r.scenario.as_str())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure {
                    code: 1,
                    msg: format!("failing scenarios: {}", failed.join(", ")),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("wiperbench: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
