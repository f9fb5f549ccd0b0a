use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use delay_spectra::cli::{emit, run, Command, Invocation};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Eig,
    Converge,
    Compare,
    Oracle,
    Check,
}

/// Spectra of evolution operators of linear delay and renewal equations.
#[derive(Debug, Parser)]
#[command(name = "delay-spectra", version)]
struct Args {
    command: Cmd,
    /// JSON run document
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Built-in problem: hayes, ode, re-basic, delayed-mathieu
    #[arg(long, value_name = "NAME")]
    problem: Option<String>,
    /// Directory for CSV output (stdout otherwise)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "U64", default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let command = match args.command {
        Cmd::Eig => Command::Eig,
        Cmd::Converge => Command::Converge,
        Cmd::Compare => Command::Compare,
        Cmd::Oracle => Command::Oracle,
        Cmd::Check => Command::Check,
    };
    let inv = Invocation {
        command,
        config: args.config,
        problem: args.problem,
        out: args.out,
        seed: args.seed,
    };
    let report = run(&inv);
    let out_dir = inv
        .out
        .clone()
        .or_else(|| delay_spectra::cli::load_spec(&inv).ok().and_then(|s| s.run.out));
    if let Err(e) = emit(&report, out_dir.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for m in &report.messages {
        eprintln!("{m}");
    }
    ExitCode::from(report.status.code() as u8)
}
