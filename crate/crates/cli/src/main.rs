use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinlab::experiment::{self, ExperimentConfig, Overrides, TaskKind};
use spinlab::Error;

#[derive(Parser)]
#[command(name = "spinlab", version, about = "Weak-dependence certificates, Glauber mixing and concentration experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic and exact weak-dependence certificates
    Certify(Common),
    /// Run Glauber chains and record configurations
    Sample(Common),
    /// Exact mixing time against the certified bound
    MixExact(Common),
    /// Empirical tails of a multilinear polynomial against its bound
    ConcTails(Common),
    /// Normal approximation of subgraph counts in G(n, p)
    Clt(Common),
    /// Centered vs corrected triangle statistics in an ERGM
    Figure1(Common),
    /// Check a config without running it
    Validate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<String>,
}

impl Common {
    fn overrides(&self, task: Option<TaskKind>) -> Overrides {
        Overrides {
            task,
            seed: self.seed,
            threads: self.threads,
            out: self.out.clone(),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        _ => 3,
    }
}

fn validate(common: &Common) -> ExitCode {
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.config.display());
            return ExitCode::from(2);
        }
    };
    let report = experiment::validate(&text, &common.overrides(None));
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for e in &report.errors {
        println!("error: {e}");
    }
    if report.is_ok() {
        println!("ok");
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn run(common: &Common, task: TaskKind) -> ExitCode {
    let result = ExperimentConfig::load(&common.config)
        .and_then(|c| c.resolve(&common.overrides(Some(task))))
        .and_then(|c| experiment::run_and_write(&c));
    match result {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Validate(c) => validate(c),
        Command::Certify(c) => run(c, TaskKind::Certify),
        Command::Sample(c) => run(c, TaskKind::Sample),
        Command::MixExact(c) => run(c, TaskKind::MixExact),
        Command::ConcTails(c) => run(c, TaskKind::ConcTails),
        Command::Clt(c) => run(c, TaskKind::Clt),
        Command::Figure1(c) => run(c, TaskKind::Figure1),
    }
}
