use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gprime_core::fuzz::run_fuzz;
use gprime_core::instance::parse_instance_file;
use gprime_core::primeness::Method;
use gprime_core::report::{run, Command, ReportDocument, RunOptions};

#[derive(Parser)]
#[command(name = "gprime", version, about = "Primeness of finite groupoid-graded rings")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,

    /// Largest ring handed to a brute-force search.
    #[arg(long, env = "GPRIME_MAX_RING", global = true)]
    max_ring: Option<usize>,

    /// Include wall-clock timings (makes reports differ between runs).
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Oracle,
    Theorem,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every axiom of the instance.
    Validate { file: PathBuf },
    /// Support groupoid, isotropy, support-hubs and the nearly epsilon-strong test.
    Analyze { file: PathBuf },
    /// Decide primeness.
    Prime {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Oracle)]
        method: MethodArg,
    },
    /// Evaluate the seven equivalent conditions and compare them.
    Equivalence { file: PathBuf },
    /// Generate random instances and check every property on them.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions {
        max_ring: cli.max_ring,
        timings: cli.timings,
    };
    let doc = match cli.command {
        Cmd::Fuzz { seed, count } => {
            let mut doc = ReportDocument::empty("fuzz");
            doc.fuzz = Some(run_fuzz(seed, count, cli.max_ring.unwrap_or(4096)));
            doc
        }
        Cmd::Validate { ref file } => instance_command(file, Command::Validate, opts),
        Cmd::Analyze { ref file } => instance_command(file, Command::Analyze, opts),
        Cmd::Equivalence { ref file } => instance_command(file, Command::Equivalence, opts),
        Cmd::Prime { ref file, method } => {
            let method = match method {
                MethodArg::Oracle => Method::Oracle,
                MethodArg::Theorem => Method::Theorem,
                MethodArg::All => Method::All,
            };
            instance_command(file, Command::Prime(method), opts)
        }
    };
    match cli.output {
        Output::Json => println!("{}", doc.to_json()),
        Output::Text => print!("{}", doc.to_text()),
    }
    ExitCode::from(doc.exit_code() as u8)
}

fn instance_command(file: &PathBuf, command: Command, opts: RunOptions) -> ReportDocument {
    match parse_instance_file(file) {
        Ok(inst) => run(command, &inst, opts),
        Err(e) => ReportDocument::from_error(command.name(), &e),
    }
}
