use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use avlift::cli::{run, OutputFormat, RunConfig, Subcommand};
use clap::{Args, Parser};

#[derive(Parser)]
#[command(
    name = "avlift",
    version,
    about = "Dimension, rank and isometry calculators for lifting abelian variety automorphisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output layout.
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Batch file: one item of key=value fields per line, `#` comments.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Inline key=value fields for a single item.
    fields: Vec<String>,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Forced ranks of a long exact sequence (`dims=1,2,1,1,1 left_closed=true right_open=true`).
    LesSolve {
        /// Solve the deformation-obstruction sequence of a graph in dimension g.
        #[arg(long = "g")]
        g: Option<i64>,
        /// Use 2g for the fourth term instead of g^2.
        #[arg(long)]
        paper_display: bool,
        /// Exit with status 3 when a sequence is infeasible.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Hodge, Hochschild and deformation dimensions (`g=2 char=5`).
    Dims {
        #[arg(long = "g")]
        g: Option<i64>,
        /// Characteristic of the base field, 0 or a prime.
        #[arg(long = "char")]
        characteristic: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Point count, trace, p-rank and j-invariant (`p=5 a=1 b=0`).
    EcAnalyze {
        #[command(flatten)]
        common: Common,
    },
    /// Derived equivalence of two curves (`e=5,1,0 f=5,4,0`).
    EcDerivedEq {
        #[command(flatten)]
        common: Common,
    },
    /// Check a single matrix (`ring=gaussian f=0,1,0,0,0,0,0,1`).
    IsomCheck {
        #[command(flatten)]
        common: Common,
    },
    /// All isometric matrices up to a height (`ring=int height=1`).
    IsomEnumerate {
        #[arg(long)]
        height: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Counting data for the kernel of Aut D^b(E) -> U(E × Ê) (`p=5 a=1 b=0`).
    KernelReport {
        #[command(flatten)]
        common: Common,
    },
}

fn config(command: Command) -> RunConfig {
    let (sub, common) = match &command {
        Command::LesSolve { common, .. } => (Subcommand::LesSolve, common),
        Command::Dims { common, .. } => (Subcommand::Dims, common),
        Command::EcAnalyze { common } => (Subcommand::EcAnalyze, common),
        Command::EcDerivedEq { common } => (Subcommand::EcDerivedEq, common),
        Command::IsomCheck { common } => (Subcommand::IsomCheck, common),
        Command::IsomEnumerate { common, .. } => (Subcommand::IsomEnumerate, common),
        Command::KernelReport { common } => (Subcommand::KernelReport, common),
    };
    let mut cfg = RunConfig::new(sub).with_fields(common.fields.clone());
    cfg.input_path = common.input.clone();
    cfg.output_format = common.format;
    match command {
        Command::LesSolve {
            g,
            paper_display,
            strict,
            ..
        } => {
            cfg.g = g;
            cfg.paper_display = paper_display;
            cfg.strict = strict;
        }
        Command::Dims { g, characteristic, .. } => {
            cfg.g = g;
            cfg.characteristic = characteristic;
        }
        Command::IsomEnumerate { height, .. } => cfg.height = height,
        _ => {}
    }
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&config(cli.command));
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.exit_code as u8)
}
