use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use catmn_cli::commands::{self, CliError, Output, TransportMode, EXIT_INPUT};
use catmn_core::fibered::Limits;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "catmn", version, about = "Verify idempotent (co)monads and their equivalences on finite categories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    RelabelOpposite,
    PowersetDualityDemo,
}

#[derive(Subcommand)]
enum Command {
    /// Run the validator of every block in a document
    Validate { path: PathBuf },
    /// Build a spec's total category and (co)monads, then run the maximal-normal pipeline
    MnCheck {
        path: PathBuf,
        /// Spec to use when the document has several
        #[arg(long)]
        spec: Option<String>,
    },
    /// Transport a spec's (co)monads across a contravariant equivalence
    Transport {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "relabel-opposite")]
        mode: Mode,
        #[arg(long)]
        spec: Option<String>,
    },
    /// Write a Graphviz digraph of a spec's total category or of a category
    ExportDot {
        path: PathBuf,
        /// Output file (standard output if omitted)
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Spec or category to draw
        #[arg(long)]
        name: Option<String>,
    },
    /// Print a seeded random spec
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of base objects
        #[arg(long, default_value_t = 4)]
        max_base: usize,
        /// Maximum number of non-identity base morphisms
        #[arg(long, default_value_t = 6)]
        max_morphisms: usize,
        /// Maximum number of elements per fiber
        #[arg(long, default_value_t = 5)]
        max_fiber: usize,
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Re-emit a document in canonical text or JSON form
    Convert {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run mn-check and both transport modes on the built-in fixtures
    Demo,
}

fn emit(output: &Output, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, &output.text).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (output, out) = match cli.command {
        Command::Validate { path } => (commands::cmd_validate(&path)?, None),
        Command::MnCheck { path, spec } => (commands::cmd_mn_check(&path, spec.as_deref())?, None),
        Command::Transport { path, mode, spec } => {
            let mode = match mode {
                Mode::RelabelOpposite => TransportMode::RelabelOpposite,
                Mode::PowersetDualityDemo => TransportMode::PowersetDualityDemo,
            };
            (commands::cmd_transport(&path, mode, spec.as_deref())?, None)
        }
        Command::ExportDot { path, out, name } => (commands::cmd_export_dot(&path, name.as_deref())?, out),
        Command::Random {
            seed,
            max_base,
            max_morphisms,
            max_fiber,
            json,
            out,
        } => {
            let limits = Limits {
                max_base_objects: max_base,
                max_base_morphisms: max_morphisms,
                max_fiber,
            };
            (commands::cmd_random(seed, limits, json)?, out)
        }
        Command::Convert { path, json } => (commands::cmd_convert(&path, json)?, None),
        Command::Demo => (commands::cmd_demo(), None),
    };
    emit(&output, out.as_ref())?;
    Ok(output.code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
