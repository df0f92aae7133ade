use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use paracr_core::paracontact::{ConditionId, BUNDLES};
use paracr_core::presets::{Preset, PRESET_NAMES};
use paracr_core::verify::{self, spec, Report, RunFlags, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "paracr", version, about = "Verify almost paracontact metric structures on sampled charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Comma-separated condition ids, bundle names, or `all`.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Sample points to accept (spec default 64).
    #[arg(long)]
    points: Option<usize>,
    /// Sampler seed (spec default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Pass threshold on scaled residuals (spec default 1e-6).
    #[arg(long = "tol")]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a spec file and print a report.
    Verify {
        /// JSON spec file.
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Verify a built-in example, or write its spec file.
    Example {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
        /// Dimension parameter: the chart has dimension 2n+1.
        #[arg(long)]
        n: Option<usize>,
        /// Write the example's spec to PATH instead of running it.
        #[arg(long, value_name = "PATH")]
        emit_spec: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// List condition ids and bundles.
    ListChecks,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn dispatch(command: Command) -> paracr_core::Result<i32> {
    match command {
        Command::Verify { spec, run } => {
            let spec = verify::load_spec(&spec)?;
            verify_and_print(&spec, run)
        }
        Command::Example { name, n, emit_spec, run } => {
            let file = spec::SpecFile::for_preset(Preset::named(&name, n)?);
            if let Some(path) = emit_spec {
                std::fs::write(&path, file.to_json()?)?;
                return Ok(0);
            }
            verify_and_print(&spec::resolve(file)?, run)
        }
        Command::ListChecks => {
            for c in ConditionId::ALL {
                println!("{:<16} {}", c.id(), c.description());
            }
            println!();
            for (name, ids) in BUNDLES {
                let ids: Vec<&str> = ids.iter().map(|c| c.id()).collect();
                println!("{:<16} {}", name, ids.join(", "));
            }
            println!("{:<16} every condition defined in the chart's dimension", "all");
            Ok(0)
        }
    }
}

fn verify_and_print(spec: &verify::ManifoldSpec, args: RunArgs) -> paracr_core::Result<i32> {
    let flags = RunFlags {
        checks: args.checks,
        points: args.points,
        seed: args.seed,
        tolerance: args.tolerance,
    };
    let report: Report = verify::run(spec, &flags)?;
    match args.format {
        Format::Json => print!("{}", report.to_json()?),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(report.report.exit_code())
}
