use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fewbody_cli::report::write_output;
use fewbody_cli::{bench, emit_report, parse_config_in, run, CliError, Format, RunSpec};

#[derive(Parser)]
#[command(
    name = "fewbody",
    version,
    about = "Gaussian expansion method few-body solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the system described by a JSON config.
    Solve {
        /// JSON run config.
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve repeatedly with nmax (and Nmax) taken from a list, timing each run.
    Bench {
        /// JSON run config.
        config: PathBuf,
        /// Comma-separated basis sizes, e.g. `6,10,20,30`.
        #[arg(long, value_delimiter = ',', required = true)]
        nmax_list: Vec<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Overrides `output.format` of the config.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Overrides `output.path` of the config; stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

fn load(path: &Path, out: &OutputArgs) -> Result<RunSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut spec = parse_config_in(&text, path.parent())?;
    if let Some(f) = out.format {
        spec.output.format = f.into();
    }
    if let Some(p) = &out.out {
        spec.output.path = Some(p.clone());
    }
    Ok(spec)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { config, out } => {
            let spec = load(&config, &out)?;
            let report = run(&spec)?;
            for path in emit_report(&report, spec.output.format, spec.output.path.as_deref())? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Bench {
            config,
            nmax_list,
            out,
        } => {
            let spec = load(&config, &out)?;
            let report = bench(&spec, &nmax_list)?;
            write_output(
                &report.render(spec.output.format),
                spec.output.path.as_deref(),
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
