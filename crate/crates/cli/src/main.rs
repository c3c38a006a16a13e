use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lindblad_cli::{run, CliError, Command, Format, Options, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "lindblad", version, about = "Spectra, evolution and identity checks for bosonic Lindblad dynamics")]
struct Args {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Defaults to the config's output path, then standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also run the oracle cross-check for the command.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    tolerance: Option<f64>,
}

fn execute(args: &Args) -> Result<(), CliError> {
    let config = RunConfig::load(&args.config)?;
    let options = Options {
        verify: args.verify,
        tolerance: args.tolerance,
    };
    let report = run(args.command, &config, &options)?;
    let format = args.format.or(config.output.format).unwrap_or_default();
    let text = report.render(format)?;
    match args.output.as_ref().or(config.output.path.as_ref()) {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        })?,
        None => print!("{text}"),
    }
    let failures = report.failures();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(failures))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LINDBLAD_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let args = Args::parse();
    log::debug!("{args:?}");
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
