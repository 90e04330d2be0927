//! `bcf`: batch front end emitting CSV/JSON tables with run manifests.
//!
//! Exit status: 0 on success, 2 on invalid configuration, 3 when a resource
//! budget is exceeded.

mod commands;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use commands::Command;
use output::Format;

/// Output directory override for relative or omitted `--out` paths.
const OUT_DIR_ENV: &str = "BCF_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "bcf", version, about = "Backward continued fraction digit statistics, pressure and large deviations")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Output file; CSV output also writes `<out>.manifest.json`. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Budget(String),
    Io(std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid configuration: {m}"),
            CliError::Budget(m) => write!(f, "resource budget exceeded: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<bcf_core::Error> for CliError {
    fn from(e: bcf_core::Error) -> Self {
        match e {
            bcf_core::Error::Budget { .. } | bcf_core::Error::GrowthCriterionNotMet { .. } => {
                CliError::Budget(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn manifest(command: &Command, format: Format) -> Value {
    json!({
        "tool": "bcf",
        "version": bcf_core::VERSION,
        "format": format,
        "exact_values": "p/q strings",
        "float_values": "shortest round-trip decimal; inf, -inf, nan as text",
        "command": command,
    })
}

/// Re-runs the command recorded in a manifest (a sidecar or a JSON output).
fn load_manifest(path: &Path) -> Result<(Command, Format), CliError> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let m = v.get("manifest").unwrap_or(&v);
    let bad = |what: &str| CliError::Invalid(format!("{}: manifest has no valid {what}", path.display()));
    let command: Command =
        serde_json::from_value(m.get("command").cloned().ok_or_else(|| bad("command"))?).map_err(|_| bad("command"))?;
    let format: Format =
        serde_json::from_value(m.get("format").cloned().ok_or_else(|| bad("format"))?).map_err(|_| bad("format"))?;
    if matches!(command, Command::Replay(_)) {
        return Err(bad("command"));
    }
    Ok((command, format))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let (command, format) = match &cli.command {
        Command::Replay(args) => load_manifest(&args.manifest)?,
        c => (c.clone(), cli.format),
    };
    let table = commands::execute(&command)?;
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let path = output::resolve_path(cli.out.as_deref(), out_dir.as_deref(), command.stem(), format);
    output::write(&table, &manifest(&command, format), format, path.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bcf: {e}");
            ExitCode::from(e.code())
        }
    }
}
