//! `gcs` command-line front end: config-driven experiments over the
//! groupoid, oscillator and coherent-frame toolkit, with JSON reports and
//! CSV plot tables.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub mod commands;
pub mod table;
pub mod tools;

pub use commands::{Report, Violation};
pub use table::emit_plot_table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_TOLERANCE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] gcs_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    GroupoidVerify,
    AlgebraCheck,
    OscillatorReport,
    Resolution,
    FOscillatorReport,
    FrameCheck,
    Stability,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::GroupoidVerify => "groupoid-verify",
            CommandName::AlgebraCheck => "algebra-check",
            CommandName::OscillatorReport => "oscillator-report",
            CommandName::Resolution => "resolution",
            CommandName::FOscillatorReport => "f-oscillator-report",
            CommandName::FrameCheck => "frame-check",
            CommandName::Stability => "stability",
        }
    }
}

/// Experiment description, as read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandName,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Parser)]
#[command(
    name = "gcs",
    version,
    about = "Groupoids, oscillators and coherent-state frames"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment config (JSON); flags override its params.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Tolerance for the command's headline quantity.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// CSV columns, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exhaustive axiom check of a finite groupoid.
    GroupoidVerify(GroupoidArgs),
    /// Homomorphism and C*-identity checks on random algebra elements.
    AlgebraCheck(AlgebraArgs),
    /// Ladder, coherent-state and Weyl-group diagnostics.
    OscillatorReport(OscillatorArgs),
    /// Quadrature resolution of the identity by coherent states.
    Resolution(ResolutionArgs),
    /// f-deformed oscillator diagnostics.
    FOscillatorReport(FOscillatorArgs),
    /// Frame operator, tightness and kernel checks for a family.
    FrameCheck(FrameArgs),
    /// Stability of a coherent family under time evolution.
    Stability(StabilityArgs),
    /// Convolution, norm and representation matrices of element files.
    Algebra(tools::AlgebraToolArgs),
    /// Writes an operator or state as row-major complex entries.
    Export(tools::ExportArgs),
}

impl Command {
    /// Experiment name; `None` for the one-shot tools.
    pub fn name(&self) -> Option<CommandName> {
        match self {
            Command::GroupoidVerify(_) => Some(CommandName::GroupoidVerify),
            Command::AlgebraCheck(_) => Some(CommandName::AlgebraCheck),
            Command::OscillatorReport(_) => Some(CommandName::OscillatorReport),
            Command::Resolution(_) => Some(CommandName::Resolution),
            Command::FOscillatorReport(_) => Some(CommandName::FOscillatorReport),
            Command::FrameCheck(_) => Some(CommandName::FrameCheck),
            Command::Stability(_) => Some(CommandName::Stability),
            Command::Algebra(_) | Command::Export(_) => None,
        }
    }

    fn overrides(&self) -> Result<Value, serde_json::Error> {
        match self {
            Command::GroupoidVerify(a) => serde_json::to_value(a),
            Command::AlgebraCheck(a) => serde_json::to_value(a),
            Command::OscillatorReport(a) => serde_json::to_value(a),
            Command::Resolution(a) => serde_json::to_value(a),
            Command::FOscillatorReport(a) => serde_json::to_value(a),
            Command::FrameCheck(a) => serde_json::to_value(a),
            Command::Stability(a) => serde_json::to_value(a),
            Command::Algebra(_) | Command::Export(_) => Ok(Value::Object(Map::new())),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GroupoidArgs {
    /// Pair groupoid on this many objects.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    /// Discrete groupoid with this many objects.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub units: Option<usize>,
    /// Order of a cyclic group acting on `points` points by translation.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cyclic: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Number of random pieces added to the disjoint union.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    /// Groupoid table file (JSON).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct AlgebraArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct OscillatorArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Coherent-state moduli, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triples: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ResolutionArgs {
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nr: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ntheta: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct FOscillatorArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// `one`, `sqrt`, `inv_sqrt` or a JSON array of f(1), f(2), ...
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct FrameArgs {
    /// `disk`, `half-disk`, `deformed` or `file`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nr: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ntheta: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// Random probe-block vectors used for the reconstruction check.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct StabilityArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// `harmonic` or `deformed`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    /// Coherent labels, comma separated complex numbers.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: CommandName,
    pub params: Map<String, Value>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub columns: Option<Vec<String>>,
}

impl Invocation {
    /// Merges config-file params with flag overrides; flags win.
    pub fn resolve(cli: Cli) -> Result<Self, CliError> {
        let name = cli
            .command
            .name()
            .ok_or_else(|| CliError::Validation("not an experiment command".into()))?;
        let mut params = Map::new();
        let mut output_path = None;
        let mut format = None;
        if let Some(path) = &cli.config {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read config {}: {e}", path.display()))
            })?;
            let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
                CliError::Validation(format!("invalid config {}: {e}", path.display()))
            })?;
            if config.command != name {
                return Err(CliError::Validation(format!(
                    "config is for `{}`, invoked `{}`",
                    config.command.as_str(),
                    name.as_str()
                )));
            }
            params = config.params;
            output_path = config.output_path;
            format = config.format;
        }
        if let Value::Object(flags) = cli.command.overrides()? {
            params.extend(flags);
        }
        if let Some(tol) = cli.tol {
            params.insert("tol".into(), tol.into());
        }
        if let Some(seed) = cli.seed {
            params.insert("seed".into(), seed.into());
        }
        Ok(Self {
            command: name,
            params,
            output_path: cli.out.or(output_path),
            format: cli.format.or(format).unwrap_or(Format::Json),
            columns: cli.columns,
        })
    }
}

/// Renders a report in the requested format.
pub fn render(
    report: &Report,
    format: Format,
    columns: Option<&[String]>,
) -> Result<String, CliError> {
    let value = serde_json::to_value(report)?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&value)? + "\n"),
        Format::Csv => {
            let cols: Vec<String> = match columns {
                Some(c) => c.to_vec(),
                None => report.default_columns.clone(),
            };
            emit_plot_table(&value, &cols)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let parent = p.parent().filter(|d| !d.as_os_str().is_empty());
            if let Some(dir) = parent {
                if !dir.is_dir() {
                    return Err(CliError::Validation(format!(
                        "output directory {} does not exist",
                        dir.display()
                    )));
                }
            }
            fs::write(p, text)?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var("GCS_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Validation(format!("GCS_THREADS must be an integer, got `{v}`"))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))
}

/// Runs a resolved invocation, returning the report without writing it.
pub fn execute(inv: &Invocation) -> Result<Report, CliError> {
    commands::run(inv.command, &inv.params)
}

fn run_tool(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let unused = [
        ("--config", cli.config.is_some()),
        ("--tol", cli.tol.is_some()),
        ("--seed", cli.seed.is_some()),
        ("--columns", cli.columns.is_some()),
    ];
    if let Some((flag, _)) = unused.iter().find(|(_, set)| *set) {
        return Err(CliError::Validation(format!(
            "{flag} does not apply to this command"
        )));
    }
    let format = cli.format.unwrap_or(Format::Json);
    let text = match &cli.command {
        Command::Algebra(a) => tools::run_algebra(a, format)?,
        Command::Export(a) => tools::run_export(a, format)?,
        _ => unreachable!("experiments are dispatched through Invocation"),
    };
    write_output(cli.out.as_deref(), &text, stdout)
}

/// Entry point shared by the binary and tests. Returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    if matches!(cli.command, Command::Algebra(_) | Command::Export(_)) {
        return match run_tool(&cli, stdout) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_INVALID
            }
        };
    }
    let outcome = Invocation::resolve(cli).and_then(|inv| {
        let report = thread_pool()?.install(|| execute(&inv))?;
        let text = render(&report, inv.format, inv.columns.as_deref())?;
        write_output(inv.output_path.as_deref(), &text, stdout)?;
        Ok(report)
    });
    match outcome {
        Ok(report) if report.violations.is_empty() => EXIT_OK,
        Ok(report) => {
            for v in &report.violations {
                let _ = writeln!(
                    stderr,
                    "tolerance violated: {} = {:e} > {:e}",
                    v.quantity, v.value, v.tolerance
                );
            }
            EXIT_TOLERANCE
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_become_params() {
        let cli = Cli::try_parse_from([
            "gcs",
            "resolution",
            "--R",
            "4.5",
            "--nr",
            "12",
            "--tol",
            "1e-3",
        ])
        .unwrap();
        let inv = Invocation::resolve(cli).unwrap();
        assert_eq!(inv.command, CommandName::Resolution);
        assert_eq!(inv.params["R"], 4.5);
        assert_eq!(inv.params["nr"], 12);
        assert_eq!(inv.params["tol"], 1e-3);
        assert!(!inv.params.contains_key("dim"));
        assert_eq!(inv.format, Format::Json);
    }

    #[test]
    fn unknown_param_is_rejected() {
        let mut params = Map::new();
        params.insert("radius".into(), 2.0.into());
        assert!(matches!(
            commands::run(CommandName::Resolution, &params),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn negative_points_parse() {
        let cli = Cli::try_parse_from(["gcs", "stability", "--points", "-1+2i,0.5-i"]).unwrap();
        let inv = Invocation::resolve(cli).unwrap();
        assert_eq!(inv.params["points"], serde_json::json!(["-1+2i", "0.5-i"]));
    }
}
