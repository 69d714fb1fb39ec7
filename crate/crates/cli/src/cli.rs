//! Command-line entry point.
//!
//! Exit status: 0 on success, 1 when an input is invalid (diagram, mode
//! file, annotation, configuration), 2 on usage or I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ermodes::clauses::{clause_space_report, DEFAULT_CAP};
use ermodes::er::{parse_ir, serialize_ir, ERDiagram, IrError};
use ermodes::modes::{emit_modes, parse_modes, Dialect};
use ermodes::paths::{Strategy, WalkConfig};

use crate::jobs::{self, ModeSource, PathsOutput, CLAUSE_METRIC};
use crate::service;
use crate::store::Store;

#[derive(Debug, Parser)]
#[command(name = "ermodes", version, about = "Build ILP mode declarations from annotated ER diagrams")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a diagram against the model's rules
    Validate(ValidateArgs),
    /// Show the paths from the target to the important features
    Paths(PathsArgs),
    /// Generate modes from the diagram's annotation
    Gmc(GmcArgs),
    /// Generate baseline modes from seeded random walks
    Random(RandomArgs),
    /// Count the clause bodies a mode set admits
    Enumerate(EnumerateArgs),
    /// Convert a generic mode file to another dialect
    Emit(EmitArgs),
    /// Run the HTTP service
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Diagram file (or use --diagram)
    file: Option<PathBuf>,
    #[arg(long, conflicts_with = "file")]
    diagram: Option<PathBuf>,
    /// Print the canonical form instead of a summary
    #[arg(long)]
    canonical: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WalkArgs {
    /// shortest, shortest-all, all or random
    #[arg(long, default_value = "shortest")]
    strategy: Strategy,
    /// Maximum number of relationships on a path
    #[arg(long, default_value_t = 4)]
    max_depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    num_walks: usize,
}

impl WalkArgs {
    fn config(&self) -> WalkConfig {
        WalkConfig {
            strategy: self.strategy,
            max_depth: self.max_depth,
            seed: self.seed,
            num_walks: self.num_walks,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct PathsArgs {
    #[arg(long)]
    diagram: PathBuf,
    #[command(flatten)]
    walk: WalkArgs,
    /// Search for this feature instead of the important ones
    /// (`Owner.Attribute`, an entity or a relationship)
    #[arg(long)]
    feature: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GmcArgs {
    #[arg(long)]
    diagram: PathBuf,
    #[command(flatten)]
    walk: WalkArgs,
    #[arg(long, default_value = "generic")]
    dialect: Dialect,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RandomArgs {
    #[arg(long)]
    diagram: PathBuf,
    #[arg(long, default_value_t = 4)]
    max_depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    num_walks: usize,
    #[arg(long, default_value = "generic")]
    dialect: Dialect,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    /// Generic-dialect mode file
    #[arg(long, conflicts_with = "diagram", required_unless_present = "diagram")]
    modes: Option<PathBuf>,
    /// Diagram whose generated (or, with --exhaustive, baseline) modes to use
    #[arg(long)]
    diagram: Option<PathBuf>,
    #[arg(long, requires = "diagram")]
    exhaustive: bool,
    #[command(flatten)]
    walk: WalkArgs,
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EmitArgs {
    /// Generic-dialect mode file
    #[arg(long)]
    modes: PathBuf,
    #[arg(long, default_value = "generic")]
    dialect: Dialect,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    /// Directory holding the diagram files
    #[arg(long, default_value = "diagrams")]
    store: PathBuf,
}

/// A failed run: invalid input (exit 1) or an environment problem (exit 2).
#[derive(Debug)]
enum Failure {
    Invalid(anyhow::Error),
    Environment(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Invalid(e.into())
    }
}

fn env_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Environment(e.into())
}

type Outcome = Result<ExitCode, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2));
        }
    };
    let result = match cli.command {
        Command::Validate(a) => validate(a),
        Command::Paths(a) => paths(a),
        Command::Gmc(a) => gmc(a),
        Command::Random(a) => random(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Emit(a) => emit(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Environment(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(env_err)
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(env_err),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .context("cannot write to stdout")
                .map_err(env_err)
        }
    }
}

fn load(path: &Path) -> Result<ERDiagram, Failure> {
    let text = read(path)?;
    parse_ir(&text)
        .with_context(|| format!("{} is not a valid diagram", path.display()))
        .map_err(Failure::Invalid)
}

fn validate(a: ValidateArgs) -> Outcome {
    let path = a
        .file
        .or(a.diagram)
        .ok_or_else(|| env_err(anyhow!("no diagram given")))?;
    let text = read(&path)?;
    match parse_ir(&text) {
        Ok(d) => {
            let out = if a.canonical {
                serialize_ir(&d)
            } else {
                format!(
                    "valid: {} entities, {} relationships\n",
                    d.entities().len(),
                    d.relationships().len()
                )
            };
            write_out(a.output.as_deref(), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            let listing = match &e {
                IrError::Invalid(violations) => violations
                    .iter()
                    .map(|v| format!("{v}\n"))
                    .collect::<String>(),
                IrError::Syntax { .. } => format!("{e}\n"),
            };
            write_out(a.output.as_deref(), &listing)?;
            eprintln!("{}: invalid diagram", path.display());
            Ok(ExitCode::from(1))
        }
    }
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn paths(a: PathsArgs) -> Outcome {
    let d = load(&a.diagram)?;
    let cfg = a.walk.config();
    cfg.check()?;
    let feature = a
        .feature
        .as_deref()
        .map(|f| jobs::parse_feature(&d, f))
        .transpose()?;
    let out = jobs::paths(&d, &cfg, feature.as_ref())?;
    let text = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out).expect("paths serialize");
            s.push('\n');
            s
        }
        Format::Text => render_paths(&out),
    };
    write_out(a.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn render_paths(out: &PathsOutput) -> String {
    let mut s = String::new();
    match out {
        PathsOutput::Features(features) => {
            for f in features {
                s.push_str(&format!("{}:\n", f.feature));
                for p in &f.paths {
                    s.push_str(&format!("  {}\n", p.text));
                }
                if let Some(u) = &f.unreachable {
                    s.push_str(&format!("  ({u})\n"));
                }
            }
        }
        PathsOutput::Walks(walks) => {
            for w in walks {
                s.push_str(&format!("{}\n", w.text));
            }
        }
    }
    s
}

fn gmc(a: GmcArgs) -> Outcome {
    let d = load(&a.diagram)?;
    let out = jobs::modes(&d, &a.walk.config(), a.dialect)?;
    warn(&out.warnings);
    write_out(a.output.as_deref(), &out.text)?;
    Ok(ExitCode::SUCCESS)
}

fn random(a: RandomArgs) -> Outcome {
    let d = load(&a.diagram)?;
    let cfg = WalkConfig::random(a.max_depth, a.seed, a.num_walks);
    let out = jobs::modes(&d, &cfg, a.dialect)?;
    write_out(a.output.as_deref(), &out.text)?;
    Ok(ExitCode::SUCCESS)
}

fn enumerate(a: EnumerateArgs) -> Outcome {
    let report = match (&a.modes, &a.diagram) {
        (Some(path), _) => {
            let text = read(path)?;
            let m = parse_modes(&text).with_context(|| format!("{}", path.display()))?;
            clause_space_report(&m, a.max_len, a.cap)
        }
        (None, Some(path)) => {
            let d = load(path)?;
            let source = if a.exhaustive {
                ModeSource::Exhaustive
            } else {
                ModeSource::Gmc
            };
            jobs::clause_space(&d, source, &a.walk.config(), a.max_len, a.cap)?
        }
        (None, None) => unreachable!("clap requires --modes or --diagram"),
    };
    let text = match a.format {
        Format::Json => report.to_json(),
        Format::Text => format!("{CLAUSE_METRIC}\n{}", report.to_table()),
    };
    write_out(a.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn emit(a: EmitArgs) -> Outcome {
    let text = read(&a.modes)?;
    let m = parse_modes(&text).with_context(|| format!("{}", a.modes.display()))?;
    write_out(a.output.as_deref(), &emit_modes(&m, a.dialect))?;
    Ok(ExitCode::SUCCESS)
}

fn serve(a: ServeArgs) -> Outcome {
    let store = Store::open(&a.store)
        .with_context(|| format!("cannot open store {}", a.store.display()))
        .map_err(env_err)?;
    let runtime = tokio::runtime::Runtime::new().map_err(env_err)?;
    runtime
        .block_on(service::serve(SocketAddr::new(a.host, a.port), Arc::new(store)))
        .context("server failed")
        .map_err(env_err)?;
    Ok(ExitCode::SUCCESS)
}
