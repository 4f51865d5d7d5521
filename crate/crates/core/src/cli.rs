//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input or model error (including usage), 3 I/O
//! failure, 4 requirements cannot be satisfied.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::engine::{self, EngineError, EnumerateOptions, LayerKey};
use crate::ingest::{IngestError, Location, SourceFormat};
use crate::model::{Configuration, FeatureId, FeatureModel};
use crate::report::{ratio_text, Report, ScopeReport};
use crate::selfconfig::{self, RequirementSet, SelfConfigError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "scas", version, about = "Feature-model configuration engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Model file (.xml or .arcs)
    input: PathBuf,
    /// Input dialect, overriding the file extension
    #[arg(long, value_parser = clap::value_parser!(SourceFormat))]
    format: Option<SourceFormat>,
}

#[derive(Args, Debug, Default)]
struct Requirements {
    /// Features that must be selected (repeatable, comma-separated)
    #[arg(long, value_delimiter = ',')]
    require: Vec<String>,
    /// Features that must not be selected (repeatable, comma-separated)
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<String>,
    /// File of `token value` lines giving per-feature cost (default 1)
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a model
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// List the valid configurations of a scope, one per line
    Enumerate {
        #[command(flatten)]
        input: Input,
        /// Scope root feature (default: the model root)
        #[arg(long)]
        scope: Option<String>,
        /// Stop after this many configurations
        #[arg(long)]
        limit: Option<u64>,
        /// Print only the number of configurations
        #[arg(long)]
        count_only: bool,
    },
    /// Variability and commonality report
    Metrics {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with = "all_layers", required_unless_present = "all_layers")]
        scope: Option<String>,
        /// One entry per tagged level/layer subtree
        #[arg(long)]
        all_layers: bool,
    },
    /// Cheapest valid configuration meeting the requirements
    Select {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        scope: Option<String>,
        #[command(flatten)]
        req: Requirements,
    },
    /// Smallest change from a current configuration to a valid one
    Reconfigure {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        scope: Option<String>,
        /// File holding the current configuration as one comma-separated line
        #[arg(long)]
        current: PathBuf,
        #[command(flatten)]
        req: Requirements,
    },
}

/// Machine-readable error line written to standard error.
#[derive(Serialize)]
struct Diagnostic<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
}

struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
    location: Option<Location>,
    path: Option<PathBuf>,
}

impl Failure {
    fn input(kind: &'static str, message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, kind, message: message.into(), location: None, path: None }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            kind: "Io",
            message: format!("{}: {err}", path.display()),
            location: None,
            path: Some(path.to_path_buf()),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::input(e.kind_name(), e.to_string())
    }
}

impl From<SelfConfigError> for Failure {
    fn from(e: SelfConfigError) -> Self {
        let code = match e {
            SelfConfigError::NoValidConfiguration(_) | SelfConfigError::Contradictory(_) => EXIT_INFEASIBLE,
            _ => EXIT_INPUT,
        };
        Failure { code, ..Failure::input(e.kind_name(), e.to_string()) }
    }
}

struct Loaded {
    bytes: Vec<u8>,
    model: FeatureModel,
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(path, e))
}

fn load(input: &Input) -> Result<Loaded, Failure> {
    let format = match input.format.or_else(|| SourceFormat::from_path(&input.input)) {
        Some(f) => f,
        None => {
            return Err(Failure::input(
                "UnknownFormat",
                format!("cannot tell the format of {}; pass --format xml|arcs", input.input.display()),
            ))
        }
    };
    let bytes = read(&input.input)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Failure::input("MalformedDocument", format!("input is not UTF-8: {e}")))?;
    let model = format.parse(text).map_err(|e: IngestError| Failure {
        code: EXIT_INPUT,
        kind: e.kind_name(),
        message: e.to_string(),
        location: e.location(),
        path: Some(input.input.clone()),
    })?;
    Ok(Loaded { bytes, model })
}

fn resolve(model: &FeatureModel, token: &str) -> Result<FeatureId, Failure> {
    model.resolve(token).cloned().ok_or_else(|| EngineError::UnknownFeature(FeatureId::new(token)).into())
}

fn scope_or_root(model: &FeatureModel, scope: Option<&str>) -> Result<FeatureId, Failure> {
    match scope {
        Some(s) => resolve(model, s),
        None => Ok(model.root().id.clone()),
    }
}

fn requirements(model: &FeatureModel, req: &Requirements) -> Result<RequirementSet, Failure> {
    let mut out = RequirementSet::new();
    for t in req.require.iter().filter(|t| !t.is_empty()) {
        out.required.insert(resolve(model, t)?);
    }
    for t in req.exclude.iter().filter(|t| !t.is_empty()) {
        out.excluded.insert(resolve(model, t)?);
    }
    if let Some(path) = &req.weights {
        let text = String::from_utf8_lossy(&read(path)?).into_owned();
        for (id, w) in selfconfig::parse_weights(&text)? {
            out.weights.insert(resolve(model, id.as_str())?, w);
        }
    }
    Ok(out)
}

/// Tokens in canonical model order.
fn canonical_list(model: &FeatureModel, set: &BTreeSet<FeatureId>) -> String {
    let mut ids: Vec<&FeatureId> = set.iter().collect();
    ids.sort_by_key(|id| model.position(id));
    ids.iter().map(|id| id.as_str()).collect::<Vec<_>>().join(",")
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let options = EnumerateOptions::from_env();
    let io = |e: std::io::Error| Failure { code: EXIT_IO, ..Failure::input("Io", e.to_string()) };
    match cli.command {
        Command::Validate { input } => {
            let loaded = load(&input)?;
            writeln!(out, "{} features, {} arcs", loaded.model.feature_count(), loaded.model.arc_count())
                .map_err(io)?;
        }
        Command::Enumerate { input, scope, limit, count_only } => {
            let loaded = load(&input)?;
            let scope = scope_or_root(&loaded.model, scope.as_deref())?;
            let iter = engine::enumerate_configurations(&loaded.model, &scope, options.streaming(limit.is_some()))?;
            let iter = iter.take(limit.map_or(usize::MAX, |l| l.try_into().unwrap_or(usize::MAX)));
            if count_only {
                writeln!(out, "{}", iter.count()).map_err(io)?;
            } else {
                for config in iter {
                    writeln!(out, "{config}").map_err(io)?;
                }
            }
        }
        Command::Metrics { input, scope, all_layers } => {
            let loaded = load(&input)?;
            let model = &loaded.model;
            let scopes = if all_layers {
                engine::scas_report(model, options)?
                    .iter()
                    .map(|(key, metrics)| ScopeReport::new(Some(*key), metrics))
                    .collect()
            } else {
                let scope = scope_or_root(model, scope.as_deref())?;
                let feature = model.feature(&scope).expect("resolved");
                let key = feature.layer.map(|layer| LayerKey { level: feature.level, layer });
                vec![ScopeReport::new(key, &engine::layer_metrics(model, &scope, options)?)]
            };
            out.write_all(Report::new(&loaded.bytes, model, scopes).to_json().as_bytes()).map_err(io)?;
        }
        Command::Select { input, scope, req } => {
            let loaded = load(&input)?;
            let scope = scope_or_root(&loaded.model, scope.as_deref())?;
            let req = requirements(&loaded.model, &req)?;
            let sel = selfconfig::select_configuration(&loaded.model, &scope, &req, options)?;
            writeln!(out, "{}", sel.configuration).map_err(io)?;
            writeln!(out, "cost: {}", ratio_text(sel.cost.numer(), sel.cost.denom())).map_err(io)?;
        }
        Command::Reconfigure { input, scope, current, req } => {
            let loaded = load(&input)?;
            let model = &loaded.model;
            let scope = scope_or_root(model, scope.as_deref())?;
            let req = requirements(model, &req)?;
            let text = String::from_utf8_lossy(&read(&current)?).into_owned();
            let line = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
            let current = Configuration::parse_line(line)
                .iter()
                .map(|id| resolve(model, id.as_str()))
                .collect::<Result<Configuration, _>>()?;
            let plan = selfconfig::reconfigure(model, &scope, &current, &req, options)?;
            let body = format!(
                "target: {}\nadd: {}\nremove: {}\ndelta_size: {}\ncost: {}\n",
                plan.target,
                canonical_list(model, &plan.add),
                canonical_list(model, &plan.remove),
                plan.delta_size,
                ratio_text(plan.cost.numer(), plan.cost.denom()),
            );
            out.write_all(body.as_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let diag = Diagnostic {
                error: f.kind,
                message: f.message,
                line: f.location.map(|l| l.line),
                column: f.location.map(|l| l.column),
                path: f.path.map(|p| p.display().to_string()),
            };
            let _ = writeln!(err, "{}", serde_json::to_string(&diag).expect("diagnostic serializes"));
            f.code
        }
    }
}
