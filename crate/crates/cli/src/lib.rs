//! Batch front end over the crosswalk: `convert`, `validate` and `report`.
//!
//! Each command takes its configuration, the input paths and two writers
//! (standard output and standard error), and returns the process exit code:
//! [`EXIT_OK`], [`EXIT_ERROR`] or [`EXIT_STRICT`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use archemap::crosswalk::check_base_uri;
use archemap::ingest::{aspace::AspaceError, ead::EadError};
use archemap::profile::ProfileError;
use archemap::{
    convert, html_snippet, parse_aspace, parse_ead, parse_jsonld, serialize_jsonld,
    serialize_ntriples, AspaceBundle, ConversionReport, CrosswalkError, Graph, ModelVariant,
    Profile,
};
use rayon::prelude::*;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_STRICT: i32 = 2;

/// Environment variable consulted when no `--registry` is given.
pub const REGISTRY_ENV: &str = "ARCHEMAP_REGISTRY";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    Ead,
    Aspace,
    /// `.xml` files are EAD, directories are ArchivesSpace bundles.
    #[default]
    Auto,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ead" => Ok(InputFormat::Ead),
            "aspace" => Ok(InputFormat::Aspace),
            "auto" => Ok(InputFormat::Auto),
            other => Err(format!(
                "unknown input format `{other}` (expected ead, aspace or auto)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Jsonld,
    Ntriples,
    Html,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Jsonld => "jsonld",
            OutputFormat::Ntriples => "nt",
            OutputFormat::Html => "html",
        }
    }

    pub fn render(self, graph: &Graph, profile: &Profile) -> Vec<u8> {
        match self {
            OutputFormat::Jsonld => serialize_jsonld(graph, profile),
            OutputFormat::Ntriples => serialize_ntriples(graph, profile),
            OutputFormat::Html => html_snippet(graph, profile),
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonld" => Ok(OutputFormat::Jsonld),
            "ntriples" | "nt" => Ok(OutputFormat::Ntriples),
            "html" => Ok(OutputFormat::Html),
            other => Err(format!(
                "unknown output format `{other}` (expected jsonld, ntriples or html)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    /// Prefix for document IRIs; each input gets `{base_uri}/{stem}`.
    pub base_uri: String,
    pub variant: ModelVariant,
    pub input_format: InputFormat,
    pub output_format: OutputFormat,
    pub registry_path: Option<PathBuf>,
    pub pending_namespace: Option<String>,
    pub strict: bool,
    pub report_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            base_uri: String::new(),
            variant: ModelVariant::Alternative,
            input_format: InputFormat::Auto,
            output_format: OutputFormat::Jsonld,
            registry_path: None,
            pending_namespace: None,
            strict: false,
            report_path: None,
            out_dir: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot tell the input format; use --input-format")]
    UnknownFormat,
    #[error(transparent)]
    Ead(#[from] EadError),
    #[error(transparent)]
    Aspace(#[from] AspaceError),
    #[error(transparent)]
    Crosswalk(#[from] CrosswalkError),
}

#[derive(Debug, Error)]
pub enum SetupError {
    #[error("cannot read registry {path}: {source}")]
    RegistryIo {
        path: String,
        source: std::io::Error,
    },
    #[error("registry {path}: {source}")]
    Registry { path: String, source: ProfileError },
    #[error("invalid --base-uri: {0}")]
    BaseUri(String),
    #[error("{0} and {1} would both write {2}")]
    OutputClash(String, String, String),
}

/// Loads the registry named by the config, then `ARCHEMAP_REGISTRY`, then
/// the shipped default.
pub fn load_config_profile(config: &CliConfig) -> Result<Profile, SetupError> {
    let path = config.registry_path.clone().or_else(|| {
        std::env::var_os(REGISTRY_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    });
    let profile = match path {
        Some(path) => {
            let shown = path.display().to_string();
            let bytes = fs::read(&path).map_err(|source| SetupError::RegistryIo {
                path: shown.clone(),
                source,
            })?;
            archemap::load_profile(&bytes, config.variant).map_err(|source| {
                SetupError::Registry {
                    path: shown,
                    source,
                }
            })?
        }
        None => Profile::default_for(config.variant),
    };
    Ok(match &config.pending_namespace {
        Some(ns) => profile.with_pending_namespace(ns.clone()),
        None => profile,
    })
}

/// File stem used for the document IRI and the output name. Characters
/// outside `[A-Za-z0-9._~-]` become `-`.
pub fn document_stem(input: &Path) -> String {
    let raw = match input.file_stem() {
        Some(s) if input.is_dir() => input
            .file_name()
            .unwrap_or(s)
            .to_string_lossy()
            .into_owned(),
        Some(s) => s.to_string_lossy().into_owned(),
        None => "document".to_string(),
    };
    let stem: String = raw
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '~' | '-') {
                c
            } else {
                '-'
            }
        })
        .collect();
    if stem.is_empty() || stem.chars().all(|c| c == '.') {
        "document".to_string()
    } else {
        stem
    }
}

pub fn document_base(config: &CliConfig, input: &Path) -> String {
    format!(
        "{}/{}",
        config.base_uri.trim_end_matches('/'),
        document_stem(input)
    )
}

pub fn output_path(config: &CliConfig, input: &Path) -> PathBuf {
    let name = format!(
        "{}.{}",
        document_stem(input),
        config.output_format.extension()
    );
    match &config.out_dir {
        Some(dir) => dir.join(name),
        None => {
            let parent = input
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            parent.join(name)
        }
    }
}

/// Reads and converts one input.
pub fn convert_input(
    config: &CliConfig,
    profile: &Profile,
    input: &Path,
) -> Result<(Graph, ConversionReport), InputError> {
    let format = match config.input_format {
        InputFormat::Auto if input.is_dir() => InputFormat::Aspace,
        InputFormat::Auto
            if input
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("xml")) =>
        {
            InputFormat::Ead
        }
        InputFormat::Auto => return Err(InputError::UnknownFormat),
        explicit => explicit,
    };
    let tree = match format {
        InputFormat::Aspace => parse_aspace(&AspaceBundle::from_dir(input)?)?,
        _ => parse_ead(&fs::read(input)?)?,
    };
    Ok(convert(&tree, profile, &document_base(config, input))?)
}

struct Diagnostic<'a>(&'a Path, &'a dyn fmt::Display);

impl fmt::Display for Diagnostic<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.0.display(), self.1)
    }
}

struct Batch {
    inputs: Vec<PathBuf>,
    results: Vec<Result<(Graph, ConversionReport), InputError>>,
}

impl Batch {
    /// Converts every input (possibly in parallel), keeping results in
    /// sorted input order.
    fn run(config: &CliConfig, profile: &Profile, inputs: &[PathBuf]) -> Batch {
        let mut inputs = inputs.to_vec();
        inputs.sort();
        inputs.dedup();
        let results = inputs
            .par_iter()
            .map(|input| convert_input(config, profile, input))
            .collect();
        Batch { inputs, results }
    }

    fn report(&self) -> ConversionReport {
        let mut total = ConversionReport::new();
        for (_, report) in self.results.iter().flatten() {
            total.merge(report);
        }
        total
    }
}

fn setup(config: &CliConfig, err: &mut dyn Write) -> Option<Profile> {
    let checked = check_base_uri(&format!(
        "{}/document",
        config.base_uri.trim_end_matches('/')
    ))
    .map_err(|_| SetupError::BaseUri(config.base_uri.clone()))
    .and_then(|()| load_config_profile(config));
    match checked {
        Ok(profile) => Some(profile),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            None
        }
    }
}

fn write_report(config: &CliConfig, report: &ConversionReport, err: &mut dyn Write) -> bool {
    let Some(path) = &config.report_path else {
        return true;
    };
    match fs::write(path, report.to_json_string()) {
        Ok(()) => true,
        Err(e) => {
            let _ = writeln!(err, "{}", Diagnostic(path, &e));
            false
        }
    }
}

/// Converts each input and writes one document per input.
pub fn cmd_convert(
    config: &CliConfig,
    inputs: &[PathBuf],
    _out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let Some(profile) = setup(config, err) else {
        return EXIT_ERROR;
    };

    let batch = Batch::run(config, &profile, inputs);
    let mut targets: BTreeMap<PathBuf, &Path> = BTreeMap::new();
    for input in &batch.inputs {
        let target = output_path(config, input);
        if let Some(previous) = targets.insert(target.clone(), input) {
            let clash = SetupError::OutputClash(
                previous.display().to_string(),
                input.display().to_string(),
                target.display().to_string(),
            );
            let _ = writeln!(err, "error: {clash}");
            return EXIT_ERROR;
        }
    }
    if let Some(dir) = &config.out_dir {
        if let Err(e) = fs::create_dir_all(dir) {
            let _ = writeln!(err, "{}", Diagnostic(dir, &e));
            return EXIT_ERROR;
        }
    }

    let mut failed = false;
    for (input, result) in batch.inputs.iter().zip(&batch.results) {
        match result {
            Ok((graph, _)) => {
                let target = output_path(config, input);
                if let Err(e) = fs::write(&target, config.output_format.render(graph, &profile)) {
                    let _ = writeln!(err, "{}", Diagnostic(&target, &e));
                    failed = true;
                }
            }
            Err(e) => {
                let _ = writeln!(err, "{}", Diagnostic(input, e));
                failed = true;
            }
        }
    }

    let report = batch.report();
    failed |= !write_report(config, &report, err);
    if failed {
        EXIT_ERROR
    } else if config.strict && report.unknown_total() > 0 {
        let _ = writeln!(
            err,
            "error: {} source elements have no known mapping (strict mode)",
            report.unknown_total()
        );
        for (source, n) in &report.unknown {
            let _ = writeln!(err, "  {source} x{n}");
        }
        EXIT_STRICT
    } else {
        EXIT_OK
    }
}

/// Checks every node of each JSON-LD document against the profile.
pub fn cmd_validate(
    config: &CliConfig,
    inputs: &[PathBuf],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let profile = match load_config_profile(config) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let mut inputs = inputs.to_vec();
    inputs.sort();
    let mut code = EXIT_OK;
    for input in &inputs {
        let graph = match fs::read(input)
            .map_err(|e| e.to_string())
            .and_then(|b| parse_jsonld(&b).map_err(|e| e.to_string()))
        {
            Ok(g) => g,
            Err(e) => {
                let _ = writeln!(err, "{}", Diagnostic(input, &e));
                code = EXIT_ERROR;
                continue;
            }
        };
        let mut violations = 0;
        for node in graph.nodes() {
            for v in profile.validate_node(node) {
                violations += 1;
                let _ = writeln!(out, "{}: <{}>: {v}", input.display(), node.id);
            }
        }
        for (from, to) in graph.dangling_references() {
            violations += 1;
            let _ = writeln!(
                out,
                "{}: <{from}>: reference to <{to}>, which is not in the document",
                input.display()
            );
        }
        if violations > 0 {
            code = EXIT_ERROR;
        } else {
            let _ = writeln!(out, "{}: ok ({} nodes)", input.display(), graph.len());
        }
    }
    code
}

/// Converts without writing graphs and prints the aggregated gap report.
pub fn cmd_report(
    config: &CliConfig,
    inputs: &[PathBuf],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let Some(profile) = setup(config, err) else {
        return EXIT_ERROR;
    };
    let batch = Batch::run(config, &profile, inputs);
    let mut failed = false;
    for (input, result) in batch.inputs.iter().zip(&batch.results) {
        if let Err(e) = result {
            let _ = writeln!(err, "{}", Diagnostic(input, e));
            failed = true;
        }
    }
    let report = batch.report();
    let _ = write!(out, "{}", report.render_text());
    failed |= !write_report(config, &report, err);
    if failed {
        EXIT_ERROR
    } else {
        EXIT_OK
    }
}
