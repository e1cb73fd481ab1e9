//! The `dsq` command line: catalog management, source registration,
//! discovery, queries and SQL translation.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 when the command itself
//! fails. Data goes to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use crate::adapters::{entity_name, SourceDescriptor};
use crate::agent::{discover, discover_source};
use crate::catalog::{Catalog, CatalogError};
use crate::engine::{execute, ProfileStore, RuntimeHistory, Session};
use crate::metalang::{parse, validate, Bindings};
use crate::sqlgen::translate_with;
use crate::value::format_number;
use crate::Error;

pub const DEFAULT_CATALOG: &str = "./dataspace.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Table,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "dsq", version, about = "Query CSV, JSON, XML and text sources through one catalog")]
pub struct Cli {
    /// Catalog file.
    #[arg(long, global = true, env = "DSQ_CATALOG", default_value = DEFAULT_CATALOG)]
    pub catalog: PathBuf,
    /// User whose profile `profile` queries and commands use.
    #[arg(long, global = true, default_value = "default")]
    pub user: String,
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Table)]
    pub output: OutputMode,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create an empty catalog.
    Init {
        /// Overwrite an existing catalog.
        #[arg(long)]
        force: bool,
    },
    /// Register a file or directory as a source without inspecting it.
    AddSource {
        path: PathBuf,
        /// Source id (default: the file stem).
        #[arg(long)]
        id: Option<String>,
        /// CSV field delimiter.
        #[arg(long)]
        delimiter: Option<String>,
    },
    /// Infer a source's structure and record it in the catalog.
    Discover {
        /// A registered source id or a path.
        target: String,
    },
    /// Print sources, models, entities and synonyms.
    Show,
    /// Run a query.
    Query {
        /// Print the estimated runtime instead of running the query.
        #[arg(long)]
        estimate: bool,
        /// Parameter value, as name=value.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        text: String,
    },
    /// Print the SQL for a query over structured sources.
    Translate {
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        text: String,
    },
    /// Read or write profile weights.
    Profile {
        #[command(subcommand)]
        action: ProfileAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProfileAction {
    Get {
        object: String,
    },
    Set {
        object: String,
        #[arg(allow_negative_numbers = true)]
        weight: i64,
    },
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let value: f64 = value.trim().parse().map_err(|_| format!("`{value}` is not a number"))?;
    if !value.is_finite() {
        return Err(format!("`{s}` is not a finite number"));
    }
    Ok((name.trim().to_string(), value))
}

/// `dir/<stem>.<suffix>` next to the catalog file.
fn sibling(catalog: &Path, suffix: &str) -> PathBuf {
    let stem = catalog.file_stem().and_then(|s| s.to_str()).unwrap_or("dataspace");
    catalog.with_file_name(format!("{stem}.{suffix}"))
}

pub fn profiles_path(catalog: &Path) -> PathBuf {
    sibling(catalog, "profiles.json")
}

pub fn history_path(catalog: &Path) -> PathBuf {
    sibling(catalog, "history.json")
}

pub fn lock_path(catalog: &Path) -> PathBuf {
    sibling(catalog, "lock")
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("catalog {} already exists (use --force to overwrite)", .0.display())]
    CatalogExists(PathBuf),
    #[error("catalog is locked by another process ({})", .0.display())]
    Locked(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no source or file named `{0}`")]
    NotFound(String),
}

macro_rules! domain_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                CliError::Domain(e.into())
            }
        })*
    };
}

domain_errors!(
    crate::metalang::SyntaxError,
    crate::metalang::ValidateError,
    CatalogError,
    crate::adapters::AdapterError,
    crate::agent::DiscoveryError,
    crate::engine::EngineError,
    crate::sqlgen::SqlError
);

type CliResult<T> = Result<T, CliError>;

/// Exclusive write access to a catalog, released on drop.
struct Lock(PathBuf);

impl Lock {
    fn acquire(catalog: &Path) -> CliResult<Lock> {
        let path = lock_path(catalog);
        let deadline = Instant::now() + Duration::from_secs(2);
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(Lock(path)),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists && Instant::now() < deadline => {
                    std::thread::sleep(Duration::from_millis(20));
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => return Err(CliError::Locked(path)),
                Err(e) => return Err(CliError::Io { path, source: e }),
            }
        }
    }
}

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

fn show(catalog: &Catalog) -> String {
    let mut out = String::new();
    for s in catalog.sources() {
        let _ = writeln!(out, "source {} ({} {}) {}", s.id, s.category, s.format, s.location);
        for (k, v) in &s.options {
            let _ = writeln!(out, "  option {k}={v}");
        }
    }
    for m in catalog.models() {
        let conn = if m.connection.is_empty() { "unbound" } else { m.connection.as_str() };
        let _ = writeln!(out, "model {} [{}] -> {}", m.name, m.meta_model_name, conn);
        for e in &m.entities {
            let _ = writeln!(out, "  entity {} ({}, {})", e.name, e.entity_type, e.draw_type);
            for a in &e.attributes {
                let _ = writeln!(out, "    {}: {}", a.name, a.ty);
            }
            for k in &e.constraints {
                let _ =
                    writeln!(out, "    constraint {} {} {}: {}", k.attribute_name, k.sign, k.value, k.error_message);
            }
        }
        for r in &m.relations {
            let _ = writeln!(out, "  relation {}: {} -> {}", r.name, r.start_entity, r.end_entity);
        }
    }
    for (name, targets) in catalog.synonyms() {
        for t in targets {
            let _ = writeln!(out, "synonym {name} -> {t}");
        }
    }
    out
}

fn bindings(params: &[(String, f64)]) -> Bindings {
    params.iter().cloned().collect()
}

fn run_command(cli: &Cli, out: &mut String) -> CliResult<()> {
    let path = cli.catalog.as_path();
    match &cli.command {
        Command::Init { force } => {
            let _lock = Lock::acquire(path)?;
            if path.exists() && !force {
                return Err(CliError::CatalogExists(path.to_path_buf()));
            }
            Catalog::new().save(path)?;
            let _ = writeln!(out, "created {}", path.display());
        }
        Command::AddSource { path: source, id, delimiter } => {
            let _lock = Lock::acquire(path)?;
            let mut catalog = Catalog::load(path)?;
            let id = id.clone().unwrap_or_else(|| entity_name(source));
            let mut src = SourceDescriptor::from_path(id, source)?;
            if let Some(d) = delimiter {
                src = src.with_option("delimiter", d.as_str());
            }
            let line = format!("registered source {} ({} {})", src.id, src.category, src.format);
            catalog.upsert_source(src)?;
            catalog.save(path)?;
            let _ = writeln!(out, "{line}");
        }
        Command::Discover { target } => {
            let _lock = Lock::acquire(path)?;
            let catalog = Catalog::load(path)?;
            let next = if let Some(src) = catalog.source(target) {
                discover_source(src, &catalog)?
            } else if Path::new(target).exists() {
                discover(target, &catalog)?
            } else {
                return Err(CliError::NotFound(target.clone()));
            };
            next.save(path)?;
            for m in next.models().iter().filter(|m| catalog.model(&m.name) != Some(*m)) {
                let _ = writeln!(out, "discovered model {} ({} entities)", m.name, m.entity_count());
            }
        }
        Command::Show => out.push_str(&show(&Catalog::load(path)?)),
        Command::Query { estimate, params, text } => {
            let catalog = Catalog::load(path)?;
            let vq = validate(&parse(text)?, &catalog)?;
            let key = vq.shape_key();
            if *estimate {
                let history = RuntimeHistory::load(history_path(path))?;
                match history.estimate(&key) {
                    Some(ms) => {
                        let _ = writeln!(out, "{}ms", format_number(ms));
                    }
                    None => out.push_str("unknown\n"),
                }
                return Ok(());
            }
            let _lock = Lock::acquire(path)?;
            let mut session = Session {
                user: cli.user.clone(),
                profiles: ProfileStore::load(profiles_path(path))?,
                params: bindings(params),
            };
            let before = session.profiles.clone();
            let started = Instant::now();
            let rs = execute(&vq, &catalog, &mut session)?;
            let millis = started.elapsed().as_secs_f64() * 1000.0;
            let mut history = RuntimeHistory::load(history_path(path))?;
            history.record(&key, millis)?;
            history.save(history_path(path))?;
            if session.profiles != before {
                session.profiles.save(profiles_path(path))?;
            }
            if !rs.columns.is_empty() {
                out.push_str(&match cli.output {
                    OutputMode::Table => rs.render_table(),
                    OutputMode::Csv => rs.render_csv(),
                });
            }
        }
        Command::Translate { params, text } => {
            let catalog = Catalog::load(path)?;
            let vq = validate(&parse(text)?, &catalog)?;
            let _ = writeln!(out, "{}", translate_with(&vq, &bindings(params))?);
        }
        Command::Profile { action: ProfileAction::Get { object } } => {
            let profiles = ProfileStore::load(profiles_path(path))?;
            let _ = writeln!(out, "{}", profiles.get(&cli.user, object));
        }
        Command::Profile { action: ProfileAction::Set { object, weight } } => {
            let _lock = Lock::acquire(path)?;
            let mut profiles = ProfileStore::load(profiles_path(path))?;
            profiles.put(&cli.user, object, *weight)?;
            profiles.save(profiles_path(path))?;
        }
    }
    Ok(())
}

/// Runs `dsq` with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ =
                if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let mut out = String::new();
    match run_command(&cli, &mut out) {
        Ok(()) => {
            let _ = stdout.write_all(out.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
