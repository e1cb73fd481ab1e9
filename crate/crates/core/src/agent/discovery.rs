//! The discovery agent: a state machine, shipped as data, that probes a file,
//! infers its structure and registers it in the catalog.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use super::machine::{
    run, validate_machine, Behaviors, RunStatus, RunTrace, StateMachineDef, StepError, ValidatedMachine,
};
use crate::adapters::{detect_kind, infer_entities, AdapterError, Format, SourceDescriptor};
use crate::catalog::{Catalog, CatalogError, Entity, Model};

const DISCOVERY_JSON: &str = include_str!("discovery.json");

/// Events that drive one discovery run, in order.
pub const DISCOVERY_EVENTS: [&str; 4] = ["start", "fileFound", "schemaReady", "registered"];

#[derive(Debug, thiserror::Error)]
pub enum DiscoveryError {
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("discovery stopped: {0}")]
    Machine(StepError),
    #[error("discovery did not finish (stopped in state `{0}`)")]
    Incomplete(String),
}

/// The discovery machine definition.
pub fn discovery_machine() -> &'static ValidatedMachine {
    static MACHINE: OnceLock<ValidatedMachine> = OnceLock::new();
    MACHINE.get_or_init(|| {
        let def = StateMachineDef::from_json(DISCOVERY_JSON).expect("discovery machine parses");
        validate_machine(def).expect("discovery machine is valid")
    })
}

struct Discovery {
    source: SourceDescriptor,
    entities: Vec<Entity>,
    model: Option<Model>,
    catalog: Catalog,
    failure: Option<DiscoveryError>,
}

impl Discovery {
    fn fail(&mut self, e: impl Into<DiscoveryError>) -> String {
        let e = e.into();
        let message = e.to_string();
        self.failure = Some(e);
        message
    }
}

fn infer(format: Format) -> impl Fn(&mut Discovery) -> Result<(), String> {
    move |d: &mut Discovery| {
        debug_assert_eq!(d.source.format, format);
        match infer_entities(&d.source) {
            Ok(entities) => {
                d.entities = entities;
                Ok(())
            }
            Err(e) => Err(d.fail(e)),
        }
    }
}

fn is(format: Format) -> impl Fn(&Discovery) -> Result<bool, String> {
    move |d: &Discovery| Ok(d.source.format == format)
}

fn behaviors() -> Behaviors<Discovery> {
    Behaviors::new()
        .action("beginDiscovery", |d: &mut Discovery| {
            d.entities.clear();
            d.model = None;
            Ok(())
        })
        .action("openSource", |d: &mut Discovery| {
            let path = d.source.path().to_path_buf();
            std::fs::metadata(&path).map(|_| ()).map_err(|e| d.fail(AdapterError::Io { path, source: e }))
        })
        .action("detectKind", |d: &mut Discovery| match detect_kind(d.source.path()) {
            Ok((category, format)) => {
                d.source.category = category;
                d.source.format = format;
                Ok(())
            }
            Err(e) => Err(d.fail(e)),
        })
        .guard("isCsv", is(Format::Csv))
        .guard("isXml", is(Format::Xml))
        .guard("isJson", is(Format::Json))
        .guard("isTxt", is(Format::Txt))
        .action("inferCsvSchema", infer(Format::Csv))
        .action("inferXmlSchema", infer(Format::Xml))
        .action("inferJsonSchema", infer(Format::Json))
        .action("inferTextSchema", infer(Format::Txt))
        .action("buildModel", |d: &mut Discovery| {
            let mut model = Model::new(d.source.id.clone());
            model.meta_model_name = d.source.format.to_string();
            model.file_name = d.source.location.clone();
            model.connection = d.source.id.clone();
            model.entities = std::mem::take(&mut d.entities);
            if let Some(old) = d.catalog.model(&model.name) {
                carry_over(old, &mut model);
            }
            d.model = Some(model);
            Ok(())
        })
        .action("registerModel", |d: &mut Discovery| {
            let model = d.model.take().expect("built before registering");
            let mut next = d.catalog.clone();
            let result = next.upsert_source(d.source.clone()).and_then(|_| next.replace_model(model));
            match result {
                Ok(()) => {
                    d.catalog = next;
                    Ok(())
                }
                Err(e) => Err(d.fail(e)),
            }
        })
        .action("auditCatalog", |d: &mut Discovery| {
            let problems = d.catalog.audit();
            if problems.is_empty() {
                Ok(())
            } else {
                Err(d.fail(CatalogError::InvariantViolation(problems.join("; "))))
            }
        })
}

/// Keeps what a user added to a previously discovered model: descriptions,
/// links, relations, and per-entity constraints and annotations, as long as
/// the attributes they refer to still exist with the same type.
fn carry_over(old: &Model, new: &mut Model) {
    new.description.clone_from(&old.description);
    new.linked_models.clone_from(&old.linked_models);
    new.relations.clone_from(&old.relations);
    for e in &mut new.entities {
        let Some(prev) = old.entity(&e.name) else { continue };
        e.description.clone_from(&prev.description);
        e.operations.clone_from(&prev.operations);
        e.values.clone_from(&prev.values);
        for a in &mut e.attributes {
            if let Some(p) = prev.attribute(&a.name).filter(|p| p.ty == a.ty) {
                a.description.clone_from(&p.description);
                a.default.clone_from(&p.default);
            }
        }
        let same_type = |name: &str| match (prev.attribute(name), e.attribute(name)) {
            (Some(p), Some(n)) => p.ty == n.ty,
            _ => false,
        };
        let kept: Vec<_> = prev.constraints.iter().filter(|k| same_type(&k.attribute_name)).cloned().collect();
        e.constraints = kept;
    }
}

/// Source id for a newly seen path: its entity-style stem, suffixed when
/// another source already uses that id.
fn fresh_id(catalog: &Catalog, path: &Path) -> String {
    let base = crate::adapters::entity_name(path);
    if catalog.source(&base).is_none() && catalog.model(&base).is_none() {
        return base;
    }
    (2..)
        .map(|n| format!("{base}_{n}"))
        .find(|id| catalog.source(id).is_none() && catalog.model(id).is_none())
        .expect("unbounded")
}

/// Runs discovery on `path` and returns the updated catalog along with the
/// machine trace. A path already registered keeps its source id and options.
pub fn discover_traced(path: impl AsRef<Path>, catalog: &Catalog) -> (Result<Catalog, DiscoveryError>, RunTrace) {
    let path = path.as_ref();
    let location = path.to_string_lossy();
    let source = match catalog.sources().iter().find(|s| s.location == location) {
        Some(s) => s.clone(),
        None => {
            let format = detect_kind(path).map(|(_, f)| f).unwrap_or(Format::Txt);
            SourceDescriptor::new(fresh_id(catalog, path), format, location)
        }
    };
    run_discovery(source, catalog)
}

fn run_discovery(source: SourceDescriptor, catalog: &Catalog) -> (Result<Catalog, DiscoveryError>, RunTrace) {
    let mut ctx = Discovery { source, entities: Vec::new(), model: None, catalog: catalog.clone(), failure: None };
    let trace = run(discovery_machine(), &DISCOVERY_EVENTS, &mut ctx, &behaviors());
    let result = match (trace.status, ctx.failure) {
        (_, Some(e)) => Err(e),
        (RunStatus::Finished, None) => Ok(ctx.catalog),
        (RunStatus::Error, None) => {
            Err(DiscoveryError::Machine(trace.error.clone().expect("error status carries one")))
        }
        (RunStatus::Stuck, None) => Err(DiscoveryError::Incomplete(trace.final_state().to_string())),
    };
    (result, trace)
}

/// Discovers the file or directory at `path`. Discovering the same path
/// again replaces its model, so repeated runs give the same catalog.
pub fn discover(path: impl AsRef<Path>, catalog: &Catalog) -> Result<Catalog, DiscoveryError> {
    discover_traced(path, catalog).0
}

/// Discovers an already described source, keeping its id and options.
pub fn discover_source(source: &SourceDescriptor, catalog: &Catalog) -> Result<Catalog, DiscoveryError> {
    run_discovery(source.clone(), catalog).0
}

/// Paths of the discoverable files directly inside `dir`, sorted.
pub fn discoverable_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, AdapterError> {
    let dir = dir.as_ref();
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| AdapterError::io(dir, e))? {
        let path = entry.map_err(|e| AdapterError::io(dir, e))?.path();
        if path.is_file() && detect_kind(&path).is_ok() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AttributeType, Constraint, Element, ElementPath};
    use crate::metalang::Comparator;
    use crate::value::Value;

    fn corpus(files: &[(&str, &str)]) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for (name, content) in files {
            std::fs::write(dir.path().join(name), content).unwrap();
        }
        dir
    }

    #[test]
    fn shipped_machine_is_valid() {
        let m = discovery_machine();
        assert_eq!(m.initial().name, "Initial");
        assert_eq!(m.def().transitions.len(), 7);
    }

    #[test]
    fn discovers_csv() {
        let dir = corpus(&[("sales.csv", "region,amount\neast,10\nwest,20\neast,5\n")]);
        let path = dir.path().join("sales.csv");
        let (result, trace) = discover_traced(&path, &Catalog::new());
        let c = result.unwrap();
        assert_eq!(trace.status, RunStatus::Finished);
        assert_eq!(
            trace.fired(),
            [
                "beginDiscovery",
                "openSource",
                "detectKind",
                "inferCsvSchema",
                "buildModel",
                "registerModel",
                "auditCatalog"
            ]
        );
        let m = c.model("sales").unwrap();
        assert_eq!((m.connection.as_str(), m.meta_model_name.as_str()), ("sales", "csv"));
        let e = m.entity("sales").unwrap();
        assert_eq!(e.attribute("amount").unwrap().ty, AttributeType::Number);
        assert_eq!(e.attribute("region").unwrap().ty, AttributeType::Text);
        assert_eq!(c.source("sales").unwrap().location, path.to_string_lossy());
    }

    #[test]
    fn idempotent() {
        let dir = corpus(&[("notes.txt", "a\n"), ("items.json", r#"[{"a":1}]"#)]);
        let mut c = Catalog::new();
        for f in ["notes.txt", "items.json"] {
            c = discover(dir.path().join(f), &c).unwrap();
        }
        let again = discover(dir.path().join("notes.txt"), &c).unwrap();
        let again = discover(dir.path().join("items.json"), &again).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_json(), c.to_json());
    }

    #[test]
    fn unsupported_format_leaves_catalog() {
        let dir = corpus(&[("img.png", "x")]);
        let before = Catalog::new();
        let err = discover(dir.path().join("img.png"), &before).unwrap_err();
        assert!(matches!(err, DiscoveryError::Adapter(AdapterError::UnsupportedFormat(ref e)) if e == "png"));
    }

    #[test]
    fn missing_file() {
        let err = discover("/no/such/file.csv", &Catalog::new()).unwrap_err();
        assert!(matches!(err, DiscoveryError::Adapter(AdapterError::Io { .. })));
    }

    #[test]
    fn rediscovery_keeps_user_metadata() {
        let dir = corpus(&[("sales.csv", "region,amount\neast,10\n")]);
        let path = dir.path().join("sales.csv");
        let mut c = discover(&path, &Catalog::new()).unwrap();
        let k = Constraint::new("amount", Comparator::Ge, Value::number(0.0), "negative");
        c.upsert(Some(&ElementPath::entity("sales", "sales")), Element::Constraint(k)).unwrap();
        c.add_synonym("turnover", ElementPath::attribute("sales", "sales", "amount")).unwrap();
        let again = discover(&path, &c).unwrap();
        assert_eq!(again, c);

        std::fs::write(&path, "region,total\neast,10\n").unwrap();
        let changed = discover(&path, &c).unwrap();
        let e = changed.model("sales").unwrap().entity("sales").unwrap();
        assert!(e.constraints.is_empty());
        assert!(changed.synonyms().is_empty());
    }

    #[test]
    fn id_collision_gets_suffix() {
        let a = corpus(&[("sales.csv", "x\n1\n")]);
        let b = corpus(&[("sales.csv", "y\n2\n")]);
        let c = discover(a.path().join("sales.csv"), &Catalog::new()).unwrap();
        let c = discover(b.path().join("sales.csv"), &c).unwrap();
        assert!(c.model("sales").is_some() && c.model("sales_2").is_some());
    }

    #[test]
    fn directory_source() {
        let dir = corpus(&[("a.csv", "x\n1\n"), ("b.csv", "y\nq\n")]);
        let c = discover(dir.path(), &Catalog::new()).unwrap();
        let m = &c.models()[0];
        let names: Vec<&str> = m.entities.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["a", "b"]);
    }
}
