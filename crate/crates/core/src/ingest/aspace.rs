//! ArchivesSpace-style JSON export bundles.
//!
//! A bundle is a directory holding `resource.json`, `tree.json`,
//! `repository.json`, and optionally `agents/*.json` and
//! `archival_objects/*.json`. The accepted field subset is described in
//! `docs/aspace-bundle.md`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde_json::Value as Json;
use thiserror::Error;

use crate::model::{
    normalize_whitespace, AgentKind, AgentRecord, AgentRole, ArchivalUnit, DescriptionTree,
    ExtentStatement, NoteField, RepositoryRecord, SourceElementRef, SourceFormat,
};

#[derive(Debug, Error)]
pub enum AspaceError {
    #[error("malformed bundle: {0}")]
    MalformedBundle(String),
    #[error("inconsistent tree: {0}")]
    InconsistentTree(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Note types with a known place in the profile.
pub const RECOGNIZED_NOTE_TYPES: &[&str] = &[
    "scopecontent",
    "bioghist",
    "accessrestrict",
    "userestrict",
    "appraisal",
    "accruals",
    "arrangement",
    "phystech",
    "originalsloc",
    "altformavail",
];

/// Source element ids this ingester emits for recognized content (notes
/// appear as `notes.{type}`).
pub const RECOGNIZED_ELEMENTS: &[&str] = &[
    "title",
    "dates",
    "level",
    "id_0",
    "component_id",
    "extents",
    "linked_agents.creator",
    "linked_agents.subject",
    "agent_family",
    "lang_materials",
    "repository",
    "repository.address",
];

#[derive(Debug, Clone, Default)]
pub struct AspaceBundle {
    pub resource_doc: Json,
    pub tree_doc: Json,
    pub agent_docs: Vec<Json>,
    pub repository_doc: Json,
    pub component_docs: Vec<Json>,
}

fn read_json(path: &Path) -> Result<Json, AspaceError> {
    let bytes = fs::read(path).map_err(|source| AspaceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_slice(&bytes)
        .map_err(|e| AspaceError::MalformedBundle(format!("{}: {e}", path.display())))
}

fn read_json_dir(dir: &Path) -> Result<Vec<Json>, AspaceError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let entries = fs::read_dir(dir).map_err(|source| AspaceError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| AspaceError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    paths.iter().map(|p| read_json(p)).collect()
}

impl AspaceBundle {
    /// Loads a bundle directory.
    pub fn from_dir(dir: &Path) -> Result<Self, AspaceError> {
        let required = |name: &str| {
            let path = dir.join(name);
            if !path.is_file() {
                return Err(AspaceError::MalformedBundle(format!(
                    "{} is missing",
                    path.display()
                )));
            }
            read_json(&path)
        };
        Ok(AspaceBundle {
            resource_doc: required("resource.json")?,
            tree_doc: required("tree.json")?,
            repository_doc: required("repository.json")?,
            agent_docs: read_json_dir(&dir.join("agents"))?,
            component_docs: read_json_dir(&dir.join("archival_objects"))?,
        })
    }
}

fn str_field<'a>(doc: &'a Json, key: &str) -> Option<&'a str> {
    doc.get(key).and_then(Json::as_str)
}

fn text_field(doc: &Json, key: &str) -> Option<String> {
    str_field(doc, key).and_then(clean)
}

fn clean(s: &str) -> Option<String> {
    let s = normalize_whitespace(&strip_markup(s));
    (!s.is_empty()).then_some(s)
}

/// Removes inline EAD-style tags that ArchivesSpace allows in text fields.
fn strip_markup(s: &str) -> String {
    if !s.contains('<') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut in_tag = false;
    for ch in s.chars() {
        match ch {
            '<' => {
                in_tag = true;
                out.push(' ');
            }
            '>' if in_tag => in_tag = false,
            _ if !in_tag => out.push(ch),
            _ => {}
        }
    }
    out
}

fn array<'a>(doc: &'a Json, key: &str) -> &'a [Json] {
    doc.get(key)
        .and_then(Json::as_array)
        .map(Vec::as_slice)
        .unwrap_or(&[])
}

fn is_published(doc: &Json) -> bool {
    doc.get("publish").and_then(Json::as_bool).unwrap_or(true)
}

/// Builds the intermediate tree from a loaded bundle.
pub fn parse_aspace(bundle: &AspaceBundle) -> Result<DescriptionTree, AspaceError> {
    let resource = &bundle.resource_doc;
    if !resource.is_object() {
        return Err(AspaceError::MalformedBundle(
            "resource document is not an object".into(),
        ));
    }
    if text_field(resource, "title").is_none() {
        return Err(AspaceError::MalformedBundle("resource has no title".into()));
    }

    let repository = RepositoryRecord {
        name: text_field(&bundle.repository_doc, "name")
            .ok_or_else(|| AspaceError::MalformedBundle("repository has no name".into()))?,
        address: text_field(&bundle.repository_doc, "address"),
        url: text_field(&bundle.repository_doc, "url"),
    };

    let mut agents = HashMap::new();
    for doc in &bundle.agent_docs {
        let uri = str_field(doc, "uri")
            .ok_or_else(|| AspaceError::MalformedBundle("agent without uri".into()))?;
        agents.insert(uri.to_string(), doc);
    }
    let mut components = HashMap::new();
    for doc in &bundle.component_docs {
        let uri = str_field(doc, "uri")
            .ok_or_else(|| AspaceError::MalformedBundle("archival object without uri".into()))?;
        components.insert(uri.to_string(), doc);
    }

    let tree = &bundle.tree_doc;
    let tree_root = str_field(tree, "record_uri")
        .ok_or_else(|| AspaceError::MalformedBundle("tree has no record_uri".into()))?;
    match str_field(resource, "uri") {
        Some(uri) if uri == tree_root => {}
        Some(uri) => {
            return Err(AspaceError::InconsistentTree(format!(
                "tree root {tree_root} does not reference resource {uri}"
            )))
        }
        None => return Err(AspaceError::MalformedBundle("resource has no uri".into())),
    }

    let ctx = Context { agents, components };
    let mut root = ctx.unit(resource, true)?;
    ctx.children(tree, &mut root, 0)?;
    Ok(DescriptionTree::new(repository, root, SourceFormat::Aspace))
}

struct Context<'a> {
    agents: HashMap<String, &'a Json>,
    components: HashMap<String, &'a Json>,
}

const MAX_DEPTH: usize = 64;

impl Context<'_> {
    fn children(
        &self,
        tree_node: &Json,
        parent: &mut ArchivalUnit,
        depth: usize,
    ) -> Result<(), AspaceError> {
        if depth > MAX_DEPTH {
            return Err(AspaceError::InconsistentTree(format!(
                "tree nests deeper than {MAX_DEPTH} levels"
            )));
        }
        for child in array(tree_node, "children") {
            let uri = str_field(child, "record_uri").ok_or_else(|| {
                AspaceError::MalformedBundle("tree child has no record_uri".into())
            })?;
            let doc = self.components.get(uri).ok_or_else(|| {
                AspaceError::InconsistentTree(format!("{uri} is not in the bundle"))
            })?;
            if !is_published(doc) {
                parent.dropped.push(SourceElementRef::aspace("publish"));
                continue;
            }
            let mut unit = self.unit(doc, false)?;
            self.children(child, &mut unit, depth + 1)?;
            parent.children.push(unit);
        }
        Ok(())
    }

    fn unit(&self, doc: &Json, is_root: bool) -> Result<ArchivalUnit, AspaceError> {
        let mut unit = ArchivalUnit {
            title: text_field(doc, "title"),
            level: match str_field(doc, "level") {
                Some("otherlevel") => {
                    text_field(doc, "other_level").or_else(|| clean("otherlevel"))
                }
                Some(l) => clean(l),
                None => None,
            },
            reference_code: if is_root {
                let parts: Vec<String> = (0..4)
                    .filter_map(|i| text_field(doc, &format!("id_{i}")))
                    .collect();
                (!parts.is_empty()).then(|| parts.join("-"))
            } else {
                text_field(doc, "component_id")
            },
            ..Default::default()
        };

        for date in array(doc, "dates") {
            let value = match text_field(date, "begin") {
                Some(begin) => Some(match text_field(date, "end") {
                    Some(end) => format!("{begin}/{end}"),
                    None => begin,
                }),
                None => text_field(date, "expression"),
            };
            match value {
                Some(v) if unit.dates.is_none() => unit.dates = Some(v),
                Some(_) => unit.dropped.push(SourceElementRef::aspace("dates")),
                None => {}
            }
        }

        for extent in array(doc, "extents") {
            match (
                text_field(extent, "number"),
                text_field(extent, "extent_type"),
            ) {
                (Some(number), Some(kind)) => {
                    unit.extents.push(ExtentStatement::classify(&number, &kind))
                }
                (Some(number), None) => unit.extents.push(ExtentStatement::textual(number)),
                _ => unit.dropped.push(SourceElementRef::aspace("extents")),
            }
        }

        for note in array(doc, "notes") {
            let Some(kind) = str_field(note, "type") else {
                return Err(AspaceError::MalformedBundle("note without type".into()));
            };
            let source = SourceElementRef::aspace(format!("notes.{kind}"));
            if !is_published(note) {
                unit.dropped.push(source);
                continue;
            }
            if let Some(text) = note_text(note) {
                unit.notes.push(NoteField {
                    source,
                    text,
                    label: text_field(note, "label"),
                });
            }
        }

        for link in array(doc, "linked_agents") {
            let uri = str_field(link, "ref")
                .ok_or_else(|| AspaceError::MalformedBundle("linked agent without ref".into()))?;
            let role = match str_field(link, "role") {
                Some("creator") => AgentRole::Creator,
                Some("subject") => AgentRole::Subject,
                other => {
                    let role = other.unwrap_or("unspecified");
                    unit.dropped
                        .push(SourceElementRef::aspace(format!("linked_agents.{role}")));
                    continue;
                }
            };
            let agent = self.agents.get(uri).ok_or_else(|| {
                AspaceError::MalformedBundle(format!("linked agent {uri} is not in the bundle"))
            })?;
            unit.agents.push(agent_record(agent, role)?);
        }

        for lang in array(doc, "lang_materials") {
            if let Some(code) = lang
                .get("language_and_script")
                .and_then(|l| text_field(l, "language"))
            {
                unit.languages.push(code);
            }
        }
        Ok(unit)
    }
}

fn note_text(note: &Json) -> Option<String> {
    let mut parts = Vec::new();
    match note.get("content") {
        Some(Json::String(s)) => parts.push(s.clone()),
        Some(Json::Array(items)) => {
            parts.extend(items.iter().filter_map(Json::as_str).map(str::to_string))
        }
        _ => {}
    }
    for sub in array(note, "subnotes") {
        if is_published(sub) {
            match sub.get("content") {
                Some(Json::String(s)) => parts.push(s.clone()),
                Some(Json::Array(items)) => {
                    parts.extend(items.iter().filter_map(Json::as_str).map(str::to_string))
                }
                _ => {}
            }
        }
    }
    clean(&parts.join(" "))
}

fn agent_record(doc: &Json, role: AgentRole) -> Result<AgentRecord, AspaceError> {
    let kind = match str_field(doc, "jsonmodel_type") {
        Some("agent_person") => AgentKind::Person,
        Some("agent_corporate_entity") => AgentKind::CorporateBody,
        Some("agent_family") => AgentKind::Family,
        other => {
            return Err(AspaceError::MalformedBundle(format!(
                "unsupported agent type {}",
                other.unwrap_or("(none)")
            )))
        }
    };
    let name = text_field(doc, "title")
        .or_else(|| {
            array(doc, "names")
                .first()
                .and_then(|n| text_field(n, "sort_name"))
        })
        .ok_or_else(|| AspaceError::MalformedBundle("agent has no name".into()))?;
    let dates_of_existence = array(doc, "dates_of_existence").first().and_then(|d| {
        text_field(d, "expression").or_else(|| {
            let begin = text_field(d, "begin")?;
            Some(match text_field(d, "end") {
                Some(end) => format!("{begin}-{end}"),
                None => format!("{begin}-"),
            })
        })
    });
    Ok(AgentRecord {
        name,
        agent_kind: kind,
        dates_of_existence,
        role,
    })
}
