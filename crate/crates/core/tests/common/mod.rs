//! Shared test support: fixture locations, a seeded random tree generator
//! and brute-force oracles that recount a tree without going through the
//! crosswalk.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;

use archemap::emit::{Object, Triple};
use archemap::model::{
    AgentKind, AgentRecord, AgentRole, ArchivalUnit, DescriptionTree, ExtentStatement, NoteField,
    RepositoryRecord, SourceElementRef, SourceFormat,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value as Json;

pub const BASE: &str = "https://example.org/findingaids";

/// Fixtures with a hand-written golden file.
pub const GOLDEN_FIXTURES: &[&str] = &[
    "collection-only",
    "two-series",
    "three-deep",
    "agent-rich",
    "gap-rich",
    "exclusions",
];

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

pub fn ead_fixture(stem: &str) -> PathBuf {
    fixtures_dir().join("ead").join(format!("{stem}.xml"))
}

pub fn golden(stem: &str) -> PathBuf {
    fixtures_dir().join("golden").join(format!("{stem}.jsonld"))
}

pub fn aspace_fixture(stem: &str) -> PathBuf {
    fixtures_dir().join("aspace").join(stem)
}

pub fn base_for(stem: &str) -> String {
    format!("{BASE}/{stem}")
}

const NOTE_KINDS: &[&str] = &[
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
    "odd",
    "otherfindaid",
];

const NAMES: &[&str] = &[
    "Ada Smith",
    "Hale family",
    "Acme Co.",
    "Rice Institute",
    "Jones, Mary",
];

/// Random tree with depth at most `max_depth` (root at depth 1) and at most
/// `max_nodes` units.
pub fn random_tree(seed: u64, max_depth: usize, max_nodes: usize) -> DescriptionTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = rng.random_range(1..=max_nodes);
    let mut budget = target - 1;
    let root = random_unit(&mut rng, 1, max_depth, &mut budget);
    let mut repo = RepositoryRecord::named("Random Repository");
    if rng.random_bool(0.5) {
        repo.address = Some("1 Main St".into());
    }
    let mut tree = DescriptionTree::new(repo, root, SourceFormat::Ead);
    tree.control = (0..rng.random_range(0..4))
        .map(|_| SourceElementRef::ead("eadheader"))
        .collect();
    tree
}

fn random_unit(
    rng: &mut ChaCha8Rng,
    depth: usize,
    max_depth: usize,
    budget: &mut usize,
) -> ArchivalUnit {
    let mut unit = ArchivalUnit::default();
    if rng.random_bool(0.9) {
        unit.title = Some(format!("Unit {}", rng.random_range(0..1000)));
    }
    if rng.random_bool(0.5) {
        unit.dates = Some(format!(
            "{}-{}",
            rng.random_range(1800..1900),
            rng.random_range(1900..2000)
        ));
    }
    if rng.random_bool(0.6) {
        unit.level = Some(
            ["fonds", "series", "file", "item"]
                .choose(rng)
                .unwrap()
                .to_string(),
        );
    }
    if rng.random_bool(0.4) {
        unit.reference_code = Some(format!("MS {}", rng.random_range(1..500)));
    }
    for _ in 0..rng.random_range(0..3) {
        unit.extents.push(if rng.random_bool(0.5) {
            ExtentStatement::count(rng.random_range(1..5000), Some("items".into()))
        } else {
            ExtentStatement::textual(format!("{} linear feet", rng.random_range(1..40)))
        });
    }
    for _ in 0..rng.random_range(0..3) {
        let kind = [
            AgentKind::Person,
            AgentKind::CorporateBody,
            AgentKind::Family,
        ]
        .choose(rng)
        .copied()
        .unwrap();
        let role = if rng.random_bool(0.7) {
            AgentRole::Creator
        } else {
            AgentRole::Subject
        };
        unit.agents
            .push(AgentRecord::new(*NAMES.choose(rng).unwrap(), kind, role));
    }
    for _ in 0..rng.random_range(0..4) {
        let kind = NOTE_KINDS.choose(rng).unwrap();
        unit.notes.push(NoteField {
            source: SourceElementRef::ead(*kind),
            text: format!("{kind} text {}", rng.random_range(0..100)),
            label: None,
        });
    }
    for _ in 0..rng.random_range(0..3) {
        unit.languages
            .push(["eng", "fre", "spa"].choose(rng).unwrap().to_string());
    }
    if rng.random_bool(0.2) {
        unit.dropped.push(SourceElementRef::ead(
            ["unittitle", "controlaccess/subject", "dao"]
                .choose(rng)
                .unwrap()
                .to_string(),
        ));
    }

    if depth < max_depth {
        let want = rng.random_range(0..=6usize).min(*budget);
        *budget -= want;
        let mut children: Vec<ArchivalUnit> = Vec::with_capacity(want);
        for _ in 0..want {
            children.push(ArchivalUnit::default());
        }
        for child in &mut children {
            *child = random_unit(rng, depth + 1, max_depth, budget);
        }
        unit.children = children;
    }
    unit
}

/// Recursive unit count.
pub fn count_units(unit: &ArchivalUnit) -> usize {
    1 + unit.children.iter().map(count_units).sum::<usize>()
}

pub fn depth(unit: &ArchivalUnit) -> usize {
    1 + unit.children.iter().map(depth).max().unwrap_or(0)
}

fn creator_keys(unit: &ArchivalUnit, out: &mut HashSet<(String, AgentKind)>) {
    for a in unit.agents.iter().filter(|a| a.role == AgentRole::Creator) {
        out.insert((a.name.clone(), a.agent_kind));
    }
    for c in &unit.children {
        creator_keys(c, out);
    }
}

/// Distinct (name, kind) pairs among creator agents.
pub fn distinct_creators(tree: &DescriptionTree) -> HashSet<(String, AgentKind)> {
    let mut out = HashSet::new();
    creator_keys(&tree.root, &mut out);
    out
}

fn unit_occurrences(unit: &ArchivalUnit) -> u64 {
    let own = unit.title.is_some() as u64
        + unit.dates.is_some() as u64
        + unit.level.is_some() as u64
        + unit.reference_code.is_some() as u64
        + unit.extents.len() as u64
        + unit.agents.len() as u64
        + unit.notes.len() as u64
        + unit.languages.len() as u64
        + unit.dropped.len() as u64;
    own + unit.children.iter().map(unit_occurrences).sum::<u64>()
}

/// Independent count of source-element occurrences in a tree: every unit
/// field value, the repository and its address, each description-control
/// section, and one family-approximation entry per distinct family creator.
pub fn source_occurrences(tree: &DescriptionTree) -> u64 {
    let families = distinct_creators(tree)
        .iter()
        .filter(|(_, k)| *k == AgentKind::Family)
        .count() as u64;
    unit_occurrences(&tree.root)
        + 1
        + tree.repository.address.is_some() as u64
        + tree.control.len() as u64
        + families
}

/// Triples keyed for quick relation checks.
pub fn relation(triples: &BTreeSet<Triple>, predicate: &str) -> BTreeSet<(String, String)> {
    triples
        .iter()
        .filter(|t| t.predicate == predicate)
        .filter_map(|t| match &t.object {
            Object::Iri(o) => Some((t.subject.clone(), o.clone())),
            _ => None,
        })
        .collect()
}

/// Object of a triple as seen by the independent expander below.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal(String),
    Integer(i64),
}

/// Minimal JSON-LD expansion for documents with a `@context` holding
/// `@vocab` and simple string term definitions, and a `@graph` of node
/// objects. Written against the JSON-LD expansion rules, not the emitter.
pub fn expand_jsonld(doc: &Json) -> BTreeSet<(String, String, Term)> {
    const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    let ctx = doc["@context"].as_object().expect("context object");
    let vocab = ctx.get("@vocab").and_then(Json::as_str).unwrap_or("");
    let terms: BTreeMap<&str, &str> = ctx
        .iter()
        .filter(|(k, _)| !k.starts_with('@'))
        .map(|(k, v)| (k.as_str(), v.as_str().expect("string term")))
        .collect();
    let expand = |term: &str| -> String {
        if let Some(iri) = terms.get(term) {
            (*iri).to_string()
        } else if term.contains("://") {
            term.to_string()
        } else {
            format!("{vocab}{term}")
        }
    };
    let as_list = |v: &Json| -> Vec<Json> {
        match v {
            Json::Array(xs) => xs.clone(),
            other => vec![other.clone()],
        }
    };

    let mut out = BTreeSet::new();
    for node in doc["@graph"].as_array().expect("graph array") {
        let subject = node["@id"].as_str().expect("@id").to_string();
        for (key, value) in node.as_object().unwrap() {
            if key == "@id" {
                continue;
            }
            if key == "@type" {
                for t in as_list(value) {
                    out.insert((
                        subject.clone(),
                        RDF_TYPE.to_string(),
                        Term::Iri(expand(t.as_str().unwrap())),
                    ));
                }
                continue;
            }
            let predicate = expand(key);
            for v in as_list(value) {
                let object = match &v {
                    Json::String(s) => Term::Literal(s.clone()),
                    Json::Number(n) => Term::Integer(n.as_i64().expect("integer")),
                    Json::Object(o) => Term::Iri(o["@id"].as_str().expect("@id").to_string()),
                    other => panic!("unexpected value {other}"),
                };
                out.insert((subject.clone(), predicate.clone(), object));
            }
        }
    }
    out
}

/// The emitter's triples in the expander's shape.
pub fn as_terms(triples: &BTreeSet<Triple>) -> BTreeSet<(String, String, Term)> {
    triples
        .iter()
        .map(|t| {
            let object = match &t.object {
                Object::Iri(i) => Term::Iri(i.clone()),
                Object::Text(s) => Term::Literal(s.clone()),
                Object::Integer(n) => Term::Integer(*n),
            };
            (t.subject.clone(), t.predicate.clone(), object)
        })
        .collect()
}
