//! Serialization: JSON-LD, sorted N-Triples and an HTML `<script>` wrapper,
//! plus the triple-set view used to compare graphs.
//!
//! Output is canonical. Nodes are sorted by `@id`, keys are `@id`, `@type`,
//! then properties in lexicographic order, and values within a property are
//! sorted with digit runs compared numerically (so positional child IRIs
//! keep document order). Equal triple sets therefore serialize to identical
//! bytes.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::Value as Json;
use thiserror::Error;

use crate::graph::{Graph, SchemaNode, Value};
use crate::profile::Profile;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Object {
    Iri(String),
    Text(String),
    Integer(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Object,
}

impl Triple {
    /// One N-Triples statement, without the line terminator.
    pub fn to_ntriples(&self) -> String {
        let object = match &self.object {
            Object::Iri(iri) => format!("<{iri}>"),
            Object::Text(s) => format!("\"{}\"", escape_literal(s)),
            Object::Integer(n) => format!("\"{n}\"^^<{XSD_INTEGER}>"),
        };
        format!("<{}> <{}> {object} .", self.subject, self.predicate)
    }
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// Expands every (node, type) and (node, property, value) into a triple.
pub fn to_triples(graph: &Graph, profile: &Profile) -> BTreeSet<Triple> {
    let mut out = BTreeSet::new();
    for node in graph.nodes() {
        for t in &node.types {
            out.insert(Triple {
                subject: node.id.clone(),
                predicate: RDF_TYPE.to_string(),
                object: Object::Iri(profile.expand(t)),
            });
        }
        for (property, values) in &node.properties {
            let predicate = profile.expand(property);
            for v in values {
                let object = match v {
                    Value::Text(s) => Object::Text(s.clone()),
                    Value::Integer(n) => Object::Integer(*n),
                    Value::Ref(iri) => Object::Iri(iri.clone()),
                };
                out.insert(Triple {
                    subject: node.id.clone(),
                    predicate: predicate.clone(),
                    object,
                });
            }
        }
    }
    out
}

/// Triple-set equality.
pub fn graphs_equal(a: &Graph, b: &Graph, profile: &Profile) -> bool {
    to_triples(a, profile) == to_triples(b, profile)
}

/// Sorted N-Triples document, one statement per line.
pub fn serialize_ntriples(graph: &Graph, profile: &Profile) -> Vec<u8> {
    let mut lines: Vec<String> = to_triples(graph, profile)
        .iter()
        .map(Triple::to_ntriples)
        .collect();
    lines.sort();
    let mut out = String::new();
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out.into_bytes()
}

/// Compares strings with runs of ASCII digits ordered numerically.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    loop {
        match (a.first(), b.first()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let da = a.iter().take_while(|c| c.is_ascii_digit()).count();
                let db = b.iter().take_while(|c| c.is_ascii_digit()).count();
                let (na, nb) = (&a[..da], &b[..db]);
                let ta = trim_zeros(na);
                let tb = trim_zeros(nb);
                let ord = ta
                    .len()
                    .cmp(&tb.len())
                    .then_with(|| ta.cmp(tb))
                    .then_with(|| na.len().cmp(&nb.len()));
                if ord != Ordering::Equal {
                    return ord;
                }
                a = &a[da..];
                b = &b[db..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                a = &a[1..];
                b = &b[1..];
            }
        }
    }
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let n = digits.iter().take_while(|&&c| c == b'0').count();
    &digits[n.min(digits.len().saturating_sub(1))..]
}

fn value_cmp(a: &Value, b: &Value) -> Ordering {
    fn rank(v: &Value) -> u8 {
        match v {
            Value::Ref(_) => 0,
            Value::Text(_) => 1,
            Value::Integer(_) => 2,
        }
    }
    match (a, b) {
        (Value::Ref(x), Value::Ref(y)) | (Value::Text(x), Value::Text(y)) => {
            natural_cmp(x, y).then_with(|| x.cmp(y))
        }
        (Value::Integer(x), Value::Integer(y)) => x.cmp(y),
        _ => rank(a).cmp(&rank(b)),
    }
}

struct ContextOut<'a>(&'a Profile);

impl Serialize for ContextOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pending = self.0.pending_terms();
        let mut map = s.serialize_map(Some(1 + pending.len()))?;
        map.serialize_entry("@vocab", self.0.core_namespace())?;
        for term in pending {
            map.serialize_entry(term, &self.0.expand(term))?;
        }
        map.end()
    }
}

struct ValueOut<'a>(&'a Value);

impl Serialize for ValueOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Value::Text(t) => s.serialize_str(t),
            Value::Integer(n) => s.serialize_i64(*n),
            Value::Ref(iri) => {
                let mut map = s.serialize_map(Some(1))?;
                map.serialize_entry("@id", iri)?;
                map.end()
            }
        }
    }
}

struct ValuesOut<'a>(&'a [Value]);

impl Serialize for ValuesOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut sorted: Vec<&Value> = self.0.iter().collect();
        sorted.sort_by(|a, b| value_cmp(a, b));
        let mut seq = s.serialize_seq(Some(sorted.len()))?;
        for v in sorted {
            seq.serialize_element(&ValueOut(v))?;
        }
        seq.end()
    }
}

struct NodeOut<'a>(&'a SchemaNode);

impl Serialize for NodeOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let node = self.0;
        let mut types: Vec<&String> = node.types.iter().collect();
        types.sort();
        let mut map = s.serialize_map(Some(2 + node.properties.len()))?;
        map.serialize_entry("@id", &node.id)?;
        map.serialize_entry("@type", &types)?;
        for (property, values) in &node.properties {
            map.serialize_entry(property, &ValuesOut(values))?;
        }
        map.end()
    }
}

struct DocumentOut<'a> {
    graph: &'a Graph,
    profile: &'a Profile,
}

impl Serialize for DocumentOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let nodes: Vec<NodeOut<'_>> = self.graph.nodes().map(NodeOut).collect();
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("@context", &ContextOut(self.profile))?;
        map.serialize_entry("@graph", &nodes)?;
        map.end()
    }
}

/// Canonical JSON-LD document: two-space indent, trailing newline.
pub fn serialize_jsonld(graph: &Graph, profile: &Profile) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&DocumentOut { graph, profile })
        .expect("in-memory serialization");
    out.push(b'\n');
    out
}

/// The JSON-LD document inside a `<script type="application/ld+json">`
/// element. `</` and `<!--` inside literals are escaped so the script
/// cannot be closed early.
pub fn html_snippet(graph: &Graph, profile: &Profile) -> Vec<u8> {
    let json = String::from_utf8(serialize_jsonld(graph, profile)).expect("serde_json emits UTF-8");
    let inner = json.replace("</", "<\\/").replace("<!--", "<\\u0021--");
    format!("<script type=\"application/ld+json\">\n{inner}</script>\n").into_bytes()
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("not JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported JSON-LD shape: {0}")]
    Shape(String),
}

fn shape(msg: impl Into<String>) -> ReadError {
    ReadError::Shape(msg.into())
}

/// Reads a document in the shape [`serialize_jsonld`] emits back into a
/// graph of compact term names. The context is not interpreted.
pub fn parse_jsonld(bytes: &[u8]) -> Result<Graph, ReadError> {
    let doc: Json = serde_json::from_slice(bytes)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| shape("top level must be an object"))?;
    let nodes: Vec<&Json> = match obj.get("@graph") {
        Some(Json::Array(items)) => items.iter().collect(),
        Some(_) => return Err(shape("@graph must be an array")),
        None if obj.contains_key("@id") => vec![&doc],
        None => return Err(shape("document has neither @graph nor @id")),
    };

    let mut graph = Graph::new();
    for item in nodes {
        let node_obj = item
            .as_object()
            .ok_or_else(|| shape("graph entries must be objects"))?;
        let id = node_obj
            .get("@id")
            .and_then(Json::as_str)
            .ok_or_else(|| shape("node without string @id"))?;
        if graph.contains(id) {
            return Err(shape(format!("node <{id}> appears twice")));
        }
        let types: Vec<&str> = match node_obj.get("@type") {
            Some(Json::String(t)) => vec![t],
            Some(Json::Array(ts)) => ts
                .iter()
                .map(|t| {
                    t.as_str()
                        .ok_or_else(|| shape(format!("<{id}>: @type entries must be strings")))
                })
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(shape(format!("<{id}>: bad @type"))),
            None => Vec::new(),
        };
        let mut node = SchemaNode::new(id, types);
        for (key, raw) in node_obj {
            if key == "@id" || key == "@type" {
                continue;
            }
            if key.starts_with('@') {
                return Err(shape(format!("<{id}>: unsupported keyword {key}")));
            }
            let items: Vec<&Json> = match raw {
                Json::Array(xs) => xs.iter().collect(),
                other => vec![other],
            };
            for v in items {
                node.push(
                    key.clone(),
                    read_value(v).map_err(|m| shape(format!("<{id}> {key}: {m}")))?,
                );
            }
        }
        graph.insert(node);
    }
    Ok(graph)
}

fn read_value(v: &Json) -> Result<Value, String> {
    match v {
        Json::String(s) => Ok(Value::Text(s.clone())),
        Json::Number(n) => n
            .as_i64()
            .map(Value::Integer)
            .ok_or_else(|| format!("non-integer number {n}")),
        Json::Object(o) => {
            if let Some(iri) = o.get("@id").and_then(Json::as_str) {
                if o.len() == 1 {
                    return Ok(Value::Ref(iri.to_string()));
                }
            }
            match o.get("@value") {
                Some(inner @ (Json::String(_) | Json::Number(_))) if o.len() == 1 => {
                    read_value(inner)
                }
                _ => Err("unsupported value object".into()),
            }
        }
        other => Err(format!("unsupported value {other}")),
    }
}
