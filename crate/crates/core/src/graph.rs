//! Typed linked-data nodes and graphs. Every node carries an assigned IRI;
//! there are no blank nodes.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Text(String),
    Integer(i64),
    Ref(String),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn reference(iri: impl Into<String>) -> Self {
        Value::Ref(iri.into())
    }

    pub fn as_ref_iri(&self) -> Option<&str> {
        match self {
            Value::Ref(iri) => Some(iri),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(s) => write!(f, "{s:?}"),
            Value::Integer(n) => write!(f, "{n}"),
            Value::Ref(iri) => write!(f, "<{iri}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaNode {
    pub id: String,
    /// Ordered set of type names.
    pub types: Vec<String>,
    /// Property name to values. Value lists keep insertion order and never
    /// hold the same value twice.
    pub properties: BTreeMap<String, Vec<Value>>,
}

impl SchemaNode {
    pub fn new<I, S>(id: impl Into<String>, types: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut node = SchemaNode {
            id: id.into(),
            types: Vec::new(),
            properties: BTreeMap::new(),
        };
        for t in types {
            node.add_type(t);
        }
        node
    }

    pub fn add_type(&mut self, t: impl Into<String>) {
        let t = t.into();
        if !self.types.contains(&t) {
            self.types.push(t);
        }
    }

    pub fn has_type(&self, t: &str) -> bool {
        self.types.iter().any(|x| x == t)
    }

    /// Appends `value` unless the property already holds it.
    pub fn push(&mut self, property: impl Into<String>, value: Value) {
        let values = self.properties.entry(property.into()).or_default();
        if !values.contains(&value) {
            values.push(value);
        }
    }

    pub fn get(&self, property: &str) -> &[Value] {
        self.properties
            .get(property)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has_property(&self, property: &str) -> bool {
        self.properties.contains_key(property)
    }

    /// IRIs this node points at.
    pub fn references(&self) -> impl Iterator<Item = &str> {
        self.properties
            .values()
            .flatten()
            .filter_map(Value::as_ref_iri)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("dangling reference: <{0}> is not a node in the graph")]
    DanglingReference(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    nodes: BTreeMap<String, SchemaNode>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces the node with the same id.
    pub fn insert(&mut self, node: SchemaNode) {
        self.nodes.insert(node.id.clone(), node);
    }

    pub fn get(&self, id: &str) -> Option<&SchemaNode> {
        self.nodes.get(id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut SchemaNode> {
        self.nodes.get_mut(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// Nodes in lexicographic `@id` order.
    pub fn nodes(&self) -> impl Iterator<Item = &SchemaNode> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Reference values that do not resolve to a node.
    pub fn dangling_references(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for node in self.nodes.values() {
            for target in node.references() {
                if !self.nodes.contains_key(target) {
                    out.push((node.id.clone(), target.to_string()));
                }
            }
        }
        out
    }
}

impl FromIterator<SchemaNode> for Graph {
    fn from_iter<T: IntoIterator<Item = SchemaNode>>(iter: T) -> Self {
        let mut g = Graph::new();
        for node in iter {
            g.insert(node);
        }
        g
    }
}
