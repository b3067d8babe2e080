//! The application profile: vocabulary, mapping registry, exclusion ledger
//! and model variant.
//!
//! The registry is data. The shipped default lives in `profile/default.json`
//! and can be replaced without code changes; [`load_profile`] enforces that
//! every source element resolves to at most one rule or exclusion.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{SchemaNode, Value};
use crate::model::{SourceElementRef, Standard};

/// The registry shipped with the crate.
pub const DEFAULT_REGISTRY: &str = include_str!("../profile/default.json");

pub const SCHEMA_ORG: &str = "http://schema.org/";
pub const PENDING_SCHEMA_ORG: &str = "http://pending.schema.org/";

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("registry document is not valid: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("source element {0} appears more than once in the registry")]
    DuplicateSource(SourceElementRef),
    #[error("{context} references undeclared term `{term}`")]
    UndeclaredTerm { term: String, context: String },
    #[error("invalid registry entry for {source_ref}: {message}")]
    InvalidEntry {
        source_ref: SourceElementRef,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TermKind {
    Type,
    Property,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Range {
    Text,
    Integer,
    NodeRef,
    DateText,
}

impl Range {
    fn accepts(self, value: &Value) -> bool {
        matches!(
            (self, value),
            (Range::Text | Range::DateText, Value::Text(_))
                | (Range::Integer, Value::Integer(_))
                | (Range::NodeRef, Value::Ref(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabularyTerm {
    pub name: String,
    pub kind: TermKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parents: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub domain_types: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<Range>,
    /// Resolves under the pending-terms namespace instead of the core one.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub pending: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Transform {
    CopyText,
    CopyDate,
    LinkAgent,
    LinkRepository,
    ExtentSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Cardinality {
    One,
    Many,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingRule {
    pub source: SourceElementRef,
    pub target_property: String,
    pub applies_to: Vec<String>,
    pub transform: Transform,
    pub cardinality: Cardinality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GapReason {
    ExcludedDescriptionControl,
    ExcludedLevel,
    ExcludedReferenceCode,
    NoMappingIdentified,
    Unknown,
}

impl GapReason {
    pub fn as_str(self) -> &'static str {
        match self {
            GapReason::ExcludedDescriptionControl => "EXCLUDED_DESCRIPTION_CONTROL",
            GapReason::ExcludedLevel => "EXCLUDED_LEVEL",
            GapReason::ExcludedReferenceCode => "EXCLUDED_REFERENCE_CODE",
            GapReason::NoMappingIdentified => "NO_MAPPING_IDENTIFIED",
            GapReason::Unknown => "UNKNOWN",
        }
    }

    pub fn requires_citation(self) -> bool {
        self != GapReason::Unknown
    }
}

impl fmt::Display for GapReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A documented non-mapping. An `element_id` ending in `.*` (for example
/// ISAD(G) `3.7.*`) covers every element id under that prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapEntry {
    pub source: SourceElementRef,
    pub reason: GapReason,
    #[serde(default)]
    pub citation: String,
}

impl GapEntry {
    pub fn unknown(source: SourceElementRef) -> Self {
        GapEntry {
            source,
            reason: GapReason::Unknown,
            citation: String::new(),
        }
    }

    fn wildcard_prefix(&self) -> Option<&str> {
        self.source.element_id.strip_suffix('*')
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelVariant {
    /// Dedicated archive subtypes per position in the hierarchy.
    Initial,
    /// `ArchiveComponent` co-typed with an existing creative-work type.
    Alternative,
}

impl FromStr for ModelVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "initial" => Ok(ModelVariant::Initial),
            "alternative" => Ok(ModelVariant::Alternative),
            other => Err(format!(
                "unknown model variant `{other}` (expected initial or alternative)"
            )),
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelVariant::Initial => "initial",
            ModelVariant::Alternative => "alternative",
        })
    }
}

/// Type names given to units by hierarchy position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantTyping {
    pub root: Vec<String>,
    pub intermediate: Vec<String>,
    pub leaf: Vec<String>,
}

impl VariantTyping {
    fn default_for(variant: ModelVariant) -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match variant {
            ModelVariant::Initial => VariantTyping {
                root: v(&["ArchiveCollection"]),
                intermediate: v(&["ArchiveComponent"]),
                leaf: v(&["ArchiveItem"]),
            },
            ModelVariant::Alternative => VariantTyping {
                root: v(&["ArchiveComponent", "Collection"]),
                intermediate: v(&["ArchiveComponent", "CreativeWork"]),
                leaf: v(&["ArchiveComponent", "CreativeWork"]),
            },
        }
    }

    /// The root wins over leaf for a childless root.
    pub fn types_for(&self, is_root: bool, is_leaf: bool) -> &[String] {
        if is_root {
            &self.root
        } else if is_leaf {
            &self.leaf
        } else {
            &self.intermediate
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct VariantsDoc {
    #[serde(default)]
    initial: Option<VariantTyping>,
    #[serde(default)]
    alternative: Option<VariantTyping>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct NamespacesDoc {
    #[serde(default)]
    core: Option<String>,
    #[serde(default)]
    pending: Option<String>,
}

/// On-disk registry format.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryDoc {
    #[serde(default)]
    namespaces: NamespacesDoc,
    #[serde(default)]
    vocabulary: Vec<VocabularyTerm>,
    #[serde(default)]
    rules: Vec<MappingRule>,
    #[serde(default)]
    exclusions: Vec<GapEntry>,
    #[serde(default)]
    variants: VariantsDoc,
}

/// Result of resolving a source element against the profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution<'p> {
    Rule(&'p MappingRule),
    Gap(Cow<'p, GapEntry>),
}

impl Resolution<'_> {
    pub fn rule(&self) -> Option<&MappingRule> {
        match self {
            Resolution::Rule(r) => Some(r),
            Resolution::Gap(_) => None,
        }
    }

    pub fn gap(&self) -> Option<&GapEntry> {
        match self {
            Resolution::Rule(_) => None,
            Resolution::Gap(g) => Some(g),
        }
    }
}

/// A conformance problem found by [`Profile::validate_node`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeViolation {
    UndeclaredType {
        node: String,
        type_name: String,
    },
    UndeclaredProperty {
        node: String,
        property: String,
    },
    OutOfDomain {
        node: String,
        property: String,
    },
    RangeMismatch {
        node: String,
        property: String,
        value: Value,
    },
    EmptyTypes {
        node: String,
    },
}

impl fmt::Display for NodeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeViolation::UndeclaredType { node, type_name } => {
                write!(f, "<{node}>: undeclared type `{type_name}`")
            }
            NodeViolation::UndeclaredProperty { node, property } => {
                write!(f, "<{node}>: undeclared property `{property}`")
            }
            NodeViolation::OutOfDomain { node, property } => {
                write!(
                    f,
                    "<{node}>: property `{property}` is not allowed on this node's types"
                )
            }
            NodeViolation::RangeMismatch {
                node,
                property,
                value,
            } => {
                write!(f, "<{node}>: property `{property}` cannot hold {value}")
            }
            NodeViolation::EmptyTypes { node } => write!(f, "<{node}>: node has no type"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Profile {
    vocabulary: BTreeMap<String, VocabularyTerm>,
    registry: Vec<MappingRule>,
    exclusions: Vec<GapEntry>,
    variant: ModelVariant,
    typing: VariantTyping,
    core_namespace: String,
    pending_namespace: String,
    rule_index: HashMap<SourceElementRef, usize>,
    exclusion_index: HashMap<SourceElementRef, usize>,
    /// Type name to itself plus all ancestors.
    ancestors: BTreeMap<String, BTreeSet<String>>,
}

/// Parses a registry document and builds a profile for `variant`.
///
/// An empty (or whitespace-only) document yields a profile with no
/// vocabulary, rules or exclusions.
pub fn load_profile(registry_doc: &[u8], variant: ModelVariant) -> Result<Profile, ProfileError> {
    let doc: RegistryDoc = if registry_doc.iter().all(u8::is_ascii_whitespace) {
        RegistryDoc::default()
    } else {
        serde_json::from_slice(registry_doc)?
    };
    Profile::from_doc(doc, variant)
}

impl Profile {
    /// The shipped registry. Panics only if the bundled file is broken,
    /// which the test suite rules out.
    pub fn default_for(variant: ModelVariant) -> Profile {
        load_profile(DEFAULT_REGISTRY.as_bytes(), variant).expect("bundled registry is valid")
    }

    fn from_doc(doc: RegistryDoc, variant: ModelVariant) -> Result<Profile, ProfileError> {
        let mut vocabulary = BTreeMap::new();
        for term in doc.vocabulary {
            if vocabulary.contains_key(&term.name) {
                return Err(ProfileError::InvalidEntry {
                    source_ref: SourceElementRef::new(Standard::Ead, "vocabulary"),
                    message: format!("term `{}` declared twice", term.name),
                });
            }
            vocabulary.insert(term.name.clone(), term);
        }

        let is_type = |name: &str| {
            vocabulary
                .get(name)
                .is_some_and(|t: &VocabularyTerm| t.kind == TermKind::Type)
        };
        for term in vocabulary.values() {
            let refs = match term.kind {
                TermKind::Type => &term.parents,
                TermKind::Property => &term.domain_types,
            };
            for r in refs {
                if !is_type(r) {
                    return Err(ProfileError::UndeclaredTerm {
                        term: r.clone(),
                        context: format!("vocabulary term `{}`", term.name),
                    });
                }
            }
        }

        let mut rule_index = HashMap::new();
        for (i, rule) in doc.rules.iter().enumerate() {
            if rule_index.insert(rule.source.clone(), i).is_some() {
                return Err(ProfileError::DuplicateSource(rule.source.clone()));
            }
            let property_ok = vocabulary
                .get(&rule.target_property)
                .is_some_and(|t| t.kind == TermKind::Property);
            if !property_ok {
                return Err(ProfileError::UndeclaredTerm {
                    term: rule.target_property.clone(),
                    context: format!("rule for {}", rule.source),
                });
            }
            if let Some(t) = rule.applies_to.iter().find(|t| !is_type(t)) {
                return Err(ProfileError::UndeclaredTerm {
                    term: t.clone(),
                    context: format!("rule for {}", rule.source),
                });
            }
        }

        let mut exclusion_index = HashMap::new();
        for (i, gap) in doc.exclusions.iter().enumerate() {
            if rule_index.contains_key(&gap.source)
                || exclusion_index.insert(gap.source.clone(), i).is_some()
            {
                return Err(ProfileError::DuplicateSource(gap.source.clone()));
            }
            if gap.source.element_id.is_empty() {
                return Err(ProfileError::InvalidEntry {
                    source_ref: gap.source.clone(),
                    message: "empty element id".into(),
                });
            }
            if gap.reason.requires_citation() && gap.citation.trim().is_empty() {
                return Err(ProfileError::InvalidEntry {
                    source_ref: gap.source.clone(),
                    message: format!("{} exclusions need a citation", gap.reason),
                });
            }
        }
        // A wildcard exclusion must not shadow a rule or overlap another wildcard.
        for gap in &doc.exclusions {
            if let Some(prefix) = gap.wildcard_prefix() {
                let clash = doc
                    .rules
                    .iter()
                    .map(|r| &r.source)
                    .chain(
                        doc.exclusions
                            .iter()
                            .filter(|g| g.source != gap.source)
                            .map(|g| &g.source),
                    )
                    .find(|s| {
                        s.standard == gap.source.standard && s.element_id.starts_with(prefix)
                    });
                if let Some(s) = clash {
                    return Err(ProfileError::DuplicateSource(s.clone()));
                }
            }
        }

        let ancestors = type_ancestors(&vocabulary);

        let typing = match variant {
            ModelVariant::Initial => doc.variants.initial,
            ModelVariant::Alternative => doc.variants.alternative,
        }
        .unwrap_or_else(|| VariantTyping::default_for(variant));
        // With an empty vocabulary there is nothing to check typing against.
        if !vocabulary.is_empty() {
            for t in typing
                .root
                .iter()
                .chain(&typing.intermediate)
                .chain(&typing.leaf)
            {
                if !is_type(t) {
                    return Err(ProfileError::UndeclaredTerm {
                        term: t.clone(),
                        context: format!("{variant} variant typing"),
                    });
                }
            }
        }

        Ok(Profile {
            vocabulary,
            registry: doc.rules,
            exclusions: doc.exclusions,
            variant,
            typing,
            core_namespace: doc
                .namespaces
                .core
                .unwrap_or_else(|| SCHEMA_ORG.to_string()),
            pending_namespace: doc
                .namespaces
                .pending
                .unwrap_or_else(|| SCHEMA_ORG.to_string()),
            rule_index,
            exclusion_index,
            ancestors,
        })
    }

    /// Resolves pending terms under `namespace` (for example
    /// [`PENDING_SCHEMA_ORG`]).
    pub fn with_pending_namespace(mut self, namespace: impl Into<String>) -> Self {
        self.pending_namespace = namespace.into();
        self
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn typing(&self) -> &VariantTyping {
        &self.typing
    }

    pub fn registry(&self) -> &[MappingRule] {
        &self.registry
    }

    pub fn exclusions(&self) -> &[GapEntry] {
        &self.exclusions
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &VocabularyTerm> {
        self.vocabulary.values()
    }

    pub fn term(&self, name: &str) -> Option<&VocabularyTerm> {
        self.vocabulary.get(name)
    }

    pub fn declares_type(&self, name: &str) -> bool {
        self.term(name).is_some_and(|t| t.kind == TermKind::Type)
    }

    pub fn declares_property(&self, name: &str) -> bool {
        self.term(name)
            .is_some_and(|t| t.kind == TermKind::Property)
    }

    pub fn core_namespace(&self) -> &str {
        &self.core_namespace
    }

    pub fn pending_namespace(&self) -> &str {
        &self.pending_namespace
    }

    /// Full IRI for a vocabulary term. Undeclared names fall back to the
    /// core namespace.
    pub fn expand(&self, term: &str) -> String {
        let ns = match self.term(term) {
            Some(t) if t.pending => &self.pending_namespace,
            _ => &self.core_namespace,
        };
        format!("{ns}{term}")
    }

    /// Pending terms whose IRIs differ from the `@vocab` expansion.
    pub fn pending_terms(&self) -> Vec<&str> {
        if self.pending_namespace == self.core_namespace {
            return Vec::new();
        }
        self.vocabulary
            .values()
            .filter(|t| t.pending)
            .map(|t| t.name.as_str())
            .collect()
    }

    /// True if `type_name` is `ancestor` or one of its subtypes.
    pub fn is_subtype(&self, type_name: &str, ancestor: &str) -> bool {
        self.ancestors
            .get(type_name)
            .is_some_and(|a| a.contains(ancestor))
    }

    /// True if any of `types` falls under any of `targets`.
    pub fn types_within(&self, types: &[String], targets: &[String]) -> bool {
        types
            .iter()
            .any(|t| targets.iter().any(|d| self.is_subtype(t, d)))
    }

    /// The unique rule for `source`, else its exclusion, else a synthesized
    /// `UNKNOWN` gap.
    pub fn lookup(&self, source: &SourceElementRef) -> Resolution<'_> {
        if let Some(&i) = self.rule_index.get(source) {
            return Resolution::Rule(&self.registry[i]);
        }
        if let Some(&i) = self.exclusion_index.get(source) {
            return Resolution::Gap(Cow::Borrowed(&self.exclusions[i]));
        }
        let wildcard = self.exclusions.iter().find(|g| {
            g.source.standard == source.standard
                && g.wildcard_prefix()
                    .is_some_and(|p| source.element_id.starts_with(p))
        });
        match wildcard {
            Some(g) => Resolution::Gap(Cow::Borrowed(g)),
            None => Resolution::Gap(Cow::Owned(GapEntry::unknown(source.clone()))),
        }
    }

    /// Checks a node against the vocabulary: declared types and properties,
    /// property domains (including subtypes) and value ranges.
    pub fn validate_node(&self, node: &SchemaNode) -> Vec<NodeViolation> {
        let mut out = Vec::new();
        let id = || node.id.clone();
        if node.types.is_empty() {
            out.push(NodeViolation::EmptyTypes { node: id() });
        }
        for t in &node.types {
            if !self.declares_type(t) {
                out.push(NodeViolation::UndeclaredType {
                    node: id(),
                    type_name: t.clone(),
                });
            }
        }
        for (property, values) in &node.properties {
            let Some(term) = self.term(property).filter(|t| t.kind == TermKind::Property) else {
                out.push(NodeViolation::UndeclaredProperty {
                    node: id(),
                    property: property.clone(),
                });
                continue;
            };
            if !term.domain_types.is_empty() && !self.types_within(&node.types, &term.domain_types)
            {
                out.push(NodeViolation::OutOfDomain {
                    node: id(),
                    property: property.clone(),
                });
            }
            if let Some(range) = term.range {
                for v in values.iter().filter(|v| !range.accepts(v)) {
                    out.push(NodeViolation::RangeMismatch {
                        node: id(),
                        property: property.clone(),
                        value: v.clone(),
                    });
                }
            }
        }
        out
    }
}

fn type_ancestors(
    vocabulary: &BTreeMap<String, VocabularyTerm>,
) -> BTreeMap<String, BTreeSet<String>> {
    let mut out = BTreeMap::new();
    for term in vocabulary.values().filter(|t| t.kind == TermKind::Type) {
        let mut seen = BTreeSet::new();
        let mut stack = vec![term.name.as_str()];
        while let Some(t) = stack.pop() {
            if seen.insert(t.to_string()) {
                if let Some(parent) = vocabulary.get(t) {
                    stack.extend(parent.parents.iter().map(String::as_str));
                }
            }
        }
        out.insert(term.name.clone(), seen);
    }
    out
}
