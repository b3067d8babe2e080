//! Source-agnostic intermediate representation of a finding aid.
//!
//! Both ingesters produce a [`DescriptionTree`]; the crosswalk consumes it.
//! Values that the profile never emits (`level`, `reference_code`) are still
//! carried so that the conversion report can account for them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Descriptive standard (or system data model) an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Standard {
    Aspace,
    Dacs,
    Ead,
    Isadg,
}

impl Standard {
    pub fn as_str(self) -> &'static str {
        match self {
            Standard::Isadg => "ISADG",
            Standard::Dacs => "DACS",
            Standard::Ead => "EAD",
            Standard::Aspace => "ASPACE",
        }
    }
}

impl fmt::Display for Standard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Standard {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ISADG" => Ok(Standard::Isadg),
            "DACS" => Ok(Standard::Dacs),
            "EAD" => Ok(Standard::Ead),
            "ASPACE" => Ok(Standard::Aspace),
            other => Err(format!("unknown standard `{other}`")),
        }
    }
}

/// A source element: ISAD(G) section number, EAD element name or path,
/// or ArchivesSpace field name. Equality is exact and case-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceElementRef {
    pub standard: Standard,
    pub element_id: String,
}

impl SourceElementRef {
    pub fn new(standard: Standard, element_id: impl Into<String>) -> Self {
        SourceElementRef {
            standard,
            element_id: element_id.into(),
        }
    }

    pub fn ead(element_id: impl Into<String>) -> Self {
        Self::new(Standard::Ead, element_id)
    }

    pub fn aspace(element_id: impl Into<String>) -> Self {
        Self::new(Standard::Aspace, element_id)
    }

    pub fn isadg(element_id: impl Into<String>) -> Self {
        Self::new(Standard::Isadg, element_id)
    }
}

impl fmt::Display for SourceElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.standard, self.element_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoteField {
    pub source: SourceElementRef,
    pub text: String,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtentKind {
    Textual,
    Count,
}

/// Either free text ("12 linear feet") or an item count. The fields are
/// public so malformed statements can be represented and reported by
/// [`validate_tree`]; use the constructors for well-formed ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtentStatement {
    pub kind: ExtentKind,
    pub text: Option<String>,
    pub count: Option<u64>,
    pub unit_label: Option<String>,
}

impl ExtentStatement {
    pub fn textual(text: impl Into<String>) -> Self {
        ExtentStatement {
            kind: ExtentKind::Textual,
            text: Some(text.into()),
            count: None,
            unit_label: None,
        }
    }

    pub fn count(count: u64, unit_label: Option<String>) -> Self {
        ExtentStatement {
            kind: ExtentKind::Count,
            text: None,
            count: Some(count),
            unit_label,
        }
    }

    /// Classifies a `{number} {unit}` pair: integer counts of items become
    /// [`ExtentKind::Count`], anything else is kept as text.
    pub fn classify(number: &str, unit: &str) -> Self {
        let number = normalize_whitespace(number);
        let unit = normalize_whitespace(unit);
        let is_items = matches!(unit.to_ascii_lowercase().as_str(), "items" | "item");
        match number.parse::<u64>() {
            Ok(n) if is_items && number.bytes().all(|b| b.is_ascii_digit()) => {
                ExtentStatement::count(n, Some(unit))
            }
            _ if unit.is_empty() => ExtentStatement::textual(number),
            _ => ExtentStatement::textual(format!("{number} {unit}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentKind {
    Person,
    CorporateBody,
    Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentRole {
    Creator,
    Subject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentRecord {
    pub name: String,
    pub agent_kind: AgentKind,
    pub dates_of_existence: Option<String>,
    pub role: AgentRole,
}

impl AgentRecord {
    pub fn new(name: impl Into<String>, agent_kind: AgentKind, role: AgentRole) -> Self {
        AgentRecord {
            name: name.into(),
            agent_kind,
            dates_of_existence: None,
            role,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RepositoryRecord {
    pub name: String,
    pub address: Option<String>,
    pub url: Option<String>,
}

impl RepositoryRecord {
    pub fn named(name: impl Into<String>) -> Self {
        RepositoryRecord {
            name: name.into(),
            ..Default::default()
        }
    }
}

/// One level of description (collection, series, file, item...).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ArchivalUnit {
    pub title: Option<String>,
    /// Never emitted; tallied as an exclusion.
    pub level: Option<String>,
    pub dates: Option<String>,
    /// Never emitted; tallied as an exclusion.
    pub reference_code: Option<String>,
    pub extents: Vec<ExtentStatement>,
    pub agents: Vec<AgentRecord>,
    pub notes: Vec<NoteField>,
    pub languages: Vec<String>,
    /// Source occurrences the ingester could not place in any field:
    /// repeated single-valued elements, unsupported agent roles, pruned
    /// unpublished components. Reported as unknown unless an exclusion
    /// covers them.
    pub dropped: Vec<SourceElementRef>,
    pub children: Vec<ArchivalUnit>,
}

impl ArchivalUnit {
    pub fn titled(title: impl Into<String>) -> Self {
        ArchivalUnit {
            title: Some(title.into()),
            ..Default::default()
        }
    }

    pub fn with_children(mut self, children: Vec<ArchivalUnit>) -> Self {
        self.children = children;
        self
    }

    /// Number of units in this subtree, including `self`.
    pub fn unit_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(ArchivalUnit::unit_count)
            .sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceFormat {
    Ead,
    Aspace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptionTree {
    pub repository: RepositoryRecord,
    pub root: ArchivalUnit,
    pub source_format: SourceFormat,
    /// Finding-aid (description control) elements seen in the source. They
    /// are only tallied, never mapped onto units.
    pub control: Vec<SourceElementRef>,
}

impl DescriptionTree {
    pub fn new(
        repository: RepositoryRecord,
        root: ArchivalUnit,
        source_format: SourceFormat,
    ) -> Self {
        DescriptionTree {
            repository,
            root,
            source_format,
            control: Vec::new(),
        }
    }

    pub fn unit_count(&self) -> usize {
        self.root.unit_count()
    }
}

/// Position of a unit: child indexes from the root.
pub type UnitPath = Vec<usize>;

/// Preorder traversal. The first entry is always `([], root)`.
pub fn flatten(tree: &DescriptionTree) -> Vec<(UnitPath, &ArchivalUnit)> {
    let mut out = Vec::new();
    let mut stack: Vec<(UnitPath, &ArchivalUnit)> = vec![(Vec::new(), &tree.root)];
    while let Some((path, unit)) = stack.pop() {
        for (i, child) in unit.children.iter().enumerate().rev() {
            let mut child_path = path.clone();
            child_path.push(i);
            stack.push((child_path, child));
        }
        out.push((path, unit));
    }
    out
}

/// A broken invariant, located by unit path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeViolation {
    pub path: UnitPath,
    pub message: String,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", format_path(&self.path), self.message)
    }
}

pub fn format_path(path: &[usize]) -> String {
    if path.is_empty() {
        "/".to_string()
    } else {
        path.iter().map(|i| format!("/{i}")).collect()
    }
}

/// Checks every type invariant of the intermediate model. An empty result
/// means the tree may be handed to the crosswalk.
pub fn validate_tree(tree: &DescriptionTree) -> Vec<TreeViolation> {
    let mut violations = Vec::new();
    let mut push = |path: &UnitPath, message: String| {
        violations.push(TreeViolation {
            path: path.clone(),
            message,
        });
    };

    if tree.repository.name.trim().is_empty() {
        push(&Vec::new(), "repository name is empty".into());
    }
    for r in &tree.control {
        if r.element_id.is_empty() {
            push(
                &Vec::new(),
                "description-control element with empty id".into(),
            );
        }
    }

    for (path, unit) in flatten(tree) {
        for (i, note) in unit.notes.iter().enumerate() {
            if note.source.element_id.is_empty() {
                push(&path, format!("note {i} has an empty source element id"));
            }
            if normalize_whitespace(&note.text).is_empty() {
                push(&path, format!("note {i} ({}) has empty text", note.source));
            }
        }
        for (i, extent) in unit.extents.iter().enumerate() {
            let ok = match extent.kind {
                ExtentKind::Textual => {
                    extent.count.is_none()
                        && extent.text.as_deref().is_some_and(|t| !t.trim().is_empty())
                }
                ExtentKind::Count => extent.text.is_none() && extent.count.is_some(),
            };
            if !ok {
                push(
                    &path,
                    format!("extent {i} must populate exactly one of text/count matching its kind"),
                );
            }
        }
        for (i, agent) in unit.agents.iter().enumerate() {
            if agent.name.trim().is_empty() {
                push(&path, format!("agent {i} has an empty name"));
            }
        }
        for r in &unit.dropped {
            if r.element_id.is_empty() {
                push(&path, "dropped element with empty id".into());
            }
        }
    }
    violations
}

/// Collapses runs of whitespace to single spaces and trims both ends.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
