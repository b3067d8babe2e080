//! Applies a [`Profile`] to a [`DescriptionTree`].
//!
//! Node IRIs come from hierarchy position (`{base}/c0/c2`), never from
//! reference codes. Agents are shared graph-wide by exact (name, kind).

use std::collections::HashMap;

use thiserror::Error;

pub use crate::graph::{Graph, GraphError, SchemaNode, Value};
use crate::model::{
    flatten, validate_tree, AgentKind, AgentRecord, AgentRole, ArchivalUnit, DescriptionTree,
    ExtentKind, ExtentStatement, RepositoryRecord, SourceElementRef, SourceFormat, TreeViolation,
};
use crate::profile::{
    Cardinality, GapEntry, GapReason, MappingRule, Profile, Resolution, Transform,
};
pub use crate::report::ConversionReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrosswalkError {
    #[error("description tree is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidTree(Vec<TreeViolation>),
    #[error("base URI `{0}` must be absolute and must not end with `/`")]
    InvalidBaseUri(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Unit (or tree) fields whose source element depends on the input format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitField {
    Title,
    Dates,
    Level,
    ReferenceCode,
    Extent,
    Creator,
    Subject,
    FamilyAgent,
    Language,
    Repository,
    RepositoryAddress,
}

/// The source element an ingested field came from.
pub fn field_ref(format: SourceFormat, field: UnitField, is_root: bool) -> SourceElementRef {
    match format {
        SourceFormat::Ead => SourceElementRef::ead(match field {
            UnitField::Title => "unittitle",
            UnitField::Dates => "unitdate",
            UnitField::Level => "@level",
            UnitField::ReferenceCode => "unitid",
            UnitField::Extent => "physdesc/extent",
            UnitField::Creator => "origination",
            UnitField::Subject => "controlaccess",
            UnitField::FamilyAgent => "famname",
            UnitField::Language => "langmaterial",
            UnitField::Repository => "repository",
            UnitField::RepositoryAddress => "repository/address",
        }),
        SourceFormat::Aspace => SourceElementRef::aspace(match field {
            UnitField::Title => "title",
            UnitField::Dates => "dates",
            UnitField::Level => "level",
            UnitField::ReferenceCode if is_root => "id_0",
            UnitField::ReferenceCode => "component_id",
            UnitField::Extent => "extents",
            UnitField::Creator => "linked_agents.creator",
            UnitField::Subject => "linked_agents.subject",
            UnitField::FamilyAgent => "agent_family",
            UnitField::Language => "lang_materials",
            UnitField::Repository => "repository",
            UnitField::RepositoryAddress => "repository.address",
        }),
    }
}

/// Positional IRI: the root is `base_uri`, descendants append `/c{i}` per
/// child index.
pub fn assign_id(base_uri: &str, path: &[usize]) -> String {
    let mut id = String::with_capacity(base_uri.len() + path.len() * 4);
    id.push_str(base_uri);
    for i in path {
        id.push_str("/c");
        id.push_str(&i.to_string());
    }
    id
}

/// Accepts absolute hierarchical URIs without a trailing `/`.
pub fn check_base_uri(base_uri: &str) -> Result<(), CrosswalkError> {
    let ok =
        !base_uri.ends_with('/') && url::Url::parse(base_uri).is_ok_and(|u| !u.cannot_be_a_base());
    if ok {
        Ok(())
    } else {
        Err(CrosswalkError::InvalidBaseUri(base_uri.to_string()))
    }
}

/// Output of [`map_unit`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitMapping {
    pub node: SchemaNode,
    pub report: ConversionReport,
    /// Notes whose rule targets another node (for example a biographical
    /// note that describes the unit's creators). Left for [`convert`].
    pub deferred_notes: Vec<usize>,
}

impl UnitMapping {
    pub fn gaps(&self) -> Vec<(GapEntry, u64)> {
        self.report.gaps()
    }
}

fn always_excluded(source: &SourceElementRef, reason: GapReason) -> GapEntry {
    GapEntry {
        source: source.clone(),
        reason,
        citation: format!("{reason}: retained in the source model, never emitted by the profile"),
    }
}

/// Applies a value-producing rule to `node`, tallying the outcome.
fn apply(
    profile: &Profile,
    node: &mut SchemaNode,
    rule: &MappingRule,
    value: Value,
    source: &SourceElementRef,
    report: &mut ConversionReport,
) {
    let allowed = profile.types_within(&node.types, &rule.applies_to);
    let full = rule.cardinality == Cardinality::One && node.has_property(&rule.target_property);
    if allowed && !full {
        node.push(rule.target_property.clone(), value);
        report.tally_mapped(source);
    } else {
        report.tally_unknown(source);
    }
}

/// Maps the unit's own fields onto a node typed for its position.
///
/// Agents are not handled here: they need graph-wide deduplication and are
/// linked by [`convert`]. `level` and `reference_code` are only ever tallied.
pub fn map_unit(
    unit: &ArchivalUnit,
    format: SourceFormat,
    profile: &Profile,
    id: &str,
    is_root: bool,
    is_leaf: bool,
) -> UnitMapping {
    let mut node = SchemaNode::new(
        id,
        profile.typing().types_for(is_root, is_leaf).iter().cloned(),
    );
    let mut report = ConversionReport::new();
    let mut deferred_notes = Vec::new();
    let field = |f: UnitField| field_ref(format, f, is_root);

    let text_field = |node: &mut SchemaNode,
                      report: &mut ConversionReport,
                      source: SourceElementRef,
                      text: &str| {
        match profile.lookup(&source) {
            Resolution::Rule(rule)
                if matches!(rule.transform, Transform::CopyText | Transform::CopyDate) =>
            {
                apply(profile, node, rule, Value::text(text), &source, report);
            }
            Resolution::Rule(_) => report.tally_unknown(&source),
            Resolution::Gap(gap) => report.tally_gap(&source, &gap),
        }
    };

    if let Some(title) = &unit.title {
        text_field(&mut node, &mut report, field(UnitField::Title), title);
    }
    if let Some(dates) = &unit.dates {
        text_field(&mut node, &mut report, field(UnitField::Dates), dates);
    }
    for language in &unit.languages {
        text_field(&mut node, &mut report, field(UnitField::Language), language);
    }

    for (source, value, reason) in [
        (
            field(UnitField::Level),
            &unit.level,
            GapReason::ExcludedLevel,
        ),
        (
            field(UnitField::ReferenceCode),
            &unit.reference_code,
            GapReason::ExcludedReferenceCode,
        ),
    ] {
        if value.is_some() {
            match profile.lookup(&source) {
                Resolution::Gap(gap) if gap.reason == reason => report.tally_gap(&source, &gap),
                _ => report.tally_gap(&source, &always_excluded(&source, reason)),
            }
        }
    }

    let extent_ref = field(UnitField::Extent);
    for extent in &unit.extents {
        match profile.lookup(&extent_ref) {
            Resolution::Rule(rule) if rule.transform == Transform::ExtentSplit => {
                if profile.types_within(&node.types, &rule.applies_to) {
                    map_extent(extent, &mut node, profile);
                    report.tally_mapped(&extent_ref);
                } else {
                    report.tally_unknown(&extent_ref);
                }
            }
            Resolution::Rule(_) => report.tally_unknown(&extent_ref),
            Resolution::Gap(gap) => report.tally_gap(&extent_ref, &gap),
        }
    }

    for (i, note) in unit.notes.iter().enumerate() {
        match profile.lookup(&note.source) {
            Resolution::Rule(rule) if rule.transform == Transform::CopyText => {
                if profile.types_within(&node.types, &rule.applies_to) {
                    apply(
                        profile,
                        &mut node,
                        rule,
                        Value::text(&note.text),
                        &note.source,
                        &mut report,
                    );
                } else {
                    deferred_notes.push(i);
                }
            }
            Resolution::Rule(_) => report.tally_unknown(&note.source),
            Resolution::Gap(gap) => report.tally_gap(&note.source, &gap),
        }
    }

    for source in &unit.dropped {
        match profile.lookup(source) {
            Resolution::Gap(gap) => report.tally_gap(source, &gap),
            Resolution::Rule(_) => report.tally_unknown(source),
        }
    }

    UnitMapping {
        node,
        report,
        deferred_notes,
    }
}

/// Adds an extent to `node`: text goes to `materialExtent`; counts go to
/// `collectionSize` on collection-typed nodes and otherwise become
/// `"{count} {unit}"` text.
pub fn map_extent(extent: &ExtentStatement, node: &mut SchemaNode, profile: &Profile) {
    match extent.kind {
        ExtentKind::Textual => {
            if let Some(text) = &extent.text {
                node.push("materialExtent", Value::text(text));
            }
        }
        ExtentKind::Count => {
            let count = extent.count.unwrap_or(0);
            let is_collection = node
                .types
                .iter()
                .any(|t| profile.is_subtype(t, "Collection"));
            match i64::try_from(count) {
                Ok(n) if is_collection => node.push("collectionSize", Value::Integer(n)),
                _ => {
                    let unit = extent.unit_label.as_deref().unwrap_or("items");
                    node.push("materialExtent", Value::text(format!("{count} {unit}")));
                }
            }
        }
    }
}

/// Adds `hasPart` on the parent and `isPartOf` on each child.
pub fn link_hierarchy(
    graph: &mut Graph,
    parent_id: &str,
    child_ids: &[String],
) -> Result<(), GraphError> {
    for id in std::iter::once(parent_id).chain(child_ids.iter().map(String::as_str)) {
        if !graph.contains(id) {
            return Err(GraphError::DanglingReference(id.to_string()));
        }
    }
    for child in child_ids {
        graph
            .get_mut(parent_id)
            .expect("checked")
            .push("hasPart", Value::reference(child));
        graph
            .get_mut(child)
            .expect("checked")
            .push("isPartOf", Value::reference(parent_id));
    }
    Ok(())
}

/// IRI of the repository node for a finding aid.
pub fn repository_id(base_uri: &str) -> String {
    format!("{base_uri}/repository")
}

/// Builds the holding repository node and links it with the root
/// (`archiveHeld` / `holdingArchive`).
pub fn map_repository(
    repo: &RepositoryRecord,
    base_uri: &str,
    root_id: &str,
    graph: &mut Graph,
) -> Result<SchemaNode, GraphError> {
    let id = repository_id(base_uri);
    let mut node = SchemaNode::new(&id, ["ArchiveOrganization"]);
    node.push("name", Value::text(&repo.name));
    if let Some(url) = &repo.url {
        node.push("url", Value::text(url));
    }
    node.push("archiveHeld", Value::reference(root_id));
    let root = graph
        .get_mut(root_id)
        .ok_or_else(|| GraphError::DanglingReference(root_id.to_string()))?;
    root.push("holdingArchive", Value::reference(&id));
    graph.insert(node.clone());
    Ok(node)
}

/// IRI of the `seq`-th distinct agent.
pub fn agent_id(base_uri: &str, seq: usize) -> String {
    format!("{base_uri}/agents/a{seq}")
}

/// Builds an agent node. Families have no type of their own and are typed
/// `Person`; the approximation is reported as an unknown tally.
pub fn map_agent(
    agent: &AgentRecord,
    format: SourceFormat,
    profile: &Profile,
    base_uri: &str,
    seq: usize,
) -> (SchemaNode, ConversionReport) {
    let mut report = ConversionReport::new();
    let type_name = match agent.agent_kind {
        AgentKind::Person => "Person",
        AgentKind::CorporateBody => "Organization",
        AgentKind::Family => {
            let source = field_ref(format, UnitField::FamilyAgent, false);
            match profile.lookup(&source) {
                Resolution::Gap(gap) if gap.reason == GapReason::Unknown => {
                    report.tally_gap(&source, &gap)
                }
                _ => report.tally_unknown(&source),
            }
            "Person"
        }
    };
    let mut node = SchemaNode::new(agent_id(base_uri, seq), [type_name]);
    node.push("name", Value::text(&agent.name));
    if let Some(dates) = &agent.dates_of_existence {
        node.push(
            "description",
            Value::text(format!("Dates of existence: {dates}")),
        );
    }
    (node, report)
}

/// Converts a tree into a graph plus a report that accounts for every
/// source-element occurrence.
pub fn convert(
    tree: &DescriptionTree,
    profile: &Profile,
    base_uri: &str,
) -> Result<(Graph, ConversionReport), CrosswalkError> {
    let violations = validate_tree(tree);
    if !violations.is_empty() {
        return Err(CrosswalkError::InvalidTree(violations));
    }
    check_base_uri(base_uri)?;

    let format = tree.source_format;
    let mut graph = Graph::new();
    let mut report = ConversionReport::new();
    let mut agents: HashMap<(String, AgentKind), String> = HashMap::new();
    let units = flatten(tree);

    let mut ids = Vec::with_capacity(units.len());
    for (path, unit) in &units {
        let id = assign_id(base_uri, path);
        let is_root = path.is_empty();
        let mut mapping = map_unit(
            unit,
            format,
            profile,
            &id,
            is_root,
            unit.children.is_empty(),
        );
        report.merge(&mapping.report);

        let mut linked = Vec::new();
        for agent in &unit.agents {
            let source = match agent.role {
                AgentRole::Creator => field_ref(format, UnitField::Creator, is_root),
                AgentRole::Subject => field_ref(format, UnitField::Subject, is_root),
            };
            let rule = match profile.lookup(&source) {
                Resolution::Rule(rule) if rule.transform == Transform::LinkAgent => rule,
                Resolution::Rule(_) => {
                    report.tally_unknown(&source);
                    continue;
                }
                Resolution::Gap(gap) => {
                    report.tally_gap(&source, &gap);
                    continue;
                }
            };
            if !profile.types_within(&mapping.node.types, &rule.applies_to) {
                report.tally_unknown(&source);
                continue;
            }
            let key = (agent.name.clone(), agent.agent_kind);
            let agent_iri = match agents.get(&key) {
                Some(iri) => iri.clone(),
                None => {
                    let (node, agent_report) =
                        map_agent(agent, format, profile, base_uri, agents.len());
                    report.merge(&agent_report);
                    let iri = node.id.clone();
                    graph.insert(node);
                    agents.insert(key, iri.clone());
                    iri
                }
            };
            mapping
                .node
                .push(rule.target_property.clone(), Value::reference(&agent_iri));
            report.tally_mapped(&source);
            linked.push(agent_iri);
        }

        for &i in &mapping.deferred_notes {
            let note = &unit.notes[i];
            let Some(rule) = profile.lookup(&note.source).rule().cloned() else {
                continue;
            };
            let targets: Vec<&String> = linked
                .iter()
                .filter(|iri| {
                    graph
                        .get(iri)
                        .is_some_and(|n| profile.types_within(&n.types, &rule.applies_to))
                })
                .collect();
            if targets.is_empty() {
                report.tally_unknown(&note.source);
                continue;
            }
            for iri in targets {
                graph
                    .get_mut(iri)
                    .expect("agent inserted")
                    .push(rule.target_property.clone(), Value::text(&note.text));
            }
            report.tally_mapped(&note.source);
        }

        graph.insert(mapping.node);
        ids.push(id);
    }

    for (k, (path, unit)) in units.iter().enumerate() {
        if unit.children.is_empty() {
            continue;
        }
        let child_ids: Vec<String> = (0..unit.children.len())
            .map(|i| {
                let mut p = path.clone();
                p.push(i);
                assign_id(base_uri, &p)
            })
            .collect();
        link_hierarchy(&mut graph, &ids[k], &child_ids)?;
    }

    let root_id = ids[0].clone();
    map_repository(&tree.repository, base_uri, &root_id, &mut graph)?;
    let repo_ref = field_ref(format, UnitField::Repository, true);
    report.tally(&repo_ref, &profile.lookup(&repo_ref));
    if tree.repository.address.is_some() {
        let address_ref = field_ref(format, UnitField::RepositoryAddress, true);
        report.tally(&address_ref, &profile.lookup(&address_ref));
    }

    for source in &tree.control {
        match profile.lookup(source) {
            Resolution::Gap(gap) => report.tally_gap(source, &gap),
            Resolution::Rule(_) => report.tally_gap(
                source,
                &always_excluded(source, GapReason::ExcludedDescriptionControl),
            ),
        }
    }

    if let Some((from, to)) = graph.dangling_references().into_iter().next() {
        debug_assert!(false, "{from} -> {to}");
        return Err(GraphError::DanglingReference(to).into());
    }

    report.unit_count = units.len();
    report.node_count = graph.len();
    Ok((graph, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NoteField, RepositoryRecord};
    use crate::profile::ModelVariant;

    const BASE: &str = "https://ex.org/f1";

    fn alt() -> Profile {
        Profile::default_for(ModelVariant::Alternative)
    }

    #[test]
    fn ids_follow_paths() {
        assert_eq!(assign_id(BASE, &[]), BASE);
        assert_eq!(assign_id(BASE, &[0, 2]), "https://ex.org/f1/c0/c2");
        assert_ne!(assign_id(BASE, &[1]), assign_id(BASE, &[0, 1]));
        assert_ne!(assign_id(BASE, &[1, 1]), assign_id(BASE, &[11]));
    }

    #[test]
    fn base_uri_checks() {
        assert!(check_base_uri(BASE).is_ok());
        assert!(check_base_uri("https://ex.org/f1/").is_err());
        assert!(check_base_uri("f1").is_err());
        assert!(check_base_uri("mailto:a@b").is_err());
    }

    #[test]
    fn map_unit_root_title() {
        let m = map_unit(
            &ArchivalUnit::titled("Smith Papers"),
            SourceFormat::Ead,
            &alt(),
            BASE,
            true,
            true,
        );
        let mut expected = SchemaNode::new(BASE, ["ArchiveComponent", "Collection"]);
        expected.push("name", Value::text("Smith Papers"));
        assert_eq!(m.node, expected);
        assert_eq!(m.report.total(), 1);
    }

    #[test]
    fn map_unit_empty() {
        let m = map_unit(
            &ArchivalUnit::default(),
            SourceFormat::Ead,
            &alt(),
            BASE,
            false,
            true,
        );
        assert_eq!(m.node.types, ["ArchiveComponent", "CreativeWork"]);
        assert!(m.node.properties.is_empty());
        assert!(m.gaps().is_empty());
        assert_eq!(m.report.total(), 0);
    }

    #[test]
    fn map_unit_appraisal_is_not_mapped() {
        let unit = ArchivalUnit {
            notes: vec![NoteField {
                source: SourceElementRef::ead("appraisal"),
                text: "Weeded in 1990".into(),
                label: None,
            }],
            ..Default::default()
        };
        let m = map_unit(&unit, SourceFormat::Ead, &alt(), BASE, true, true);
        assert!(m.node.properties.is_empty());
        let gaps = m.gaps();
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].0.reason, GapReason::NoMappingIdentified);
        assert_eq!(gaps[0].1, 1);
    }

    #[test]
    fn level_and_reference_code_are_only_tallied() {
        let unit = ArchivalUnit {
            level: Some("fonds".into()),
            reference_code: Some("MS 1".into()),
            ..Default::default()
        };
        let m = map_unit(&unit, SourceFormat::Aspace, &alt(), BASE, true, true);
        assert!(m.node.properties.is_empty());
        assert_eq!(m.report.excluded_with_reason(GapReason::ExcludedLevel), 1);
        assert_eq!(
            m.report
                .excluded_with_reason(GapReason::ExcludedReferenceCode),
            1
        );
        assert!(m
            .report
            .excluded
            .contains_key(&SourceElementRef::aspace("id_0")));
        // Even an empty registry never lets them through.
        let empty = crate::profile::load_profile(b"{}", ModelVariant::Alternative).unwrap();
        let m = map_unit(&unit, SourceFormat::Ead, &empty, BASE, true, true);
        assert_eq!(m.report.excluded_total(), 2);
    }

    #[test]
    fn second_value_for_single_valued_property_is_unknown() {
        let unit = ArchivalUnit {
            title: Some("T".into()),
            notes: vec![],
            dropped: vec![SourceElementRef::ead("unittitle")],
            ..Default::default()
        };
        let m = map_unit(&unit, SourceFormat::Ead, &alt(), BASE, true, true);
        assert_eq!(m.report.mapped_total(), 1);
        assert_eq!(m.report.unknown[&SourceElementRef::ead("unittitle")], 1);
    }

    #[test]
    fn extents_split_by_node_type() {
        let p = alt();
        let mut any = SchemaNode::new(BASE, ["ArchiveComponent", "CreativeWork"]);
        map_extent(&ExtentStatement::textual("12 linear feet"), &mut any, &p);
        assert_eq!(any.get("materialExtent"), &[Value::text("12 linear feet")]);

        let mut coll = SchemaNode::new(BASE, ["ArchiveComponent", "Collection"]);
        map_extent(
            &ExtentStatement::count(3400, Some("items".into())),
            &mut coll,
            &p,
        );
        assert_eq!(coll.get("collectionSize"), &[Value::Integer(3400)]);
        assert!(!coll.has_property("materialExtent"));

        let mut part = SchemaNode::new(BASE, ["ArchiveComponent", "CreativeWork"]);
        map_extent(
            &ExtentStatement::count(0, Some("items".into())),
            &mut part,
            &p,
        );
        assert_eq!(part.get("materialExtent"), &[Value::text("0 items")]);
    }

    #[test]
    fn hierarchy_links() {
        let mut g: Graph = ["P", "A", "B"]
            .iter()
            .map(|n| SchemaNode::new(format!("{BASE}/{n}"), ["CreativeWork"]))
            .collect();
        let p = format!("{BASE}/P");
        let (a, b) = (format!("{BASE}/A"), format!("{BASE}/B"));
        let before = g.clone();
        link_hierarchy(&mut g, &p, &[]).unwrap();
        assert_eq!(g, before);

        link_hierarchy(&mut g, &p, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(
            g.get(&p).unwrap().get("hasPart"),
            &[Value::reference(&a), Value::reference(&b)]
        );
        assert_eq!(g.get(&a).unwrap().get("isPartOf"), &[Value::reference(&p)]);
        assert_eq!(g.get(&b).unwrap().get("isPartOf"), &[Value::reference(&p)]);

        let err = link_hierarchy(&mut g, &p, &[format!("{BASE}/Z")]).unwrap_err();
        assert_eq!(err, GraphError::DanglingReference(format!("{BASE}/Z")));
    }

    #[test]
    fn chain_reaches_root_in_two_hops() {
        let mut g: Graph = ["P", "A", "B"]
            .iter()
            .map(|n| SchemaNode::new(format!("{BASE}/{n}"), ["CreativeWork"]))
            .collect();
        link_hierarchy(&mut g, &format!("{BASE}/P"), &[format!("{BASE}/A")]).unwrap();
        link_hierarchy(&mut g, &format!("{BASE}/A"), &[format!("{BASE}/B")]).unwrap();
        let mut at = format!("{BASE}/B");
        let mut hops = 0;
        while let Some(parent) = g.get(&at).unwrap().get("isPartOf").first() {
            at = parent.as_ref_iri().unwrap().to_string();
            hops += 1;
        }
        assert_eq!((at, hops), (format!("{BASE}/P"), 2));
    }

    #[test]
    fn repository_pairing() {
        let mut g: Graph = [SchemaNode::new(BASE, ["ArchiveComponent", "Collection"])]
            .into_iter()
            .collect();
        let repo = RepositoryRecord {
            url: Some("https://rice.edu".into()),
            ..RepositoryRecord::named("Rice Archives")
        };
        let node = map_repository(&repo, BASE, BASE, &mut g).unwrap();
        assert_eq!(node.id, "https://ex.org/f1/repository");
        assert_eq!(node.types, ["ArchiveOrganization"]);
        assert_eq!(node.get("name"), &[Value::text("Rice Archives")]);
        assert_eq!(node.get("archiveHeld"), &[Value::reference(BASE)]);
        assert_eq!(node.get("url"), &[Value::text("https://rice.edu")]);
        assert_eq!(
            g.get(BASE).unwrap().get("holdingArchive"),
            &[Value::reference(&node.id)]
        );
    }

    #[test]
    fn agent_kinds() {
        let p = alt();
        let (n, r) = map_agent(
            &AgentRecord::new("Ada Smith", AgentKind::Person, AgentRole::Creator),
            SourceFormat::Ead,
            &p,
            BASE,
            0,
        );
        assert_eq!(
            (n.id.as_str(), n.types.as_slice()),
            ("https://ex.org/f1/agents/a0", &["Person".to_string()][..])
        );
        assert_eq!(n.get("name"), &[Value::text("Ada Smith")]);
        assert_eq!(r.total(), 0);

        let (n, _) = map_agent(
            &AgentRecord::new("Acme Co.", AgentKind::CorporateBody, AgentRole::Creator),
            SourceFormat::Ead,
            &p,
            BASE,
            1,
        );
        assert_eq!(n.types, ["Organization"]);

        let mut fam = AgentRecord::new("Smith family", AgentKind::Family, AgentRole::Creator);
        fam.dates_of_existence = Some("1850-1950".into());
        let (n, r) = map_agent(&fam, SourceFormat::Ead, &p, BASE, 2);
        assert_eq!(n.types, ["Person"]);
        assert_eq!(
            n.get("description"),
            &[Value::text("Dates of existence: 1850-1950")]
        );
        assert_eq!(r.unknown_total(), 1);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let mut root = ArchivalUnit::titled("T");
        root.notes.push(NoteField {
            source: SourceElementRef::ead("odd"),
            text: "".into(),
            label: None,
        });
        let bad = DescriptionTree::new(RepositoryRecord::named("R"), root, SourceFormat::Ead);
        assert!(matches!(
            convert(&bad, &alt(), BASE),
            Err(CrosswalkError::InvalidTree(_))
        ));
        let ok = DescriptionTree::new(
            RepositoryRecord::named("R"),
            ArchivalUnit::titled("T"),
            SourceFormat::Ead,
        );
        assert!(matches!(
            convert(&ok, &alt(), "https://ex.org/"),
            Err(CrosswalkError::InvalidBaseUri(_))
        ));
    }

    #[test]
    fn bioghist_describes_creators() {
        let mut root = ArchivalUnit::titled("T");
        root.agents.push(AgentRecord::new(
            "Ada Smith",
            AgentKind::Person,
            AgentRole::Creator,
        ));
        root.notes.push(NoteField {
            source: SourceElementRef::ead("bioghist"),
            text: "Born 1900.".into(),
            label: None,
        });
        let mut child = ArchivalUnit::titled("C");
        child.notes.push(NoteField {
            source: SourceElementRef::ead("bioghist"),
            text: "Orphan.".into(),
            label: None,
        });
        let tree = DescriptionTree::new(
            RepositoryRecord::named("R"),
            root.with_children(vec![child]),
            SourceFormat::Ead,
        );
        let (g, r) = convert(&tree, &alt(), BASE).unwrap();
        let agent = g.get(&agent_id(BASE, 0)).unwrap();
        assert_eq!(agent.get("description"), &[Value::text("Born 1900.")]);
        assert!(!g.get(BASE).unwrap().has_property("description"));
        assert_eq!(r.mapped[&SourceElementRef::ead("bioghist")], 1);
        assert_eq!(r.unknown[&SourceElementRef::ead("bioghist")], 1);
    }
}
