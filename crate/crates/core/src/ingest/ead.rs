//! EAD 2002 finding aids.
//!
//! Matching is by local name, so both the `urn:isbn:1-931666-22-9`
//! namespaced form and the DTD-era unqualified form are accepted. Numbered
//! (`c01`..`c12`) and unnumbered (`c`) components are treated alike.

use thiserror::Error;

use super::xml::{self, Element};
use crate::model::{
    normalize_whitespace, AgentKind, AgentRecord, AgentRole, ArchivalUnit, DescriptionTree,
    ExtentStatement, NoteField, RepositoryRecord, SourceElementRef, SourceFormat,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EadError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("document has no <archdesc> element")]
    MissingArchdesc,
    #[error("no repository name in <archdesc>/<did>/<repository> or the header publisher")]
    MissingRepository,
}

/// Note elements with a known place in the profile (mapped or excluded).
pub const RECOGNIZED_NOTES: &[&str] = &[
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

/// Source element ids this ingester emits for recognized content.
pub const RECOGNIZED_ELEMENTS: &[&str] = &[
    "unittitle",
    "unitdate",
    "unitid",
    "@level",
    "physdesc/extent",
    "origination",
    "controlaccess",
    "famname",
    "langmaterial",
    "repository",
    "repository/address",
    "eadheader",
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

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoteClass {
    pub source: SourceElementRef,
    pub recognized: bool,
}

/// Source reference for a note-like element. Unrecognized names pass
/// through unchanged and are flagged.
pub fn classify_note(ead_element_name: &str) -> NoteClass {
    NoteClass {
        source: SourceElementRef::ead(ead_element_name),
        recognized: RECOGNIZED_NOTES.contains(&ead_element_name),
    }
}

fn is_component(name: &str) -> bool {
    name == "c"
        || (name.len() == 3
            && name.starts_with('c')
            && name[1..].parse::<u8>().is_ok_and(|n| (1..=12).contains(&n))
            && name[1..].bytes().all(|b| b.is_ascii_digit()))
}

fn clean(s: &str) -> Option<String> {
    let s = normalize_whitespace(s);
    (!s.is_empty()).then_some(s)
}

/// Parses an EAD 2002 document.
pub fn parse_ead(document: &[u8]) -> Result<DescriptionTree, EadError> {
    let text = xml::decode(document).map_err(EadError::MalformedXml)?;
    let root = xml::parse_document(&text).map_err(EadError::MalformedXml)?;
    let archdesc = if root.name == "archdesc" {
        Some(&root)
    } else {
        root.find("archdesc")
    };
    let archdesc = archdesc.ok_or(EadError::MissingArchdesc)?;
    let header = if root.name == "eadheader" {
        Some(&root)
    } else {
        root.find("eadheader")
    };

    let mut control = Vec::new();
    if let Some(header) = header {
        for _section in header.elements().filter(|e| clean(&e.text()).is_some()) {
            control.push(SourceElementRef::ead("eadheader"));
        }
    }

    let repository = archdesc
        .child("did")
        .and_then(|did| did.child("repository"))
        .and_then(parse_repository)
        .or_else(|| {
            let publisher = header?.find("publisher")?;
            clean(&publisher.text()).map(RepositoryRecord::named)
        })
        .ok_or(EadError::MissingRepository)?;

    let root_unit = parse_unit(archdesc, true);
    let mut tree = DescriptionTree::new(repository, root_unit, SourceFormat::Ead);
    tree.control = control;
    Ok(tree)
}

fn parse_repository(el: &Element) -> Option<RepositoryRecord> {
    let name = ["corpname", "name", "persname", "famname"]
        .iter()
        .find_map(|n| el.child(n).and_then(|c| clean(&c.text())))
        .or_else(|| clean(&el.text_excluding(&["address", "extptr", "extref", "head"])))?;
    let address = el.child("address").and_then(|addr| {
        let lines: Vec<String> = addr
            .elements()
            .filter(|e| e.name == "addressline")
            .filter_map(|e| clean(&e.text()))
            .collect();
        if lines.is_empty() {
            clean(&addr.text())
        } else {
            Some(lines.join(", "))
        }
    });
    let url = el.find_href().and_then(clean);
    Some(RepositoryRecord { name, address, url })
}

fn parse_unit(el: &Element, is_root: bool) -> ArchivalUnit {
    let mut unit = ArchivalUnit {
        level: el.attr("level").and_then(|l| {
            if l == "otherlevel" {
                el.attr("otherlevel").and_then(clean).or_else(|| clean(l))
            } else {
                clean(l)
            }
        }),
        ..Default::default()
    };

    for child in el.elements() {
        match child.name.as_str() {
            "did" => parse_did(child, &mut unit, is_root),
            "dsc" => {
                for c in child.elements().filter(|c| is_component(&c.name)) {
                    unit.children.push(parse_unit(c, false));
                }
            }
            name if is_component(name) => unit.children.push(parse_unit(child, false)),
            "controlaccess" => parse_controlaccess(child, &mut unit),
            "head" | "runner" => {}
            name => push_note(&mut unit, child, classify_note(name).source),
        }
    }
    unit
}

fn push_note(unit: &mut ArchivalUnit, el: &Element, source: SourceElementRef) {
    match clean(&el.text_excluding(&["head"])) {
        Some(text) => {
            let label = el.child("head").and_then(|h| clean(&h.text()));
            unit.notes.push(NoteField {
                source,
                text,
                label,
            });
        }
        None if !classify_note(&el.name).recognized => unit.dropped.push(source),
        None => {}
    }
}

fn parse_did(did: &Element, unit: &mut ArchivalUnit, is_root: bool) {
    for child in did.elements() {
        match child.name.as_str() {
            "head" => {}
            "unittitle" => set_once(
                &mut unit.title,
                &mut unit.dropped,
                clean(&child.text()),
                "unittitle",
            ),
            "unitdate" => {
                let value = child
                    .attr("normal")
                    .and_then(clean)
                    .or_else(|| clean(&child.text()));
                set_once(&mut unit.dates, &mut unit.dropped, value, "unitdate");
            }
            "unitid" => set_once(
                &mut unit.reference_code,
                &mut unit.dropped,
                clean(&child.text()),
                "unitid",
            ),
            "physdesc" => parse_physdesc(child, unit),
            "origination" => {
                let before = unit.agents.len();
                for name in child.elements() {
                    push_agent(unit, name, AgentRole::Creator);
                }
                if unit.agents.len() == before {
                    if let Some(text) = clean(&child.text_excluding(&["head"])) {
                        unit.agents.push(AgentRecord::new(
                            text,
                            AgentKind::Person,
                            AgentRole::Creator,
                        ));
                    }
                }
            }
            "langmaterial" => {
                let languages: Vec<String> = child
                    .elements()
                    .filter(|e| e.name == "language")
                    .filter_map(|e| {
                        e.attr("langcode")
                            .and_then(clean)
                            .or_else(|| clean(&e.text()))
                    })
                    .collect();
                if languages.is_empty() {
                    unit.languages.extend(clean(&child.text()));
                } else {
                    unit.languages.extend(languages);
                }
            }
            "repository" if is_root => {}
            "repository" => unit.dropped.push(SourceElementRef::ead("repository")),
            name => push_note(unit, child, classify_note(name).source),
        }
    }
}

fn set_once(
    slot: &mut Option<String>,
    dropped: &mut Vec<SourceElementRef>,
    value: Option<String>,
    id: &str,
) {
    let Some(value) = value else { return };
    if slot.is_none() {
        *slot = Some(value);
    } else {
        dropped.push(SourceElementRef::ead(id));
    }
}

fn parse_physdesc(physdesc: &Element, unit: &mut ArchivalUnit) {
    let mut found_extent = false;
    for child in physdesc.elements() {
        match child.name.as_str() {
            "extent" => {
                found_extent = true;
                let Some(text) = clean(&child.text()) else {
                    continue;
                };
                let extent = match child.attr("unit").and_then(clean) {
                    Some(u) => ExtentStatement::classify(&text, &u),
                    None => match text.split_once(' ') {
                        Some((number, rest)) => ExtentStatement::classify(number, rest),
                        None => ExtentStatement::textual(text),
                    },
                };
                unit.extents.push(extent);
            }
            "head" => {}
            name => push_note(
                unit,
                child,
                SourceElementRef::ead(format!("physdesc/{name}")),
            ),
        }
    }
    if !found_extent {
        let direct = physdesc.text_excluding(&["head", "physfacet", "dimensions", "genreform"]);
        if let Some(text) = clean(&direct) {
            unit.extents.push(ExtentStatement::textual(text));
        }
    }
}

fn agent_kind(name: &str) -> Option<AgentKind> {
    match name {
        "persname" | "name" => Some(AgentKind::Person),
        "corpname" => Some(AgentKind::CorporateBody),
        "famname" => Some(AgentKind::Family),
        _ => None,
    }
}

fn push_agent(unit: &mut ArchivalUnit, el: &Element, role: AgentRole) -> bool {
    let Some(kind) = agent_kind(&el.name) else {
        return false;
    };
    if let Some(name) = clean(&el.text()) {
        unit.agents.push(AgentRecord::new(name, kind, role));
    }
    true
}

fn parse_controlaccess(el: &Element, unit: &mut ArchivalUnit) {
    for child in el.elements() {
        if child.name == "controlaccess" {
            parse_controlaccess(child, unit);
        } else if child.name != "head" && !push_agent(unit, child, AgentRole::Subject) {
            unit.dropped.push(SourceElementRef::ead(format!(
                "controlaccess/{}",
                child.name
            )));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{flatten, validate_tree, ExtentKind};

    fn parse(s: &str) -> DescriptionTree {
        parse_ead(s.as_bytes()).unwrap()
    }

    const MINIMAL: &str = r#"<ead><eadheader><eadid>x</eadid></eadheader>
        <archdesc level="collection"><did>
          <repository><corpname>Rice Archives</corpname></repository>
          <unittitle>Smith   Papers</unittitle>
        </did></archdesc></ead>"#;

    #[test]
    fn minimal_document() {
        let t = parse(MINIMAL);
        let expected_root = ArchivalUnit {
            title: Some("Smith Papers".into()),
            level: Some("collection".into()),
            ..Default::default()
        };
        assert_eq!(t.root, expected_root);
        assert_eq!(t.repository, RepositoryRecord::named("Rice Archives"));
        assert_eq!(t.control, vec![SourceElementRef::ead("eadheader")]);
        assert_eq!(t.source_format, SourceFormat::Ead);
    }

    #[test]
    fn nested_components() {
        let t = parse(
            r#"<ead xmlns="urn:isbn:1-931666-22-9"><archdesc level="fonds"><did>
               <repository>Repo</repository><unittitle>T</unittitle></did>
               <dsc>
                 <c01><did><unittitle>S1</unittitle></did><c02><did><unittitle>F1</unittitle></did></c02></c01>
                 <c01><did><unittitle>S2</unittitle></did><c02><did><unittitle>F2</unittitle></did></c02></c01>
               </dsc></archdesc></ead>"#,
        );
        assert_eq!(t.root.children.len(), 2);
        assert!(t.root.children.iter().all(|c| c.children.len() == 1));
        assert_eq!(t.root.children[1].children[0].title.as_deref(), Some("F2"));
        assert_eq!(t.repository.name, "Repo");
    }

    #[test]
    fn missing_archdesc_and_malformed() {
        assert_eq!(
            parse_ead(b"<ead><eadheader/></ead>"),
            Err(EadError::MissingArchdesc)
        );
        assert!(matches!(
            parse_ead(b"<ead><archdesc></ead>"),
            Err(EadError::MalformedXml(_))
        ));
        assert!(matches!(
            parse_ead(b"not xml at all <"),
            Err(EadError::MalformedXml(_))
        ));
    }

    #[test]
    fn missing_repository_falls_back_to_publisher() {
        let t = parse(
            r#"<ead><eadheader><filedesc><publicationstmt><publisher>Emory Library</publisher>
               </publicationstmt></filedesc></eadheader>
               <archdesc level="collection"><did><unittitle>T</unittitle></did></archdesc></ead>"#,
        );
        assert_eq!(t.repository.name, "Emory Library");
        assert_eq!(
            parse_ead(b"<ead><archdesc><did><unittitle>T</unittitle></did></archdesc></ead>"),
            Err(EadError::MissingRepository)
        );
    }

    #[test]
    fn classify_note_names() {
        assert_eq!(
            classify_note("appraisal"),
            NoteClass {
                source: SourceElementRef::ead("appraisal"),
                recognized: true
            }
        );
        assert_eq!(
            classify_note("scopecontent"),
            NoteClass {
                source: SourceElementRef::ead("scopecontent"),
                recognized: true
            }
        );
        assert_eq!(
            classify_note("frobnicate"),
            NoteClass {
                source: SourceElementRef::ead("frobnicate"),
                recognized: false
            }
        );
    }

    #[test]
    fn notes_fields_and_agents() {
        let t = parse(
            r#"<ead><archdesc level="collection"><did>
              <repository><corpname>R</corpname><address><addressline>6100 Main</addressline>
                <addressline>Houston, TX</addressline></address>
                <extref href="https://library.rice.edu"/></repository>
              <unittitle>T</unittitle>
              <unitdate normal="1900/1950">circa 1900-1950</unitdate>
              <unitdate type="bulk">1920-1930</unitdate>
              <unitid>MS 42</unitid>
              <physdesc><extent>12 linear feet</extent><extent unit="items">3400</extent></physdesc>
              <origination><persname>Smith, Ada</persname><corpname>Acme Co.</corpname></origination>
              <langmaterial>In <language langcode="eng">English</language> and
                <language langcode="fre">French</language>.</langmaterial>
              <abstract>Short.</abstract>
              <dao href="x"/>
            </did>
            <scopecontent><head>Scope</head><p>Letters   and <emph>diaries</emph>.</p></scopecontent>
            <appraisal><p>Weeded in 1990</p></appraisal>
            <accruals><p></p></accruals>
            <controlaccess><persname>Doe, Jane</persname><subject>Cats</subject></controlaccess>
            </archdesc></ead>"#,
        );
        let r = &t.root;
        assert_eq!(r.dates.as_deref(), Some("1900/1950"));
        assert_eq!(r.reference_code.as_deref(), Some("MS 42"));
        assert_eq!(
            r.extents,
            vec![
                ExtentStatement::textual("12 linear feet"),
                ExtentStatement::count(3400, Some("items".into()))
            ]
        );
        assert_eq!(r.languages, vec!["eng", "fre"]);
        assert_eq!(
            r.agents,
            vec![
                AgentRecord::new("Smith, Ada", AgentKind::Person, AgentRole::Creator),
                AgentRecord::new("Acme Co.", AgentKind::CorporateBody, AgentRole::Creator),
                AgentRecord::new("Doe, Jane", AgentKind::Person, AgentRole::Subject),
            ]
        );
        let notes: Vec<(&str, &str)> = r
            .notes
            .iter()
            .map(|n| (n.source.element_id.as_str(), n.text.as_str()))
            .collect();
        assert_eq!(
            notes,
            vec![
                ("abstract", "Short."),
                ("scopecontent", "Letters and diaries."),
                ("appraisal", "Weeded in 1990")
            ]
        );
        assert_eq!(r.notes[1].label.as_deref(), Some("Scope"));
        assert_eq!(
            r.dropped,
            vec![
                SourceElementRef::ead("unitdate"),
                SourceElementRef::ead("dao"),
                SourceElementRef::ead("controlaccess/subject")
            ]
        );
        assert_eq!(
            t.repository.address.as_deref(),
            Some("6100 Main, Houston, TX")
        );
        assert_eq!(
            t.repository.url.as_deref(),
            Some("https://library.rice.edu")
        );
        assert!(validate_tree(&t).is_empty());
        assert_eq!(r.extents[1].kind, ExtentKind::Count);
    }

    #[test]
    fn header_text_never_reaches_units() {
        let t = parse(
            r#"<ead><eadheader><filedesc><titlestmt><titleproper>HEADERTITLE</titleproper></titlestmt></filedesc>
               <profiledesc><creation>HEADERCREATION</creation></profiledesc></eadheader>
               <archdesc><did><repository>R</repository><unittitle>T</unittitle></did></archdesc></ead>"#,
        );
        assert_eq!(t.control.len(), 2);
        for (_, u) in flatten(&t) {
            let dump = format!("{u:?}");
            assert!(!dump.contains("HEADER"), "{dump}");
        }
    }

    #[test]
    fn component_names() {
        for n in ["c", "c01", "c09", "c12"] {
            assert!(is_component(n), "{n}");
        }
        for n in ["c00", "c13", "c1", "col", "dsc", "c+1"] {
            assert!(!is_component(n), "{n}");
        }
    }
}
