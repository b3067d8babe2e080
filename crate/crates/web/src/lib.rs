//! Browser bindings: convert a pasted EAD document, validate a JSON-LD
//! document, and look up how the registry treats a source element.
//!
//! Each binding wraps a plain function that returns a `Result`, so the
//! logic is testable without a JavaScript host.

use archemap::model::{SourceElementRef, Standard};
use archemap::profile::{Resolution, PENDING_SCHEMA_ORG};
use archemap::{
    convert, parse_ead, parse_jsonld, serialize_jsonld, serialize_ntriples, ModelVariant, Profile,
};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn profile(variant: &str, pending: bool) -> Result<Profile, String> {
    let variant: ModelVariant = variant.parse()?;
    let profile = Profile::default_for(variant);
    Ok(if pending {
        profile.with_pending_namespace(PENDING_SCHEMA_ORG)
    } else {
        profile
    })
}

/// Converts an EAD document. The result is a JSON object with `jsonld`,
/// `ntriples`, `report` (the report JSON) and `report_text`.
pub fn convert_document(
    xml: &str,
    variant: &str,
    base_uri: &str,
    pending: bool,
) -> Result<String, String> {
    let profile = profile(variant, pending)?;
    let tree = parse_ead(xml.as_bytes()).map_err(|e| e.to_string())?;
    let (graph, report) =
        convert(&tree, &profile, base_uri.trim_end_matches('/')).map_err(|e| e.to_string())?;
    let text = |bytes: Vec<u8>| String::from_utf8(bytes).expect("serializers emit UTF-8");
    let out = json!({
        "jsonld": text(serialize_jsonld(&graph, &profile)),
        "ntriples": text(serialize_ntriples(&graph, &profile)),
        "report": report.to_json(),
        "report_text": report.render_text(),
    });
    Ok(out.to_string())
}

/// Lists profile violations in a JSON-LD document, one per line, or
/// reports that there are none.
pub fn validate_document(jsonld: &str, variant: &str) -> Result<String, String> {
    let profile = profile(variant, false)?;
    let graph = parse_jsonld(jsonld.as_bytes()).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for node in graph.nodes() {
        lines.extend(
            profile
                .validate_node(node)
                .into_iter()
                .map(|v| format!("<{}>: {v}", node.id)),
        );
    }
    for (from, to) in graph.dangling_references() {
        lines.push(format!(
            "<{from}>: reference to <{to}>, which is not in the document"
        ));
    }
    Ok(if lines.is_empty() {
        format!("valid: {} nodes, no violations", graph.len())
    } else {
        lines.join("\n")
    })
}

/// Describes how the registry resolves `standard:element_id`.
pub fn lookup_element(standard: &str, element_id: &str, variant: &str) -> Result<String, String> {
    let profile = profile(variant, false)?;
    let standard: Standard = standard.parse()?;
    let source = SourceElementRef::new(standard, element_id.trim());
    Ok(match profile.lookup(&source) {
        Resolution::Rule(rule) => format!(
            "{source} maps to `{}` on {} ({:?}, {:?})",
            rule.target_property,
            rule.applies_to.join(", "),
            rule.transform,
            rule.cardinality
        ),
        Resolution::Gap(gap) if gap.citation.is_empty() => format!("{source}: {}", gap.reason),
        Resolution::Gap(gap) => format!("{source}: {}\n{}", gap.reason, gap.citation),
    })
}

#[wasm_bindgen(js_name = convertEad)]
pub fn convert_ead(
    xml: &str,
    variant: &str,
    base_uri: &str,
    pending: bool,
) -> Result<String, JsError> {
    convert_document(xml, variant, base_uri, pending).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = validateJsonld)]
pub fn validate_jsonld(jsonld: &str, variant: &str) -> Result<String, JsError> {
    validate_document(jsonld, variant).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = lookupElement)]
pub fn lookup(standard: &str, element_id: &str, variant: &str) -> Result<String, JsError> {
    lookup_element(standard, element_id, variant).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EAD: &str = r#"<ead><archdesc level="collection"><did>
        <repository><corpname>Rice Archives</corpname></repository>
        <unittitle>Smith Papers</unittitle></did>
        <appraisal><p>Weeded.</p></appraisal></archdesc></ead>"#;

    #[test]
    fn convert_returns_all_views() {
        let out: serde_json::Value = serde_json::from_str(
            &convert_document(EAD, "alternative", "https://ex.org/f/", false).unwrap(),
        )
        .unwrap();
        assert!(out["jsonld"]
            .as_str()
            .unwrap()
            .contains("\"@id\": \"https://ex.org/f\""));
        assert_eq!(out["ntriples"].as_str().unwrap().lines().count(), 7);
        assert_eq!(out["report"]["excluded"].as_array().unwrap().len(), 2);
        assert!(out["report_text"]
            .as_str()
            .unwrap()
            .contains("NO_MAPPING_IDENTIFIED"));

        let pending: serde_json::Value = serde_json::from_str(
            &convert_document(EAD, "initial", "https://ex.org/f", true).unwrap(),
        )
        .unwrap();
        assert!(pending["ntriples"]
            .as_str()
            .unwrap()
            .contains("http://pending.schema.org/ArchiveCollection"));
    }

    #[test]
    fn convert_errors_are_messages() {
        assert!(
            convert_document("<ead>", "alternative", "https://ex.org/f", false)
                .unwrap_err()
                .contains("malformed")
        );
        assert!(convert_document(EAD, "sideways", "https://ex.org/f", false).is_err());
        assert!(convert_document(EAD, "initial", "not a uri", false).is_err());
    }

    #[test]
    fn validate_round_trip_and_violation() {
        let out: serde_json::Value = serde_json::from_str(
            &convert_document(EAD, "initial", "https://ex.org/f", false).unwrap(),
        )
        .unwrap();
        let doc = out["jsonld"].as_str().unwrap();
        assert!(validate_document(doc, "initial")
            .unwrap()
            .starts_with("valid: 2 nodes"));
        let bad = doc.replacen("\"name\"", "\"levelOfDescription\"", 1);
        assert!(validate_document(&bad, "initial")
            .unwrap()
            .contains("levelOfDescription"));
        assert!(validate_document("[]", "initial").is_err());
    }

    #[test]
    fn lookups() {
        assert!(lookup_element("EAD", "unittitle", "alternative")
            .unwrap()
            .contains("maps to `name`"));
        assert!(lookup_element("ISADG", "3.7.2", "alternative")
            .unwrap()
            .contains("EXCLUDED_DESCRIPTION_CONTROL"));
        assert_eq!(
            lookup_element("EAD", "odd", "alternative").unwrap(),
            "EAD:odd: UNKNOWN"
        );
        assert!(lookup_element("MARC", "245", "alternative").is_err());
    }
}
