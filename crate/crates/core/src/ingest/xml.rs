//! Small namespace-insensitive element tree over quick-xml events.

use std::borrow::Cow;

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Element(Element),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct Element {
    /// Local name, prefix stripped.
    pub name: String,
    /// Attributes keyed by local name.
    pub attributes: Vec<(String, String)>,
    pub children: Vec<Node>,
}

/// Elements whose boundaries separate words when text is flattened.
const BLOCK_ELEMENTS: &[&str] = &[
    "p",
    "head",
    "list",
    "item",
    "defitem",
    "label",
    "chronlist",
    "chronitem",
    "event",
    "eventgrp",
    "table",
    "tgroup",
    "row",
    "entry",
    "blockquote",
    "lb",
    "address",
    "addressline",
    "note",
];

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    pub fn child(&self, name: &str) -> Option<&Element> {
        self.elements().find(|e| e.name == name)
    }

    /// Depth-first search for the first descendant (excluding `self`).
    pub fn find(&self, name: &str) -> Option<&Element> {
        for e in self.elements() {
            if e.name == name {
                return Some(e);
            }
            if let Some(found) = e.find(name) {
                return Some(found);
            }
        }
        None
    }

    /// Flattened text content with markup stripped (whitespace not yet
    /// normalized). `skip` names child elements to leave out.
    pub fn text_excluding(&self, skip: &[&str]) -> String {
        let mut out = String::new();
        self.collect_text(skip, &mut out);
        out
    }

    pub fn text(&self) -> String {
        self.text_excluding(&[])
    }

    fn collect_text(&self, skip: &[&str], out: &mut String) {
        for child in &self.children {
            match child {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) if skip.contains(&e.name.as_str()) => {}
                Node::Element(e) => {
                    let block = BLOCK_ELEMENTS.contains(&e.name.as_str());
                    if block {
                        out.push(' ');
                    }
                    e.collect_text(&[], out);
                    if block {
                        out.push(' ');
                    }
                }
            }
        }
    }

    /// First `href` attribute (any prefix) on this element or a descendant.
    pub fn find_href(&self) -> Option<&str> {
        if let Some(h) = self.attr("href") {
            return Some(h);
        }
        self.elements().find_map(Element::find_href)
    }
}

fn local(name: &str) -> &str {
    name.rsplit(':').next().unwrap_or(name)
}

fn start_element(e: &BytesStart<'_>) -> Result<Element, String> {
    let mut attributes = Vec::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| err.to_string())?;
        let key = local(attr.key.as_ref()).to_string();
        if key == "xmlns" || attr.key.as_ref().starts_with("xmlns:") {
            continue;
        }
        let value = attr
            .normalized_value(XmlVersion::Implicit1_0)
            .map_err(|err| err.to_string())?;
        attributes.push((key, value.into_owned()));
    }
    Ok(Element {
        name: local(e.name().as_ref()).to_string(),
        attributes,
        children: Vec::new(),
    })
}

/// Parses a decoded document into its root element.
pub(crate) fn parse_document(text: &str) -> Result<Element, String> {
    let mut reader = Reader::from_str(text);
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    let attach =
        |stack: &mut Vec<Element>, root: &mut Option<Element>, node: Node| -> Result<(), String> {
            match stack.last_mut() {
                Some(parent) => {
                    // Merge adjacent text so entity references do not split words.
                    if let (Node::Text(t), Some(Node::Text(prev))) =
                        (&node, parent.children.last_mut())
                    {
                        prev.push_str(t);
                    } else {
                        parent.children.push(node);
                    }
                    Ok(())
                }
                None => match node {
                    Node::Text(t) if t.trim().is_empty() => Ok(()),
                    Node::Text(_) => Err("text outside the root element".into()),
                    Node::Element(e) if root.is_none() => {
                        *root = Some(e);
                        Ok(())
                    }
                    Node::Element(_) => Err("more than one root element".into()),
                },
            }
        };

    loop {
        let event = reader
            .read_event()
            .map_err(|e| format!("{e} at byte {}", reader.error_position()))?;
        match event {
            Event::Start(e) => stack.push(start_element(&e)?),
            Event::Empty(e) => {
                let el = start_element(&e)?;
                attach(&mut stack, &mut root, Node::Element(el))?;
            }
            Event::End(_) => {
                let el = stack.pop().ok_or("unexpected closing tag")?;
                attach(&mut stack, &mut root, Node::Element(el))?;
            }
            Event::Text(t) => {
                let content = t.xml_content(XmlVersion::Implicit1_0);
                attach(&mut stack, &mut root, Node::Text(content.into_owned()))?;
            }
            Event::CData(t) => {
                let content = t.xml_content(XmlVersion::Implicit1_0);
                attach(&mut stack, &mut root, Node::Text(content.into_owned()))?;
            }
            Event::GeneralRef(r) => {
                let resolved: Cow<'_, str> =
                    match r.resolve_char_ref().map_err(|e| e.to_string())? {
                        Some(c) => Cow::Owned(c.to_string()),
                        None => {
                            let name: &str = &r;
                            match resolve_predefined_entity(name) {
                                Some(s) => Cow::Borrowed(s),
                                None => return Err(format!("undefined entity `&{name};`")),
                            }
                        }
                    };
                attach(&mut stack, &mut root, Node::Text(resolved.into_owned()))?;
            }
            Event::Eof => break,
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }
    if let Some(open) = stack.last() {
        return Err(format!("unclosed element <{}>", open.name));
    }
    root.ok_or_else(|| "document has no root element".to_string())
}

/// Decodes raw bytes using the BOM, else the encoding named in the XML
/// declaration, else UTF-8.
pub(crate) fn decode(bytes: &[u8]) -> Result<String, String> {
    if let Some((enc, bom_len)) = encoding_rs::Encoding::for_bom(bytes) {
        let (text, had_errors) = enc.decode_without_bom_handling(&bytes[bom_len..]);
        return if had_errors {
            Err(format!("invalid {} data", enc.name()))
        } else {
            Ok(text.into_owned())
        };
    }
    let encoding = declared_encoding(bytes)
        .map(|label| {
            encoding_rs::Encoding::for_label(label.as_bytes())
                .ok_or_else(|| format!("unsupported encoding `{label}`"))
        })
        .transpose()?
        .unwrap_or(encoding_rs::UTF_8);
    let (text, had_errors) = encoding.decode_without_bom_handling(bytes);
    if had_errors {
        return Err(format!("invalid {} data", encoding.name()));
    }
    Ok(text.into_owned())
}

fn declared_encoding(bytes: &[u8]) -> Option<String> {
    let head = bytes.get(..bytes.len().min(256))?;
    let head = String::from_utf8_lossy(head);
    let decl = head.strip_prefix("<?xml")?;
    let decl = &decl[..decl.find("?>")?];
    let at = decl.find("encoding")?;
    let rest = decl[at + "encoding".len()..]
        .trim_start()
        .strip_prefix('=')?
        .trim_start();
    let quote = rest.chars().next().filter(|c| *c == '"' || *c == '\'')?;
    let rest = &rest[1..];
    Some(rest[..rest.find(quote)?].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_prefixed_names_and_entities() {
        let doc = r#"<?xml version="1.0"?><e:ead xmlns:e="urn:isbn:1-931666-22-9" xmlns:xlink="http://www.w3.org/1999/xlink"><e:p xlink:href="x">A &amp; B&#x21;</e:p></e:ead>"#;
        let root = parse_document(doc).unwrap();
        assert_eq!(root.name, "ead");
        let p = root.child("p").unwrap();
        assert_eq!(p.attr("href"), Some("x"));
        assert_eq!(p.text(), "A & B!");
    }

    #[test]
    fn rejects_mismatched_tags() {
        assert!(parse_document("<a><b></a>").is_err());
        assert!(parse_document("<a>").is_err());
        assert!(parse_document("").is_err());
    }

    #[test]
    fn block_elements_separate_words() {
        let root = parse_document("<n><p>One.</p><p>Two <emph>three</emph>.</p></n>").unwrap();
        assert_eq!(
            crate::model::normalize_whitespace(&root.text()),
            "One. Two three."
        );
    }

    #[test]
    fn decodes_declared_latin1() {
        let mut bytes = b"<?xml version=\"1.0\" encoding=\"ISO-8859-1\"?><a>caf".to_vec();
        bytes.push(0xE9);
        bytes.extend_from_slice(b"</a>");
        let text = decode(&bytes).unwrap();
        assert!(text.contains("café"));
        assert!(decode(b"<a>\xff</a>").is_err());
    }
}
