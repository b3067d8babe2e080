//! Crosswalk compiler from archival description (EAD 2002 finding aids and
//! ArchivesSpace export bundles) to Schema.org linked data with the
//! archive extension terms.
//!
//! The pipeline is: ingest into a [`model::DescriptionTree`], resolve every
//! source element through a [`profile::Profile`] registry, emit a
//! [`graph::Graph`], and serialize with [`emit`]. A
//! [`report::ConversionReport`] accounts for every source element as
//! mapped, deliberately excluded, or unknown.
//!
//! ```
//! use archemap::{convert, parse_ead, serialize_jsonld, ModelVariant, Profile};
//!
//! let ead = br#"<ead><archdesc level="collection"><did>
//!     <repository><corpname>Rice Archives</corpname></repository>
//!     <unittitle>Smith Papers</unittitle>
//!   </did></archdesc></ead>"#;
//! let tree = parse_ead(ead).unwrap();
//! let profile = Profile::default_for(ModelVariant::Alternative);
//! let (graph, report) = convert(&tree, &profile, "https://example.org/smith").unwrap();
//! assert_eq!(report.node_count, 2);
//! let json = serialize_jsonld(&graph, &profile);
//! assert!(String::from_utf8(json).unwrap().contains("Smith Papers"));
//! ```

pub mod crosswalk;
pub mod emit;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod profile;
pub mod report;

pub use crosswalk::{convert, CrosswalkError};
pub use emit::{
    graphs_equal, html_snippet, parse_jsonld, serialize_jsonld, serialize_ntriples, to_triples,
};
pub use graph::{Graph, SchemaNode, Value};
pub use ingest::{parse_aspace, parse_ead, AspaceBundle};
pub use model::{flatten, validate_tree, DescriptionTree};
pub use profile::{load_profile, ModelVariant, Profile};
pub use report::ConversionReport;
