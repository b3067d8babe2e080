//! Source ingesters. Each produces a [`DescriptionTree`](crate::model::DescriptionTree).

pub mod aspace;
pub mod ead;
mod xml;

pub use aspace::{parse_aspace, AspaceBundle, AspaceError};
pub use ead::{classify_note, parse_ead, EadError};
