//! Conversion report: every source-element occurrence is tallied exactly
//! once as mapped, excluded or unknown.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{SourceElementRef, Standard};
use crate::profile::{GapEntry, GapReason, Resolution};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConversionReport {
    pub mapped: BTreeMap<SourceElementRef, u64>,
    /// Keyed by the element encountered; the entry is the exclusion that
    /// matched it (possibly a wildcard).
    pub excluded: BTreeMap<SourceElementRef, (GapEntry, u64)>,
    pub unknown: BTreeMap<SourceElementRef, u64>,
    pub node_count: usize,
    pub unit_count: usize,
}

impl ConversionReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tally_mapped(&mut self, source: &SourceElementRef) {
        *self.mapped.entry(source.clone()).or_default() += 1;
    }

    pub fn tally_unknown(&mut self, source: &SourceElementRef) {
        *self.unknown.entry(source.clone()).or_default() += 1;
    }

    /// Records a gap against `source`. Gaps with reason `UNKNOWN` go to the
    /// unknown tally.
    pub fn tally_gap(&mut self, source: &SourceElementRef, gap: &GapEntry) {
        if gap.reason == GapReason::Unknown {
            self.tally_unknown(source);
        } else {
            self.excluded
                .entry(source.clone())
                .or_insert_with(|| (gap.clone(), 0))
                .1 += 1;
        }
    }

    /// Tallies `source` as resolved; rules count as mapped.
    pub fn tally(&mut self, source: &SourceElementRef, resolution: &Resolution<'_>) {
        match resolution {
            Resolution::Rule(_) => self.tally_mapped(source),
            Resolution::Gap(gap) => self.tally_gap(source, gap),
        }
    }

    pub fn mapped_total(&self) -> u64 {
        self.mapped.values().sum()
    }

    pub fn excluded_total(&self) -> u64 {
        self.excluded.values().map(|(_, n)| n).sum()
    }

    pub fn unknown_total(&self) -> u64 {
        self.unknown.values().sum()
    }

    /// Sum over all three tallies.
    pub fn total(&self) -> u64 {
        self.mapped_total() + self.excluded_total() + self.unknown_total()
    }

    pub fn excluded_with_reason(&self, reason: GapReason) -> u64 {
        self.excluded
            .values()
            .filter(|(g, _)| g.reason == reason)
            .map(|(_, n)| n)
            .sum()
    }

    /// Gap tallies as (entry, count) pairs, unknowns included.
    pub fn gaps(&self) -> Vec<(GapEntry, u64)> {
        let mut out: Vec<(GapEntry, u64)> = self.excluded.values().cloned().collect();
        out.extend(
            self.unknown
                .iter()
                .map(|(s, n)| (GapEntry::unknown(s.clone()), *n)),
        );
        out
    }

    /// Adds `other` into `self`, counts included.
    pub fn merge(&mut self, other: &ConversionReport) {
        for (s, n) in &other.mapped {
            *self.mapped.entry(s.clone()).or_default() += n;
        }
        for (s, (g, n)) in &other.excluded {
            self.excluded
                .entry(s.clone())
                .or_insert_with(|| (g.clone(), 0))
                .1 += n;
        }
        for (s, n) in &other.unknown {
            *self.unknown.entry(s.clone()).or_default() += n;
        }
        self.node_count += other.node_count;
        self.unit_count += other.unit_count;
    }

    pub fn to_json(&self) -> ReportJson {
        let row = |s: &SourceElementRef,
                   reason: Option<GapReason>,
                   citation: Option<&str>,
                   count: u64| ReportRow {
            standard: s.standard,
            element_id: s.element_id.clone(),
            reason,
            citation: citation.filter(|c| !c.is_empty()).map(str::to_string),
            count,
        };
        ReportJson {
            mapped: self
                .mapped
                .iter()
                .map(|(s, n)| row(s, None, None, *n))
                .collect(),
            excluded: self
                .excluded
                .iter()
                .map(|(s, (g, n))| row(s, Some(g.reason), Some(&g.citation), *n))
                .collect(),
            unknown: self
                .unknown
                .iter()
                .map(|(s, n)| row(s, Some(GapReason::Unknown), None, *n))
                .collect(),
            node_count: self.node_count,
            unit_count: self.unit_count,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable gap report grouped by reason.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "units: {}  nodes: {}",
            self.unit_count, self.node_count
        );
        let _ = writeln!(
            out,
            "mapped: {}  excluded: {}  unknown: {}",
            self.mapped_total(),
            self.excluded_total(),
            self.unknown_total()
        );

        let _ = writeln!(out, "\nMAPPED");
        for (s, n) in &self.mapped {
            let _ = writeln!(out, "  {:<8} {:<32} {n:>6}", s.standard, s.element_id);
        }

        let mut by_reason: BTreeMap<GapReason, Vec<(&SourceElementRef, &GapEntry, u64)>> =
            BTreeMap::new();
        for (s, (g, n)) in &self.excluded {
            by_reason.entry(g.reason).or_default().push((s, g, *n));
        }
        for (reason, rows) in by_reason {
            let _ = writeln!(out, "\n{reason}");
            let mut citations: Vec<&str> = Vec::new();
            for (s, g, n) in rows {
                let _ = writeln!(out, "  {:<8} {:<32} {n:>6}", s.standard, s.element_id);
                if !g.citation.is_empty() && !citations.contains(&g.citation.as_str()) {
                    citations.push(&g.citation);
                }
            }
            for c in citations {
                let _ = writeln!(out, "  - {c}");
            }
        }

        let _ = writeln!(out, "\nUNKNOWN");
        for (s, n) in &self.unknown {
            let _ = writeln!(out, "  {:<8} {:<32} {n:>6}", s.standard, s.element_id);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub standard: Standard,
    pub element_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<GapReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    pub count: u64,
}

/// Serialized report. Rows are sorted by (standard, element_id).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub mapped: Vec<ReportRow>,
    pub excluded: Vec<ReportRow>,
    pub unknown: Vec<ReportRow>,
    pub node_count: usize,
    pub unit_count: usize,
}
