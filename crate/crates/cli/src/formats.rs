//! Atlas file schema plus the text and CSV views of it.
//!
//! JSON is the canonical exchange format. Sizes are serialized as decimal
//! strings because they may exceed 2^53, which breaks JSON consumers that
//! parse numbers as doubles; witnesses stay numeric (elements are bounded
//! by the search bound). Loading re-verifies every witness through
//! [`RangeResult::from_parts`], so a tampered or stale file is rejected
//! rather than trusted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use sumrange::range::{RangeResult, Source, StructureCheck, StructureReport};
use sumrange::IntegerSet;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtlasFile {
    pub schema_version: u32,
    pub generator: String,
    /// Sorted by (h, k); at most one entry per pair.
    pub entries: Vec<AtlasEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtlasEntry {
    pub h: u32,
    pub k: u64,
    /// Present when the grid cell failed; all other optional fields absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// None for pure closed-form results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_bound: Option<i64>,
    #[serde(default)]
    pub complete: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub source: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<SizeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizeEntry {
    /// Decimal string; see module docs.
    pub size: String,
    pub witness: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureSummary {
    pub all_passed: bool,
    pub checks: Vec<CheckSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub applicable: bool,
    pub passed: bool,
    pub detail: String,
}

pub fn source_name(s: Source) -> &'static str {
    match s {
        Source::ClosedForm => "closed-form",
        Source::Search => "search",
        Source::Constructions => "constructions",
        Source::Combined => "combined",
    }
}

fn source_from_name(s: &str) -> anyhow::Result<Source> {
    Ok(match s {
        "closed-form" => Source::ClosedForm,
        "search" => Source::Search,
        "constructions" => Source::Constructions,
        "combined" => Source::Combined,
        other => bail!("unknown source {other:?}"),
    })
}

pub fn summarize_report(report: &StructureReport) -> StructureSummary {
    StructureSummary {
        all_passed: report.all_passed(),
        checks: report
            .checks
            .iter()
            .map(|c: &StructureCheck| CheckSummary {
                name: c.name.to_string(),
                applicable: c.applicable,
                passed: c.passed,
                detail: c.detail.clone(),
            })
            .collect(),
    }
}

pub fn entry_from_result(r: &RangeResult, structure: Option<&StructureReport>) -> AtlasEntry {
    AtlasEntry {
        h: r.h(),
        k: r.k(),
        error: None,
        search_bound: r.search_bound(),
        complete: r.is_complete(),
        source: source_name(r.source()).to_string(),
        sizes: r
            .witnesses()
            .iter()
            .map(|(&size, w)| SizeEntry {
                size: size.to_string(),
                witness: w.elements().to_vec(),
            })
            .collect(),
        structure: structure.map(summarize_report),
    }
}

pub fn failed_entry(h: u32, k: u64, error: &str) -> AtlasEntry {
    AtlasEntry {
        h,
        k,
        error: Some(error.to_string()),
        search_bound: None,
        complete: false,
        source: String::new(),
        sizes: Vec::new(),
        structure: None,
    }
}

/// Rebuilds the verified result; every witness is re-checked through the
/// kernel, so this fails closed on any tampering or version skew.
pub fn entry_to_result(e: &AtlasEntry) -> anyhow::Result<RangeResult> {
    if let Some(err) = &e.error {
        bail!("entry ({}, {}) records a failure: {err}", e.h, e.k);
    }
    let mut sizes = BTreeSet::new();
    let mut witnesses = BTreeMap::new();
    for s in &e.sizes {
        let size: u64 = s
            .size
            .parse()
            .with_context(|| format!("bad size literal {:?}", s.size))?;
        let w = IntegerSet::new(s.witness.clone())
            .map_err(|err| anyhow!("bad witness for size {size}: {err}"))?;
        sizes.insert(size);
        witnesses.insert(size, w);
    }
    let source = source_from_name(&e.source)?;
    RangeResult::from_parts(e.h, e.k, sizes, witnesses, e.search_bound, e.complete, source)
        .map_err(|err| anyhow!("entry ({}, {}) fails verification: {err}", e.h, e.k))
}

pub fn atlas_to_json(atlas: &AtlasFile) -> String {
    let mut s = serde_json::to_string_pretty(atlas).expect("atlas serialization cannot fail");
    s.push('\n');
    s
}

pub fn atlas_from_json(text: &str) -> anyhow::Result<AtlasFile> {
    let atlas: AtlasFile = serde_json::from_str(text).context("malformed atlas JSON")?;
    if atlas.schema_version != SCHEMA_VERSION {
        bail!(
            "atlas schema version {} is not the supported {SCHEMA_VERSION}",
            atlas.schema_version
        );
    }
    let keys: Vec<(u32, u64)> = atlas.entries.iter().map(|e| (e.h, e.k)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    sorted.dedup();
    if keys != sorted {
        bail!("atlas entries must be sorted by (h, k) without duplicates");
    }
    Ok(atlas)
}

/// Integers absent from the span of achieved sizes.
pub fn missing_numbers(sizes: &BTreeSet<u64>) -> Vec<u64> {
    match (sizes.first(), sizes.last()) {
        (Some(&lo), Some(&hi)) => (lo..=hi).filter(|t| !sizes.contains(t)).collect(),
        _ => Vec::new(),
    }
}

/// `{7, 9, 10}` normally, `[9, 15]` when the sizes form an interval.
pub fn render_size_set(sizes: &BTreeSet<u64>) -> String {
    let (Some(&lo), Some(&hi)) = (sizes.first(), sizes.last()) else {
        return "{}".to_string();
    };
    if sizes.len() as u64 == hi - lo + 1 && sizes.len() > 1 {
        return format!("[{lo}, {hi}]");
    }
    let inner: Vec<String> = sizes.iter().map(u64::to_string).collect();
    format!("{{{}}}", inner.join(", "))
}

fn render_list(values: &[u64]) -> String {
    let strings: Vec<String> = values.iter().map(u64::to_string).collect();
    strings.join(" ")
}

/// One summary line per entry: the shape printed under `range` and as the
/// `atlas` text grid rows.
pub fn entry_summary_line(e: &AtlasEntry) -> String {
    if let Some(err) = &e.error {
        return format!("R({}, {}): failed: {err}", e.h, e.k);
    }
    let sizes: BTreeSet<u64> = e
        .sizes
        .iter()
        .filter_map(|s| s.size.parse().ok())
        .collect();
    let mut line = format!("R({}, {}) = {}", e.h, e.k, render_size_set(&sizes));
    let missing = missing_numbers(&sizes);
    if !missing.is_empty() {
        write!(line, "; missing: {}", render_list(&missing)).unwrap();
    }
    if e.complete {
        line.push_str("; complete");
    } else {
        line.push_str("; verified members (lower bound set)");
    }
    match e.search_bound {
        Some(n) => write!(line, " (N = {n}, source: {})", e.source).unwrap(),
        None => write!(line, " (source: {})", e.source).unwrap(),
    }
    line
}

pub fn atlas_to_text(atlas: &AtlasFile) -> String {
    let mut out = String::new();
    for e in &atlas.entries {
        out.push_str(&entry_summary_line(e));
        out.push('\n');
    }
    out
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn atlas_to_csv(atlas: &AtlasFile) -> String {
    let mut out = String::from("h,k,search_bound,complete,source,count,min,max,missing,error\n");
    for e in &atlas.entries {
        let sizes: BTreeSet<u64> = e
            .sizes
            .iter()
            .filter_map(|s| s.size.parse().ok())
            .collect();
        let row = [
            e.h.to_string(),
            e.k.to_string(),
            e.search_bound.map(|n| n.to_string()).unwrap_or_default(),
            e.complete.to_string(),
            e.source.clone(),
            sizes.len().to_string(),
            sizes.first().map(u64::to_string).unwrap_or_default(),
            sizes.last().map(u64::to_string).unwrap_or_default(),
            render_list(&missing_numbers(&sizes)),
            e.error.clone().unwrap_or_default(),
        ];
        let quoted: Vec<String> = row.iter().map(|f| csv_quote(f)).collect();
        out.push_str(&quoted.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use sumrange::range::closed_form_range;

    #[test]
    fn entries_round_trip_through_json() {
        let r = closed_form_range(3, 3).unwrap().unwrap();
        let atlas = AtlasFile {
            schema_version: SCHEMA_VERSION,
            generator: "test".into(),
            entries: vec![entry_from_result(&r, None)],
        };
        let text = atlas_to_json(&atlas);
        let back = atlas_from_json(&text).unwrap();
        let restored = entry_to_result(&back.entries[0]).unwrap();
        assert_eq!(restored, r);
        // Byte determinism of the serialized form.
        assert_eq!(atlas_to_json(&back), text);
    }

    #[test]
    fn tampered_entries_are_rejected() {
        let r = closed_form_range(3, 3).unwrap().unwrap();
        let mut e = entry_from_result(&r, None);
        e.sizes[0].size = "8".into(); // claims |3{0,1,2}| = 8
        assert!(entry_to_result(&e).is_err());

        let mut e = entry_from_result(&r, None);
        e.sizes[0].witness = vec![0, 2, 4]; // not normalized
        assert!(entry_to_result(&e).is_err());
    }

    #[test]
    fn unsorted_atlases_are_rejected() {
        let r2 = closed_form_range(2, 3).unwrap().unwrap();
        let r3 = closed_form_range(3, 3).unwrap().unwrap();
        let atlas = AtlasFile {
            schema_version: SCHEMA_VERSION,
            generator: "test".into(),
            entries: vec![entry_from_result(&r3, None), entry_from_result(&r2, None)],
        };
        assert!(atlas_from_json(&atlas_to_json(&atlas)).is_err());
    }

    #[test]
    fn size_set_rendering() {
        let interval: BTreeSet<u64> = (9..=15).collect();
        assert_eq!(render_size_set(&interval), "[9, 15]");
        let gappy: BTreeSet<u64> = [7, 9, 10].into();
        assert_eq!(render_size_set(&gappy), "{7, 9, 10}");
        assert_eq!(missing_numbers(&gappy), vec![8]);
        let single: BTreeSet<u64> = [5].into();
        assert_eq!(render_size_set(&single), "{5}");
    }

    #[test]
    fn summary_lines_match_the_documented_shapes() {
        let r = closed_form_range(3, 3).unwrap().unwrap();
        let line = entry_summary_line(&entry_from_result(&r, None));
        assert!(line.contains("{7, 9, 10}"), "{line}");
        assert!(line.contains("missing: 8"), "{line}");
        assert!(line.contains("complete"), "{line}");

        let r = closed_form_range(2, 5).unwrap().unwrap();
        let line = entry_summary_line(&entry_from_result(&r, None));
        assert!(line.contains("[9, 15]"), "{line}");
        assert!(!line.contains("missing"), "{line}");
    }
}
