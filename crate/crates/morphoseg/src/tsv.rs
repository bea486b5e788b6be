//! Shared I/O for the `string<TAB>count` table format used by word lists
//! and lexica. Tables are written in descending-count order with ties
//! broken by codepoint order, so identical data always serializes to
//! identical bytes.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Entries ordered by descending count, ties broken lexicographically.
pub(crate) fn ranked(counts: &BTreeMap<String, u64>) -> Vec<(&str, u64)> {
    let mut rows: Vec<(&str, u64)> = counts.iter().map(|(s, &c)| (s.as_str(), c)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    rows
}

/// Write `string<TAB>count` lines in ranked order.
pub(crate) fn write_counts(mut w: impl Write, counts: &BTreeMap<String, u64>) -> Result<()> {
    for (s, c) in ranked(counts) {
        writeln!(w, "{s}\t{c}").map_err(|e| Error::io("writing count table", e))?;
    }
    Ok(())
}

/// Parse `string<TAB>count` lines. Rejects blank keys, zero counts,
/// duplicate keys, and malformed lines, reporting the 1-based line number.
pub(crate) fn read_counts(r: impl BufRead, source_name: &str) -> Result<BTreeMap<String, u64>> {
    let mut counts = BTreeMap::new();
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(format!("reading {source_name}"), e))?;
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(source_name, lineno, "expected `string<TAB>count`"))?;
        if key.is_empty() {
            return Err(Error::parse(source_name, lineno, "empty string before tab"));
        }
        let count: u64 = value
            .parse()
            .map_err(|_| Error::parse(source_name, lineno, format!("bad count {value:?}")))?;
        if count == 0 {
            return Err(Error::parse(source_name, lineno, "counts must be >= 1"));
        }
        if counts.insert(key.to_string(), count).is_some() {
            return Err(Error::parse(source_name, lineno, format!("duplicate entry {key:?}")));
        }
    }
    Ok(counts)
}
