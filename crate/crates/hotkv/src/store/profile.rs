//! Access-profile CSV: header `chunk_id,count`, one row per chunk.

use std::io::Write;

use crate::hotness::AccessProfile;
use crate::store::FormatError;

pub fn write_profile_csv(out: &mut impl Write, profile: &AccessProfile) -> Result<(), FormatError> {
    writeln!(out, "chunk_id,count")?;
    let mut rows: Vec<(u32, u64)> = profile.iter().collect();
    rows.sort_unstable();
    for (id, count) in rows {
        writeln!(out, "{id},{count}")?;
    }
    Ok(())
}

pub fn read_profile_csv(text: &str) -> Result<AccessProfile, FormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == "chunk_id,count" => {}
        _ => return Err(FormatError::Line { line: 1, what: "expected header 'chunk_id,count'".into() }),
    }
    let mut rows = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (id_str, count_str) = line
            .split_once(',')
            .ok_or_else(|| FormatError::Line { line: lineno, what: "expected 'id,count'".into() })?;
        let id: u32 = id_str
            .trim()
            .parse()
            .map_err(|e| FormatError::Line { line: lineno, what: format!("bad chunk id: {e}") })?;
        let count: u64 = count_str
            .trim()
            .parse()
            .map_err(|e| FormatError::Line { line: lineno, what: format!("bad count: {e}") })?;
        if !seen.insert(id) {
            return Err(FormatError::Line { line: lineno, what: format!("duplicate chunk id {id}") });
        }
        rows.push((id, count));
    }
    Ok(AccessProfile::from_counts(rows))
}
