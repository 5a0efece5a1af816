//! JSON Lines corpus I/O.
//!
//! A corpus file carries one record per non-empty line: an id, the sentence,
//! and optionally its PENMAN graph, a chain-of-code transcript, and a model
//! completion. Reading validates ids (nonempty, unique) and checks that every
//! present `amr` field parses; how a bad graph is handled is the caller's
//! choice. Writing is deterministic with a stable field order, so diffs stay
//! readable.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::penman;

/// One corpus line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub sentence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<String>,
}

/// What to do with a record whose `amr` does not parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BadAmrPolicy {
    /// Drop the record and report it in `warnings`.
    #[default]
    Skip,
    /// Fail the whole read.
    Fatal,
}

/// A successful read: the surviving records plus one warning per skipped one.
#[derive(Debug, Clone)]
pub struct CorpusRead {
    pub records: Vec<CorpusRecord>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed JSON record: {message}")]
    Json { line: usize, message: String },
    #[error("line {line}: record id is empty")]
    EmptyId { line: usize },
    #[error("line {line}: duplicate record id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: record `{id}`: amr does not parse: {message}")]
    BadAmr { line: usize, id: String, message: String },
}

/// Read a JSONL corpus. Blank lines are ignored; every other line must be a
/// record object. Duplicate or empty ids are always fatal; unparseable `amr`
/// fields follow `policy`.
pub fn read_corpus(path: &Path, policy: BadAmrPolicy) -> Result<CorpusRead, CorpusError> {
    let text = fs::read_to_string(path)?;
    parse_corpus(&text, policy)
}

/// [`read_corpus`] over in-memory text; line numbers start at 1.
pub fn parse_corpus(text: &str, policy: BadAmrPolicy) -> Result<CorpusRead, CorpusError> {
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut seen_ids: std::collections::HashSet<String> = std::collections::HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: CorpusRecord = serde_json::from_str(line)
            .map_err(|e| CorpusError::Json { line: line_no, message: e.to_string() })?;
        if record.id.is_empty() {
            return Err(CorpusError::EmptyId { line: line_no });
        }
        if !seen_ids.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId { line: line_no, id: record.id });
        }
        if let Some(amr) = &record.amr {
            if let Err(diags) = penman::parse(amr) {
                let message = diags
                    .first()
                    .map(ToString::to_string)
                    .unwrap_or_else(|| "unknown parse failure".to_owned());
                match policy {
                    BadAmrPolicy::Fatal => {
                        return Err(CorpusError::BadAmr {
                            line: line_no,
                            id: record.id,
                            message,
                        });
                    }
                    BadAmrPolicy::Skip => {
                        warnings.push(format!(
                            "line {line_no}: record `{}` skipped: amr does not parse: {message}",
                            record.id
                        ));
                        continue;
                    }
                }
            }
        }
        records.push(record);
    }
    Ok(CorpusRead { records, warnings })
}

/// Render records as JSONL text, one record per line, stable field order.
pub fn render_corpus(records: &[CorpusRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Write records to `path` as JSONL; input order is preserved.
pub fn write_results(path: &Path, records: &[CorpusRecord]) -> Result<(), CorpusError> {
    fs::write(path, render_corpus(records))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str) -> CorpusRecord {
        CorpusRecord {
            id: id.to_owned(),
            sentence: format!("Sentence {id}."),
            amr: Some("(a / apple)".to_owned()),
            trace: None,
            completion: None,
        }
    }

    #[test]
    fn two_valid_lines() {
        let text = "{\"id\":\"a\",\"sentence\":\"One.\"}\n\n{\"id\":\"b\",\"sentence\":\"Two.\",\"amr\":\"(b / boy)\"}\n";
        let read = parse_corpus(text, BadAmrPolicy::Fatal).unwrap();
        assert_eq!(read.records.len(), 2);
        assert!(read.warnings.is_empty());
        assert_eq!(read.records[0].id, "a");
        assert_eq!(read.records[1].amr.as_deref(), Some("(b / boy)"));
    }

    #[test]
    fn missing_id_names_the_line() {
        let text = "{\"id\":\"a\",\"sentence\":\"One.\"}\n{\"sentence\":\"Two.\"}\n";
        let err = parse_corpus(text, BadAmrPolicy::Fatal).unwrap_err();
        match err {
            CorpusError::Json { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_empty_ids_rejected() {
        let text = "{\"id\":\"a\",\"sentence\":\"x\"}\n{\"id\":\"a\",\"sentence\":\"y\"}\n";
        assert!(matches!(
            parse_corpus(text, BadAmrPolicy::Fatal),
            Err(CorpusError::DuplicateId { line: 2, .. })
        ));
        let text = "{\"id\":\"\",\"sentence\":\"x\"}\n";
        assert!(matches!(
            parse_corpus(text, BadAmrPolicy::Fatal),
            Err(CorpusError::EmptyId { line: 1 })
        ));
    }

    #[test]
    fn bad_amr_policy() {
        let text = "{\"id\":\"a\",\"sentence\":\"x\",\"amr\":\"(a / apple\"}\n{\"id\":\"b\",\"sentence\":\"y\"}\n";
        let read = parse_corpus(text, BadAmrPolicy::Skip).unwrap();
        assert_eq!(read.records.len(), 1);
        assert_eq!(read.records[0].id, "b");
        assert_eq!(read.warnings.len(), 1);
        assert!(read.warnings[0].contains("`a`"));
        assert!(read.warnings[0].contains("line 1"));

        let err = parse_corpus(text, BadAmrPolicy::Fatal).unwrap_err();
        assert!(matches!(err, CorpusError::BadAmr { line: 1, .. }));
    }

    #[test]
    fn write_read_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let records = vec![
            record("a"),
            CorpusRecord {
                id: "b".into(),
                sentence: "All fields.".into(),
                amr: Some("(b / boy)".into()),
                trace: Some("# Steps\n".into()),
                completion: Some("The boy.".into()),
            },
        ];
        write_results(&path, &records).unwrap();
        let read = read_corpus(&path, BadAmrPolicy::Fatal).unwrap();
        assert_eq!(read.records, records);
        // writing again is byte-identical
        let text1 = fs::read_to_string(&path).unwrap();
        write_results(&path, &read.records).unwrap();
        let text2 = fs::read_to_string(&path).unwrap();
        assert_eq!(text1, text2);
    }

    #[test]
    fn empty_sequence_yields_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        write_results(&path, &[]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "");
        let read = read_corpus(&path, BadAmrPolicy::Fatal).unwrap();
        assert!(read.records.is_empty());
    }

    #[test]
    fn all_optional_fields_present_in_output() {
        let full = CorpusRecord {
            id: "x".into(),
            sentence: "s".into(),
            amr: Some("(a / apple)".into()),
            trace: Some("t".into()),
            completion: Some("c".into()),
        };
        let line = serde_json::to_string(&full).unwrap();
        for field in ["\"id\"", "\"sentence\"", "\"amr\"", "\"trace\"", "\"completion\""] {
            assert!(line.contains(field), "missing {field}");
        }
        // absent optionals are omitted entirely
        let bare = CorpusRecord {
            id: "y".into(),
            sentence: "s".into(),
            amr: None,
            trace: None,
            completion: None,
        };
        let line = serde_json::to_string(&bare).unwrap();
        assert!(!line.contains("amr"));
        assert!(!line.contains("trace"));
    }
}
