use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde_json::Value;

use super::RawDocument;
use crate::error::{Error, Result};

/// Parses a stopword list: one word per line, `#` comment lines and blank
/// lines ignored, words lowercased.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn read_stopwords_file(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

struct IdGuard<'a> {
    path: &'a Path,
    seen: HashSet<String>,
}

impl IdGuard<'_> {
    fn check(&mut self, id: &str, line: usize) -> Result<()> {
        if id.contains(['\t', '\n', '\r']) {
            return Err(parse_error(
                self.path,
                line,
                "id contains a tab or line break",
            ));
        }
        if !self.seen.insert(id.to_owned()) {
            return Err(parse_error(self.path, line, format!("duplicate id {id:?}")));
        }
        Ok(())
    }
}

/// Reads a JSON-lines file of `{"id": ..., "text": ...}` objects. Blank lines
/// are skipped; a missing id becomes the 1-based line number.
pub fn read_jsonl(path: &Path) -> Result<Vec<RawDocument>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut guard = IdGuard {
        path,
        seen: HashSet::new(),
    };
    let mut docs = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line)
            .map_err(|e| parse_error(path, lineno, format!("invalid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| parse_error(path, lineno, "expected a JSON object"))?;
        let text = match obj.get("text") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(parse_error(path, lineno, "field `text` is not a string")),
            None => return Err(parse_error(path, lineno, "missing field `text`")),
        };
        let id = match obj.get("id") {
            None | Some(Value::Null) => lineno.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            Some(_) => return Err(parse_error(path, lineno, "field `id` is not a string")),
        };
        guard.check(&id, lineno)?;
        docs.push(RawDocument { id, text });
    }
    Ok(docs)
}

/// Reads a CSV file with a header row. `text_column` is required; when
/// `id_column` is absent from the header, ids are the 1-based record numbers.
pub fn read_csv(path: &Path, text_column: &str, id_column: &str) -> Result<Vec<RawDocument>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(|e| parse_error(path, 1, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    let text_idx = headers
        .iter()
        .position(|h| h == text_column)
        .ok_or_else(|| parse_error(path, 1, format!("no column named {text_column:?}")))?;
    let id_idx = headers.iter().position(|h| h == id_column);
    let mut guard = IdGuard {
        path,
        seen: HashSet::new(),
    };
    let mut docs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(i + 2, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(i + 2, |p| p.line() as usize);
        let text = record.get(text_idx).unwrap_or_default().to_owned();
        let id = match id_idx {
            Some(j) => record.get(j).unwrap_or_default().to_owned(),
            None => (i + 1).to_string(),
        };
        guard.check(&id, line)?;
        docs.push(RawDocument { id, text });
    }
    Ok(docs)
}

/// Dispatches on extension: `.csv` reads CSV with `text`/`id` columns,
/// anything else is read as JSON lines.
pub fn read_raw_documents(path: &Path) -> Result<Vec<RawDocument>> {
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        read_csv(path, "text", "id")
    } else {
        read_jsonl(path)
    }
}
