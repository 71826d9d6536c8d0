//! Canonical JSONL corpus files.
//!
//! One sentence per line with keys in the order `id, text, source, split,
//! spans` and span keys `start, end, tag, correction`. Corpus provenance is
//! kept in a sidecar `<file>.meta.json` so the sentence file stays one
//! record per line.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use super::model::{AnnotatedSentence, Corpus, ErrorTag, Provenance, Source, Span, Split};
use super::CorpusError;

/// Serializes sentences into canonical JSONL (trailing newline per record).
pub fn encode_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    for s in &corpus.sentences {
        // Struct field order fixes the key order.
        out.push_str(&serde_json::to_string(s).expect("sentence serialization is infallible"));
        out.push('\n');
    }
    out
}

/// Parses and validates JSONL content. Record numbers in errors are 1-based
/// line numbers.
pub fn decode_corpus(content: &str) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let mut sentences = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in content.lines().enumerate() {
        let record = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(line).map_err(|source| CorpusError::Json { record, source })?;
        let sentence = decode_record(record, &value)?;
        sentence.validate().map_err(|e| CorpusError::Record {
            record,
            source: Box::new(e),
        })?;
        if !seen.insert(sentence.id.clone()) {
            return Err(CorpusError::Record {
                record,
                source: Box::new(CorpusError::DuplicateId(sentence.id)),
            });
        }
        sentences.push(sentence);
    }
    Ok(sentences)
}

fn schema(record: usize, field: &str, message: impl Into<String>) -> CorpusError {
    CorpusError::Schema {
        record,
        field: field.to_string(),
        message: message.into(),
    }
}

fn get_str<'a>(record: usize, obj: &'a Map<String, Value>, field: &str) -> Result<&'a str, CorpusError> {
    match obj.get(field) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(schema(record, field, "expected a string")),
        None => Err(schema(record, field, "missing")),
    }
}

fn get_offset(record: usize, obj: &Map<String, Value>, field: &str) -> Result<usize, CorpusError> {
    match obj.get(field) {
        Some(Value::Number(n)) => n
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| schema(record, field, "expected a non-negative integer")),
        Some(_) => Err(schema(record, field, "expected a non-negative integer")),
        None => Err(schema(record, field, "missing")),
    }
}

fn decode_record(record: usize, value: &Value) -> Result<AnnotatedSentence, CorpusError> {
    let obj = value
        .as_object()
        .ok_or_else(|| schema(record, "<record>", "expected a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "id" | "text" | "source" | "split" | "spans") {
            return Err(schema(record, key, "unexpected field"));
        }
    }
    let id = get_str(record, obj, "id")?;
    if id.is_empty() {
        return Err(schema(record, "id", "must not be empty"));
    }
    let text = get_str(record, obj, "text")?;
    let source: Source = get_str(record, obj, "source")?
        .parse()
        .map_err(|e: String| schema(record, "source", e))?;
    let split = match obj.get("split") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(
            s.parse::<Split>()
                .map_err(|e| schema(record, "split", e))?,
        ),
        Some(_) => return Err(schema(record, "split", "expected a string or null")),
    };
    let raw_spans = match obj.get("spans") {
        Some(Value::Array(items)) => items,
        Some(_) => return Err(schema(record, "spans", "expected an array")),
        None => return Err(schema(record, "spans", "missing")),
    };
    let mut spans = Vec::with_capacity(raw_spans.len());
    for (j, raw) in raw_spans.iter().enumerate() {
        let field = |name: &str| format!("spans[{j}].{name}");
        let span = raw
            .as_object()
            .ok_or_else(|| schema(record, &format!("spans[{j}]"), "expected an object"))?;
        for key in span.keys() {
            if !matches!(key.as_str(), "start" | "end" | "tag" | "correction") {
                return Err(schema(record, &field(key), "unexpected field"));
            }
        }
        let start = get_offset(record, span, "start").map_err(|_| {
            schema(record, &field("start"), "expected a non-negative integer")
        })?;
        let end = get_offset(record, span, "end")
            .map_err(|_| schema(record, &field("end"), "expected a non-negative integer"))?;
        if end <= start {
            return Err(schema(
                record,
                &field("end"),
                format!("end {end} must be greater than start {start}"),
            ));
        }
        let label = get_str(record, span, "tag")
            .map_err(|_| schema(record, &field("tag"), "expected a tag label"))?;
        let tag: ErrorTag = label.parse().map_err(|_| CorpusError::UnknownTag {
            record,
            label: label.to_string(),
        })?;
        let correction = match span.get("correction") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(schema(record, &field("correction"), "expected a string or null")),
        };
        spans.push(Span::new(start, end, tag, correction));
    }
    Ok(AnnotatedSentence {
        id: id.to_string(),
        text: text.to_string(),
        source,
        split,
        spans,
    }
    .with_spans_sorted())
}

impl AnnotatedSentence {
    fn with_spans_sorted(mut self) -> Self {
        self.sort_spans();
        self
    }
}

/// Path of the provenance sidecar for a corpus file.
pub fn provenance_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let sentences = decode_corpus(&content)?;
    let meta = provenance_path(path);
    let provenance = if meta.exists() {
        let raw = fs::read_to_string(&meta).map_err(|source| CorpusError::Io {
            path: meta.clone(),
            source,
        })?;
        serde_json::from_str::<Provenance>(&raw)
            .map_err(|source| CorpusError::Provenance { path: meta, source })?
    } else {
        Provenance::new()
    };
    Ok(Corpus { sentences, provenance })
}

/// Validates and writes `corpus` to `path`, plus its provenance sidecar when
/// the provenance is non-empty.
pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    corpus.validate()?;
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| CorpusError::Io { path: p, source }
    };
    fs::write(path, encode_corpus(corpus)).map_err(io_err(path))?;
    let meta = provenance_path(path);
    if corpus.provenance.is_empty() {
        if meta.exists() {
            fs::remove_file(&meta).map_err(io_err(&meta))?;
        }
    } else {
        let mut body = serde_json::to_string_pretty(&corpus.provenance)
            .expect("provenance serialization is infallible");
        body.push('\n');
        fs::write(&meta, body).map_err(io_err(&meta))?;
    }
    Ok(())
}
