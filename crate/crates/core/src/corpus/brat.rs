//! Standoff (`.txt` + `.ann`) import.
//!
//! Span offsets in the annotation file are document-level char offsets; on
//! import the document is segmented into sentences and every span is
//! re-based onto the sentence that contains it.

use std::collections::{BTreeMap, HashMap};

use super::model::{AnnotatedSentence, ErrorTag, Source, Span};
use crate::text;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BratError {
    #[error("annotation line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("span {span_id}: recorded surface {recorded:?} differs from document text {actual:?}")]
    SurfaceMismatch {
        span_id: String,
        recorded: String,
        actual: String,
    },
    #[error("span {span_id}: offsets [{start}, {end}) fall outside the document")]
    OutOfRange { span_id: String, start: usize, end: usize },
    #[error("span {span_id} crosses a sentence boundary")]
    CrossesBoundary { span_id: String },
}

/// Result of importing one document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BratImport {
    pub sentences: Vec<AnnotatedSentence>,
    /// Spans dropped because their label is outside the five-tag set, by label.
    pub unknown_tags: BTreeMap<String, usize>,
    pub discontinuous_dropped: usize,
    pub duplicate_spans: usize,
}

impl BratImport {
    pub fn unknown_tag_count(&self) -> usize {
        self.unknown_tags.values().sum()
    }
}

const ABBREVIATIONS: &[&str] = &[
    "etc", "e.g", "i.e", "eg", "ie", "mr", "mrs", "ms", "dr", "prof", "vs", "approx", "no",
    "fig", "st", "inc", "ltd", "jr", "sr", "u.s", "u.k", "cf", "al", "ca", "mln", "bln", "min",
    "max",
];

const CLOSERS: &[char] = &['"', '\'', '\u{201D}', '\u{2019}', ')', ']', '\u{BB}'];

/// Sentence char ranges of `doc`, trimmed of surrounding whitespace.
///
/// A sentence ends at a line break, or at `.`, `!` or `?` (plus any closing
/// quotes or brackets) followed by whitespace and an uppercase letter or a
/// digit, unless the period ends a known abbreviation.
pub fn segment_sentences(doc: &str) -> Vec<(usize, usize)> {
    let chars: Vec<char> = doc.chars().collect();
    let n = chars.len();
    let mut out = Vec::new();
    let mut push = |mut s: usize, mut e: usize| {
        while s < e && chars[s].is_whitespace() {
            s += 1;
        }
        while e > s && chars[e - 1].is_whitespace() {
            e -= 1;
        }
        if s < e {
            out.push((s, e));
        }
    };
    let mut start = 0;
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if c == '\n' {
            push(start, i);
            start = i + 1;
            i += 1;
            continue;
        }
        if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < n && (matches!(chars[j], '.' | '!' | '?') || CLOSERS.contains(&chars[j])) {
                j += 1;
            }
            let mut k = j;
            while k < n && chars[k].is_whitespace() && chars[k] != '\n' {
                k += 1;
            }
            let boundary = k > j
                && k < n
                && (chars[k].is_uppercase() || chars[k].is_ascii_digit())
                && !(c == '.' && ends_with_abbreviation(&chars[start..i]));
            if boundary {
                push(start, j);
                start = j;
            }
            i = j;
            continue;
        }
        i += 1;
    }
    push(start, n);
    out
}

fn ends_with_abbreviation(before: &[char]) -> bool {
    let word: String = before
        .iter()
        .rev()
        .take_while(|c| !c.is_whitespace())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

struct TextBound {
    id: String,
    label: String,
    start: usize,
    end: usize,
    surface: String,
    discontinuous: bool,
}

fn parse_offsets(line: usize, raw: &str) -> Result<(usize, usize, bool), BratError> {
    let malformed = |message: String| BratError::Malformed { line, message };
    let mut fragments = Vec::new();
    for frag in raw.split(';') {
        let nums: Vec<&str> = frag.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(malformed(format!("bad offset fragment `{frag}`")));
        }
        let s: usize = nums[0].parse().map_err(|_| malformed(format!("bad start offset `{}`", nums[0])))?;
        let e: usize = nums[1].parse().map_err(|_| malformed(format!("bad end offset `{}`", nums[1])))?;
        if e <= s {
            return Err(malformed(format!("end {e} must exceed start {s}")));
        }
        fragments.push((s, e));
    }
    let start = fragments.iter().map(|f| f.0).min().unwrap_or(0);
    let end = fragments.iter().map(|f| f.1).max().unwrap_or(0);
    Ok((start, end, fragments.len() > 1))
}

/// Imports one document. Sentence ids are `<doc_id>-<n>` with `n` 1-based.
pub fn import_brat(doc_id: &str, document: &str, annotations: &str) -> Result<BratImport, BratError> {
    let mut bounds = Vec::new();
    let mut notes: HashMap<String, String> = HashMap::new();
    for (i, raw) in annotations.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let malformed = |message: &str| BratError::Malformed {
            line,
            message: message.to_string(),
        };
        let cols: Vec<&str> = raw.splitn(3, '\t').collect();
        let id = cols[0];
        match id.chars().next() {
            Some('T') => {
                if cols.len() != 3 {
                    return Err(malformed("text-bound line needs id, type/offsets and surface"));
                }
                let (label, offsets) = cols[1]
                    .split_once(' ')
                    .ok_or_else(|| malformed("missing offsets after label"))?;
                let (start, end, discontinuous) = parse_offsets(line, offsets)?;
                bounds.push(TextBound {
                    id: id.to_string(),
                    label: label.to_string(),
                    start,
                    end,
                    surface: cols[2].to_string(),
                    discontinuous,
                });
            }
            Some('#') => {
                if cols.len() < 2 {
                    return Err(malformed("note line needs a type and target"));
                }
                let mut parts = cols[1].split_whitespace();
                let kind = parts.next().unwrap_or_default();
                let target = parts.next().ok_or_else(|| malformed("note without target"))?;
                if kind == "AnnotatorNotes" {
                    let note = cols.get(2).map(|s| s.trim()).unwrap_or_default();
                    notes.entry(target.to_string()).or_insert_with(|| note.to_string());
                }
            }
            Some('A' | 'R' | 'E' | 'M' | 'N' | '*') => {}
            _ => return Err(malformed("unrecognised annotation line")),
        }
    }

    let ranges = segment_sentences(document);
    let mut sentences: Vec<AnnotatedSentence> = ranges
        .iter()
        .enumerate()
        .map(|(k, &(s, e))| {
            AnnotatedSentence::new(
                format!("{doc_id}-{}", k + 1),
                text::char_slice(document, s, e).unwrap_or_default(),
                Source::Realec,
            )
        })
        .collect();
    let doc_len = text::char_len(document);
    let mut report = BratImport::default();

    for tb in bounds {
        let tag: ErrorTag = match tb.label.parse() {
            Ok(tag) => tag,
            Err(_) => {
                *report.unknown_tags.entry(tb.label).or_default() += 1;
                continue;
            }
        };
        if tb.discontinuous {
            report.discontinuous_dropped += 1;
            continue;
        }
        if tb.end > doc_len {
            return Err(BratError::OutOfRange {
                span_id: tb.id,
                start: tb.start,
                end: tb.end,
            });
        }
        let actual = text::char_slice(document, tb.start, tb.end).unwrap_or_default();
        if actual.replace(['\n', '\r'], " ") != tb.surface {
            return Err(BratError::SurfaceMismatch {
                span_id: tb.id,
                recorded: tb.surface,
                actual: actual.to_string(),
            });
        }
        let Some(k) = ranges.iter().position(|&(s, e)| s <= tb.start && tb.end <= e) else {
            return Err(BratError::CrossesBoundary { span_id: tb.id });
        };
        let offset = ranges[k].0;
        let correction = notes
            .get(&tb.id)
            .filter(|n| !n.is_empty())
            .cloned();
        let span = Span::new(tb.start - offset, tb.end - offset, tag, correction);
        let sentence = &mut sentences[k];
        if sentence
            .spans
            .iter()
            .any(|s| (s.start, s.end, s.tag) == (span.start, span.end, span.tag))
        {
            report.duplicate_spans += 1;
            continue;
        }
        sentence.spans.push(span);
    }
    for s in &mut sentences {
        s.sort_spans();
    }
    report.sentences = sentences;
    Ok(report)
}
