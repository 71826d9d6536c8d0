//! Per-tag dictionaries mapping a correct form to the erroneous forms
//! observed (or suggested) in its place.
//!
//! Keys are case- and whitespace-normalised; values keep their surface form.
//! Dictionaries are stored as TSV (`tag  correct_form  erroneous_form  count`),
//! the same format used for externally supplied suggestions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::corpus::{Corpus, ErrorTag};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DictionaryError {
    #[error("suggestions line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Normalised dictionary key: lowercase, single spaces, trimmed.
pub fn normalize_key(form: &str) -> String {
    form.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn normalize_value(form: &str) -> String {
    form.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorDictionary {
    tag: ErrorTag,
    entries: BTreeMap<String, BTreeMap<String, u64>>,
}

/// Counts of spans left out while building.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub without_correction: usize,
    pub self_mappings: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MergeReport {
    pub merged: usize,
    pub self_mappings_dropped: usize,
    pub other_tag_lines: usize,
}

impl ErrorDictionary {
    pub fn new(tag: ErrorTag) -> Self {
        ErrorDictionary {
            tag,
            entries: BTreeMap::new(),
        }
    }

    pub fn tag(&self) -> ErrorTag {
        self.tag
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct correct forms.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Iterates `(key, [(erroneous form, count)])` in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, Vec<(&str, u64)>)> {
        self.entries
            .iter()
            .map(|(k, v)| (k.as_str(), v.iter().map(|(f, c)| (f.as_str(), *c)).collect()))
    }

    /// Adds `count` observations of `erroneous` replacing `correct`.
    /// Returns false when the pair is a self-mapping or either side is blank.
    pub fn insert(&mut self, correct: &str, erroneous: &str, count: u64) -> bool {
        let key = normalize_key(correct);
        let value = normalize_value(erroneous);
        if key.is_empty() || value.is_empty() || value.to_lowercase() == key {
            return false;
        }
        *self.entries.entry(key).or_default().entry(value).or_default() += count;
        true
    }

    /// Case-insensitive lookup; empty on a miss.
    pub fn lookup(&self, surface: &str) -> Vec<(String, u64)> {
        self.entries
            .get(&normalize_key(surface))
            .map(|v| v.iter().map(|(f, c)| (f.clone(), *c)).collect())
            .unwrap_or_default()
    }

    /// Longest key length in whitespace-separated words.
    pub fn max_key_words(&self) -> usize {
        self.entries
            .keys()
            .map(|k| k.split(' ').count())
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn contains_key(&self, normalized: &str) -> bool {
        self.entries.contains_key(normalized)
    }

    pub(crate) fn variants(&self, normalized: &str) -> Option<&BTreeMap<String, u64>> {
        self.entries.get(normalized)
    }
}

/// Builds the dictionary for `tag` from every span carrying a correction:
/// correction → span surface.
pub fn build_dictionary(corpus: &Corpus, tag: ErrorTag) -> ErrorDictionary {
    build_dictionary_with_report(corpus, tag).0
}

pub fn build_dictionary_with_report(corpus: &Corpus, tag: ErrorTag) -> (ErrorDictionary, BuildReport) {
    let mut dict = ErrorDictionary::new(tag);
    let mut report = BuildReport::default();
    for sentence in &corpus.sentences {
        for span in sentence.spans.iter().filter(|s| s.tag == tag) {
            let Some(correction) = span.correction.as_deref() else {
                report.without_correction += 1;
                continue;
            };
            let Some(surface) = sentence.surface(span) else {
                continue;
            };
            if !dict.insert(correction, surface, 1) {
                report.self_mappings += 1;
            }
        }
    }
    (dict, report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct SuggestionLine {
    tag: ErrorTag,
    correct: String,
    erroneous: String,
    count: u64,
}

fn parse_suggestions(content: &str) -> Result<Vec<SuggestionLine>, DictionaryError> {
    let mut out = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: String| DictionaryError::Malformed { line: i + 1, message };
        let cols: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(malformed(format!("expected 3 or 4 tab-separated columns, found {}", cols.len())));
        }
        let tag: ErrorTag = cols[0]
            .trim()
            .parse()
            .map_err(|e: crate::corpus::UnknownTag| malformed(e.to_string()))?;
        let correct = cols[1].trim();
        let erroneous = cols[2].trim();
        if correct.is_empty() || erroneous.is_empty() {
            return Err(malformed("empty form".into()));
        }
        let count = match cols.get(3).map(|c| c.trim()) {
            None | Some("") => 1,
            Some(c) => match c.parse::<u64>() {
                Ok(n) if n > 0 => n,
                _ => return Err(malformed(format!("count must be a positive integer, got `{c}`"))),
            },
        };
        out.push(SuggestionLine {
            tag,
            correct: correct.to_string(),
            erroneous: erroneous.to_string(),
            count,
        });
    }
    Ok(out)
}

/// Unions `dictionary` with the lines of a suggestions TSV that carry the same
/// tag. Counts add up; self-mappings are dropped and counted.
pub fn merge_suggestions(
    dictionary: &ErrorDictionary,
    suggestions: &str,
) -> Result<(ErrorDictionary, MergeReport), DictionaryError> {
    let mut dict = dictionary.clone();
    let mut report = MergeReport::default();
    for line in parse_suggestions(suggestions)? {
        if line.tag != dict.tag {
            report.other_tag_lines += 1;
            continue;
        }
        if dict.insert(&line.correct, &line.erroneous, line.count) {
            report.merged += 1;
        } else {
            report.self_mappings_dropped += 1;
        }
    }
    Ok((dict, report))
}

/// Reads a dictionary TSV into one dictionary per tag present, in tag order.
pub fn read_dictionaries(content: &str) -> Result<Vec<ErrorDictionary>, DictionaryError> {
    let mut by_tag: BTreeMap<ErrorTag, ErrorDictionary> = BTreeMap::new();
    for line in parse_suggestions(content)? {
        by_tag
            .entry(line.tag)
            .or_insert_with(|| ErrorDictionary::new(line.tag))
            .insert(&line.correct, &line.erroneous, line.count);
    }
    Ok(by_tag.into_values().collect())
}

/// Serializes dictionaries as TSV with a comment header.
pub fn write_dictionaries(dicts: &[ErrorDictionary]) -> String {
    let mut out = String::from("# tag\tcorrect_form\terroneous_form\tcount\n");
    for d in dicts {
        for (key, variants) in d.entries() {
            for (form, count) in variants {
                let _ = writeln!(out, "{}\t{key}\t{form}\t{count}", d.tag);
            }
        }
    }
    out
}
