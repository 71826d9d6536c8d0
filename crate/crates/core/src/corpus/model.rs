use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::text;

/// The five L1-interference error categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ErrorTag {
    CopyingExpression,
    Synonyms,
    TenseSemantics,
    Transliteration,
    WordFormTransmission,
}

impl ErrorTag {
    pub const ALL: [ErrorTag; 5] = [
        ErrorTag::CopyingExpression,
        ErrorTag::Synonyms,
        ErrorTag::TenseSemantics,
        ErrorTag::Transliteration,
        ErrorTag::WordFormTransmission,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorTag::CopyingExpression => "CopyingExpression",
            ErrorTag::Synonyms => "Synonyms",
            ErrorTag::TenseSemantics => "TenseSemantics",
            ErrorTag::Transliteration => "Transliteration",
            ErrorTag::WordFormTransmission => "WordFormTransmission",
        }
    }

    /// Short column header used in plain-text tables.
    pub fn abbrev(self) -> &'static str {
        match self {
            ErrorTag::CopyingExpression => "CopExp",
            ErrorTag::Synonyms => "Syn",
            ErrorTag::TenseSemantics => "TenSem",
            ErrorTag::Transliteration => "Transl",
            ErrorTag::WordFormTransmission => "WFT",
        }
    }
}

impl fmt::Display for ErrorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown error tag `{0}`")]
pub struct UnknownTag(pub String);

impl FromStr for ErrorTag {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ErrorTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownTag(s.to_string()))
    }
}

/// Where a sentence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Realec,
    Ppo,
    Rule,
    Llm,
}

impl Source {
    pub const ALL: [Source; 4] = [Source::Realec, Source::Ppo, Source::Rule, Source::Llm];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Realec => "realec",
            Source::Ppo => "ppo",
            Source::Rule => "rule",
            Source::Llm => "llm",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Source::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown source `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// An error span in char offsets `[start, end)` of the owning sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub tag: ErrorTag,
    pub correction: Option<String>,
}

impl Span {
    pub fn new(start: usize, end: usize, tag: ErrorTag, correction: Option<String>) -> Self {
        Span { start, end, tag, correction }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn overlaps(&self, start: usize, end: usize) -> bool {
        self.start < end && start < self.end
    }

    fn key(&self) -> (usize, usize, ErrorTag) {
        (self.start, self.end, self.tag)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub id: String,
    pub text: String,
    pub source: Source,
    pub split: Option<Split>,
    pub spans: Vec<Span>,
}

impl AnnotatedSentence {
    pub fn new(id: impl Into<String>, text: impl Into<String>, source: Source) -> Self {
        AnnotatedSentence {
            id: id.into(),
            text: text.into(),
            source,
            split: None,
            spans: Vec::new(),
        }
    }

    pub fn with_spans(mut self, spans: Vec<Span>) -> Self {
        self.spans = spans;
        self.sort_spans();
        self
    }

    pub fn sort_spans(&mut self) {
        self.spans.sort_by_key(|a| a.key());
    }

    /// Surface text covered by `span`.
    pub fn surface(&self, span: &Span) -> Option<&str> {
        text::char_slice(&self.text, span.start, span.end)
    }

    /// Checks offsets, ordering and duplicate spans.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let len = text::char_len(&self.text);
        for (i, span) in self.spans.iter().enumerate() {
            if span.start >= span.end || span.end > len {
                return Err(CorpusError::InvalidSpan {
                    id: self.id.clone(),
                    index: i,
                    start: span.start,
                    end: span.end,
                    len,
                });
            }
        }
        for pair in self.spans.windows(2) {
            match pair[0].key().cmp(&pair[1].key()) {
                std::cmp::Ordering::Less => {}
                std::cmp::Ordering::Equal => {
                    return Err(CorpusError::DuplicateSpan {
                        id: self.id.clone(),
                        start: pair[1].start,
                        end: pair[1].end,
                        tag: pair[1].tag,
                    })
                }
                std::cmp::Ordering::Greater => {
                    return Err(CorpusError::UnsortedSpans { id: self.id.clone() })
                }
            }
        }
        Ok(())
    }
}

/// Free-form metadata recorded alongside a corpus file.
pub type Provenance = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub sentences: Vec<AnnotatedSentence>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn new(sentences: Vec<AnnotatedSentence>) -> Self {
        Corpus { sentences, provenance: Provenance::new() }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn span_count(&self) -> usize {
        self.sentences.iter().map(|s| s.spans.len()).sum()
    }

    pub fn get(&self, id: &str) -> Option<&AnnotatedSentence> {
        self.sentences.iter().find(|s| s.id == id)
    }

    /// Validates every sentence and id uniqueness.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let mut seen = HashSet::with_capacity(self.sentences.len());
        for s in &self.sentences {
            if !seen.insert(s.id.as_str()) {
                return Err(CorpusError::DuplicateId(s.id.clone()));
            }
            s.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_five_tags_parse() {
        for tag in ErrorTag::ALL {
            assert_eq!(tag.as_str().parse::<ErrorTag>().unwrap(), tag);
        }
        assert!("Spelling".parse::<ErrorTag>().is_err());
        assert!("synonyms".parse::<ErrorTag>().is_err());
    }

    #[test]
    fn validate_rejects_bad_offsets() {
        let s = AnnotatedSentence::new("a", "abc", Source::Rule)
            .with_spans(vec![Span::new(1, 4, ErrorTag::Synonyms, None)]);
        assert!(matches!(s.validate(), Err(CorpusError::InvalidSpan { .. })));
        let s = AnnotatedSentence::new("a", "abc", Source::Rule)
            .with_spans(vec![Span::new(2, 2, ErrorTag::Synonyms, None)]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn overlapping_spans_need_distinct_triples() {
        let ok = AnnotatedSentence::new("a", "abcdef", Source::Rule).with_spans(vec![
            Span::new(0, 3, ErrorTag::Synonyms, None),
            Span::new(0, 3, ErrorTag::CopyingExpression, None),
            Span::new(1, 4, ErrorTag::Synonyms, None),
        ]);
        assert!(ok.validate().is_ok());
        let dup = AnnotatedSentence::new("a", "abcdef", Source::Rule).with_spans(vec![
            Span::new(0, 3, ErrorTag::Synonyms, None),
            Span::new(0, 3, ErrorTag::Synonyms, Some("x".into())),
        ]);
        assert!(matches!(dup.validate(), Err(CorpusError::DuplicateSpan { .. })));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let c = Corpus::new(vec![
            AnnotatedSentence::new("a", "x", Source::Rule),
            AnnotatedSentence::new("a", "y", Source::Rule),
        ]);
        assert!(matches!(c.validate(), Err(CorpusError::DuplicateId(_))));
    }
}
