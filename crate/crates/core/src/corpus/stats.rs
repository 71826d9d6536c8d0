//! Span and sentence counts keyed by tag, source and split.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::model::{Corpus, ErrorTag, Source, Split};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub total_sentences: usize,
    pub total_spans: usize,
    pub spans: BTreeMap<(ErrorTag, Source, Option<Split>), usize>,
    pub sentences: BTreeMap<(Source, Option<Split>), usize>,
    /// Sentences containing at least one span of the tag.
    pub sentences_with_tag: BTreeMap<ErrorTag, usize>,
    /// Histogram: number of spans in a sentence → number of sentences.
    pub spans_per_sentence: BTreeMap<usize, usize>,
}

impl CorpusStats {
    pub fn compute(corpus: &Corpus) -> CorpusStats {
        let mut st = CorpusStats {
            total_sentences: corpus.len(),
            ..Default::default()
        };
        for s in &corpus.sentences {
            *st.sentences.entry((s.source, s.split)).or_default() += 1;
            *st.spans_per_sentence.entry(s.spans.len()).or_default() += 1;
            let mut seen = Vec::new();
            for span in &s.spans {
                st.total_spans += 1;
                *st.spans.entry((span.tag, s.source, s.split)).or_default() += 1;
                if !seen.contains(&span.tag) {
                    seen.push(span.tag);
                    *st.sentences_with_tag.entry(span.tag).or_default() += 1;
                }
            }
        }
        st
    }

    pub fn tag_total(&self, tag: ErrorTag) -> usize {
        self.spans
            .iter()
            .filter(|((t, _, _), _)| *t == tag)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn tag_source(&self, tag: ErrorTag, source: Source) -> usize {
        self.spans
            .iter()
            .filter(|((t, s, _), _)| *t == tag && *s == source)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let spans: Vec<_> = self
            .spans
            .iter()
            .map(|((tag, source, split), count)| {
                json!({"tag": tag, "source": source, "split": split, "count": count})
            })
            .collect();
        let sentences: Vec<_> = self
            .sentences
            .iter()
            .map(|((source, split), count)| json!({"source": source, "split": split, "count": count}))
            .collect();
        let by_tag: BTreeMap<&str, usize> = ErrorTag::ALL
            .iter()
            .map(|t| (t.as_str(), self.tag_total(*t)))
            .collect();
        let with_tag: BTreeMap<&str, usize> = ErrorTag::ALL
            .iter()
            .map(|t| (t.as_str(), self.sentences_with_tag.get(t).copied().unwrap_or(0)))
            .collect();
        let histogram: BTreeMap<String, usize> = self
            .spans_per_sentence
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        json!({
            "total_sentences": self.total_sentences,
            "total_spans": self.total_spans,
            "spans_by_tag": by_tag,
            "spans": spans,
            "sentences": sentences,
            "sentences_with_tag": with_tag,
            "spans_per_sentence": histogram,
        })
    }

    /// Tag × source span table plus per-split sentence counts.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<22}", "tag");
        for src in Source::ALL {
            let _ = write!(out, "{:>8}", src.as_str());
        }
        let _ = writeln!(out, "{:>8}", "total");
        for tag in ErrorTag::ALL {
            let _ = write!(out, "{:<22}", tag.as_str());
            for src in Source::ALL {
                let _ = write!(out, "{:>8}", self.tag_source(tag, src));
            }
            let _ = writeln!(out, "{:>8}", self.tag_total(tag));
        }
        let _ = write!(out, "{:<22}", "total");
        for src in Source::ALL {
            let n: usize = ErrorTag::ALL.iter().map(|t| self.tag_source(*t, src)).sum();
            let _ = write!(out, "{n:>8}");
        }
        let _ = writeln!(out, "{:>8}", self.total_spans);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<22}{:>8}{:>8}{:>8}", "sentences", "train", "test", "none");
        for src in Source::ALL {
            let get = |sp| self.sentences.get(&(src, sp)).copied().unwrap_or(0);
            let _ = writeln!(
                out,
                "{:<22}{:>8}{:>8}{:>8}",
                src.as_str(),
                get(Some(Split::Train)),
                get(Some(Split::Test)),
                get(None)
            );
        }
        let _ = writeln!(out, "{:<22}{:>8}", "total", self.total_sentences);
        out
    }
}

/// Expected counts for a fixture corpus; absent fields are not checked.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub sentences: Option<usize>,
    #[serde(default)]
    pub spans: Option<usize>,
    #[serde(default)]
    pub spans_by_tag: Option<BTreeMap<ErrorTag, usize>>,
    #[serde(default)]
    pub sentences_with_spans: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestMismatch {
    pub field: String,
    pub expected: usize,
    pub actual: usize,
}

impl std::fmt::Display for ManifestMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: expected {}, found {}", self.field, self.expected, self.actual)
    }
}

impl Manifest {
    pub fn check(&self, stats: &CorpusStats) -> Vec<ManifestMismatch> {
        let mut out = Vec::new();
        let mut cmp = |field: String, expected: usize, actual: usize| {
            if expected != actual {
                out.push(ManifestMismatch { field, expected, actual });
            }
        };
        if let Some(n) = self.sentences {
            cmp("sentences".into(), n, stats.total_sentences);
        }
        if let Some(n) = self.spans {
            cmp("spans".into(), n, stats.total_spans);
        }
        if let Some(n) = self.sentences_with_spans {
            let with: usize = stats
                .spans_per_sentence
                .iter()
                .filter(|(k, _)| **k > 0)
                .map(|(_, v)| v)
                .sum();
            cmp("sentences_with_spans".into(), n, with);
        }
        if let Some(by_tag) = &self.spans_by_tag {
            for tag in ErrorTag::ALL {
                cmp(
                    format!("spans_by_tag.{tag}"),
                    by_tag.get(&tag).copied().unwrap_or(0),
                    stats.tag_total(tag),
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotatedSentence, Span};

    #[test]
    fn counts_by_tag_and_source() {
        let c = Corpus::new(vec![
            AnnotatedSentence::new("a", "Money comes to the kassa and the fabrika.", Source::Rule).with_spans(vec![
                Span::new(19, 24, ErrorTag::Transliteration, None),
                Span::new(33, 40, ErrorTag::Transliteration, None),
            ]),
            AnnotatedSentence::new("b", "Nothing here.", Source::Realec),
        ]);
        let st = CorpusStats::compute(&c);
        assert_eq!(st.spans.len(), 1);
        assert_eq!(st.spans[&(ErrorTag::Transliteration, Source::Rule, None)], 2);
        assert_eq!(st.tag_source(ErrorTag::Transliteration, Source::Rule), 2);
        assert_eq!(st.total_spans, 2);
        assert_eq!(st.spans.values().sum::<usize>(), st.total_spans);
        assert_eq!(st.sentences_with_tag[&ErrorTag::Transliteration], 1);
        assert_eq!(st.spans_per_sentence[&0], 1);
        assert_eq!(st.spans_per_sentence[&2], 1);
    }

    #[test]
    fn empty_corpus_is_all_zero() {
        let st = CorpusStats::compute(&Corpus::default());
        assert_eq!(st.total_spans, 0);
        for tag in ErrorTag::ALL {
            assert_eq!(st.tag_total(tag), 0);
        }
        let table = st.to_table();
        assert!(table.contains("TenseSemantics"));
        assert_eq!(st.to_json()["spans_by_tag"]["Synonyms"], 0);
    }

    #[test]
    fn manifest_mismatches_are_listed() {
        let st = CorpusStats::compute(&Corpus::default());
        let m: Manifest = serde_json::from_str(r#"{"sentences": 1, "spans_by_tag": {"Synonyms": 2}}"#).unwrap();
        let mism = m.check(&st);
        assert_eq!(mism.len(), 2);
        assert_eq!(mism[1].field, "spans_by_tag.Synonyms");
    }
}
