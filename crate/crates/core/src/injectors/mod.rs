//! Rule-based error injection and sentence-initial word sampling.
//!
//! Every injector takes one sentence and an explicit generator and returns
//! either `None` (nothing to inject) or a copy with exactly one new span over
//! the replaced region. The span's correction is the original surface, so the
//! edit can always be undone.

mod dict;
mod first_word;
mod tense;
mod translit;

use rayon::prelude::*;

use crate::corpus::{AnnotatedSentence, Corpus, ErrorTag, Source, Span};
use crate::text;

pub use dict::{dictionary_sites, inject_dictionaries, inject_dictionary, DictionarySite};
pub use first_word::{build_first_word_table, sample_first_word, FirstWordTable};
pub use tense::{
    inject_tense, inject_tense_with, subject_number, to_present_simple, to_present_simple_with,
    Number,
};
pub use translit::{
    inject_transliteration, inject_transliteration_with, transliterate, HttpTranslator,
    NounLexicon, NounTranslator, TransliterationTable,
};

#[derive(Debug, thiserror::Error)]
pub enum InjectError {
    #[error("`{0}` is not a recognisable past-tense form")]
    NotPast(String),
    #[error("{what} line {line}: {message}")]
    Table {
        what: &'static str,
        line: usize,
        message: String,
    },
    #[error("first-word table is empty")]
    EmptyTable,
    #[error("translation provider: {0}")]
    Translate(String),
}

/// Replaces chars `[start, end)` of `sentence.text` with `replacement`, shifts
/// later spans and adds the new span. The region must not overlap any
/// existing span.
pub(crate) fn apply_replacement(
    sentence: &AnnotatedSentence,
    start: usize,
    end: usize,
    replacement: &str,
    tag: ErrorTag,
) -> Option<AnnotatedSentence> {
    if sentence.spans.iter().any(|s| s.overlaps(start, end)) {
        return None;
    }
    let original = text::char_slice(&sentence.text, start, end)?.to_string();
    let new_text = text::replace_range(&sentence.text, start, end, replacement)?;
    let new_len = text::char_len(replacement);
    let mut spans: Vec<Span> = sentence
        .spans
        .iter()
        .map(|s| {
            let mut s = s.clone();
            if s.start >= end {
                s.start = s.start - end + start + new_len;
                s.end = s.end - end + start + new_len;
            }
            s
        })
        .collect();
    spans.push(Span::new(start, start + new_len, tag, Some(original)));
    let mut out = AnnotatedSentence {
        text: new_text,
        spans,
        ..sentence.clone()
    };
    out.sort_spans();
    Some(out)
}

/// Per-sentence generator seed for batch runs.
pub fn sentence_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

/// Result of running an injector over a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    /// Fired injections, in input order.
    pub corpus: Corpus,
    pub fired: usize,
    pub skipped: usize,
}

/// Runs `inject` over every sentence in parallel, each with its own generator
/// seeded by [`sentence_seed`]. Outputs get id `{id}-{suffix}` and source
/// `rule`.
pub fn try_inject_batch<F, E>(corpus: &Corpus, seed: u64, suffix: &str, inject: F) -> Result<BatchOutcome, E>
where
    F: Fn(&AnnotatedSentence, &mut crate::Rng) -> Result<Option<AnnotatedSentence>, E> + Sync,
    E: Send,
{
    let results: Vec<Option<AnnotatedSentence>> = corpus
        .sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = crate::seeded_rng(sentence_seed(seed, i));
            inject(s, &mut rng)
        })
        .collect::<Result<_, E>>()?;
    let total = results.len();
    let sentences: Vec<AnnotatedSentence> = results
        .into_iter()
        .flatten()
        .map(|mut s| {
            s.id = format!("{}-{suffix}", s.id);
            s.source = Source::Rule;
            s
        })
        .collect();
    let fired = sentences.len();
    Ok(BatchOutcome {
        corpus: Corpus {
            sentences,
            provenance: Default::default(),
        },
        fired,
        skipped: total - fired,
    })
}

pub fn inject_batch<F>(corpus: &Corpus, seed: u64, suffix: &str, inject: F) -> BatchOutcome
where
    F: Fn(&AnnotatedSentence, &mut crate::Rng) -> Option<AnnotatedSentence> + Sync,
{
    match try_inject_batch::<_, std::convert::Infallible>(corpus, seed, suffix, |s, r| Ok(inject(s, r))) {
        Ok(out) => out,
        Err(never) => match never {},
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replacement_shifts_later_spans() {
        let s = AnnotatedSentence::new("a", "We go to kassa now.", Source::Rule)
            .with_spans(vec![Span::new(9, 14, ErrorTag::Transliteration, Some("cashier".into()))]);
        let out = apply_replacement(&s, 3, 5, "went", ErrorTag::TenseSemantics).unwrap();
        assert_eq!(out.text, "We went to kassa now.");
        assert_eq!(out.spans.len(), 2);
        assert_eq!(out.surface(&out.spans[0]), Some("went"));
        assert_eq!(out.spans[0].correction.as_deref(), Some("go"));
        assert_eq!(out.surface(&out.spans[1]), Some("kassa"));
        out.validate().unwrap();
    }

    #[test]
    fn replacement_refuses_overlap() {
        let s = AnnotatedSentence::new("a", "We go to kassa now.", Source::Rule)
            .with_spans(vec![Span::new(9, 14, ErrorTag::Transliteration, None)]);
        assert!(apply_replacement(&s, 12, 18, "x", ErrorTag::Synonyms).is_none());
    }

    #[test]
    fn batch_keeps_order_and_renames() {
        let c = Corpus::new(
            (0..20)
                .map(|i| AnnotatedSentence::new(format!("s{i}"), format!("In {} the share decreased.", 1990 + i), Source::Realec))
                .collect(),
        );
        let out = inject_batch(&c, 5, "tense", inject_tense);
        assert_eq!(out.fired, 20);
        assert_eq!(out.corpus.sentences[3].id, "s3-tense");
        assert!(out.corpus.sentences.iter().all(|s| s.source == Source::Rule));
        assert_eq!(out, inject_batch(&c, 5, "tense", inject_tense));
    }
}
