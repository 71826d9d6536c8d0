use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::apply_replacement;
use crate::corpus::{tokenize, AnnotatedSentence, CoarsePos};
use crate::dictionary::{normalize_key, ErrorDictionary};
use crate::text;

/// A dictionary key occurrence: char range plus the index of the dictionary
/// that matched it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionarySite {
    pub dictionary: usize,
    pub start: usize,
    pub end: usize,
    pub key: String,
}

/// Non-overlapping key matches, scanning left to right and preferring the
/// longest phrase at each position. Sites overlapping existing spans are
/// skipped.
pub fn dictionary_sites(sentence: &AnnotatedSentence, dictionaries: &[ErrorDictionary]) -> Vec<DictionarySite> {
    let tokens = tokenize(&sentence.text);
    let max_words = dictionaries.iter().map(|d| d.max_key_words()).max().unwrap_or(0);
    let mut sites = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut advanced = false;
        if tokens[i].pos != CoarsePos::Punct {
            for len in (1..=max_words.min(tokens.len() - i)).rev() {
                let (start, end) = (tokens[i].start, tokens[i + len - 1].end);
                if sentence.spans.iter().any(|s| s.overlaps(start, end)) {
                    continue;
                }
                let Some(phrase) = text::char_slice(&sentence.text, start, end) else {
                    continue;
                };
                let key = normalize_key(phrase);
                let mut matched = false;
                for (d, dict) in dictionaries.iter().enumerate() {
                    if dict.contains_key(&key) {
                        sites.push(DictionarySite {
                            dictionary: d,
                            start,
                            end,
                            key: key.clone(),
                        });
                        matched = true;
                    }
                }
                if matched {
                    i += len;
                    advanced = true;
                    break;
                }
            }
        }
        if !advanced {
            i += 1;
        }
    }
    sites
}

/// Replaces one dictionary key occurrence with a count-weighted erroneous
/// variant, tagged with the dictionary's tag.
pub fn inject_dictionary<R: Rng + ?Sized>(
    sentence: &AnnotatedSentence,
    dictionary: &ErrorDictionary,
    rng: &mut R,
) -> Option<AnnotatedSentence> {
    inject_dictionaries(sentence, std::slice::from_ref(dictionary), rng)
}

/// As [`inject_dictionary`], choosing the site uniformly across all
/// dictionaries' matches.
pub fn inject_dictionaries<R: Rng + ?Sized>(
    sentence: &AnnotatedSentence,
    dictionaries: &[ErrorDictionary],
    rng: &mut R,
) -> Option<AnnotatedSentence> {
    let sites = dictionary_sites(sentence, dictionaries);
    if sites.is_empty() {
        return None;
    }
    let site = &sites[rng.random_range(0..sites.len())];
    let dict = &dictionaries[site.dictionary];
    let variants: Vec<(&String, &u64)> = dict.variants(&site.key)?.iter().collect();
    let weights = WeightedIndex::new(variants.iter().map(|(_, c)| **c)).ok()?;
    let variant = variants[weights.sample(rng)].0;
    let original = text::char_slice(&sentence.text, site.start, site.end)?;
    let replacement = if text::starts_uppercase(original) {
        text::capitalize(variant)
    } else {
        variant.clone()
    };
    apply_replacement(sentence, site.start, site.end, &replacement, dict.tag())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ErrorTag, Source, Span};

    fn dict(tag: ErrorTag, pairs: &[(&str, &str, u64)]) -> ErrorDictionary {
        let mut d = ErrorDictionary::new(tag);
        for (k, v, c) in pairs {
            d.insert(k, v, *c);
        }
        d
    }

    #[test]
    fn covered_becomes_overcame() {
        let d = dict(ErrorTag::Synonyms, &[("covered", "overcame", 1)]);
        let s = AnnotatedSentence::new("x", "They covered the distance.", Source::Realec);
        let out = inject_dictionary(&s, &d, &mut crate::seeded_rng(0)).unwrap();
        assert_eq!(out.text, "They overcame the distance.");
        assert_eq!(out.spans, vec![Span::new(5, 13, ErrorTag::Synonyms, Some("covered".into()))]);
    }

    #[test]
    fn no_key_no_injection() {
        let d = dict(ErrorTag::Synonyms, &[("covered", "overcame", 1)]);
        let s = AnnotatedSentence::new("x", "Nothing to see here.", Source::Realec);
        assert!(inject_dictionary(&s, &d, &mut crate::seeded_rng(0)).is_none());
    }

    #[test]
    fn longest_phrase_wins_and_case_is_kept() {
        let d = dict(
            ErrorTag::CopyingExpression,
            &[("everyone", "every of us", 1), ("every one", "each of one", 1), ("one", "single", 1)],
        );
        let s = AnnotatedSentence::new("x", "Every one was happy.", Source::Realec);
        let sites = dictionary_sites(&s, std::slice::from_ref(&d));
        assert_eq!(sites.len(), 1);
        assert_eq!((sites[0].start, sites[0].end), (0, 9));
        let out = inject_dictionary(&s, &d, &mut crate::seeded_rng(3)).unwrap();
        assert_eq!(out.text, "Each of one was happy.");
    }

    #[test]
    fn existing_spans_block_sites() {
        let d = dict(ErrorTag::Synonyms, &[("covered", "overcame", 1)]);
        let s = AnnotatedSentence::new("x", "They covered the distance.", Source::Realec)
            .with_spans(vec![Span::new(5, 12, ErrorTag::TenseSemantics, None)]);
        assert!(inject_dictionary(&s, &d, &mut crate::seeded_rng(0)).is_none());
    }

    #[test]
    fn seed_replays() {
        let d = dict(ErrorTag::Synonyms, &[("big", "large", 2), ("big", "great", 1), ("house", "home", 1)]);
        let s = AnnotatedSentence::new("x", "A big house and a big garden.", Source::Realec);
        for seed in 0..20 {
            let a = inject_dictionary(&s, &d, &mut crate::seeded_rng(seed));
            let b = inject_dictionary(&s, &d, &mut crate::seeded_rng(seed));
            assert_eq!(a, b);
        }
    }
}
