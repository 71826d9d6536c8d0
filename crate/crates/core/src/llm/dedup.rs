use std::collections::HashSet;

use super::LlmError;
use crate::corpus::Corpus;

pub const DEFAULT_DEDUP_THRESHOLD: f64 = 0.9;

type Trigram = [char; 3];

fn normalize(text: &str) -> Vec<char> {
    text.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
        .chars()
        .collect()
}

/// Character trigrams of the lowercased, whitespace-normalised text.
pub fn char_trigrams(text: &str) -> HashSet<Trigram> {
    Profile::new(text).grams
}

fn jaccard(a: &HashSet<Trigram>, b: &HashSet<Trigram>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

struct Profile {
    grams: HashSet<Trigram>,
    norm: Vec<char>,
}

impl Profile {
    fn new(text: &str) -> Self {
        let norm = normalize(text);
        let grams = norm.windows(3).map(|w| [w[0], w[1], w[2]]).collect();
        Profile { grams, norm }
    }

    fn similarity(&self, other: &Profile) -> f64 {
        if self.grams.is_empty() && other.grams.is_empty() {
            return if self.norm == other.norm { 1.0 } else { 0.0 };
        }
        jaccard(&self.grams, &other.grams)
    }
}

/// Jaccard similarity of the two texts' trigram sets. Texts too short for a
/// trigram compare equal (1.0) only when their normalised forms match.
pub fn trigram_jaccard(a: &str, b: &str) -> f64 {
    Profile::new(a).similarity(&Profile::new(b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DedupOutcome {
    pub corpus: Corpus,
    /// `(dropped id, id of the kept sentence it resembled)`.
    pub dropped: Vec<(String, String)>,
}

/// Greedy near-duplicate removal in corpus order: a sentence is dropped when
/// its similarity to an already kept sentence reaches `threshold`.
pub fn dedup_near_duplicates(corpus: &Corpus, threshold: f64) -> Result<DedupOutcome, LlmError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(LlmError::Config(format!("dedup threshold must lie in (0, 1], got {threshold}")));
    }
    let mut kept: Vec<(usize, Profile)> = Vec::new();
    let mut dropped = Vec::new();
    for (i, s) in corpus.sentences.iter().enumerate() {
        let profile = Profile::new(&s.text);
        match kept.iter().find(|(_, p)| p.similarity(&profile) >= threshold) {
            Some((k, _)) => dropped.push((s.id.clone(), corpus.sentences[*k].id.clone())),
            None => kept.push((i, profile)),
        }
    }
    Ok(DedupOutcome {
        corpus: Corpus {
            sentences: kept.iter().map(|(i, _)| corpus.sentences[*i].clone()).collect(),
            provenance: corpus.provenance.clone(),
        },
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotatedSentence, Source};

    fn corpus(texts: &[&str]) -> Corpus {
        Corpus::new(
            texts
                .iter()
                .enumerate()
                .map(|(i, t)| AnnotatedSentence::new(format!("g{i}"), *t, Source::Llm))
                .collect(),
        )
    }

    #[test]
    fn identical_pair() {
        let out = dedup_near_duplicates(&corpus(&["The same text.", "The same text."]), 0.9).unwrap();
        assert_eq!(out.corpus.len(), 1);
        assert_eq!(out.dropped, vec![("g1".to_string(), "g0".to_string())]);
    }

    #[test]
    fn disjoint_pair() {
        assert_eq!(trigram_jaccard("abcdef", "uvwxyz"), 0.0);
        let out = dedup_near_duplicates(&corpus(&["abcdef", "uvwxyz"]), 0.9).unwrap();
        assert_eq!(out.corpus.len(), 2);
    }

    #[test]
    fn case_and_spacing_are_ignored() {
        assert_eq!(trigram_jaccard("The  Share fell.", "the share fell."), 1.0);
    }

    #[test]
    fn hand_computed_similarity() {
        // abcd → {abc, bcd}; abce → {abc, bce}; 1 shared of 3
        assert!((trigram_jaccard("abcd", "abce") - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_bounds() {
        assert!(dedup_near_duplicates(&corpus(&[]), 0.0).is_err());
        assert!(dedup_near_duplicates(&corpus(&[]), 1.5).is_err());
        assert!(dedup_near_duplicates(&corpus(&[]), 1.0).unwrap().corpus.is_empty());
    }
}
