use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::InjectError;
use crate::corpus::{tokenize, CoarsePos, Corpus};

/// Sentence-initial word frequencies, most frequent first.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstWordTable {
    entries: Vec<(String, u64)>,
    index: WeightedIndex<u64>,
}

impl FirstWordTable {
    /// Builds from `(word, frequency)` pairs; zero frequencies are dropped.
    pub fn from_counts(counts: impl IntoIterator<Item = (String, u64)>) -> Result<Self, InjectError> {
        let mut merged: BTreeMap<String, u64> = BTreeMap::new();
        for (w, c) in counts {
            if c > 0 {
                *merged.entry(w).or_default() += c;
            }
        }
        let mut entries: Vec<(String, u64)> = merged.into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let index = WeightedIndex::new(entries.iter().map(|(_, c)| *c)).map_err(|_| InjectError::EmptyTable)?;
        Ok(FirstWordTable { entries, index })
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn probability(&self, word: &str) -> f64 {
        self.entries
            .iter()
            .find(|(w, _)| w == word)
            .map_or(0.0, |(_, c)| *c as f64 / self.total() as f64)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &str {
        &self.entries[self.index.sample(rng)].0
    }
}

/// Counts the first non-punctuation token of every sentence, case preserved.
pub fn build_first_word_table(corpus: &Corpus) -> Result<FirstWordTable, InjectError> {
    let firsts = corpus.sentences.iter().filter_map(|s| {
        tokenize(&s.text)
            .into_iter()
            .find(|t| t.pos != CoarsePos::Punct)
            .map(|t| (t.surface, 1))
    });
    FirstWordTable::from_counts(firsts)
}

pub fn sample_first_word<'a, R: Rng + ?Sized>(table: &'a FirstWordTable, rng: &mut R) -> &'a str {
    table.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotatedSentence, Source};

    #[test]
    fn single_sentence() {
        let c = Corpus::new(vec![AnnotatedSentence::new("a", "The end.", Source::Realec)]);
        let t = build_first_word_table(&c).unwrap();
        assert_eq!(t.entries(), &[("The".to_string(), 1)]);
        let mut rng = crate::seeded_rng(9);
        assert!((0..50).all(|_| t.sample(&mut rng) == "The"));
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(build_first_word_table(&Corpus::default()), Err(InjectError::EmptyTable)));
        assert!(FirstWordTable::from_counts(vec![("A".into(), 0)]).is_err());
    }

    #[test]
    fn leading_punct_is_skipped_and_order_is_by_frequency() {
        let c = Corpus::new(vec![
            AnnotatedSentence::new("a", "\"In 1999 it fell.\"", Source::Realec),
            AnnotatedSentence::new("b", "The end.", Source::Realec),
            AnnotatedSentence::new("c", "In short, no.", Source::Realec),
        ]);
        let t = build_first_word_table(&c).unwrap();
        assert_eq!(t.entries()[0], ("In".to_string(), 2));
        assert!((t.probability("In") - 2.0 / 3.0).abs() < 1e-12);
    }
}
