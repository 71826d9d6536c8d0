use rand::seq::SliceRandom;

use super::model::{Corpus, Split};
use super::tokenize::tokenize;

pub const DEFAULT_MIN_TOKENS: usize = 5;
pub const DEFAULT_TRAIN_RATIO: f64 = 0.8;

/// Keeps sentences with at least `min_tokens` tokens, preserving order.
pub fn filter_min_tokens(corpus: &Corpus, min_tokens: usize) -> Corpus {
    Corpus {
        sentences: corpus
            .sentences
            .iter()
            .filter(|s| tokenize(&s.text).len() >= min_tokens)
            .cloned()
            .collect(),
        provenance: corpus.provenance.clone(),
    }
}

/// Number of training sentences for `n` sentences at `ratio`: `floor(n * ratio)`.
pub fn train_size(n: usize, ratio: f64) -> usize {
    // The epsilon absorbs products such as 0.29 * 100 = 28.999999999999996.
    let exact = n as f64 * ratio;
    ((exact + 1e-9).floor() as usize).min(n)
}

/// Shuffles with the seeded generator and assigns the first `floor(n * ratio)`
/// sentences to train. Both halves keep the input order.
///
/// # Panics
/// When `train_ratio` is not strictly between 0 and 1.
pub fn split_corpus(corpus: &Corpus, train_ratio: f64, seed: u64) -> (Corpus, Corpus) {
    assert!(
        train_ratio > 0.0 && train_ratio < 1.0,
        "train ratio must lie in (0, 1), got {train_ratio}"
    );
    let n = corpus.sentences.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut crate::seeded_rng(seed));
    let mut is_train = vec![false; n];
    for &i in &order[..train_size(n, train_ratio)] {
        is_train[i] = true;
    }
    let mut train = Corpus::new(Vec::new());
    let mut test = Corpus::new(Vec::new());
    for (i, s) in corpus.sentences.iter().enumerate() {
        let mut s = s.clone();
        if is_train[i] {
            s.split = Some(Split::Train);
            train.sentences.push(s);
        } else {
            s.split = Some(Split::Test);
            test.sentences.push(s);
        }
    }
    (train, test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotatedSentence, Source};

    fn corpus(n: usize) -> Corpus {
        Corpus::new(
            (0..n)
                .map(|i| AnnotatedSentence::new(format!("s{i}"), format!("Sentence number {i} is here."), Source::Rule))
                .collect(),
        )
    }

    #[test]
    fn floor_rule_sizes() {
        assert_eq!(train_size(10, 0.8), 8);
        assert_eq!(train_size(100, 0.8), 80);
        assert_eq!(train_size(6086, 0.8), 4868);
        assert_eq!(train_size(100, 0.29), 29);
        assert_eq!(train_size(3, 0.5), 1);
    }

    #[test]
    fn split_ten() {
        let (tr, te) = split_corpus(&corpus(10), 0.8, 7);
        assert_eq!((tr.len(), te.len()), (8, 2));
        assert!(tr.sentences.iter().all(|s| s.split == Some(Split::Train)));
        assert!(te.sentences.iter().all(|s| s.split == Some(Split::Test)));
    }

    #[test]
    fn same_seed_same_split() {
        let c = corpus(50);
        assert_eq!(split_corpus(&c, 0.8, 3), split_corpus(&c, 0.8, 3));
        assert_ne!(split_corpus(&c, 0.8, 3).1, split_corpus(&c, 0.8, 4).1);
    }

    #[test]
    #[should_panic]
    fn ratio_out_of_range() {
        split_corpus(&corpus(3), 1.0, 0);
    }

    #[test]
    fn filter_boundary() {
        let c = Corpus::new(vec![
            AnnotatedSentence::new("four", "It is very true", Source::Rule),
            AnnotatedSentence::new("five", "It is very true.", Source::Rule),
            AnnotatedSentence::new("short", "Thanks.", Source::Rule),
        ]);
        let kept = filter_min_tokens(&c, DEFAULT_MIN_TOKENS);
        let ids: Vec<_> = kept.sentences.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["five"]);
        assert_eq!(filter_min_tokens(&kept, DEFAULT_MIN_TOKENS), kept);
        assert!(filter_min_tokens(&Corpus::default(), 5).is_empty());
    }
}
