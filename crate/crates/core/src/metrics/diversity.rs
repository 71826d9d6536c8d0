use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::MetricsError;
use crate::corpus::{tokenize, CoarsePos};

pub const DEFAULT_MAX_N: usize = 4;

/// Lowercased tokens, punctuation included.
fn bleu_tokens(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.lower()).collect()
}

/// Lowercased word tokens, punctuation dropped.
fn word_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| t.pos != CoarsePos::Punct)
        .map(|t| t.lower())
        .collect()
}

type Gram = Vec<u32>;

#[derive(Clone, Copy, Default)]
struct Top2 {
    best: (u32, usize),
    second: u32,
}

impl Top2 {
    fn push(&mut self, count: u32, sentence: usize) {
        if count > self.best.0 {
            self.second = self.best.0;
            self.best = (count, sentence);
        } else if count > self.second {
            self.second = count;
        }
    }

    /// Highest count among sentences other than `sentence`.
    fn excluding(&self, sentence: usize) -> u32 {
        if self.best.1 == sentence {
            self.second
        } else {
            self.best.0
        }
    }
}

fn gram_counts(ids: &[u32], n: usize) -> HashMap<Gram, u32> {
    let mut m = HashMap::new();
    if ids.len() >= n {
        for w in ids.windows(n) {
            *m.entry(w.to_vec()).or_default() += 1;
        }
    }
    m
}

/// Self-BLEU over pre-tokenized sentences: each sentence is scored against
/// all others as references, and the sentence BLEU scores are averaged.
///
/// Modified precisions are clipped by the largest count in any single
/// reference; a zero precision becomes `1 / (total + 1)`. The brevity penalty
/// uses the reference length closest to the hypothesis length (shorter on
/// ties). Result in `[0, 100]`.
pub fn self_bleu_tokens(sentences: &[Vec<String>], max_n: usize) -> Result<f64, MetricsError> {
    if sentences.len() < 2 {
        return Err(MetricsError::TooFew {
            what: "sentences",
            needed: 2,
            got: sentences.len(),
        });
    }
    let max_n = max_n.max(1);
    let mut vocab: HashMap<&str, u32> = HashMap::new();
    let ids: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| {
            s.iter()
                .map(|w| {
                    let next = vocab.len() as u32;
                    *vocab.entry(w.as_str()).or_insert(next)
                })
                .collect()
        })
        .collect();
    let counts: Vec<Vec<HashMap<Gram, u32>>> = ids
        .par_iter()
        .map(|s| (1..=max_n).map(|n| gram_counts(s, n)).collect())
        .collect();
    let mut tops: Vec<HashMap<&Gram, Top2>> = vec![HashMap::new(); max_n];
    for (i, per_n) in counts.iter().enumerate() {
        for (n, m) in per_n.iter().enumerate() {
            for (g, c) in m {
                tops[n].entry(g).or_default().push(*c, i);
            }
        }
    }
    let mut lengths: Vec<(usize, usize)> = ids.iter().enumerate().map(|(i, s)| (s.len(), i)).collect();
    lengths.sort_unstable();

    let scores: Vec<f64> = (0..ids.len())
        .into_par_iter()
        .map(|i| {
            let c = ids[i].len();
            if c == 0 {
                return 0.0;
            }
            let mut log_sum = 0.0;
            for n in 0..max_n {
                let total = c.saturating_sub(n);
                let clipped: u32 = counts[i][n]
                    .iter()
                    .map(|(g, cnt)| (*cnt).min(tops[n][g].excluding(i)))
                    .sum();
                let p = if clipped == 0 {
                    1.0 / (total as f64 + 1.0)
                } else {
                    clipped as f64 / total as f64
                };
                log_sum += p.ln();
            }
            let r = closest_ref_len(&lengths, c, i);
            let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
            bp * (log_sum / max_n as f64).exp()
        })
        .collect();
    Ok(100.0 * scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Length among other sentences closest to `c`, shorter on ties.
fn closest_ref_len(sorted: &[(usize, usize)], c: usize, me: usize) -> usize {
    let pos = sorted.partition_point(|(l, _)| *l < c);
    let below = sorted[..pos].iter().rev().find(|(_, i)| *i != me).map(|(l, _)| *l);
    let above = sorted[pos..].iter().find(|(_, i)| *i != me).map(|(l, _)| *l);
    match (below, above) {
        (Some(b), Some(a)) => {
            if c - b <= a - c {
                b
            } else {
                a
            }
        }
        (Some(b), None) => b,
        (None, Some(a)) => a,
        (None, None) => c,
    }
}

/// Self-BLEU over raw sentence texts.
pub fn self_bleu<S: AsRef<str> + Sync>(sentences: &[S], max_n: usize) -> Result<f64, MetricsError> {
    let tokens: Vec<Vec<String>> = sentences.par_iter().map(|s| bleu_tokens(s.as_ref())).collect();
    self_bleu_tokens(&tokens, max_n)
}

fn ngram_set<S: AsRef<str>>(texts: &[S], n: usize) -> HashSet<Vec<String>> {
    let mut set = HashSet::new();
    for t in texts {
        let words = word_tokens(t.as_ref());
        if words.len() >= n {
            for w in words.windows(n) {
                set.insert(w.to_vec());
            }
        }
    }
    set
}

/// Fraction of distinct word `n`-grams of `generated` that never occur in
/// `source`. N-grams do not cross sentence boundaries.
pub fn ngram_novelty<S: AsRef<str>, R: AsRef<str>>(generated: &[S], source: &[R], n: usize) -> Result<f64, MetricsError> {
    let n = n.max(1);
    let gen = ngram_set(generated, n);
    if gen.is_empty() {
        return Err(MetricsError::NoNgrams(n));
    }
    let src = ngram_set(source, n);
    let novel = gen.iter().filter(|g| !src.contains(*g)).count();
    Ok(novel as f64 / gen.len() as f64)
}

/// `size` items chosen with the seeded generator, in their original order.
/// Returns everything when `size` is not smaller than the input.
pub fn downsample<T: Clone>(items: &[T], size: usize, seed: u64) -> Vec<T> {
    if size >= items.len() {
        return items.to_vec();
    }
    let mut rng = crate::seeded_rng(seed);
    let mut picked = rand::seq::index::sample(&mut rng, items.len(), size).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| items[i].clone()).collect()
}
