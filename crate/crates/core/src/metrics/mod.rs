//! Span-level scoring, inter-annotator agreement and diversity measures.

mod diversity;
mod f1;
mod kappa;

pub use diversity::{downsample, ngram_novelty, self_bleu, self_bleu_tokens, DEFAULT_MAX_N};
pub use f1::{span_f1, EvalReport, MatchMode, TagScore};
pub use kappa::{cohen_kappa, iaa_labels, kappa_stats, pairwise_kappa, AgreementReport, KappaStats, LabelMode, PairAgreement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("prediction for `{0}` has no gold sentence")]
    UnknownPredId(String),
    #[error("label sequences differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no items to compare")]
    Empty,
    #[error("expected agreement is 1 (both annotators use the single label `{0}`); kappa is undefined")]
    Undefined(String),
    #[error("at least {needed} {what} required, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("no {0}-grams in the generated corpus")]
    NoNgrams(usize),
    #[error("annotator {annotator} has no sentence `{id}`")]
    MissingSentence { annotator: usize, id: String },
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}
