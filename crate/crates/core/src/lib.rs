//! Toolkit for building, augmenting and scoring corpora of L1-interference
//! errors in learner English.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`corpus`]: the data model, tokenizer, standoff import, JSONL I/O,
//!   filtering, splitting and statistics.
//! * [`dictionary`]: per-tag correction → error dictionaries.
//! * [`injectors`]: rule-based error injection (dictionary replacement,
//!   tense shifting, transliteration) and first-word prompt sampling.
//! * [`llm`]: prompted generation and annotation over an OpenAI-compatible
//!   chat-completions endpoint, markup parsing, near-duplicate removal and
//!   expert review sheets.
//! * [`metrics`]: span-level F1, Cohen's kappa and diversity metrics.

pub mod corpus;
pub mod dictionary;
pub mod injectors;
pub mod llm;
pub mod metrics;
pub mod text;

pub use corpus::{
    AnnotatedSentence, CoarsePos, Corpus, CorpusError, ErrorTag, Source, Span, Split, Token,
};
pub use dictionary::ErrorDictionary;
pub use metrics::{AgreementReport, EvalReport, MatchMode};

/// Seeded generator used for every random choice in the toolkit.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the toolkit generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
