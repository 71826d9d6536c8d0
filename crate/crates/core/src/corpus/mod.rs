//! Corpus data model and the operations that read, write, filter, split and
//! summarise it.

mod brat;
mod jsonl;
pub(crate) mod lexicon;
mod model;
mod ops;
mod stats;
mod tokenize;

use std::path::PathBuf;

pub use brat::{import_brat, segment_sentences, BratError, BratImport};
pub use jsonl::{decode_corpus, encode_corpus, provenance_path, read_corpus, write_corpus};
pub use lexicon::Lexicon;
pub use model::{
    AnnotatedSentence, Corpus, ErrorTag, Provenance, Source, Span, Split, UnknownTag,
};
pub use ops::{filter_min_tokens, split_corpus, train_size, DEFAULT_MIN_TOKENS, DEFAULT_TRAIN_RATIO};
pub use stats::{CorpusStats, Manifest, ManifestMismatch};
pub use tokenize::{
    check_tokens, read_pretagged, tag_tokens, tokenize, tokenize_with, CoarsePos, PretaggedError, Token,
};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("sentence `{id}`: span {index} [{start}, {end}) is invalid for text of length {len}")]
    InvalidSpan {
        id: String,
        index: usize,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("sentence `{id}`: duplicate span [{start}, {end}) {tag}")]
    DuplicateSpan {
        id: String,
        start: usize,
        end: usize,
        tag: ErrorTag,
    },
    #[error("sentence `{id}`: spans are not sorted by (start, end)")]
    UnsortedSpans { id: String },
    #[error("duplicate sentence id `{0}`")]
    DuplicateId(String),
    #[error("record {record}: field `{field}`: {message}")]
    Schema {
        record: usize,
        field: String,
        message: String,
    },
    #[error("record {record}: unknown tag label `{label}`")]
    UnknownTag { record: usize, label: String },
    #[error("record {record}: {source}")]
    Record {
        record: usize,
        #[source]
        source: Box<CorpusError>,
    },
    #[error("record {record}: invalid JSON: {source}")]
    Json {
        record: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("provenance file {path}: {source}")]
    Provenance {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
