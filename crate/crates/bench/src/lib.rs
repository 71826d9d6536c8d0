//! Shared inputs for the criterion benchmarks.

use std::path::PathBuf;

use l1forge_core::corpus::{read_corpus, Corpus};

/// Workspace `fixtures/` directory.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn load_fixture(name: &str) -> Corpus {
    read_corpus(fixtures_dir().join(name)).expect("fixture corpus is valid")
}
