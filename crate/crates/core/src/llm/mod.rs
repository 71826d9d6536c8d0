//! Prompted generation and annotation through a chat-completions endpoint,
//! plus the offline steps around it: markup parsing, near-duplicate removal
//! and expert review.

mod annotate;
mod client;
mod dedup;
mod generate;
mod markup;
pub mod mock;
mod prompt;
mod review;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

pub use annotate::{annotate_batch, AnnotationError, AnnotationJob, AnnotationOutcome};
pub use client::{ChatClient, ChatMessage, ChatRequest, RetryPolicy, API_KEY_ENV};
pub use dedup::{char_trigrams, dedup_near_duplicates, trigram_jaccard, DedupOutcome, DEFAULT_DEDUP_THRESHOLD};
pub use generate::{generate_batch, plan_request, split_candidates, GenerationError, GenerationJob, GenerationOutcome, RequestPlan};
pub use markup::{parse_annotated_output, render_markup, Annotation, MarkupError};
pub use prompt::{
    build_annotation_prompt, build_generation_prompt, ANNOTATION_INSTRUCTION, DEFAULT_TAG_INSTRUCTIONS,
    GENERATION_INSTRUCTION, GENERATION_PARAPHRASES,
};
pub use review::{apply_review, export_review_sheet, ReviewError, ReviewRow, ReviewSheet, ReviewSummary, Verdict};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LlmError {
    #[error("prompt: {0}")]
    Prompt(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("endpoint answered HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response: {0}")]
    BadResponse(String),
}

impl LlmError {
    /// True for failures talking to the endpoint, as opposed to bad input.
    pub fn is_transport(&self) -> bool {
        matches!(self, LlmError::Transport(_) | LlmError::Status { .. } | LlmError::BadResponse(_))
    }
}

pub(crate) struct PoolOutcome<T> {
    /// Results for indices `0..done.len()`.
    pub done: Vec<T>,
    pub error: Option<(usize, LlmError)>,
}

/// Runs `work(0)`, `work(1)`, ... on at most `max_in_flight` threads. No new
/// index is claimed once `limit` is reached, a call fails, or the summed
/// `weight` of finished results reaches `target`. Results come back in index
/// order up to the first failure.
pub(crate) fn run_pool<T, W, G>(max_in_flight: usize, limit: usize, target: usize, weight: G, work: W) -> PoolOutcome<T>
where
    T: Send,
    W: Fn(usize) -> Result<T, LlmError> + Sync,
    G: Fn(&T) -> usize + Sync,
{
    let next = AtomicUsize::new(0);
    let produced = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let slots: Mutex<BTreeMap<usize, Result<T, LlmError>>> = Mutex::new(BTreeMap::new());
    let workers = max_in_flight.max(1).min(limit);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if failed.load(Ordering::SeqCst) || produced.load(Ordering::SeqCst) >= target {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= limit {
                    break;
                }
                let r = work(i);
                match &r {
                    Ok(t) => {
                        produced.fetch_add(weight(t), Ordering::SeqCst);
                    }
                    Err(_) => failed.store(true, Ordering::SeqCst),
                }
                slots.lock().unwrap().insert(i, r);
            });
        }
    });
    let mut out = PoolOutcome { done: Vec::new(), error: None };
    for (i, r) in slots.into_inner().unwrap() {
        if i != out.done.len() {
            break;
        }
        match r {
            Ok(t) => out.done.push(t),
            Err(e) => {
                out.error = Some((i, e));
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_stops_at_target_and_keeps_order() {
        let out = run_pool(3, 100, 10, |n: &usize| *n, |i| Ok(i % 3));
        let total: usize = out.done.iter().sum();
        assert!(total >= 10);
        for (i, v) in out.done.iter().enumerate() {
            assert_eq!(*v, i % 3);
        }
        assert!(out.error.is_none());
    }

    #[test]
    fn pool_reports_first_failure() {
        let out = run_pool(1, 10, usize::MAX, |_: &usize| 1, |i| if i == 4 { Err(LlmError::Transport("down".into())) } else { Ok(i) });
        assert_eq!(out.done, vec![0, 1, 2, 3]);
        assert_eq!(out.error.map(|(i, _)| i), Some(4));
    }

    #[test]
    fn pool_with_no_work() {
        let out = run_pool(4, 0, 10, |_: &usize| 1, Ok);
        assert!(out.done.is_empty());
    }
}
