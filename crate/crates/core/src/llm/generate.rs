use std::collections::BTreeMap;
use std::time::Duration;

use serde_json::json;
use sha2::{Digest, Sha256};

use super::client::{ChatClient, ChatMessage, ChatRequest, RetryPolicy};
use super::prompt::{build_generation_prompt, GENERATION_PARAPHRASES};
use super::{run_pool, LlmError};
use crate::corpus::{segment_sentences, AnnotatedSentence, Corpus, Source};

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationJob {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub examples_per_prompt: usize,
    pub paraphrase_count: usize,
    pub target_total: usize,
    pub seed: u64,
    pub max_in_flight: usize,
    /// Upper bound on requests; defaults to `target_total`.
    pub max_requests: Option<usize>,
    pub retry: RetryPolicy,
    pub timeout: Duration,
    pub api_key: Option<String>,
}

impl GenerationJob {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, target_total: usize, seed: u64) -> Self {
        GenerationJob {
            endpoint: endpoint.into(),
            model: model.into(),
            temperature: 1.0,
            examples_per_prompt: 10,
            paraphrase_count: GENERATION_PARAPHRASES.len(),
            target_total,
            seed,
            max_in_flight: 4,
            max_requests: None,
            retry: RetryPolicy::default(),
            timeout: Duration::from_secs(120),
            api_key: None,
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        let bad = |m: String| Err(LlmError::Config(m));
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return bad(format!("temperature must be positive, got {}", self.temperature));
        }
        if self.examples_per_prompt == 0 {
            return bad("examples per prompt must be at least 1".into());
        }
        if self.paraphrase_count == 0 || self.paraphrase_count > GENERATION_PARAPHRASES.len() {
            return bad(format!(
                "paraphrase count must lie in 1..={}, got {}",
                GENERATION_PARAPHRASES.len(),
                self.paraphrase_count
            ));
        }
        if self.max_in_flight == 0 {
            return bad("max in-flight requests must be at least 1".into());
        }
        Ok(())
    }

    fn config_json(&self) -> serde_json::Value {
        json!({
            "endpoint": self.endpoint,
            "model": self.model,
            "temperature": self.temperature,
            "examples_per_prompt": self.examples_per_prompt,
            "paraphrase_count": self.paraphrase_count,
            "target_total": self.target_total,
            "seed": self.seed,
            "max_in_flight": self.max_in_flight,
        })
    }
}

/// Everything that goes into request `index`, derived from the job seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestPlan {
    pub index: usize,
    pub paraphrase_index: usize,
    pub example_ids: Vec<String>,
    pub prompt: String,
    pub prompt_sha256: String,
}

/// Samples the examples for request `index` without replacement, using a
/// generator stream specific to that request.
pub fn plan_request(job: &GenerationJob, source: &Corpus, index: usize) -> Result<RequestPlan, LlmError> {
    if source.len() < job.examples_per_prompt {
        return Err(LlmError::Config(format!(
            "source corpus has {} sentences, fewer than the {} examples per prompt",
            source.len(),
            job.examples_per_prompt
        )));
    }
    let mut rng = crate::seeded_rng(job.seed);
    rng.set_stream(index as u64);
    let picked = rand::seq::index::sample(&mut rng, source.len(), job.examples_per_prompt);
    let examples: Vec<&AnnotatedSentence> = picked.iter().map(|i| &source.sentences[i]).collect();
    let paraphrase_index = index % job.paraphrase_count;
    let texts: Vec<&str> = examples.iter().map(|s| s.text.as_str()).collect();
    let prompt = build_generation_prompt(&texts, paraphrase_index)?;
    let prompt_sha256 = hex::encode(Sha256::digest(prompt.as_bytes()));
    Ok(RequestPlan {
        index,
        paraphrase_index,
        example_ids: examples.iter().map(|s| s.id.clone()).collect(),
        prompt,
        prompt_sha256,
    })
}

fn strip_marker(line: &str) -> &str {
    let digits = line.chars().take_while(char::is_ascii_digit).count();
    if digits > 0 {
        let rest = &line[digits..];
        if let Some(r) = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) {
            if r.starts_with(char::is_whitespace) {
                return r.trim_start();
            }
        }
    }
    for bullet in ["- ", "* ", "• "] {
        if let Some(r) = line.strip_prefix(bullet) {
            return r.trim_start();
        }
    }
    line
}

fn strip_quotes(s: &str) -> &str {
    for (open, close) in [('"', '"'), ('“', '”'), ('«', '»')] {
        if s.chars().count() >= 2 && s.starts_with(open) && s.ends_with(close) {
            return s[open.len_utf8()..s.len() - close.len_utf8()].trim();
        }
    }
    s
}

/// Candidate sentences in a model reply: one per line after removing list
/// markers, quotes and preamble lines ending in `:`. A reply on a single line
/// is split into sentences instead.
pub fn split_candidates(reply: &str) -> Vec<String> {
    let lines: Vec<&str> = reply
        .lines()
        .map(|l| strip_quotes(strip_marker(l.trim())))
        .filter(|l| !l.is_empty() && !l.ends_with(':'))
        .collect();
    if lines.len() == 1 {
        let line = lines[0];
        let chars: Vec<char> = line.chars().collect();
        return segment_sentences(line)
            .into_iter()
            .map(|(s, e)| chars[s..e].iter().collect::<String>().trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
    }
    lines.into_iter().map(str::to_string).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOutcome {
    pub corpus: Corpus,
    pub requests: usize,
    /// Replies with no extractable sentence.
    pub empty_replies: usize,
    /// The request bound was hit before reaching the target.
    pub exhausted: bool,
}

/// A transport failure, with everything collected before the failing request.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("generation stopped after {} candidates: {cause}", partial.corpus.len())]
pub struct GenerationError {
    pub partial: GenerationOutcome,
    pub cause: LlmError,
}

/// Collects `target_total` candidates from the endpoint. Requests run
/// concurrently up to `max_in_flight`; candidates are numbered in request
/// order, so the output does not depend on completion order.
pub fn generate_batch(job: &GenerationJob, source: &Corpus) -> Result<GenerationOutcome, GenerationError> {
    let fail = |cause| GenerationError {
        partial: GenerationOutcome {
            corpus: Corpus::default(),
            requests: 0,
            empty_replies: 0,
            exhausted: false,
        },
        cause,
    };
    job.validate().map_err(fail)?;
    if job.target_total > 0 {
        plan_request(job, source, 0).map_err(fail)?;
    }
    let client = ChatClient::new(&job.endpoint, job.api_key.clone(), job.retry, job.timeout);
    let limit = if job.target_total == 0 { 0 } else { job.max_requests.unwrap_or(job.target_total) };
    let pool = run_pool(
        job.max_in_flight,
        limit,
        job.target_total,
        |(_, candidates): &(RequestPlan, Vec<String>)| candidates.len(),
        |i| {
            let plan = plan_request(job, source, i)?;
            let request = ChatRequest {
                model: job.model.clone(),
                messages: vec![ChatMessage::user(plan.prompt.clone())],
                temperature: job.temperature,
            };
            let reply = client.complete(&request)?;
            Ok((plan, split_candidates(&reply)))
        },
    );

    let mut sentences = Vec::new();
    let mut items = serde_json::Map::new();
    let mut empty_replies = 0;
    'outer: for (plan, candidates) in &pool.done {
        if candidates.is_empty() {
            empty_replies += 1;
        }
        for c in candidates {
            if sentences.len() >= job.target_total {
                break 'outer;
            }
            let id = format!("gen-{:06}", sentences.len());
            items.insert(
                id.clone(),
                json!({
                    "request": plan.index,
                    "paraphrase_index": plan.paraphrase_index,
                    "prompt_sha256": plan.prompt_sha256,
                    "example_ids": plan.example_ids,
                }),
            );
            sentences.push(AnnotatedSentence::new(id, c.clone(), Source::Llm));
        }
    }
    let mut provenance = BTreeMap::new();
    provenance.insert("generation".to_string(), job.config_json());
    provenance.insert("requests".to_string(), json!(pool.done.len()));
    provenance.insert("empty_replies".to_string(), json!(empty_replies));
    provenance.insert("items".to_string(), serde_json::Value::Object(items));
    let outcome = GenerationOutcome {
        exhausted: pool.error.is_none() && sentences.len() < job.target_total,
        corpus: Corpus { sentences, provenance },
        requests: pool.done.len(),
        empty_replies,
    };
    match pool.error {
        None => Ok(outcome),
        Some((_, cause)) => Err(GenerationError { partial: outcome, cause }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidates_one_per_line() {
        let reply = "Here are the new sentences:\n1. The cassa was closed.\n2) In 2005 the prices grows.\n\n- \"They overcame the river.\"\n";
        assert_eq!(
            split_candidates(reply),
            ["The cassa was closed.", "In 2005 the prices grows.", "They overcame the river."]
        );
    }

    #[test]
    fn single_line_reply_is_segmented() {
        assert_eq!(split_candidates("First one here. Second one there."), ["First one here.", "Second one there."]);
        assert!(split_candidates("  \n\n").is_empty());
    }

    #[test]
    fn numbers_without_marker_are_kept() {
        assert_eq!(split_candidates("1999 was a year.\n2000 too."), ["1999 was a year.", "2000 too."]);
    }

    #[test]
    fn job_validation() {
        let mut job = GenerationJob::new("http://x", "m", 10, 1);
        assert!(job.validate().is_ok());
        job.temperature = 0.0;
        assert!(job.validate().is_err());
        job.temperature = 1.0;
        job.paraphrase_count = 5;
        assert!(job.validate().is_err());
    }
}
