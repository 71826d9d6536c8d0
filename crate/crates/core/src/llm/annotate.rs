use std::collections::BTreeMap;
use std::time::Duration;

use serde_json::json;

use super::client::{ChatClient, ChatMessage, ChatRequest, RetryPolicy};
use super::markup::{parse_annotated_output, Annotation};
use super::prompt::{build_annotation_prompt, DEFAULT_TAG_INSTRUCTIONS};
use super::{run_pool, LlmError};
use crate::corpus::{AnnotatedSentence, Corpus};

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationJob {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    /// Sentences per request.
    pub batch_size: usize,
    pub instructions: String,
    pub max_in_flight: usize,
    pub retry: RetryPolicy,
    pub timeout: Duration,
    pub api_key: Option<String>,
}

impl AnnotationJob {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        AnnotationJob {
            endpoint: endpoint.into(),
            model: model.into(),
            temperature: 1.0,
            batch_size: 10,
            instructions: DEFAULT_TAG_INSTRUCTIONS.to_string(),
            max_in_flight: 4,
            retry: RetryPolicy::default(),
            timeout: Duration::from_secs(120),
            api_key: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnotationOutcome {
    /// Annotated sentences, in input order. Ids, source and split are kept;
    /// spans come from the model.
    pub corpus: Corpus,
    /// Dropped tag labels and how often they occurred.
    pub unknown_tags: BTreeMap<String, usize>,
    /// Ids whose text could not be found in the reply; absent from `corpus`.
    pub unmatched: Vec<String>,
    pub requests: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("annotation stopped after {} sentences: {cause}", partial.corpus.len())]
pub struct AnnotationError {
    pub partial: AnnotationOutcome,
    pub cause: LlmError,
}

fn strip_number(line: &str) -> &str {
    let digits = line.chars().take_while(char::is_ascii_digit).count();
    let rest = &line[digits..];
    match rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) {
        Some(r) if digits > 0 => r.trim_start(),
        _ => line,
    }
}

/// Parsed reply lines whose markup is well formed.
fn parse_reply(reply: &str) -> Vec<Annotation> {
    reply
        .lines()
        .map(|l| strip_number(l.trim()))
        .filter(|l| !l.is_empty())
        .filter_map(|l| parse_annotated_output(l).ok())
        .collect()
}

/// Sends the corpus to the endpoint in batches and reads the spans back from
/// the inline markup. A sentence is matched to the reply line whose markup-free
/// text is identical, preferring the line at its own position.
#[allow(clippy::result_large_err)]
pub fn annotate_batch(job: &AnnotationJob, corpus: &Corpus) -> Result<AnnotationOutcome, AnnotationError> {
    let fail = |cause| AnnotationError {
        partial: AnnotationOutcome::default(),
        cause,
    };
    if job.batch_size == 0 {
        return Err(fail(LlmError::Config("batch size must be at least 1".into())));
    }
    let batches: Vec<&[AnnotatedSentence]> = corpus.sentences.chunks(job.batch_size).collect();
    if let Some(first) = batches.first() {
        let texts: Vec<&str> = first.iter().map(|s| s.text.as_str()).collect();
        build_annotation_prompt(&job.instructions, &texts).map_err(fail)?;
    }
    let client = ChatClient::new(&job.endpoint, job.api_key.clone(), job.retry, job.timeout);
    let pool = run_pool(job.max_in_flight, batches.len(), usize::MAX, |_: &Vec<Annotation>| 0, |i| {
        let texts: Vec<&str> = batches[i].iter().map(|s| s.text.as_str()).collect();
        let prompt = build_annotation_prompt(&job.instructions, &texts)?;
        let request = ChatRequest {
            model: job.model.clone(),
            messages: vec![ChatMessage::user(prompt)],
            temperature: job.temperature,
        };
        Ok(parse_reply(&client.complete(&request)?))
    });

    let mut out = AnnotationOutcome {
        requests: pool.done.len(),
        ..Default::default()
    };
    for (batch, lines) in batches.iter().zip(&pool.done) {
        let mut used = vec![false; lines.len()];
        for (j, s) in batch.iter().enumerate() {
            let same = |k: usize| !used[k] && lines[k].text == s.text;
            let pick = (j < lines.len() && same(j))
                .then_some(j)
                .or_else(|| (0..lines.len()).find(|&k| same(k)));
            let Some(k) = pick else {
                out.unmatched.push(s.id.clone());
                continue;
            };
            used[k] = true;
            for t in &lines[k].unknown_tags {
                *out.unknown_tags.entry(t.clone()).or_default() += 1;
            }
            let annotated = s.clone().with_spans(lines[k].spans.clone());
            out.corpus.sentences.push(annotated);
        }
    }
    out.corpus.provenance.insert(
        "annotation".to_string(),
        json!({
            "endpoint": job.endpoint,
            "model": job.model,
            "temperature": job.temperature,
            "batch_size": job.batch_size,
            "requests": out.requests,
            "unmatched": out.unmatched,
        }),
    );
    match pool.error {
        None => Ok(out),
        Some((_, cause)) => Err(AnnotationError { partial: out, cause }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ErrorTag, Source, Span};
    use crate::llm::mock::{MockChatServer, MockReply};

    #[test]
    fn spans_come_back_from_markup() {
        let server = MockChatServer::start(|_| {
            MockReply::chat(
                "1. Money comes to the <err tag=\"Transliteration\" corr=\"cashier\">cassa</err>.\n\
                 2. Nothing <err tag=\"Spelling\">rong</err> here.",
            )
        })
        .unwrap();
        let corpus = Corpus::new(vec![
            AnnotatedSentence::new("a", "Money comes to the cassa.", Source::Llm),
            AnnotatedSentence::new("b", "Nothing rong here.", Source::Llm),
            AnnotatedSentence::new("c", "Not in the reply.", Source::Llm),
        ]);
        let mut job = AnnotationJob::new(server.endpoint(), "m");
        job.retry = RetryPolicy::none();
        let out = annotate_batch(&job, &corpus).unwrap();
        assert_eq!(out.corpus.len(), 2);
        assert_eq!(
            out.corpus.sentences[0].spans,
            vec![Span::new(19, 24, ErrorTag::Transliteration, Some("cashier".into()))]
        );
        assert!(out.corpus.sentences[1].spans.is_empty());
        assert_eq!(out.unknown_tags["Spelling"], 1);
        assert_eq!(out.unmatched, ["c"]);
        let prompt = server.requests()[0].body["messages"][0]["content"].as_str().unwrap().to_string();
        assert!(prompt.contains("3. Not in the reply."));
    }
}
