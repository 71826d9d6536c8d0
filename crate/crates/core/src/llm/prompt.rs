//! Fixed prompt texts and prompt assembly.

use std::fmt::Write as _;

use super::LlmError;
use crate::corpus::ErrorTag;

/// Instruction for generating new erroneous sentences from examples.
pub const GENERATION_INSTRUCTION: &str = "Here are some sentences with L1-motivated mistakes. Find the mistakes in these sentences and generate new contexts with different meanings, while retaining the mistakes from the original sentences.";

/// The generation instruction and three rewordings, cycled across requests.
pub const GENERATION_PARAPHRASES: [&str; 4] = [
    GENERATION_INSTRUCTION,
    "The sentences below were written by learners and contain mistakes caused by their native language. Identify these mistakes, then write new sentences on different topics that keep the same mistakes.",
    "Each of the following sentences contains an error that comes from the writer's first language. Spot the errors and compose new sentences with other meanings in which the same kinds of errors are preserved.",
    "Below are example sentences with mistakes influenced by the writer's mother tongue. Work out what the mistakes are and produce fresh sentences with different content that repeat those mistakes.",
];

/// Instruction for annotating interference errors.
pub const ANNOTATION_INSTRUCTION: &str = "Here are sentences that contain mistakes. Some mistakes are caused by interference with the Russian language. Find and highlight such mistakes. Classify the mistakes according to the Instructions. The following sentences are provided as examples.";

/// Bundled description of the tag scheme for annotation prompts.
pub const DEFAULT_TAG_INSTRUCTIONS: &str = "\
CopyingExpression: a Russian phrase or collocation rendered word for word in English.
Synonyms: a wrong English word chosen among several that share one Russian translation.
TenseSemantics: a tense that follows Russian usage rather than English usage.
Transliteration: a Russian word written in Latin letters instead of its English equivalent.
WordFormTransmission: a Russian grammatical feature, such as number, carried over into the English word form.";

const GENERATION_TAIL: &str = "Write each new sentence on a separate line, without numbering or comments.";

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Instruction `paraphrase_index` followed by the numbered examples.
pub fn build_generation_prompt<S: AsRef<str>>(examples: &[S], paraphrase_index: usize) -> Result<String, LlmError> {
    let instruction = GENERATION_PARAPHRASES.get(paraphrase_index).ok_or_else(|| {
        LlmError::Prompt(format!(
            "paraphrase index {paraphrase_index} out of range 0..{}",
            GENERATION_PARAPHRASES.len()
        ))
    })?;
    if examples.is_empty() {
        return Err(LlmError::Prompt("at least one example sentence is required".into()));
    }
    let mut out = format!("{instruction}\n\n");
    for (i, ex) in examples.iter().enumerate() {
        let _ = writeln!(out, "{}. {}", i + 1, one_line(ex.as_ref()));
    }
    let _ = write!(out, "\n{GENERATION_TAIL}");
    Ok(out)
}

/// Annotation instruction, tag-scheme instructions, markup contract, then the
/// numbered sentences.
pub fn build_annotation_prompt<S: AsRef<str>>(instructions: &str, sentences: &[S]) -> Result<String, LlmError> {
    if instructions.trim().is_empty() {
        return Err(LlmError::Prompt("annotation instructions are empty".into()));
    }
    let tags: Vec<&str> = ErrorTag::ALL.iter().map(|t| t.as_str()).collect();
    let mut out = format!("{ANNOTATION_INSTRUCTION}\n\nInstructions:\n{}\n\n", instructions.trim());
    let _ = writeln!(
        out,
        "Mark every such mistake inline as <err tag=\"TAG\" corr=\"CORRECTION\">mistake</err>, where TAG is one of {} and CORRECTION is the intended English text. \
Return every sentence on its own line, in the given order and numbered as given, with no other changes.\n",
        tags.join(", ")
    );
    for (i, s) in sentences.iter().enumerate() {
        let _ = writeln!(out, "{}. {}", i + 1, one_line(s.as_ref()));
    }
    Ok(out)
}
