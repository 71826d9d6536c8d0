//! Whitespace tokenizer with punctuation peeling and a lexicon-driven coarse
//! part-of-speech tagger.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::lexicon::{self, Lexicon};
use super::model::AnnotatedSentence;
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoarsePos {
    Noun,
    VerbPast,
    VerbBase,
    Verb3sg,
    Pronoun,
    Number,
    Year,
    Punct,
    Other,
}

impl CoarsePos {
    pub fn as_str(self) -> &'static str {
        match self {
            CoarsePos::Noun => "noun",
            CoarsePos::VerbPast => "verb-past",
            CoarsePos::VerbBase => "verb-base",
            CoarsePos::Verb3sg => "verb-3sg",
            CoarsePos::Pronoun => "pronoun",
            CoarsePos::Number => "number",
            CoarsePos::Year => "year",
            CoarsePos::Punct => "punct",
            CoarsePos::Other => "other",
        }
    }
}

impl fmt::Display for CoarsePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoarsePos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "noun" => CoarsePos::Noun,
            "verb-past" => CoarsePos::VerbPast,
            "verb-base" => CoarsePos::VerbBase,
            "verb-3sg" => CoarsePos::Verb3sg,
            "pronoun" => CoarsePos::Pronoun,
            "number" => CoarsePos::Number,
            "year" => CoarsePos::Year,
            "punct" => CoarsePos::Punct,
            "other" => CoarsePos::Other,
            other => return Err(format!("unknown coarse_pos `{other}`")),
        })
    }
}

/// A token with char offsets into its sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub pos: CoarsePos,
}

impl Token {
    pub fn lower(&self) -> String {
        self.surface.to_lowercase()
    }
}

/// Tokenizes and tags `text` with the bundled lexicon.
pub fn tokenize(text: &str) -> Vec<Token> {
    tokenize_with(text, Lexicon::bundled())
}

pub fn tokenize_with(text: &str, lex: &Lexicon) -> Vec<Token> {
    let mut tokens = split_tokens(text);
    tag_tokens(&mut tokens, lex);
    tokens
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

fn split_tokens(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        let end = i;
        let mut lo = start;
        while lo < end && is_punct(chars[lo]) {
            tokens.push(make_token(&chars, lo, lo + 1));
            lo += 1;
        }
        if lo == end {
            continue;
        }
        let mut hi = end;
        while hi > lo && is_punct(chars[hi - 1]) {
            hi -= 1;
        }
        tokens.push(make_token(&chars, lo, hi));
        for k in hi..end {
            tokens.push(make_token(&chars, k, k + 1));
        }
    }
    tokens
}

fn make_token(chars: &[char], start: usize, end: usize) -> Token {
    Token {
        surface: chars[start..end].iter().collect(),
        start,
        end,
        pos: CoarsePos::Other,
    }
}

fn is_year(w: &str) -> bool {
    w.len() == 4
        && w.bytes().all(|b| b.is_ascii_digit())
        && w.parse::<u32>().is_ok_and(|y| (1000..=2099).contains(&y))
}

fn is_number(w: &str) -> bool {
    w.chars().any(|c| c.is_ascii_digit())
        && w.chars().all(|c| c.is_ascii_digit() || ".,-/%".contains(c))
}

/// Assigns `pos` to every token from its surface and left context.
pub fn tag_tokens(tokens: &mut [Token], lex: &Lexicon) {
    let mut prev_lower = String::new();
    let mut prev_pos = CoarsePos::Punct;
    for tok in tokens.iter_mut() {
        let lower = tok.lower();
        tok.pos = classify(&lower, &tok.surface, &prev_lower, prev_pos, lex);
        prev_lower = lower;
        prev_pos = tok.pos;
    }
}

fn classify(w: &str, surface: &str, prev: &str, prev_pos: CoarsePos, lex: &Lexicon) -> CoarsePos {
    if surface.chars().all(is_punct) {
        return CoarsePos::Punct;
    }
    if is_year(w) {
        return CoarsePos::Year;
    }
    if is_number(w) {
        return CoarsePos::Number;
    }
    if lexicon::is_pronoun(w) {
        return CoarsePos::Pronoun;
    }
    let after_determiner = lexicon::is_determiner(prev);
    if let Some(verb) = lex.irregular_past(w) {
        if after_determiner {
            return CoarsePos::Noun;
        }
        // cut, put, read, ...: the surface alone cannot mark past tense.
        return if verb.base == w || lex.is_base(w) {
            CoarsePos::VerbBase
        } else {
            CoarsePos::VerbPast
        };
    }
    if lex.is_irregular_third_singular(w) && !after_determiner {
        return CoarsePos::Verb3sg;
    }
    if lexicon::is_function_word(w) {
        return CoarsePos::Other;
    }
    if !w.chars().any(char::is_alphabetic) {
        return CoarsePos::Other;
    }
    if w.len() >= 4 && w.ends_with("ed") && !lexicon::is_noun_ed(w) {
        return if after_determiner { CoarsePos::Other } else { CoarsePos::VerbPast };
    }
    if lex.is_base(w) {
        return if after_determiner {
            CoarsePos::Noun
        } else if lexicon::is_modal_or_to(prev)
            || matches!(prev_pos, CoarsePos::Pronoun | CoarsePos::Noun)
        {
            CoarsePos::VerbBase
        } else {
            CoarsePos::Noun
        };
    }
    if w.ends_with('s')
        && matches!(prev_pos, CoarsePos::Noun | CoarsePos::Pronoun)
        && !after_determiner
        && lex.base_of_third_singular(w).is_some()
    {
        return CoarsePos::Verb3sg;
    }
    if lexicon::looks_adjectival(w) {
        return CoarsePos::Other;
    }
    CoarsePos::Noun
}

#[derive(Debug, thiserror::Error)]
pub enum PretaggedError {
    #[error("pre-tagged line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("pre-tagged tokens for `{id}` do not match the sentence text at [{start}, {end})")]
    Mismatch { id: String, start: usize, end: usize },
}

/// Reads a pre-tagged TSV (`sent_id  token  start  end  coarse_pos`), grouped by
/// sentence id in file order. A first line starting with `sent_id` is a header.
pub fn read_pretagged(content: &str) -> Result<HashMap<String, Vec<Token>>, PretaggedError> {
    let mut out: HashMap<String, Vec<Token>> = HashMap::new();
    for (i, raw) in content.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || (i == 0 && line.starts_with("sent_id")) {
            continue;
        }
        let err = |message: String| PretaggedError::Line { line: i + 1, message };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(err(format!("expected 5 columns, found {}", cols.len())));
        }
        let start: usize = cols[2].parse().map_err(|_| err(format!("bad start `{}`", cols[2])))?;
        let end: usize = cols[3].parse().map_err(|_| err(format!("bad end `{}`", cols[3])))?;
        if end <= start {
            return Err(err(format!("end {end} must exceed start {start}")));
        }
        let pos: CoarsePos = cols[4].parse().map_err(err)?;
        out.entry(cols[0].to_string()).or_default().push(Token {
            surface: cols[1].to_string(),
            start,
            end,
            pos,
        });
    }
    Ok(out)
}

/// Checks that pre-tagged tokens are ordered, disjoint, and match the text.
pub fn check_tokens(sentence: &AnnotatedSentence, tokens: &[Token]) -> Result<(), PretaggedError> {
    let mut last_end = 0;
    for t in tokens {
        let ok = t.start >= last_end
            && text::char_slice(&sentence.text, t.start, t.end) == Some(t.surface.as_str());
        if !ok {
            return Err(PretaggedError::Mismatch {
                id: sentence.id.clone(),
                start: t.start,
                end: t.end,
            });
        }
        last_end = t.end;
    }
    Ok(())
}
