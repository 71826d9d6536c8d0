//! Past → present simple rewriting next to year expressions.

use rand::Rng;

use super::{apply_replacement, InjectError};
use crate::corpus::lexicon::{CLAUSE_CONJUNCTIONS, IRREGULAR_PLURALS, PLURAL_PRONOUNS, SINGULAR_IN_S};
use crate::corpus::{tokenize_with, AnnotatedSentence, CoarsePos, ErrorTag, Lexicon, Token};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Number {
    Singular,
    Plural,
}

/// Present simple form of a past-tense verb, using the bundled verb tables.
pub fn to_present_simple(verb: &str, number: Number) -> Result<String, InjectError> {
    to_present_simple_with(verb, number, Lexicon::bundled())
}

pub fn to_present_simple_with(verb: &str, number: Number, lex: &Lexicon) -> Result<String, InjectError> {
    let lower = verb.to_lowercase();
    let out = if let Some(irr) = lex.irregular_past(&lower) {
        match (irr.base.as_str(), number) {
            ("be", Number::Singular) => "is".to_string(),
            ("be", Number::Plural) => "are".to_string(),
            (_, Number::Singular) => irr.third_singular.clone(),
            (base, Number::Plural) => base.to_string(),
        }
    } else {
        let base = regular_base(&lower, lex).ok_or_else(|| InjectError::NotPast(verb.to_string()))?;
        match number {
            Number::Singular => third_singular(&base),
            Number::Plural => base,
        }
    };
    Ok(if text::starts_uppercase(verb) { text::capitalize(&out) } else { out })
}

fn is_vowel(c: char) -> bool {
    "aeiou".contains(c)
}

/// Base form of a regular `-ed` past. Known bases win; otherwise spelling
/// heuristics decide.
fn regular_base(past: &str, lex: &Lexicon) -> Option<String> {
    if past.chars().count() < 4 || !past.chars().all(|c| c.is_alphabetic() || c == '-') {
        return None;
    }
    if let Some(stem) = past.strip_suffix("ied") {
        // died, lied, tied
        if stem.chars().count() <= 1 {
            return Some(format!("{stem}ie"));
        }
        return Some(format!("{stem}y"));
    }
    let stem = past.strip_suffix("ed")?;
    let chars: Vec<char> = stem.chars().collect();
    let undoubled = match chars.as_slice() {
        [.., a, b] if a == b && !is_vowel(*a) => Some(chars[..chars.len() - 1].iter().collect::<String>()),
        _ => None,
    };
    let with_e = format!("{stem}e");
    let candidates = [Some(with_e.clone()), Some(stem.to_string()), undoubled.clone()];
    if let Some(known) = candidates.iter().flatten().find(|c| lex.is_base(c)) {
        return Some(known.clone());
    }
    // stopped → stop, but add/err/fill keep the double letter
    if let Some(u) = undoubled {
        if !matches!(chars.last(), Some('l' | 's' | 'f' | 'z')) {
            return Some(u);
        }
        return Some(stem.to_string());
    }
    let needs_e = matches!(chars.last(), Some('v' | 'c' | 'u' | 'z'))
        || stem.ends_with("at")
        || stem.ends_with("iz")
        || stem.ends_with("ur")
        || stem.ends_with("as") && !stem.ends_with("ass");
    Some(if needs_e { with_e } else { stem.to_string() })
}

fn third_singular(base: &str) -> String {
    if base == "have" {
        return "has".into();
    }
    if ["s", "x", "z", "ch", "sh", "o"].iter().any(|s| base.ends_with(s)) {
        return format!("{base}es");
    }
    if let Some(stem) = base.strip_suffix('y') {
        if stem.chars().last().is_some_and(|c| !is_vowel(c)) {
            return format!("{stem}ies");
        }
    }
    format!("{base}s")
}

/// Grammatical number of the subject for the verb at `verb_index`: the
/// nearest preceding noun or pronoun decides; singular when there is none.
pub fn subject_number(tokens: &[Token], verb_index: usize) -> Number {
    let subject = tokens[..verb_index]
        .iter()
        .rev()
        .find(|t| matches!(t.pos, CoarsePos::Noun | CoarsePos::Pronoun));
    let Some(subject) = subject else {
        return Number::Singular;
    };
    let w = subject.lower();
    let plural = match subject.pos {
        CoarsePos::Pronoun => PLURAL_PRONOUNS.contains(&w.as_str()),
        _ => {
            IRREGULAR_PLURALS.contains(&w.as_str())
                || (w.ends_with('s') && !w.ends_with("ss") && !SINGULAR_IN_S.contains(&w.as_str()))
        }
    };
    if plural {
        Number::Plural
    } else {
        Number::Singular
    }
}

fn is_clause_boundary(t: &Token) -> bool {
    match t.pos {
        CoarsePos::Punct => matches!(t.surface.as_str(), "," | ";" | ":" | "." | "!" | "?"),
        _ => CLAUSE_CONJUNCTIONS.contains(&t.lower().as_str()),
    }
}

/// Rewrites the past verb nearest to a year in the same clause into the
/// present simple and marks it TenseSemantics.
pub fn inject_tense<R: Rng + ?Sized>(sentence: &AnnotatedSentence, rng: &mut R) -> Option<AnnotatedSentence> {
    let lex = Lexicon::bundled();
    let tokens = tokenize_with(&sentence.text, lex);
    inject_tense_with(sentence, &tokens, lex, rng)
}

/// As [`inject_tense`] over caller-supplied tokens (for example pre-tagged ones).
pub fn inject_tense_with<R: Rng + ?Sized>(
    sentence: &AnnotatedSentence,
    tokens: &[Token],
    lex: &Lexicon,
    rng: &mut R,
) -> Option<AnnotatedSentence> {
    let mut clause = Vec::with_capacity(tokens.len());
    let mut current = 0usize;
    for t in tokens {
        if is_clause_boundary(t) {
            current += 1;
            clause.push(None);
        } else {
            clause.push(Some(current));
        }
    }
    let mut candidates: Vec<(usize, String)> = Vec::new();
    for (y, _) in tokens.iter().enumerate().filter(|(_, t)| t.pos == CoarsePos::Year) {
        let nearest = tokens
            .iter()
            .enumerate()
            .filter(|(i, t)| {
                t.pos == CoarsePos::VerbPast
                    && clause[*i].is_some()
                    && clause[*i] == clause[y]
                    && !sentence.spans.iter().any(|s| s.overlaps(t.start, t.end))
            })
            .filter_map(|(i, t)| {
                let present = if t.lower() == "was" || t.lower() == "were" {
                    be_present(tokens, i)
                } else {
                    to_present_simple_with(&t.surface, subject_number(tokens, i), lex).ok()?
                };
                Some((i, present))
            })
            .min_by_key(|(i, _)| (i.abs_diff(y), *i));
        if let Some(c) = nearest {
            if !candidates.iter().any(|(i, _)| *i == c.0) {
                candidates.push(c);
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let (i, present) = &candidates[rng.random_range(0..candidates.len())];
    apply_replacement(sentence, tokens[*i].start, tokens[*i].end, present, ErrorTag::TenseSemantics)
}

fn be_present(tokens: &[Token], verb_index: usize) -> String {
    let t = &tokens[verb_index];
    let subject = tokens[..verb_index]
        .iter()
        .rev()
        .find(|t| matches!(t.pos, CoarsePos::Noun | CoarsePos::Pronoun));
    let form = match subject.map(|s| s.lower()) {
        Some(s) if s == "i" => "am",
        _ => match subject_number(tokens, verb_index) {
            Number::Singular => "is",
            Number::Plural => "are",
        },
    };
    if text::starts_uppercase(&t.surface) {
        text::capitalize(form)
    } else {
        form.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Source, Span};

    #[test]
    fn present_forms() {
        assert_eq!(to_present_simple("decreased", Number::Singular).unwrap(), "decreases");
        assert_eq!(to_present_simple("fell", Number::Plural).unwrap(), "fall");
        assert_eq!(to_present_simple("carried", Number::Singular).unwrap(), "carries");
        assert_eq!(to_present_simple("stopped", Number::Plural).unwrap(), "stop");
        assert_eq!(to_present_simple("watched", Number::Singular).unwrap(), "watches");
        assert_eq!(to_present_simple("went", Number::Singular).unwrap(), "goes");
        assert_eq!(to_present_simple("added", Number::Singular).unwrap(), "adds");
        assert_eq!(to_present_simple("was", Number::Plural).unwrap(), "are");
        assert_eq!(to_present_simple("Rose", Number::Singular).unwrap(), "Rises");
        assert_eq!(to_present_simple("died", Number::Singular).unwrap(), "dies");
    }

    #[test]
    fn non_past_is_an_error() {
        assert!(matches!(to_present_simple("table", Number::Singular), Err(InjectError::NotPast(_))));
        assert!(to_present_simple("red", Number::Singular).is_err());
    }

    #[test]
    fn share_decreases() {
        let s = AnnotatedSentence::new("ex4", "In 1999 the share decreased.", Source::Realec);
        let out = inject_tense(&s, &mut crate::seeded_rng(0)).unwrap();
        assert_eq!(out.text, "In 1999 the share decreases.");
        assert_eq!(out.spans, vec![Span::new(18, 27, ErrorTag::TenseSemantics, Some("decreased".into()))]);
    }

    #[test]
    fn plural_subject_and_clause_limit() {
        let s = AnnotatedSentence::new("x", "In 2000 the rates fell and prices rose.", Source::Realec);
        for seed in 0..10 {
            let out = inject_tense(&s, &mut crate::seeded_rng(seed)).unwrap();
            assert_eq!(out.text, "In 2000 the rates fall and prices rose.");
            assert_eq!(out.spans.len(), 1);
        }
    }

    #[test]
    fn needs_a_year() {
        let s = AnnotatedSentence::new("x", "The share decreased.", Source::Realec);
        assert!(inject_tense(&s, &mut crate::seeded_rng(0)).is_none());
        let s = AnnotatedSentence::new("x", "In 1999, nothing.", Source::Realec);
        assert!(inject_tense(&s, &mut crate::seeded_rng(0)).is_none());
    }

    #[test]
    fn be_agrees() {
        let s = AnnotatedSentence::new("x", "In 2010 the figures were high.", Source::Realec);
        assert_eq!(inject_tense(&s, &mut crate::seeded_rng(0)).unwrap().text, "In 2010 the figures are high.");
        let s = AnnotatedSentence::new("x", "In 2010 the figure was high.", Source::Realec);
        assert_eq!(inject_tense(&s, &mut crate::seeded_rng(0)).unwrap().text, "In 2010 the figure is high.");
    }
}
