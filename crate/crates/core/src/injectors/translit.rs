//! Cyrillic romanization and noun transliteration injection.

use std::collections::{BTreeMap, HashMap};
use std::time::Duration;

use rand::Rng;

use super::{apply_replacement, InjectError};
use crate::corpus::{tokenize, AnnotatedSentence, CoarsePos, ErrorTag, Token};
use crate::text;

const NOUN_LEXICON: &str = include_str!("../../data/noun_lexicon.tsv");

const RUSSIAN: [(char, &str); 33] = [
    ('а', "a"), ('б', "b"), ('в', "v"), ('г', "g"), ('д', "d"), ('е', "e"), ('ё', "e"),
    ('ж', "zh"), ('з', "z"), ('и', "i"), ('й', "i"), ('к', "k"), ('л', "l"), ('м', "m"),
    ('н', "n"), ('о', "o"), ('п', "p"), ('р', "r"), ('с', "s"), ('т', "t"), ('у', "u"),
    ('ф', "f"), ('х', "kh"), ('ц', "ts"), ('ч', "ch"), ('ш', "sh"), ('щ', "shch"), ('ъ', ""),
    ('ы', "y"), ('ь', ""), ('э', "e"), ('ю', "yu"), ('я', "ya"),
];

/// Ukrainian and Belarusian letters that turn up in learner text.
const EXTRA: [(char, &str); 5] = [('і', "i"), ('ї', "yi"), ('є', "ye"), ('ґ', "g"), ('ў', "u")];

fn is_cyrillic(c: char) -> bool {
    matches!(c, '\u{0400}'..='\u{052F}' | '\u{1C80}'..='\u{1C8F}' | '\u{2DE0}'..='\u{2DFF}' | '\u{A640}'..='\u{A69F}')
}

fn upper(c: char) -> char {
    c.to_uppercase().next().unwrap_or(c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransliterationTable {
    map: BTreeMap<char, String>,
}

impl Default for TransliterationTable {
    fn default() -> Self {
        Self::bundled()
    }
}

impl TransliterationTable {
    /// Passport-style romanization of the Russian alphabet, both cases.
    pub fn bundled() -> Self {
        let mut table = TransliterationTable { map: BTreeMap::new() };
        for (c, latin) in RUSSIAN.iter().chain(EXTRA.iter()) {
            table.set(*c, latin);
        }
        table
    }

    fn set(&mut self, lower: char, latin: &str) {
        self.map.insert(lower, latin.to_string());
        let up = upper(lower);
        if up != lower {
            self.map.insert(up, text::capitalize(latin));
        }
    }

    /// Bundled table with entries replaced from a `cyrillic  latin` TSV.
    /// A lowercase key also sets its uppercase form unless that has its own line.
    pub fn with_overrides(tsv: &str) -> Result<Self, InjectError> {
        let mut table = Self::bundled();
        let mut explicit = Vec::new();
        for (i, raw) in tsv.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| InjectError::Table {
                what: "transliteration table",
                line: i + 1,
                message,
            };
            let (key, latin) = line.split_once('\t').ok_or_else(|| err("expected `cyrillic<TAB>latin`".into()))?;
            let mut chars = key.trim().chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(err(format!("key `{key}` must be a single letter")));
            };
            if !is_cyrillic(c) {
                return Err(err(format!("key `{c}` is not Cyrillic")));
            }
            let latin = latin.trim();
            if latin.chars().any(is_cyrillic) {
                return Err(err(format!("value `{latin}` contains Cyrillic")));
            }
            explicit.push((c, latin.to_string()));
        }
        for (c, latin) in &explicit {
            if c.is_lowercase() {
                table.set(*c, latin);
            }
        }
        for (c, latin) in explicit {
            if !c.is_lowercase() {
                table.map.insert(c, latin);
            }
        }
        Ok(table)
    }

    pub fn get(&self, c: char) -> Option<&str> {
        self.map.get(&c).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Letter-by-letter romanization. Characters outside the table pass through,
/// except Cyrillic ones, which are dropped.
pub fn transliterate(input: &str, table: &TransliterationTable) -> String {
    let mut out = String::with_capacity(input.len());
    for c in input.chars() {
        match table.get(c) {
            Some(latin) => out.push_str(latin),
            None if is_cyrillic(c) => {}
            None => out.push(c),
        }
    }
    out
}

/// Source of Russian equivalents for English nouns.
pub trait NounTranslator {
    /// Russian form of a lowercase English noun, or `None` when unknown.
    fn translate(&self, noun: &str) -> Result<Option<String>, InjectError>;
}

/// English → Russian noun pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NounLexicon {
    map: BTreeMap<String, String>,
}

impl NounLexicon {
    pub fn bundled() -> Self {
        Self::from_tsv(NOUN_LEXICON).expect("bundled noun lexicon is valid")
    }

    /// Parses `english_noun  russian_noun` lines.
    pub fn from_tsv(tsv: &str) -> Result<Self, InjectError> {
        let mut map = BTreeMap::new();
        for (i, raw) in tsv.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| InjectError::Table {
                what: "noun lexicon",
                line: i + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 2 || cols[0].is_empty() {
                return Err(err(format!("expected 2 tab-separated columns, found {}", cols.len())));
            }
            if cols[0].contains(char::is_whitespace) {
                return Err(err(format!("noun `{}` must be a single word", cols[0])));
            }
            if !cols[1].chars().any(is_cyrillic) {
                return Err(err(format!("`{}` has no Cyrillic letter", cols[1])));
            }
            map.insert(cols[0].to_lowercase(), cols[1].to_string());
        }
        Ok(NounLexicon { map })
    }

    pub fn get(&self, noun: &str) -> Option<&str> {
        self.map.get(&noun.to_lowercase()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl NounTranslator for NounLexicon {
    fn translate(&self, noun: &str) -> Result<Option<String>, InjectError> {
        Ok(self.get(noun).map(str::to_string))
    }
}

/// Translation service speaking the LibreTranslate protocol:
/// `POST {endpoint}/translate` with `{"q","source","target","format"}`,
/// answering `{"translatedText"}`.
#[derive(Debug, Clone)]
pub struct HttpTranslator {
    endpoint: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpTranslator {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .build()
            .into();
        HttpTranslator {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            api_key,
            agent,
        }
    }
}

impl NounTranslator for HttpTranslator {
    fn translate(&self, noun: &str) -> Result<Option<String>, InjectError> {
        let mut body = serde_json::json!({"q": noun, "source": "en", "target": "ru", "format": "text"});
        if let Some(key) = &self.api_key {
            body["api_key"] = key.clone().into();
        }
        let reply: serde_json::Value = self
            .agent
            .post(&format!("{}/translate", self.endpoint))
            .send_json(&body)
            .and_then(|mut r| r.body_mut().read_json())
            .map_err(|e| InjectError::Translate(e.to_string()))?;
        let translated = reply["translatedText"]
            .as_str()
            .ok_or_else(|| InjectError::Translate("reply has no `translatedText`".into()))?
            .trim();
        Ok(translated.chars().any(is_cyrillic).then(|| translated.to_string()))
    }
}

/// Replaces one lexicon noun with the romanized Russian equivalent and marks
/// it Transliteration.
pub fn inject_transliteration<R: Rng + ?Sized>(
    sentence: &AnnotatedSentence,
    lexicon: &NounLexicon,
    table: &TransliterationTable,
    rng: &mut R,
) -> Option<AnnotatedSentence> {
    let tokens = tokenize(&sentence.text);
    match inject_transliteration_with(sentence, &tokens, lexicon, table, rng) {
        Ok(out) => out,
        Err(_) => unreachable!("lexicon lookups cannot fail"),
    }
}

/// Generic form over tokens and translator. Candidate nouns are the noun
/// tokens the translator knows, chosen uniformly.
pub fn inject_transliteration_with<R: Rng + ?Sized, T: NounTranslator + ?Sized>(
    sentence: &AnnotatedSentence,
    tokens: &[Token],
    translator: &T,
    table: &TransliterationTable,
    rng: &mut R,
) -> Result<Option<AnnotatedSentence>, InjectError> {
    let mut cache: HashMap<String, Option<String>> = HashMap::new();
    let mut candidates: Vec<(&Token, String)> = Vec::new();
    for t in tokens.iter().filter(|t| t.pos == CoarsePos::Noun) {
        if sentence.spans.iter().any(|s| s.overlaps(t.start, t.end)) {
            continue;
        }
        let lower = t.lower();
        let russian = match cache.get(&lower) {
            Some(r) => r.clone(),
            None => {
                let r = translator.translate(&lower)?;
                cache.insert(lower.clone(), r.clone());
                r
            }
        };
        let Some(russian) = russian else { continue };
        let latin = transliterate(&russian.to_lowercase(), table);
        if latin.is_empty() || latin == lower || latin.chars().any(char::is_whitespace) {
            continue;
        }
        let latin = if text::starts_uppercase(&t.surface) { text::capitalize(&latin) } else { latin };
        candidates.push((t, latin));
    }
    if candidates.is_empty() {
        return Ok(None);
    }
    let (t, latin) = &candidates[rng.random_range(0..candidates.len())];
    Ok(apply_replacement(sentence, t.start, t.end, latin, ErrorTag::Transliteration))
}
