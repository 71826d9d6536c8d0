//! Closed-class word lists and verb tables behind the heuristic tagger and
//! the tense injector.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

const IRREGULAR_VERBS: &str = include_str!("../../data/irregular_verbs.tsv");
const REGULAR_VERBS: &str = include_str!("../../data/regular_verbs.txt");

pub(crate) const PRONOUNS: &[&str] = &[
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "myself",
    "yourself", "himself", "herself", "itself", "ourselves", "themselves", "everyone",
    "everybody", "someone", "somebody", "anyone", "anybody", "nobody", "everything",
    "something", "anything", "nothing",
];

pub(crate) const PLURAL_PRONOUNS: &[&str] = &["we", "they", "you", "i"];

pub(crate) const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "her", "its",
    "our", "their", "some", "any", "each", "every", "no", "many", "much", "few", "several",
    "all", "both", "another", "other", "such", "whose", "which", "what", "either", "neither",
];

const AUXILIARIES: &[&str] = &[
    "will", "would", "can", "could", "shall", "should", "may", "might", "must", "am", "are",
    "be", "been", "being", "have", "do", "not", "ought",
];

const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "by", "for", "with", "from", "to", "of", "about", "between", "during",
    "after", "before", "since", "until", "over", "under", "into", "through", "among", "above",
    "below", "across", "against", "around", "per", "than", "as", "up", "down", "off", "out",
    "within", "without", "towards", "toward", "despite", "via",
];

const FUNCTION_WORDS: &[&str] = &[
    "and", "but", "or", "nor", "so", "yet", "while", "whereas", "because", "although",
    "though", "if", "when", "where", "whether", "however", "moreover", "therefore", "also",
    "then", "there", "here", "very", "more", "most", "less", "least", "only", "just", "even",
    "still", "too", "again", "almost", "about", "nearly", "approximately", "roughly", "how",
    "why", "who", "whom", "yes", "instead", "already", "often", "never", "always", "sometimes",
    "usually", "rather", "quite", "well", "now", "not",
];

pub(crate) const CLAUSE_CONJUNCTIONS: &[&str] = &["and", "but", "or", "while", "whereas"];

/// `-ed` words that are not verbs.
const NOUN_ED: &[&str] = &[
    "need", "seed", "speed", "bed", "red", "hundred", "shed", "sled", "indeed", "weed", "feed",
    "breed", "greed", "creed", "deed", "reed", "bleed", "shred", "sacred", "naked", "wicked",
    "kindred", "ted", "fled", "led", "wed",
];

/// Nouns ending in `-s` that agree as singular.
pub(crate) const SINGULAR_IN_S: &[&str] = &[
    "news", "analysis", "series", "species", "economics", "physics", "mathematics", "politics",
    "bus", "gas", "crisis", "basis", "status", "process", "business", "class", "glass",
    "success", "access", "progress", "address", "this", "us", "less", "plus", "bonus",
    "census", "campus", "virus", "focus", "consensus", "thesis", "emphasis", "axis", "means",
    "statistics", "is", "was", "has", "does",
];

pub(crate) const IRREGULAR_PLURALS: &[&str] = &[
    "people", "children", "men", "women", "police", "cattle", "feet", "teeth", "mice", "data",
];

const ADJECTIVE_SUFFIXES: &[&str] = &["ous", "ful", "ive", "able", "ible", "less", "ish"];

pub(crate) fn is_determiner(w: &str) -> bool {
    DETERMINERS.contains(&w)
}

pub(crate) fn is_pronoun(w: &str) -> bool {
    PRONOUNS.contains(&w)
}

pub(crate) fn is_function_word(w: &str) -> bool {
    AUXILIARIES.contains(&w) || PREPOSITIONS.contains(&w) || FUNCTION_WORDS.contains(&w) || is_determiner(w)
}

pub(crate) fn is_modal_or_to(w: &str) -> bool {
    w == "to" || AUXILIARIES.contains(&w)
}

pub(crate) fn is_noun_ed(w: &str) -> bool {
    NOUN_ED.contains(&w)
}

pub(crate) fn looks_adjectival(w: &str) -> bool {
    (w.len() > 4 && w.ends_with("ly")) || ADJECTIVE_SUFFIXES.iter().any(|s| w.len() > s.len() + 2 && w.ends_with(s))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrregularVerb {
    pub base: String,
    pub past: String,
    pub third_singular: String,
}

#[derive(Debug, thiserror::Error)]
#[error("verb table line {line}: {message}")]
pub struct LexiconError {
    pub line: usize,
    pub message: String,
}

/// Verb tables: irregular `(base, past, 3sg)` triples plus regular bases.
#[derive(Debug, Clone)]
pub struct Lexicon {
    by_past: HashMap<String, IrregularVerb>,
    by_third: HashMap<String, String>,
    bases: HashSet<String>,
    regular: HashSet<String>,
}

impl Lexicon {
    /// Tables compiled into the crate.
    pub fn bundled() -> &'static Lexicon {
        static BUNDLED: OnceLock<Lexicon> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            Lexicon::from_tables(IRREGULAR_VERBS, REGULAR_VERBS).expect("bundled verb tables are valid")
        })
    }

    /// Parses an irregular-verb TSV (`base  past  third_person_singular`) and a
    /// newline-separated list of regular bases. `#` lines are comments.
    pub fn from_tables(irregular_tsv: &str, regular_list: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon {
            by_past: HashMap::new(),
            by_third: HashMap::new(),
            bases: HashSet::new(),
            regular: HashSet::new(),
        };
        for (i, line) in irregular_tsv.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 3 || cols.iter().any(|c| c.is_empty()) {
                return Err(LexiconError {
                    line: i + 1,
                    message: format!("expected 3 tab-separated columns, found {}", cols.len()),
                });
            }
            let verb = IrregularVerb {
                base: cols[0].to_lowercase(),
                past: cols[1].to_lowercase(),
                third_singular: cols[2].to_lowercase(),
            };
            lex.bases.insert(verb.base.clone());
            lex.by_third.insert(verb.third_singular.clone(), verb.base.clone());
            lex.by_past.entry(verb.past.clone()).or_insert(verb);
        }
        for line in regular_list.lines() {
            let w = line.trim();
            if w.is_empty() || w.starts_with('#') {
                continue;
            }
            lex.regular.insert(w.to_lowercase());
            lex.bases.insert(w.to_lowercase());
        }
        Ok(lex)
    }

    /// Bundled regular verbs with a user-supplied irregular table.
    pub fn with_irregular_table(irregular_tsv: &str) -> Result<Lexicon, LexiconError> {
        Lexicon::from_tables(irregular_tsv, REGULAR_VERBS)
    }

    pub fn irregular_past(&self, word: &str) -> Option<&IrregularVerb> {
        self.by_past.get(word)
    }

    pub fn is_irregular_third_singular(&self, word: &str) -> bool {
        self.by_third.contains_key(word)
    }

    pub fn is_base(&self, word: &str) -> bool {
        self.bases.contains(word)
    }

    pub fn is_regular_base(&self, word: &str) -> bool {
        self.regular.contains(word)
    }

    /// Base form for a regular `-s` / `-es` / `-ies` form.
    pub fn base_of_third_singular(&self, word: &str) -> Option<String> {
        if let Some(base) = self.by_third.get(word) {
            return Some(base.clone());
        }
        let candidates = [
            word.strip_suffix("ies").map(|s| format!("{s}y")),
            word.strip_suffix("es").map(str::to_string),
            word.strip_suffix('s').map(str::to_string),
        ];
        candidates.into_iter().flatten().find(|c| self.bases.contains(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        let lex = Lexicon::bundled();
        assert_eq!(lex.irregular_past("fell").unwrap().base, "fall");
        assert_eq!(lex.irregular_past("rose").unwrap().third_singular, "rises");
        assert_eq!(lex.irregular_past("was").unwrap().base, "be");
        assert!(lex.is_regular_base("decrease"));
        assert!(lex.is_irregular_third_singular("goes"));
        assert_eq!(lex.base_of_third_singular("carries").as_deref(), Some("carry"));
        assert_eq!(lex.base_of_third_singular("watches").as_deref(), Some("watch"));
        assert_eq!(lex.base_of_third_singular("prices"), None);
    }

    #[test]
    fn malformed_table_line_is_reported() {
        let err = Lexicon::with_irregular_table("go\twent\tgoes\nbad line\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
