use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use l1forge_core::corpus::{filter_min_tokens, import_brat, read_corpus, CorpusStats, Manifest};
use l1forge_core::dictionary::build_dictionary;
use l1forge_core::injectors::{inject_batch, inject_dictionaries, inject_tense, inject_transliteration, NounLexicon, TransliterationTable};
use l1forge_core::metrics::{ngram_novelty, self_bleu};
use l1forge_core::{Corpus, ErrorTag};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn realec() -> Corpus {
    let dir = fixtures().join("realec_sample");
    let mut names: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    names.sort();
    let mut sentences = Vec::new();
    for txt in names {
        let doc = fs::read_to_string(&txt).unwrap();
        let ann = fs::read_to_string(txt.with_extension("ann")).unwrap();
        let id = txt.file_stem().unwrap().to_str().unwrap();
        sentences.extend(import_brat(id, &doc, &ann).unwrap().sentences);
    }
    Corpus::new(sentences)
}

#[test]
fn realec_sample_matches_manifest() {
    let corpus = realec();
    corpus.validate().unwrap();
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(fixtures().join("realec_sample/manifest.json")).unwrap()).unwrap();
    let stats = CorpusStats::compute(&corpus);
    assert_eq!(manifest.check(&stats), []);
}

#[test]
fn filter_drops_exactly_the_short_ids() {
    let clean = read_corpus(fixtures().join("clean_1000.jsonl")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(fixtures().join("clean_1000.manifest.json")).unwrap()).unwrap();
    let short: HashSet<&str> = m["short_ids"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let kept = filter_min_tokens(&clean, 5);
    assert_eq!(kept.len(), clean.len() - short.len());
    for s in &clean.sentences {
        assert_eq!(kept.get(&s.id).is_some(), !short.contains(s.id.as_str()), "{}", s.id);
    }
}

#[test]
fn every_injector_fires_on_the_clean_fixture() {
    let clean = read_corpus(fixtures().join("clean_1000.jsonl")).unwrap();
    let source = realec();
    let dicts: Vec<_> = ErrorTag::ALL
        .iter()
        .map(|t| build_dictionary(&source, *t))
        .filter(|d| !d.is_empty())
        .collect();
    let lex = NounLexicon::bundled();
    let table = TransliterationTable::bundled();
    let tense = inject_batch(&clean, 1, "tense", inject_tense);
    let dict = inject_batch(&clean, 1, "dict", |s, r| inject_dictionaries(s, &dicts, r));
    let translit = inject_batch(&clean, 1, "translit", |s, r| inject_transliteration(s, &lex, &table, r));
    for out in [&tense, &dict, &translit] {
        assert!(out.fired > 100, "only {} fired", out.fired);
        out.corpus.validate().unwrap();
    }
}

#[test]
fn learner_fixture_diversity() {
    let learner = read_corpus(fixtures().join("learner_200.jsonl")).unwrap();
    let texts: Vec<&str> = learner.sentences.iter().map(|s| s.text.as_str()).collect();
    let sb = self_bleu(&texts, 4).unwrap();
    assert!((5.0..=40.0).contains(&sb), "self-BLEU {sb}");
    assert_eq!(ngram_novelty(&texts, &texts, 3).unwrap(), 0.0);
}
