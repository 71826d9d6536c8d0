use std::collections::HashSet;

use l1forge_core::corpus::{filter_min_tokens, split_corpus, train_size};
use l1forge_core::dictionary::build_dictionary;
use l1forge_core::injectors::{inject_dictionary, inject_tense, inject_transliteration, NounLexicon, TransliterationTable};
use l1forge_core::llm::{dedup_near_duplicates, parse_annotated_output, render_markup};
use l1forge_core::metrics::{cohen_kappa, ngram_novelty, self_bleu, span_f1};
use l1forge_core::{seeded_rng, AnnotatedSentence, Corpus, ErrorTag, MatchMode, Source, Span};
use proptest::prelude::*;

const WORDS: &[&str] = &[
    "the", "share", "price", "rates", "fell", "rose", "decreased", "in", "1999", "2004", "they", "covered",
    "distance", "cashier", "money", "we", "went", "city", "students", "was", "every", "one", "of", "us",
];

fn tag() -> impl Strategy<Value = ErrorTag> {
    prop::sample::select(ErrorTag::ALL.to_vec())
}

fn sentence_text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 1..12).prop_map(|w| {
        let mut s = w.join(" ");
        s.push('.');
        let mut c = s.chars();
        c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
    })
}

/// Spans over a 40-char text with distinct (start, end, tag).
fn spans(max: usize) -> impl Strategy<Value = Vec<Span>> {
    prop::collection::vec((0usize..39, 1usize..8, tag()), 0..max).prop_map(|raw| {
        let mut seen = HashSet::new();
        let mut out: Vec<Span> = raw
            .into_iter()
            .map(|(s, l, t)| Span::new(s, (s + l).min(40), t, None))
            .filter(|s| seen.insert((s.start, s.end, s.tag)))
            .collect();
        out.sort_by_key(|s| (s.start, s.end));
        out
    })
}

fn span_corpus(n: usize) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(spans(6), n).prop_map(|all| {
        Corpus::new(
            all.into_iter()
                .enumerate()
                .map(|(i, sp)| AnnotatedSentence::new(format!("s{i}"), "x".repeat(40), Source::Realec).with_spans(sp))
                .collect(),
        )
    })
}

fn plain_corpus(texts: Vec<String>) -> Corpus {
    Corpus::new(
        texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| AnnotatedSentence::new(format!("c{i}"), t, Source::Realec))
            .collect(),
    )
}

/// The new span's surface replaced by its correction gives back `before`.
fn reverses(before: &AnnotatedSentence, after: &AnnotatedSentence) -> bool {
    if after.spans.len() != before.spans.len() + 1 || after.validate().is_err() {
        return false;
    }
    after.spans.iter().any(|s| {
        let chars: Vec<char> = after.text.chars().collect();
        let restored: String = chars[..s.start]
            .iter()
            .chain(s.correction.as_deref().unwrap_or("").chars().collect::<Vec<_>>().iter())
            .chain(chars[s.end..].iter())
            .collect();
        restored == before.text
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn split_is_a_partition(n in 0usize..300, ratio in 0.0f64..=1.0, seed: u64) {
        let corpus = plain_corpus((0..n).map(|i| format!("sentence {i}")).collect());
        let (train, test) = split_corpus(&corpus, ratio, seed);
        prop_assert_eq!(train.len(), train_size(n, ratio));
        prop_assert_eq!(train.len() + test.len(), n);
        let a: HashSet<_> = train.sentences.iter().map(|s| s.id.clone()).collect();
        let b: HashSet<_> = test.sentences.iter().map(|s| s.id.clone()).collect();
        prop_assert!(a.is_disjoint(&b));
        prop_assert_eq!(a.len() + b.len(), n);
    }

    #[test]
    fn filter_is_idempotent(texts in prop::collection::vec(sentence_text(), 0..30), min in 0usize..8) {
        let c = plain_corpus(texts);
        let once = filter_min_tokens(&c, min);
        prop_assert_eq!(filter_min_tokens(&once, min), once);
    }

    #[test]
    fn swap_exchanges_precision_and_recall(gold in span_corpus(5), pred in span_corpus(5), overlap: bool) {
        let mode = if overlap { MatchMode::Overlap } else { MatchMode::Strict };
        let gp = span_f1(&gold, &pred, mode).unwrap();
        let pg = span_f1(&pred, &gold, mode).unwrap();
        for (t, s) in &gp.per_tag {
            prop_assert_eq!(s.precision, pg.per_tag[t].recall);
            prop_assert_eq!(s.recall, pg.per_tag[t].precision);
            prop_assert!((0.0..=100.0).contains(&s.f1));
        }
    }

    #[test]
    fn overlap_dominates_strict(gold in span_corpus(5), pred in span_corpus(5)) {
        let s = span_f1(&gold, &pred, MatchMode::Strict).unwrap();
        let o = span_f1(&gold, &pred, MatchMode::Overlap).unwrap();
        for (t, st) in &s.per_tag {
            prop_assert!(o.per_tag[t].tp >= st.tp);
            prop_assert!(o.per_tag[t].f1 >= st.f1);
        }
    }

    #[test]
    fn kappa_is_symmetric(pairs in prop::collection::vec((0u8..4, 0u8..4), 1..200)) {
        let (a, b): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        match (cohen_kappa(&a, &b), cohen_kappa(&b, &a)) {
            (Ok(x), Ok(y)) => {
                prop_assert!((x - y).abs() < 1e-12);
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&x));
                prop_assert_eq!(x == 1.0, a == b);
            }
            (Err(x), Err(y)) => prop_assert_eq!(x, y),
            other => prop_assert!(false, "asymmetric result {:?}", other),
        }
    }

    #[test]
    fn novelty_against_itself_is_zero(texts in prop::collection::vec(sentence_text(), 1..20)) {
        if let Ok(v) = ngram_novelty(&texts, &texts, 3) {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn novelty_falls_as_source_grows(
        gen in prop::collection::vec(sentence_text(), 1..10),
        src in prop::collection::vec(sentence_text(), 0..10),
        more in prop::collection::vec(sentence_text(), 0..10),
    ) {
        let bigger: Vec<String> = src.iter().chain(&more).cloned().collect();
        if let (Ok(a), Ok(b)) = (ngram_novelty(&gen, &src, 3), ngram_novelty(&gen, &bigger, 3)) {
            prop_assert!(b <= a);
        }
    }

    #[test]
    fn self_bleu_ignores_order(texts in prop::collection::vec(sentence_text(), 2..15), seed: u64) {
        use rand::seq::SliceRandom;
        let mut shuffled = texts.clone();
        shuffled.shuffle(&mut seeded_rng(seed));
        let a = self_bleu(&texts, 4).unwrap();
        let b = self_bleu(&shuffled, 4).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!((0.0..=100.0 + 1e-9).contains(&a));
    }

    #[test]
    fn dedup_is_idempotent(texts in prop::collection::vec(sentence_text(), 0..25), threshold in 0.3f64..=1.0) {
        let c = plain_corpus(texts);
        let once = dedup_near_duplicates(&c, threshold).unwrap();
        let twice = dedup_near_duplicates(&once.corpus, threshold).unwrap();
        prop_assert!(twice.dropped.is_empty());
        prop_assert_eq!(twice.corpus, once.corpus);
    }

    #[test]
    fn markup_round_trips(words in prop::collection::vec(("[a-z<&>\"]{1,6}", prop::option::of((tag(), prop::option::of("[a-z ]{1,8}")))), 1..10)) {
        let mut text = String::new();
        let mut sp = Vec::new();
        for (w, mark) in words {
            if !text.is_empty() {
                text.push(' ');
            }
            let start = text.chars().count();
            text.push_str(&w);
            if let Some((t, corr)) = mark {
                sp.push(Span::new(start, start + w.chars().count(), t, corr));
            }
        }
        let rendered = render_markup(&text, &sp).unwrap();
        let parsed = parse_annotated_output(&rendered).unwrap();
        prop_assert_eq!(&parsed.text, &text);
        prop_assert_eq!(&parsed.spans, &sp);
        prop_assert_eq!(render_markup(&parsed.text, &parsed.spans).unwrap(), rendered);
    }

    #[test]
    fn dictionary_ignores_corpus_order(seed: u64) {
        use rand::seq::SliceRandom;
        let mut sentences = vec![
            AnnotatedSentence::new("a", "They overcame the distance.", Source::Realec)
                .with_spans(vec![Span::new(5, 13, ErrorTag::Synonyms, Some("covered".into()))]),
            AnnotatedSentence::new("b", "The road was overcame fast.", Source::Realec)
                .with_spans(vec![Span::new(13, 21, ErrorTag::Synonyms, Some("covered".into()))]),
            AnnotatedSentence::new("c", "We passed the distance.", Source::Realec)
                .with_spans(vec![Span::new(3, 9, ErrorTag::Synonyms, Some("covered".into()))]),
            AnnotatedSentence::new("d", "They learned it.", Source::Realec)
                .with_spans(vec![Span::new(5, 12, ErrorTag::Synonyms, Some("studied".into()))]),
        ];
        let before = build_dictionary(&Corpus::new(sentences.clone()), ErrorTag::Synonyms);
        sentences.shuffle(&mut seeded_rng(seed));
        prop_assert_eq!(build_dictionary(&Corpus::new(sentences), ErrorTag::Synonyms), before);
    }

    #[test]
    fn injectors_reverse_and_replay(text in sentence_text(), seed: u64) {
        let s = AnnotatedSentence::new("p", text, Source::Realec);
        let dict = build_dictionary(
            &Corpus::new(vec![AnnotatedSentence::new("d", "They overcame the distance.", Source::Realec)
                .with_spans(vec![Span::new(5, 13, ErrorTag::Synonyms, Some("covered".into()))])]),
            ErrorTag::Synonyms,
        );
        let lex = NounLexicon::bundled();
        let table = TransliterationTable::bundled();
        type Run<'a> = &'a dyn Fn(&mut l1forge_core::Rng) -> Option<AnnotatedSentence>;
        let runs: [Run; 3] = [
            &|r| inject_tense(&s, r),
            &|r| inject_dictionary(&s, &dict, r),
            &|r| inject_transliteration(&s, &lex, &table, r),
        ];
        for run in runs {
            let first = run(&mut seeded_rng(seed));
            prop_assert_eq!(&first, &run(&mut seeded_rng(seed)));
            if let Some(out) = first {
                prop_assert!(reverses(&s, &out), "{:?} -> {:?}", s.text, out);
            }
        }
    }
}
