use std::collections::{BTreeMap, HashMap};
use std::fmt::{Display, Write as _};
use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::anyhow;
use serde_json::{json, Value};

use l1forge_core::corpus::{
    check_tokens, filter_min_tokens, import_brat, read_corpus, read_pretagged, split_corpus, write_corpus,
    CorpusStats, Lexicon, Manifest, Token,
};
use l1forge_core::dictionary::{build_dictionary, merge_suggestions, read_dictionaries, write_dictionaries};
use l1forge_core::injectors::{
    build_first_word_table, inject_dictionaries, inject_tense_with, inject_transliteration_with, sample_first_word,
    try_inject_batch, BatchOutcome, HttpTranslator, InjectError, NounLexicon, NounTranslator, TransliterationTable,
};
use l1forge_core::llm::{
    annotate_batch, apply_review, dedup_near_duplicates, export_review_sheet, generate_batch, AnnotationJob,
    GenerationJob, LlmError, RetryPolicy, ReviewSheet, API_KEY_ENV,
};
use l1forge_core::metrics::{
    downsample, iaa_labels, ngram_novelty, pairwise_kappa, self_bleu, span_f1, LabelMode,
};
use l1forge_core::{Corpus, ErrorTag, MatchMode};

use crate::*;

type Outcome = Result<(), Failure>;

fn data<E: Into<anyhow::Error>>(context: impl Display) -> impl FnOnce(E) -> Failure {
    move |e| Failure::Data(e.into().context(context.to_string()))
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

fn llm_failure(e: LlmError) -> Failure {
    match e {
        LlmError::Config(m) => Failure::Usage(m),
        e if e.is_transport() => Failure::Transport(e.into()),
        e => Failure::Data(e.into()),
    }
}

fn read(path: &Path) -> Result<Corpus, Failure> {
    read_corpus(path).map_err(data(format!("reading {}", path.display())))
}

fn write(corpus: &Corpus, path: &Path) -> Outcome {
    write_corpus(corpus, path).map_err(data(format!("writing {}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(data(format!("reading {}", path.display())))
}

fn write_text(path: &Path, content: &str) -> Outcome {
    fs::write(path, content).map_err(data(format!("writing {}", path.display())))
}

/// Appends this invocation's configuration to the corpus provenance.
fn record_run(corpus: &mut Corpus, cli: &Cli, details: Value) {
    let mut entry = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(&cli.command).expect("arguments serialize"),
    });
    if !details.is_null() {
        entry["details"] = details;
    }
    let runs = corpus.provenance.entry("runs".to_string()).or_insert_with(|| json!([]));
    match runs.as_array_mut() {
        Some(list) => list.push(entry),
        None => *runs = json!([entry]),
    }
}

fn print_report(format: Format, json_value: Value, table: String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&json_value).expect("report serializes")),
        Format::Table => print!("{table}"),
    }
}

pub(crate) fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Import(a) => import(cli, a),
        Command::Filter(a) => filter(cli, a),
        Command::BuildDict(a) => build_dict(a),
        Command::Inject(a) => inject(cli, a),
        Command::Gen(a) => gen(cli, a),
        Command::Annotate(a) => annotate(cli, a),
        Command::Dedup(a) => dedup(cli, a),
        Command::ReviewExport(a) => review_export(a),
        Command::ReviewApply(a) => review_apply(cli, a),
        Command::Split(a) => split(cli, a),
        Command::Stats(a) => stats(a),
        Command::Eval(a) => eval(a),
        Command::Iaa(a) => iaa(a),
        Command::Diversity(a) => diversity(a),
        Command::FirstWords(a) => first_words(a),
    }
}

fn import(cli: &Cli, a: &ImportArgs) -> Outcome {
    let entries = fs::read_dir(&a.input).map_err(data(format!("listing {}", a.input.display())))?;
    let mut docs: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    docs.sort();
    if docs.is_empty() {
        return Err(Failure::Data(anyhow!("no .txt documents in {}", a.input.display())));
    }
    let mut corpus = Corpus::default();
    let mut unknown: BTreeMap<String, usize> = BTreeMap::new();
    let (mut discontinuous, mut duplicates) = (0, 0);
    for txt in &docs {
        let ann_path = txt.with_extension("ann");
        let doc_id = txt.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let document = read_text(txt)?;
        let annotations = if ann_path.exists() {
            read_text(&ann_path)?
        } else {
            log::warn!("{}: no annotation file, importing without spans", txt.display());
            String::new()
        };
        let out = import_brat(doc_id, &document, &annotations).map_err(data(format!("importing {}", ann_path.display())))?;
        for (label, n) in &out.unknown_tags {
            *unknown.entry(label.clone()).or_default() += n;
        }
        discontinuous += out.discontinuous_dropped;
        duplicates += out.duplicate_spans;
        corpus.sentences.extend(out.sentences);
    }
    if !unknown.is_empty() {
        let list: Vec<String> = unknown.iter().map(|(l, n)| format!("{l} ×{n}")).collect();
        log::warn!("dropped spans with labels outside the tag set: {}", list.join(", "));
    }
    if discontinuous > 0 {
        log::warn!("dropped {discontinuous} discontinuous spans");
    }
    record_run(
        &mut corpus,
        cli,
        json!({
            "documents": docs.len(),
            "unknown_tags": unknown,
            "discontinuous_dropped": discontinuous,
            "duplicate_spans": duplicates,
        }),
    );
    write(&corpus, &a.out)
}

fn filter(cli: &Cli, a: &FilterArgs) -> Outcome {
    let input = read(&a.input)?;
    let mut out = filter_min_tokens(&input, a.min_tokens);
    let dropped = input.len() - out.len();
    record_run(&mut out, cli, json!({ "dropped": dropped }));
    write(&out, &a.out)
}

fn build_dict(a: &BuildDictArgs) -> Outcome {
    let corpus = read(&a.input)?;
    let tags: Vec<ErrorTag> = if a.tags.is_empty() {
        ErrorTag::ALL.to_vec()
    } else {
        a.tags
            .iter()
            .map(|t| t.parse().map_err(|e| usage(format!("{e}"))))
            .collect::<Result<_, _>>()?
    };
    let suggestions = a.suggestions.as_deref().map(read_text).transpose()?;
    let mut dicts = Vec::new();
    for tag in tags {
        let mut dict = build_dictionary(&corpus, tag);
        if let Some(s) = &suggestions {
            let (merged, report) = merge_suggestions(&dict, s).map_err(data("reading suggestions"))?;
            if report.self_mappings_dropped > 0 {
                log::warn!("{tag}: ignored {} self-mapping suggestions", report.self_mappings_dropped);
            }
            dict = merged;
        }
        if dict.is_empty() {
            log::warn!("{tag}: no entries");
        } else {
            dicts.push(dict);
        }
    }
    write_text(&a.out, &write_dictionaries(&dicts))
}

/// Pre-tagged tokens if given, else the built-in tokenizer's.
struct TokenSource {
    pretagged: Option<HashMap<String, Vec<Token>>>,
}

impl TokenSource {
    fn load(path: Option<&Path>, corpus: &Corpus) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(TokenSource { pretagged: None });
        };
        let map = read_pretagged(&read_text(path)?).map_err(data(format!("reading {}", path.display())))?;
        for s in &corpus.sentences {
            if let Some(tokens) = map.get(&s.id) {
                check_tokens(s, tokens).map_err(data(format!("checking {}", path.display())))?;
            }
        }
        Ok(TokenSource { pretagged: Some(map) })
    }

    fn tokens(&self, s: &l1forge_core::AnnotatedSentence) -> Vec<Token> {
        match self.pretagged.as_ref().and_then(|m| m.get(&s.id)) {
            Some(t) => t.clone(),
            None => l1forge_core::corpus::tokenize(&s.text),
        }
    }
}

fn inject(cli: &Cli, a: &InjectArgs) -> Outcome {
    let input = read(&a.input)?;
    let tokens = TokenSource::load(a.pretagged.as_deref(), &input)?;
    let suffix = match a.method {
        Method::Dict => "dict",
        Method::Tense => "tense",
        Method::Translit => "translit",
    };
    let outcome: BatchOutcome = match a.method {
        Method::Dict => {
            let path = a.dict.as_deref().ok_or_else(|| usage("--method dict needs --dict"))?;
            let dicts = read_dictionaries(&read_text(path)?).map_err(data(format!("reading {}", path.display())))?;
            if dicts.is_empty() {
                return Err(Failure::Data(anyhow!("{} holds no dictionary entries", path.display())));
            }
            try_inject_batch::<_, InjectError>(&input, a.seed, suffix, |s, rng| Ok(inject_dictionaries(s, &dicts, rng)))
                .map_err(data("dictionary injection"))?
        }
        Method::Tense => {
            let lex = Lexicon::bundled();
            try_inject_batch::<_, InjectError>(&input, a.seed, suffix, |s, rng| {
                Ok(inject_tense_with(s, &tokens.tokens(s), lex, rng))
            })
            .map_err(data("tense injection"))?
        }
        Method::Translit => {
            let table = match &a.translit_table {
                Some(p) => TransliterationTable::with_overrides(&read_text(p)?).map_err(data(format!("reading {}", p.display())))?,
                None => TransliterationTable::bundled(),
            };
            let translator: Box<dyn NounTranslator + Sync> = match (&a.translate_endpoint, &a.nouns) {
                (Some(_), Some(_)) => return Err(usage("--translate-endpoint and --nouns are exclusive")),
                (Some(url), None) => {
                    let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
                    Box::new(HttpTranslator::new(url.clone(), key))
                }
                (None, Some(p)) => Box::new(NounLexicon::from_tsv(&read_text(p)?).map_err(data(format!("reading {}", p.display())))?),
                (None, None) => Box::new(NounLexicon::bundled()),
            };
            try_inject_batch(&input, a.seed, suffix, |s, rng| {
                inject_transliteration_with(s, &tokens.tokens(s), translator.as_ref(), &table, rng)
            })
            .map_err(|e| match e {
                InjectError::Translate(_) => Failure::Transport(e.into()),
                e => Failure::Data(e.into()),
            })?
        }
    };
    if outcome.fired == 0 {
        log::warn!("no sentence offered an injection site");
    }
    let mut out = outcome.corpus;
    out.provenance = input.provenance.clone();
    record_run(&mut out, cli, json!({ "fired": outcome.fired, "skipped": outcome.skipped }));
    write(&out, &a.out)
}

fn job_basics(e: &EndpointArgs) -> (RetryPolicy, Duration, Option<String>) {
    let retry = RetryPolicy {
        max_retries: e.retries,
        ..RetryPolicy::default()
    };
    let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
    (retry, Duration::from_secs(e.timeout_secs), key)
}

fn gen(cli: &Cli, a: &GenArgs) -> Outcome {
    let source = read(&a.source)?;
    let (retry, timeout, api_key) = job_basics(&a.endpoint);
    let mut job = GenerationJob::new(&a.endpoint.endpoint, &a.endpoint.model, a.target, a.seed);
    job.temperature = a.endpoint.temperature;
    job.examples_per_prompt = a.examples;
    job.paraphrase_count = a.paraphrases;
    job.max_in_flight = a.endpoint.max_in_flight;
    job.max_requests = a.max_requests;
    job.retry = retry;
    job.timeout = timeout;
    job.api_key = api_key;
    let (mut corpus, failure) = match generate_batch(&job, &source) {
        Ok(out) => {
            if out.exhausted {
                log::warn!(
                    "request budget spent after {} sentences (target {})",
                    out.corpus.len(),
                    a.target
                );
            }
            (out.corpus, None)
        }
        Err(e) => (e.partial.corpus, Some(e.cause)),
    };
    record_run(&mut corpus, cli, json!({ "complete": failure.is_none() }));
    if corpus.is_empty() {
        if let Some(cause) = failure {
            return Err(llm_failure(cause));
        }
    }
    write(&corpus, &a.out)?;
    match failure {
        Some(cause) => {
            log::warn!("partial output written to {}", a.out.display());
            Err(llm_failure(cause))
        }
        None => Ok(()),
    }
}

fn annotate(cli: &Cli, a: &AnnotateArgs) -> Outcome {
    let input = read(&a.input)?;
    let (retry, timeout, api_key) = job_basics(&a.endpoint);
    let mut job = AnnotationJob::new(&a.endpoint.endpoint, &a.endpoint.model);
    job.temperature = a.endpoint.temperature;
    job.batch_size = a.batch_size;
    job.max_in_flight = a.endpoint.max_in_flight;
    job.retry = retry;
    job.timeout = timeout;
    job.api_key = api_key;
    if let Some(p) = &a.instructions {
        job.instructions = read_text(p)?;
    }
    let (out, failure) = match annotate_batch(&job, &input) {
        Ok(out) => (out, None),
        Err(e) => (e.partial, Some(e.cause)),
    };
    if !out.unmatched.is_empty() {
        log::warn!("{} sentences missing from the model replies were dropped", out.unmatched.len());
    }
    if !out.unknown_tags.is_empty() {
        let list: Vec<String> = out.unknown_tags.iter().map(|(l, n)| format!("{l} ×{n}")).collect();
        log::warn!("ignored labels outside the tag set: {}", list.join(", "));
    }
    let mut corpus = out.corpus;
    let mut provenance = input.provenance.clone();
    provenance.append(&mut corpus.provenance);
    corpus.provenance = provenance;
    record_run(
        &mut corpus,
        cli,
        json!({ "complete": failure.is_none(), "unknown_tags": out.unknown_tags }),
    );
    write(&corpus, &a.out)?;
    failure.map_or(Ok(()), |cause| Err(llm_failure(cause)))
}

fn dedup(cli: &Cli, a: &DedupArgs) -> Outcome {
    let input = read(&a.input)?;
    let out = dedup_near_duplicates(&input, a.threshold).map_err(llm_failure)?;
    let mut corpus = out.corpus;
    corpus.provenance = input.provenance.clone();
    let pairs: Vec<Value> = out.dropped.iter().map(|(d, k)| json!({ "dropped": d, "kept": k })).collect();
    record_run(&mut corpus, cli, json!({ "dropped": pairs }));
    write(&corpus, &a.out)
}

fn review_export(a: &ReviewExportArgs) -> Outcome {
    let corpus = read(&a.input)?;
    write_text(&a.out, &export_review_sheet(&corpus).to_tsv())
}

fn review_apply(cli: &Cli, a: &ReviewApplyArgs) -> Outcome {
    let corpus = read(&a.input)?;
    let sheet = ReviewSheet::from_tsv(&read_text(&a.sheet)?).map_err(data(format!("reading {}", a.sheet.display())))?;
    let (mut out, summary) = apply_review(&corpus, &sheet, a.keep_unreviewed).map_err(data("applying review"))?;
    out.provenance = corpus.provenance.clone();
    record_run(
        &mut out,
        cli,
        json!({
            "accepted": summary.accepted,
            "rejected": summary.rejected,
            "unreviewed_kept": summary.unreviewed_kept,
        }),
    );
    write(&out, &a.out)
}

fn split(cli: &Cli, a: &SplitArgs) -> Outcome {
    if !(a.ratio > 0.0 && a.ratio < 1.0) {
        return Err(usage(format!("--ratio must lie strictly between 0 and 1, got {}", a.ratio)));
    }
    let input = read(&a.input)?;
    let (mut train, mut test) = split_corpus(&input, a.ratio, a.seed);
    let sizes = json!({ "train": train.len(), "test": test.len() });
    for part in [&mut train, &mut test] {
        part.provenance = input.provenance.clone();
        record_run(part, cli, sizes.clone());
    }
    write(&train, &a.out_train)?;
    write(&test, &a.out_test)
}

fn stats(a: &StatsArgs) -> Outcome {
    let corpus = read(&a.input)?;
    let st = CorpusStats::compute(&corpus);
    print_report(a.format, st.to_json(), st.to_table());
    if let Some(path) = &a.manifest {
        let manifest: Manifest =
            serde_json::from_str(&read_text(path)?).map_err(data(format!("reading {}", path.display())))?;
        let mismatches = manifest.check(&st);
        if !mismatches.is_empty() {
            let mut msg = format!("{} differs from {}:", a.input.display(), path.display());
            for m in &mismatches {
                let _ = write!(msg, "\n  {m}");
            }
            return Err(Failure::Data(anyhow!(msg)));
        }
    }
    Ok(())
}

fn eval(a: &EvalArgs) -> Outcome {
    let gold = read(&a.gold)?;
    let pred = read(&a.pred)?;
    let mode = match a.mode {
        Mode::Strict => MatchMode::Strict,
        Mode::Overlap => MatchMode::Overlap,
    };
    let report = span_f1(&gold, &pred, mode).map_err(data("scoring"))?;
    print_report(a.format, report.to_json(), report.to_table());
    Ok(())
}

fn iaa(a: &IaaArgs) -> Outcome {
    if a.annotators.len() < 2 {
        return Err(usage("--annotator must be given at least twice"));
    }
    let corpora: Vec<Corpus> = a.annotators.iter().map(|p| read(p)).collect::<Result<_, _>>()?;
    let mode = match a.labels {
        Labels::FirstTag => LabelMode::FirstTag,
        Labels::TagSet => LabelMode::TagSet,
    };
    let labels = iaa_labels(&corpora, mode).map_err(data("aligning annotators"))?;
    let named: Vec<(String, Vec<String>)> = a
        .annotators
        .iter()
        .zip(labels)
        .map(|(p, l)| (p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(), l))
        .collect();
    let report = pairwise_kappa(&named).map_err(data("computing agreement"))?;
    print_report(a.format, report.to_json(), report.to_table());
    Ok(())
}

fn diversity(a: &DiversityArgs) -> Outcome {
    let generated = read(&a.input)?;
    let gen_texts: Vec<String> = generated.sentences.iter().map(|s| s.text.clone()).collect();
    let mut result = json!({ "sentences": gen_texts.len(), "max_n": a.max_n });
    let mut table = String::new();
    match &a.reference {
        None => {
            let sb = self_bleu(&gen_texts, a.max_n).map_err(data("self-BLEU"))?;
            result["self_bleu"] = json!(sb);
            let _ = writeln!(table, "self-BLEU ({} sentences): {sb:.2}", gen_texts.len());
        }
        Some(path) => {
            let reference = read(path)?;
            let ref_texts: Vec<String> = reference.sentences.iter().map(|s| s.text.clone()).collect();
            let size = gen_texts.len().min(ref_texts.len());
            let gen_sample = downsample(&gen_texts, size, a.seed);
            let ref_sample = downsample(&ref_texts, size, a.seed);
            let sb_gen = self_bleu(&gen_sample, a.max_n).map_err(data("self-BLEU"))?;
            let sb_ref = self_bleu(&ref_sample, a.max_n).map_err(data("self-BLEU"))?;
            let novelty = ngram_novelty(&gen_texts, &ref_texts, a.n).map_err(data("novelty"))?;
            result["sample_size"] = json!(size);
            result["self_bleu"] = json!(sb_gen);
            result["reference_self_bleu"] = json!(sb_ref);
            result["novelty"] = json!({ "n": a.n, "value": novelty });
            let _ = writeln!(table, "sample size per side: {size}");
            let _ = writeln!(table, "self-BLEU generated:  {sb_gen:.2}");
            let _ = writeln!(table, "self-BLEU reference:  {sb_ref:.2}");
            let _ = writeln!(table, "{}-gram novelty:      {novelty:.2}", a.n);
        }
    }
    print_report(a.format, result, table);
    Ok(())
}

fn first_words(a: &FirstWordsArgs) -> Outcome {
    let corpus = read(&a.input)?;
    let table = build_first_word_table(&corpus).map_err(data("first-word table"))?;
    let total = table.total() as f64;
    let top: Vec<Value> = table
        .entries()
        .iter()
        .take(a.top)
        .map(|(w, c)| json!({ "word": w, "count": c, "probability": *c as f64 / total }))
        .collect();
    let mut rng = l1forge_core::seeded_rng(a.seed);
    let samples: Vec<&str> = (0..a.sample).map(|_| sample_first_word(&table, &mut rng)).collect();
    let mut text = format!("{:<20}{:>8}{:>10}\n", "word", "count", "p");
    for (w, c) in table.entries().iter().take(a.top) {
        let _ = writeln!(text, "{w:<20}{c:>8}{:>10.4}", *c as f64 / total);
    }
    if !samples.is_empty() {
        let _ = writeln!(text, "\nsample: {}", samples.join(" "));
    }
    print_report(
        a.format,
        json!({ "distinct": table.entries().len(), "total": table.total(), "top": top, "sample": samples }),
        text,
    );
    Ok(())
}
