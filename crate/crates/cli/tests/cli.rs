use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use l1forge_core::corpus::read_corpus;
use l1forge_core::llm::mock::{MockChatServer, MockReply};
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn l1forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l1forge"))
        .args(args)
        .env_remove("L1FORGE_API_KEY")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn clean() -> String {
    fixtures().join("clean_1000.jsonl").to_str().unwrap().to_string()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&l1forge(&["frobnicate"])), 1);
    assert_eq!(code(&l1forge(&["split", "--in", "x.jsonl", "--bogus"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.jsonl");
    let r = l1forge(&["split", "--in", &clean(), "--ratio", "1.5", "--out-train", p(&out), "--out-test", p(&out)]);
    assert_eq!(code(&r), 1);
    let r = l1forge(&["inject", "--method", "dict", "--in", &clean(), "--out", p(&out)]);
    assert_eq!(code(&r), 1);
    assert!(String::from_utf8_lossy(&r.stderr).contains("--dict"));
    assert_eq!(code(&l1forge(&["--help"])), 0);
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.jsonl");
    assert_eq!(code(&l1forge(&["filter", "--in", "/no/such/file.jsonl", "--out", p(&out)])), 2);

    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"id\":\"a\",\"text\":\"abc\",\"source\":\"realec\",\"split\":null,\"spans\":[{\"start\":0,\"end\":9,\"tag\":\"Synonyms\",\"correction\":null}]}\n").unwrap();
    assert_eq!(code(&l1forge(&["stats", "--in", p(&bad)])), 2);

    let manifest = dir.path().join("m.json");
    fs::write(&manifest, r#"{"sentences": 999}"#).unwrap();
    let r = l1forge(&["stats", "--in", &clean(), "--manifest", p(&manifest)]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("sentences: expected 999, found 1000"));
}

#[test]
fn unreachable_endpoint_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen.jsonl");
    // Bind and drop a listener to get a port nobody is serving.
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let r = l1forge(&[
        "gen", "--source", &clean(), "--out", p(&out), "--endpoint", &format!("http://127.0.0.1:{port}"),
        "--model", "m", "--target", "5", "--retries", "0", "--timeout-secs", "5",
    ]);
    assert_eq!(code(&r), 3, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(!out.exists());
}

#[test]
fn seeded_runs_are_byte_identical_and_inputs_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    fs::copy(fixtures().join("clean_1000.jsonl"), &input).unwrap();
    let before = fs::read(&input).unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for out in [&a, &b] {
        let r = l1forge(&["inject", "--method", "translit", "--in", p(&input), "--seed", "9", "--out", p(out)]);
        assert_eq!(code(&r), 0);
    }
    assert_eq!(fs::read(&input).unwrap(), before);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let meta = |x: &Path| fs::read_to_string(l1forge_core::corpus::provenance_path(x)).unwrap();
    assert_eq!(meta(&a).replace("a.jsonl", ""), meta(&b).replace("b.jsonl", ""));
    let c = dir.path().join("c.jsonl");
    l1forge(&["inject", "--method", "translit", "--in", p(&input), "--seed", "10", "--out", p(&c)]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn tense_output_has_one_tense_span_per_sentence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("aug.jsonl");
    assert_eq!(code(&l1forge(&["inject", "--method", "tense", "--in", &clean(), "--seed", "1", "--out", p(&out)])), 0);
    let aug = read_corpus(&out).unwrap();
    assert!(!aug.is_empty());
    for s in &aug.sentences {
        assert_eq!(s.spans.len(), 1);
        assert_eq!(s.spans[0].tag, l1forge_core::ErrorTag::TenseSemantics);
    }
    let runs = &aug.provenance["runs"];
    assert_eq!(runs[0]["config"]["inject"]["seed"], 1);
    assert_eq!(runs[0]["config"]["inject"]["method"], "tense");
}

#[test]
fn split_sizes_follow_the_floor_rule() {
    let dir = tempfile::tempdir().unwrap();
    let (tr, te) = (dir.path().join("t.jsonl"), dir.path().join("e.jsonl"));
    let r = l1forge(&["split", "--in", &clean(), "--ratio", "0.8", "--seed", "7", "--out-train", p(&tr), "--out-test", p(&te)]);
    assert_eq!(code(&r), 0);
    assert_eq!(read_corpus(&tr).unwrap().len(), 800);
    assert_eq!(read_corpus(&te).unwrap().len(), 200);
}

#[test]
fn eval_prints_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("g.jsonl");
    let pred = dir.path().join("p.jsonl");
    fs::write(&gold, "{\"id\":\"a\",\"text\":\"In 1999 the share decreases.\",\"source\":\"realec\",\"split\":null,\"spans\":[{\"start\":18,\"end\":27,\"tag\":\"TenseSemantics\",\"correction\":\"decreased\"}]}\n").unwrap();
    fs::write(&pred, "{\"id\":\"a\",\"text\":\"In 1999 the share decreases.\",\"source\":\"realec\",\"split\":null,\"spans\":[{\"start\":18,\"end\":26,\"tag\":\"TenseSemantics\",\"correction\":null}]}\n").unwrap();
    let strict = l1forge(&["eval", "--gold", p(&gold), "--pred", p(&pred), "--mode", "strict", "--format", "json"]);
    assert_eq!(code(&strict), 0);
    let v: Value = serde_json::from_slice(&strict.stdout).unwrap();
    assert_eq!(v["per_tag"]["TenseSemantics"]["f1"], 0.0);
    assert_eq!(v["mode"], "strict");
    let overlap = l1forge(&["eval", "--gold", p(&gold), "--pred", p(&pred), "--mode", "overlap", "--format", "json"]);
    let v: Value = serde_json::from_slice(&overlap.stdout).unwrap();
    assert_eq!(v["per_tag"]["TenseSemantics"]["f1"], 100.0);
}

#[test]
fn review_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    let sheet = dir.path().join("sheet.tsv");
    let out = dir.path().join("kept.jsonl");
    fs::write(
        &corpus,
        "{\"id\":\"g1\",\"text\":\"One.\",\"source\":\"llm\",\"split\":null,\"spans\":[]}\n{\"id\":\"g2\",\"text\":\"Two.\",\"source\":\"llm\",\"split\":null,\"spans\":[]}\n",
    )
    .unwrap();
    assert_eq!(code(&l1forge(&["review-export", "--in", p(&corpus), "--out", p(&sheet)])), 0);
    let tsv = fs::read_to_string(&sheet).unwrap();
    assert!(tsv.starts_with("id\ttext\ttag\tverdict\n"));
    // Unreviewed rows are an error unless explicitly kept.
    assert_eq!(code(&l1forge(&["review-apply", "--in", p(&corpus), "--sheet", p(&sheet), "--out", p(&out)])), 2);
    fs::write(&sheet, tsv.replacen("\tunreviewed\n", "\taccept\n", 1).replacen("\tunreviewed\n", "\treject\n", 1)).unwrap();
    assert_eq!(code(&l1forge(&["review-apply", "--in", p(&corpus), "--sheet", p(&sheet), "--out", p(&out)])), 0);
    let kept = read_corpus(&out).unwrap();
    assert_eq!(kept.sentences.iter().map(|s| s.id.as_str()).collect::<Vec<_>>(), ["g1"]);
}

#[test]
fn reports_in_both_formats() {
    let learner = fixtures().join("learner_200.jsonl");
    let r = l1forge(&["diversity", "--in", p(&learner), "--reference", &clean(), "--format", "json"]);
    assert_eq!(code(&r), 0);
    let v: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["sample_size"], 200);
    assert!(v["novelty"]["value"].as_f64().unwrap() > 0.5);

    let r = l1forge(&["first-words", "--in", &clean(), "--top", "3", "--sample", "5", "--seed", "1", "--format", "json"]);
    assert_eq!(code(&r), 0);
    let v: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["top"].as_array().unwrap().len(), 3);
    assert_eq!(v["sample"].as_array().unwrap().len(), 5);
    assert_eq!(v["total"], 1000);

    let r = l1forge(&["stats", "--in", &clean()]);
    assert_eq!(code(&r), 0);
    assert!(String::from_utf8_lossy(&r.stdout).contains("TenseSemantics"));
}

#[test]
fn iaa_over_annotator_files() {
    let dir = tempfile::tempdir().unwrap();
    let line = |id: &str, tag: Option<&str>| match tag {
        Some(t) => format!("{{\"id\":\"{id}\",\"text\":\"abcdef\",\"source\":\"realec\",\"split\":null,\"spans\":[{{\"start\":0,\"end\":3,\"tag\":\"{t}\",\"correction\":null}}]}}\n"),
        None => format!("{{\"id\":\"{id}\",\"text\":\"abcdef\",\"source\":\"realec\",\"split\":null,\"spans\":[]}}\n"),
    };
    let a = dir.path().join("ann_a.jsonl");
    let b = dir.path().join("ann_b.jsonl");
    fs::write(&a, [line("1", Some("Synonyms")), line("2", None), line("3", Some("Synonyms")), line("4", None)].concat()).unwrap();
    fs::write(&b, [line("1", Some("Synonyms")), line("2", Some("Synonyms")), line("3", None), line("4", None)].concat()).unwrap();
    let r = l1forge(&["iaa", "--annotator", p(&a), "--annotator", p(&b), "--format", "json"]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["annotators"], serde_json::json!(["ann_a", "ann_b"]));
    // p_o = 1/2, p_e = 1/2 → kappa 0.
    assert!(v["matrix"][0][1].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(code(&l1forge(&["iaa", "--annotator", p(&a)])), 1);
}

#[test]
fn gen_annotate_dedup_against_mock() {
    let dir = tempfile::tempdir().unwrap();
    let server = MockChatServer::start(|req| {
        let prompt = req.body["messages"][0]["content"].as_str().unwrap_or_default();
        if prompt.contains("<err") {
            MockReply::chat("1. The <err tag=\"Synonyms\" corr=\"covered\">overcame</err> distance was long.")
        } else {
            MockReply::chat("The distance was overcame quickly.\nThe distance was overcame quickly.\nThey learned it in 1999.")
        }
    })
    .unwrap();
    let gen = dir.path().join("gen.jsonl");
    let r = l1forge(&[
        "gen", "--source", &clean(), "--out", p(&gen), "--endpoint", &server.endpoint(), "--model", "m",
        "--target", "6", "--max-in-flight", "2",
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let generated = read_corpus(&gen).unwrap();
    assert_eq!(generated.len(), 6);
    assert!(generated.provenance.contains_key("generation"));

    let dedup = dir.path().join("dedup.jsonl");
    assert_eq!(code(&l1forge(&["dedup", "--in", p(&gen), "--out", p(&dedup)])), 0);
    assert_eq!(read_corpus(&dedup).unwrap().len(), 2);

    let ann = dir.path().join("ann.jsonl");
    let one = dir.path().join("one.jsonl");
    fs::write(&one, "{\"id\":\"x\",\"text\":\"The overcame distance was long.\",\"source\":\"llm\",\"split\":null,\"spans\":[]}\n").unwrap();
    let r = l1forge(&["annotate", "--in", p(&one), "--out", p(&ann), "--endpoint", &server.endpoint(), "--model", "m"]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let annotated = read_corpus(&ann).unwrap();
    assert_eq!(annotated.sentences[0].spans[0].start, 4);
    assert_eq!(annotated.sentences[0].spans[0].correction.as_deref(), Some("covered"));
}
