mod support;

use std::fs;
use std::path::Path;

use lexprobe_core::eval::PredictionRecord;
use lexprobe_core::probe::{ProbeQuestion, SemanticCluster, Split};
use serde_json::Value;
use support::{lexprobe, path};

fn ingest_fig2(dir: &Path) -> std::path::PathBuf {
    let wn = dir.join("wn");
    fs::create_dir(&wn).unwrap();
    support::fig2_wndb(&wn);
    let out = dir.join("graph");
    fs::create_dir(&out).unwrap();
    let r = lexprobe(&["ingest", "wordnet", path(&wn), "--out", path(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    out.join("graph.jsonl")
}

fn read_lines<T: serde::de::DeserializeOwned>(p: &Path) -> Vec<T> {
    fs::read_to_string(p).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn ingest_reports_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = ingest_fig2(tmp.path());
    let report: Value = serde_json::from_str(&fs::read_to_string(graph.with_file_name("ingest_report.json")).unwrap()).unwrap();
    assert_eq!(report["synsets"], 7);
    assert_eq!(report["isa_edges"], 6);
    assert_eq!(report["synsets_with_examples"], 7);
}

#[test]
fn build_is_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = ingest_fig2(tmp.path());
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4", "1"].iter().enumerate() {
        let out = tmp.path().join(format!("b{i}"));
        let r = lexprobe(&[
            "build", "--graph", path(&graph), "--probe", "hypernymy", "--seed", "7", "--threads", threads,
            "--strategies", "sister:2,mixed:1", "--out", path(&out),
        ]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let files: Vec<Vec<u8>> =
            ["probes.jsonl", "clusters.jsonl", "manifest.json"].iter().map(|f| fs::read(out.join(f)).unwrap()).collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let manifest: Value = serde_json::from_slice(&outputs[0][2]).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert!(manifest["reference_ratio"]["concepts"].is_number());
}

#[test]
fn parse_and_config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = ingest_fig2(tmp.path());
    assert_eq!(lexprobe(&["build", "--graph", path(&graph), "--probe", "hypernymy"]).code, 2, "seed is mandatory");
    assert_eq!(lexprobe(&["build", "--graph", path(&graph), "--probe", "nonsense", "--seed", "1"]).code, 2);
    assert_eq!(lexprobe(&["frobnicate"]).code, 2);
    let r = lexprobe(&["build", "--graph", path(&graph), "--probe", "hypernymy", "--seed", "1", "--strategies", "sister:0"]);
    assert_eq!(r.code, 2);

    let bad = tmp.path().join("bad.jsonl");
    fs::write(&bad, "{\"rel\": \"def\"\n").unwrap();
    let r = lexprobe(&["build", "--graph", path(&bad), "--probe", "hypernymy", "--seed", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bad.jsonl:1"), "{}", r.stderr);

    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "[build]\nseed = 4\n").unwrap();
    let r = lexprobe(&["build", "--graph", path(&graph), "--probe", "hypernymy", "--seed", "1", "--config", path(&cfg)]);
    assert_eq!(r.code, 2, "seed under [build] is rejected");
}

#[test]
fn missing_input_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("absent.jsonl");
    let r = lexprobe(&["build", "--graph", path(&missing), "--probe", "hypernymy", "--seed", "1"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert_eq!(lexprobe(&["ingest", "wordnet", path(tmp.path())]).code, 3);
}

#[test]
fn empty_build_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let lex = tmp.path().join("lex.jsonl");
    fs::write(&lex, "{\"word\":\"a\",\"pos\":\"n\",\"definition\":\"the letter\",\"example\":\"an a here\"}\n").unwrap();
    let out = tmp.path().join("g");
    assert_eq!(lexprobe(&["ingest", "lexicon", path(&lex), "--out", path(&out)]).code, 0);
    let r = lexprobe(&["build", "--graph", path(&out.join("graph.jsonl")), "--probe", "wordsense", "--seed", "1"]);
    assert_eq!(r.code, 4, "{}", r.stderr);
}

fn question(i: usize, split: Split, biased: bool) -> ProbeQuestion {
    let answer = (i % 5) as u8;
    let choices: [String; 5] = std::array::from_fn(|j| {
        if biased && j == answer as usize {
            format!("alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu x{i}")
        } else {
            format!("nu xi y{i}z{j}")
        }
    });
    let raw = serde_json::json!({
        "id": format!("q{i:04}"),
        "cluster_id": format!("definitions:c{}.n.01", i / 2),
        "probe_type": "definitions",
        "question": "which one",
        "choices": choices,
        "answer_idx": answer,
        "meta": {"concept": format!("c{}.n.01", i / 2), "hops_k": 0, "distractor_strategy": "random",
                 "distractor_k": 0, "split": split},
    });
    serde_json::from_value(raw).unwrap()
}

fn write_probe_files(dir: &Path, n: usize, biased: bool) -> Vec<ProbeQuestion> {
    let qs: Vec<ProbeQuestion> =
        (0..n).map(|i| question(i, if i < n / 2 { Split::Inoculation } else { Split::Test }, biased)).collect();
    let clusters: Vec<SemanticCluster> = (0..n.div_ceil(2))
        .map(|c| {
            let members = qs.iter().filter(|q| q.meta.concept.as_str() == format!("c{c}.n.01")).map(|q| q.id.clone()).collect();
            SemanticCluster { cluster_id: format!("definitions:c{c}.n.01"), concept: qs[2 * c].meta.concept.clone(), probe_type: qs[0].probe_type, members }
        })
        .collect();
    let lines = |xs: Vec<String>| xs.join("\n") + "\n";
    fs::write(dir.join("probes.jsonl"), lines(qs.iter().map(|q| serde_json::to_string(q).unwrap()).collect())).unwrap();
    fs::write(dir.join("clusters.jsonl"), lines(clusters.iter().map(|c| serde_json::to_string(c).unwrap()).collect())).unwrap();
    qs
}

#[test]
fn biased_probes_fail_the_gate_with_exit_5() {
    let tmp = tempfile::tempdir().unwrap();
    write_probe_files(tmp.path(), 400, true);
    // per-question tokens stay out of vocabulary in every choice
    let words = "alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu nu xi".split(' ');
    let emb = tmp.path().join("emb.txt");
    fs::write(&emb, support::hashed_embeddings(words, 16)).unwrap();
    let report = tmp.path().join("bias.json");
    let probes = tmp.path().join("probes.jsonl");
    let r = lexprobe(&["check-bias", "--probes", path(&probes), "--embeddings", path(&emb), "--out", path(&report)]);
    assert_eq!(r.code, 5, "{}", r.stdout);
    let v: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["verdict"], "FAIL");

    let unbiased = tempfile::tempdir().unwrap();
    write_probe_files(unbiased.path(), 400, false);
    let probes = unbiased.path().join("probes.jsonl");
    let r = lexprobe(&["check-bias", "--probes", path(&probes), "--embeddings", path(&emb)]);
    assert_eq!(r.code, 0, "{}", r.stdout);
}

fn write_predictions(dir: &Path, preds: &[PredictionRecord]) -> std::path::PathBuf {
    let p = dir.join("preds.jsonl");
    let text: String = preds.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn evaluate_scores_and_reports_id_mismatches_with_exit_6() {
    let tmp = tempfile::tempdir().unwrap();
    let qs = write_probe_files(tmp.path(), 20, false);
    // every question right except q0001, which takes down cluster c0
    let mut preds: Vec<PredictionRecord> = qs
        .iter()
        .map(|q| PredictionRecord::from_index(q.id.clone(), if q.id == "q0001" { (q.answer_idx + 1) % 5 } else { q.answer_idx }))
        .collect();
    let (probes, clusters) = (tmp.path().join("probes.jsonl"), tmp.path().join("clusters.jsonl"));
    let out = tmp.path().join("eval");
    let p = write_predictions(tmp.path(), &preds);
    let r = lexprobe(&[
        "evaluate", "--probes", path(&probes), "--clusters", path(&clusters), "--predictions", path(&p), "--out", path(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: Value = serde_json::from_slice(&fs::read(out.join("eval_report.json")).unwrap()).unwrap();
    assert_eq!(report["instance_acc"], 0.95);
    assert_eq!(report["cluster_acc"], 0.9);
    assert!(out.join("breakdown.csv").exists());
    assert!(r.stdout.contains("95.00\t90.00"), "{}", r.stdout);

    preds.retain(|p| p.id != "q0003");
    let p = write_predictions(tmp.path(), &preds);
    let r = lexprobe(&["evaluate", "--probes", path(&probes), "--clusters", path(&clusters), "--predictions", path(&p)]);
    assert_eq!(r.code, 6);
    assert!(r.stderr.contains("q0003"), "{}", r.stderr);
}

#[test]
fn evaluate_writes_learning_curves() {
    let tmp = tempfile::tempdir().unwrap();
    let qs = write_probe_files(tmp.path(), 10, false);
    let preds: Vec<PredictionRecord> = qs.iter().map(|q| PredictionRecord::from_index(q.id.clone(), q.answer_idx)).collect();
    let p = write_predictions(tmp.path(), &preds);
    let runs = tmp.path().join("runs.jsonl");
    fs::write(
        &runs,
        "{\"config_id\":\"base\",\"k\":0,\"score_new\":0.3,\"score_orig\":0.717}\n\
         {\"config_id\":\"a\",\"k\":100,\"mixing\":\"x1\",\"score_new\":0.9,\"score_orig\":0.704}\n",
    )
    .unwrap();
    let out = tmp.path().join("eval");
    let r = lexprobe(&[
        "evaluate", "--probes", path(&tmp.path().join("probes.jsonl")), "--clusters", path(&tmp.path().join("clusters.jsonl")),
        "--predictions", path(&p), "--runs", path(&runs), "--ks", "0,100,200", "--out", path(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = fs::read_to_string(out.join("learning_curve.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[2].starts_with("100,a,x1,") && rows[2].ends_with(",-1.30,false"), "{csv}");
    assert!(rows[3].starts_with("200,") && rows[3].ends_with("true"), "{csv}");
}

#[test]
fn mixing_plan_sizes_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    write_probe_files(tmp.path(), 200, false);
    let science = tempfile::tempdir().unwrap();
    write_probe_files(science.path(), 300, false);
    let probes = tmp.path().join("probes.jsonl");
    let sci = science.path().join("probes.jsonl");
    let run = |mode: &str, seed: &str| {
        let r = lexprobe(&["mixing-plan", "--probes", path(&probes), "--science", path(&sci), "--mode", mode, "--k", "40", "--seed", seed]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        r.stdout
    };
    let count = |s: &str, src: &str| s.lines().filter(|l| l.contains(&format!("\"source\":\"{src}\""))).count();
    let x1 = run("x1", "3");
    assert_eq!((count(&x1, "probe"), count(&x1, "science")), (40, 40));
    let x2 = run("x2", "3");
    assert_eq!((count(&x2, "probe"), count(&x2, "science")), (40, 80));
    assert_eq!(x2, run("x2", "3"));
    assert_ne!(x2, run("x2", "4"));
    let r = lexprobe(&["mixing-plan", "--probes", path(&probes), "--science", path(&sci), "--mode", "x2", "--k", "101"]);
    assert_eq!(r.code, 2, "only 100 inoculation questions: {}", r.stderr);
}

#[test]
fn config_file_values_apply_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let graph = ingest_fig2(tmp.path());
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "seed = 11\n[build]\nhop_limit = 1\nstrategies = [\"mixed:2\"]\n").unwrap();
    let out = tmp.path().join("o");
    let r = lexprobe(&["build", "--graph", path(&graph), "--probe", "hypernymy", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let m: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!((m["seed"].as_u64(), m["config"]["hop_limit"].as_u64()), (Some(11), Some(1)));
    let probes: Vec<ProbeQuestion> = read_lines(&out.join("probes.jsonl"));
    assert!(probes.iter().all(|q| q.meta.hops_k == 1));

    let r = lexprobe(&[
        "build", "--graph", path(&graph), "--probe", "hypernymy", "--config", path(&cfg), "--seed", "12", "--hop-limit", "3",
        "--out", path(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let m: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!((m["seed"].as_u64(), m["config"]["hop_limit"].as_u64()), (Some(12), Some(3)));
}
