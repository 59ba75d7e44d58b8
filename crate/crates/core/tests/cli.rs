mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use rating_inference::app::{CorpusStats, RunConfig};
use rating_inference::corpus::{load_corpus, load_snippets, LabelScale, Preprocessor};
use rating_inference::eval::EvalReport;
use rating_inference::features::{class_vocab_overlap, OverlapOptions};
use rating_inference::pipeline::{fit_pipeline, Dataset, Inputs};
use rating_inference::psp::train_polarity;
use serde_json::json;

use common::*;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rating-infer")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn prepare_writes_index_and_stats_consistent_with_library() {
    let tmp = tempfile::tempdir().unwrap();
    let raw = tmp.path().join("raw");
    write_planted_corpus(&raw, &small_config(60), 1);
    let out = tmp.path().join("prepared");
    let o = cli(&["prepare", s(&raw), "--out", s(&out), "--classes", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("index.tsv").is_file());

    let stats: CorpusStats = serde_json::from_str(&fs::read_to_string(out.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats.documents, 60);
    assert_eq!(stats.class_counts, vec![20, 20, 20]);
    assert_eq!(stats.overlap_measure, "jaccard");
    let corpus = load_corpus(&raw, LabelScale::new(3).unwrap(), &Preprocessor::default()).unwrap();
    for p in &stats.pair_overlap {
        let lib = class_vocab_overlap(&corpus, p.class_a, p.class_b, OverlapOptions::default()).unwrap();
        assert_eq!(p.overlap, lib);
    }
    // the prepared copy loads back to the same documents
    let again = load_corpus(&out, LabelScale::new(3).unwrap(), &Preprocessor::default()).unwrap();
    assert_eq!(again.documents(), corpus.documents());
}

#[test]
fn prepare_rejects_unlabeled_file() {
    let tmp = tempfile::tempdir().unwrap();
    let raw = tmp.path().join("raw");
    let index = write_planted_corpus(&raw, &small_config(9), 1);
    let text = fs::read_to_string(&index).unwrap();
    let broken: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == 3 {
                let f: Vec<&str> = l.split('\t').collect();
                format!("{}\t\t{}\t{}", f[0], f[2], f[3])
            } else {
                l.to_string()
            }
        })
        .collect();
    fs::write(&index, broken.join("\n")).unwrap();
    let o = cli(&["prepare", s(&raw), "--out", s(&tmp.path().join("out")), "--classes", "3"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("doc00002.txt"), "{}", stderr(&o));
}

fn report(dir: &Path, dataset: &str, stem: &str) -> EvalReport {
    serde_json::from_str(&fs::read_to_string(dir.join(dataset).join(format!("{stem}.json"))).unwrap()).unwrap()
}

#[test]
fn evaluate_majority_only() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = write_planted_corpus(&tmp.path().join("c"), &small_config(60), 2);
    let cfg = write_config(&tmp.path().join("cfg.json"), &corpus, None, &["majority"], json!({}));
    let out = tmp.path().join("out");
    let o = cli(&["evaluate", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out, "c", "majority");
    assert_eq!(r.fold_accuracy, r.baseline_accuracy);
    assert_eq!(r.n_folds, 5);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
    assert!(out.join("significance.txt").is_file());
}

#[test]
fn evaluate_deduplicates_methods_with_warning() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = write_planted_corpus(&tmp.path().join("c"), &small_config(60), 2);
    let cfg = write_config(&tmp.path().join("cfg.json"), &corpus, None, &["majority", "ova", "majority"], json!({}));
    let out = tmp.path().join("out");
    let o = cli(&["evaluate", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("more than once"), "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn evaluate_partial_failure_sets_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = write_planted_corpus(&tmp.path().join("c"), &small_config(60), 2);
    // no k in the grid fits an inner training split, so only ova+to fails
    let cfg = write_config(
        &tmp.path().join("cfg.json"),
        &corpus,
        None,
        &["majority", "ova+to"],
        json!({ "grid": { "ks": [500], "alphas": [0.1] } }),
    );
    let out = tmp.path().join("out");
    let o = cli(&["evaluate", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(out.join("c").join("majority.json").is_file());
    let run: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["failures"][0]["method"], "ova+to");
}

#[test]
fn evaluate_full_run_is_reproducible_and_exports_figures() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_planted = small_config(150);
    let corpus = write_planted_corpus(&tmp.path().join("c"), &cfg_planted, 3);
    let snippets = write_planted_snippets(&tmp.path().join("snippets.tsv"), &cfg_planted, 1000, 3);
    let cfg = write_config(
        &tmp.path().join("cfg.json"),
        &corpus,
        Some(&snippets),
        &["majority", "ova", "reg", "ova+psp", "reg+psp", "psp-threshold"],
        json!({}),
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = cli(&["evaluate", "--config", s(&cfg), "--out", s(out), "--jobs", "1"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for file in ["summary.csv", "folds.csv", "significance.txt", "significance.json", "run.json", "c/psp_stats.csv", "c/ova_psp.json", "c/ova_psp.predictions.csv"] {
        let (x, y) = (fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap());
        assert!(x == y, "{file} differs between identical runs");
    }
    let psp = fs::read_to_string(a.join("c/psp_stats.csv")).unwrap();
    assert!(psp.starts_with("class,mean,stddev,n\n"));
    assert_eq!(psp.lines().count(), 4);
    let (ova, ova_psp) = (report(&a, "c", "ova"), report(&a, "c", "ova_psp"));
    assert!(ova_psp.mean_accuracy >= ova.mean_accuracy, "{} < {}", ova_psp.mean_accuracy, ova.mean_accuracy);
    assert!(ova_psp.configs.iter().all(|c| c.is_some()));
}

#[test]
fn oracle_tuning_outputs_are_labeled() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = write_planted_corpus(&tmp.path().join("c"), &small_config(60), 4);
    let cfg = write_config(&tmp.path().join("cfg.json"), &corpus, None, &["ova+to"], json!({}));
    let out = tmp.path().join("out");
    let o = cli(&["evaluate", "--config", s(&cfg), "--out", s(&out), "--oracle-tuning"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("oracle-significance.txt")).unwrap();
    assert!(text.starts_with("ORACLE TUNING"));
    assert!(report(&out, "c", "oracle-ova_to").oracle_tuning);
    assert!(!out.join("summary.csv").exists());
}

#[test]
fn evaluate_rejects_missing_paths_and_unknown_methods() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = write_planted_corpus(&tmp.path().join("c"), &small_config(30), 4);
    let bad = write_config(&tmp.path().join("bad.json"), &corpus, None, &["ova", "svm"], json!({}));
    let o = cli(&["evaluate", "--config", s(&bad), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    let missing = write_config(&tmp.path().join("m.json"), &tmp.path().join("nope"), None, &["ova"], json!({}));
    let o = cli(&["evaluate", "--config", s(&missing), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope"));
}

#[test]
fn train_and_predict_match_library() {
    let tmp = tempfile::tempdir().unwrap();
    let planted_cfg = small_config(90);
    let corpus_path = write_planted_corpus(&tmp.path().join("c"), &planted_cfg, 5);
    let snippets = write_planted_snippets(&tmp.path().join("snippets.tsv"), &planted_cfg, 600, 5);
    let cfg_path = write_config(&tmp.path().join("cfg.json"), &corpus_path, Some(&snippets), &["ova+psp"], json!({}));
    let model = tmp.path().join("model.json");
    let o = cli(&["train", "--config", s(&cfg_path), "--method", "ova+psp", "--out", s(&model)]);
    assert!(o.status.success(), "{}", stderr(&o));

    // fresh documents to label
    let fresh = rating_inference::synthetic::planted_corpus(&small_config(12), 77).unwrap().corpus;
    let items: Vec<(String, String)> = fresh.documents().iter().map(|d| (format!("new{}", d.id), d.text.clone())).collect();
    let input = tmp.path().join("new.tsv");
    fs::write(&input, items.iter().map(|(i, t)| format!("{i}\t{t}\n")).collect::<String>()).unwrap();
    let preds = tmp.path().join("preds.csv");
    let o = cli(&["predict", "--model", s(&model), "--input", s(&input), "--out", s(&preds)]);
    assert!(o.status.success(), "{}", stderr(&o));

    // the same computation through the library
    let cfg = RunConfig::load(&cfg_path).unwrap();
    let corpus = load_corpus(&corpus_path, LabelScale::new(3).unwrap(), &Preprocessor::default()).unwrap();
    let polarity = Arc::new(train_polarity(&load_snippets(&snippets).unwrap(), 1.0).unwrap());
    let dataset = Dataset::from_corpus(&corpus, Some(&polarity)).unwrap();
    let pipeline = fit_pipeline(&dataset, "ova+psp".parse().unwrap(), &cfg.options(), Some(polarity.clone())).unwrap();
    let inputs = Inputs::from_texts(&items, &Preprocessor::default(), Some(&polarity)).unwrap();
    let mut expected = String::from("id,label,k,alpha\n");
    for p in pipeline.predict(&inputs).unwrap() {
        expected.push_str(&format!("{},{},{},{}\n", p.id, p.label, p.k.unwrap(), p.alpha.unwrap()));
    }
    assert_eq!(fs::read_to_string(&preds).unwrap(), expected);

    // an empty input gives a header-only file
    let empty = tmp.path().join("empty.tsv");
    fs::write(&empty, "").unwrap();
    let o = cli(&["predict", "--model", s(&model), "--input", s(&empty), "--out", s(&preds)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&preds).unwrap(), "id,label,k,alpha\n");
}

#[test]
fn alpha_zero_pipeline_predicts_base_argmax() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus_path = write_planted_corpus(&tmp.path().join("c"), &small_config(60), 6);
    let cfg_path = write_config(
        &tmp.path().join("cfg.json"),
        &corpus_path,
        None,
        &["ova+to"],
        json!({ "grid": { "ks": [5], "alphas": [0.0] } }),
    );
    let (metric, base) = (tmp.path().join("metric.json"), tmp.path().join("ova.json"));
    for (method, path) in [("ova+to", &metric), ("ova", &base)] {
        let o = cli(&["train", "--config", s(&cfg_path), "--method", method, "--out", s(path)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    // label training documents themselves
    let docs_dir = tmp.path().join("c").join("texts");
    let (a, b) = (tmp.path().join("a.csv"), tmp.path().join("b.csv"));
    assert!(cli(&["predict", "--model", s(&metric), "--input", s(&docs_dir), "--out", s(&a)]).status.success());
    assert!(cli(&["predict", "--model", s(&base), "--input", s(&docs_dir), "--out", s(&b)]).status.success());
    let labels = |p: &Path| -> Vec<String> {
        fs::read_to_string(p).unwrap().lines().skip(1).map(|l| l.split(',').take(2).collect::<Vec<_>>().join(",")).collect()
    };
    assert_eq!(labels(&a).len(), 60);
    assert_eq!(labels(&a), labels(&b));
}

#[test]
fn predict_rejects_tampered_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus_path = write_planted_corpus(&tmp.path().join("c"), &small_config(30), 8);
    let cfg_path = write_config(&tmp.path().join("cfg.json"), &corpus_path, None, &["ova"], json!({}));
    let model = tmp.path().join("m.json");
    assert!(cli(&["train", "--config", s(&cfg_path), "--method", "reg", "--out", s(&model)]).status.success());
    let text = fs::read_to_string(&model).unwrap().replacen("\"neu", "\"xneu", 1);
    fs::write(&model, text).unwrap();
    let input = tmp.path().join("in.tsv");
    fs::write(&input, "a\tpos1 neu2 neu3.\n").unwrap();
    let o = cli(&["predict", "--model", s(&model), "--input", s(&input), "--out", s(&tmp.path().join("p.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("artifact"), "{}", stderr(&o));
}
