#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rating_inference::corpus::{write_index, IndexRecord, Polarity};
use rating_inference::synthetic::{planted_corpus, planted_snippets, PlantedConfig};

pub fn small_config(n_docs: usize) -> PlantedConfig {
    PlantedConfig {
        n_docs,
        ..Default::default()
    }
}

/// Writes a planted corpus as `index.tsv` plus one text file per document
/// under `dir`, and returns the index path.
pub fn write_planted_corpus(dir: &Path, cfg: &PlantedConfig, seed: u64) -> PathBuf {
    let planted = planted_corpus(cfg, seed).unwrap();
    fs::create_dir_all(dir.join("texts")).unwrap();
    let mut records = Vec::new();
    for doc in planted.corpus.documents() {
        let rel = PathBuf::from("texts").join(format!("{}.txt", doc.id));
        fs::write(dir.join(&rel), &doc.text).unwrap();
        records.push(IndexRecord {
            id: doc.id.clone(),
            label: doc.label,
            author: None,
            path: rel,
        });
    }
    let index = dir.join("index.tsv");
    write_index(&index, &records).unwrap();
    index
}

/// Writes `polarity<TAB>text` snippets and returns the file path.
pub fn write_planted_snippets(path: &Path, cfg: &PlantedConfig, n: usize, seed: u64) -> PathBuf {
    let set = planted_snippets(cfg, n, seed).unwrap();
    let mut out = String::new();
    for (text, p) in set.snippets() {
        let tag = if *p == Polarity::Positive { "pos" } else { "neg" };
        out.push_str(&format!("{tag}\t{text}\n"));
    }
    fs::write(path, out).unwrap();
    path.to_path_buf()
}

/// A config file for `rating-infer` pointing at the given corpus and snippets.
pub fn write_config(path: &Path, corpus: &Path, snippets: Option<&Path>, methods: &[&str], extra: serde_json::Value) -> PathBuf {
    let mut cfg = serde_json::json!({
        "corpora": [corpus],
        "num_classes": 3,
        "methods": methods,
        "folds": 5,
        "inner_folds": 3,
        "seed": 7,
        "grid": { "ks": [3, 5, 10], "alphas": [0.0, 0.1, 1.0, 5.0] },
    });
    if let Some(s) = snippets {
        cfg["snippets"] = serde_json::json!(s);
    }
    if let serde_json::Value::Object(map) = extra {
        for (k, v) in map {
            cfg[k] = v;
        }
    }
    fs::write(path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path.to_path_buf()
}
