//! Batch commands behind the `rating-infer` binary.
//!
//! Every number written here comes from a library call; this module only
//! loads inputs, schedules runs and writes files.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::{load_corpus, load_snippets, stratified_folds, Corpus, IndexRecord, LabelScale, Preprocessor};
use crate::error::{Error, Result};
use crate::eval::{evaluate_on_contexts, fold_contexts, significance_table, EvalReport, FoldPredictor};
use crate::features::{class_vocab_overlap, overlap_by_distance, OverlapOptions};
use crate::linear::TrainParams;
use crate::metric_labeling::TuningGrid;
use crate::pipeline::{fit_pipeline, Dataset, ExperimentOptions, Inputs, Method, TrainedPipeline};
use crate::psp::{psp_stats_from_values, train_polarity, write_psp_stats_csv, PolarityModel};

fn default_folds() -> usize {
    10
}

fn default_inner_folds() -> usize {
    9
}

fn default_smoothing() -> f64 {
    1.0
}

fn default_significance() -> f64 {
    0.05
}

/// Experiment description read from JSON. Relative paths resolve against
/// the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Corpus index files or directories, one dataset each.
    pub corpora: Vec<PathBuf>,
    /// Polarity-labeled snippets for the sentence classifier.
    #[serde(default)]
    pub snippets: Option<PathBuf>,
    pub num_classes: usize,
    pub methods: Vec<String>,
    #[serde(default)]
    pub grid: Option<TuningGrid>,
    #[serde(default)]
    pub hinge: Option<TrainParams>,
    #[serde(default)]
    pub regression: Option<TrainParams>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_inner_folds")]
    pub inner_folds: usize,
    #[serde(default)]
    pub seed: u64,
    /// Add-k smoothing of the sentence polarity model.
    #[serde(default = "default_smoothing")]
    pub smoothing: f64,
    #[serde(default = "default_significance")]
    pub significance_level: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.corpora.iter_mut().for_each(resolve);
        cfg.snippets.iter_mut().for_each(resolve);
        cfg.out.iter_mut().for_each(resolve);
        Ok(cfg)
    }

    /// Parses method names, dropping repeats. Returns the methods and the
    /// names that were dropped.
    pub fn parse_methods(&self) -> Result<(Vec<Method>, Vec<String>)> {
        let mut seen = BTreeSet::new();
        let mut methods = Vec::new();
        let mut dropped = Vec::new();
        for name in &self.methods {
            let m: Method = name.parse()?;
            if seen.insert(m.to_string()) {
                methods.push(m);
            } else {
                dropped.push(name.clone());
            }
        }
        if methods.is_empty() {
            return Err(Error::invalid("no methods configured"));
        }
        Ok((methods, dropped))
    }

    /// Checks everything that can be checked before any training starts.
    pub fn validate(&self) -> Result<()> {
        LabelScale::new(self.num_classes)?;
        if self.corpora.is_empty() {
            return Err(Error::invalid("no corpora configured"));
        }
        for p in self.corpora.iter().chain(&self.snippets) {
            if !p.exists() {
                return Err(Error::io(p, "no such file or directory"));
            }
        }
        let (methods, _) = self.parse_methods()?;
        if self.snippets.is_none() {
            if let Some(m) = methods.iter().find(|m| m.needs_psp()) {
                return Err(Error::invalid(format!("method {m} needs `snippets` for the polarity model")));
            }
        }
        if self.folds < 2 {
            return Err(Error::invalid("folds must be >= 2"));
        }
        if !(self.significance_level > 0.0 && self.significance_level < 1.0) {
            return Err(Error::invalid("significance_level must lie in (0, 1)"));
        }
        self.options().grid.validate()
    }

    pub fn options(&self) -> ExperimentOptions {
        let d = ExperimentOptions::default();
        ExperimentOptions {
            hinge: self.hinge.unwrap_or(d.hinge),
            regression: self.regression.unwrap_or(d.regression),
            grid: self.grid.clone().unwrap_or(d.grid),
            inner_folds: self.inner_folds,
            seed: self.seed,
            oracle_tuning: false,
        }
    }

    pub fn scale(&self) -> Result<LabelScale> {
        LabelScale::new(self.num_classes)
    }

    pub fn polarity_model(&self) -> Result<Option<PolarityModel>> {
        self.snippets
            .as_deref()
            .map(|p| train_polarity(&load_snippets(p)?, self.smoothing))
            .transpose()
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairOverlap {
    pub class_a: usize,
    pub class_b: usize,
    pub distance: usize,
    /// Jaccard overlap of the two term sets, in percent.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub name: String,
    pub num_classes: usize,
    pub documents: usize,
    pub class_counts: Vec<usize>,
    /// Always `"jaccard"`; recorded so readers know which overlap was used.
    pub overlap_measure: String,
    pub overlap_min_count: usize,
    pub pair_overlap: Vec<PairOverlap>,
    /// Mean overlap over class pairs at each label distance.
    pub overlap_by_distance: Vec<(usize, f64)>,
}

pub fn corpus_stats(corpus: &Corpus, opts: OverlapOptions) -> Result<CorpusStats> {
    let m = corpus.scale.num_classes();
    let mut pair_overlap = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            pair_overlap.push(PairOverlap {
                class_a: a,
                class_b: b,
                distance: b - a,
                overlap: class_vocab_overlap(corpus, a, b, opts)?,
            });
        }
    }
    Ok(CorpusStats {
        name: corpus.name.clone(),
        num_classes: m,
        documents: corpus.len(),
        class_counts: corpus.class_counts(),
        overlap_measure: "jaccard".into(),
        overlap_min_count: opts.min_count,
        pair_overlap,
        overlap_by_distance: overlap_by_distance(corpus, opts),
    })
}

/// Loads a raw corpus and writes a normalized copy: `index.tsv`, one text
/// file per document under `documents/`, and `stats.json`.
pub fn cmd_prepare(input: &Path, out: &Path, scale: LabelScale) -> Result<CorpusStats> {
    let corpus = load_corpus(input, scale, &Preprocessor::default())?;
    let stats = corpus_stats(&corpus, OverlapOptions::default())?;
    let docs_dir = out.join("documents");
    create_dir(&docs_dir)?;
    let mut records = Vec::with_capacity(corpus.len());
    for (i, doc) in corpus.documents().iter().enumerate() {
        let rel = PathBuf::from("documents").join(format!("{i:06}.txt"));
        write_file(&out.join(&rel), format!("{}\n", doc.text))?;
        records.push(IndexRecord {
            id: doc.id.clone(),
            label: doc.label,
            author: doc.author.clone(),
            path: rel,
        });
    }
    crate::corpus::write_index(&out.join("index.tsv"), &records)?;
    write_file(&out.join("stats.json"), to_json_pretty(&stats))?;
    Ok(stats)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodFailure {
    pub dataset: String,
    pub method: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateSummary {
    pub oracle_tuning: bool,
    pub seed: u64,
    pub methods: Vec<String>,
    /// Repeated method names that were skipped.
    pub duplicates: Vec<String>,
    pub reports: Vec<EvalReport>,
    pub failures: Vec<MethodFailure>,
}

impl EvaluateSummary {
    /// 0 when every run succeeded, 2 when some method failed.
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvaluateFlags {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub oracle_tuning: bool,
}

fn file_stem(method: &str) -> String {
    method.replace('+', "_")
}

/// Cross-validates every configured method on every corpus and writes the
/// reports, the significance table and the PSP statistics.
///
/// Output layout under the output directory (`oracle-` prefixed names when
/// tuning on test folds):
///
/// - `summary.csv`: mean accuracy and L1 error per dataset and method
/// - `folds.csv`: per-fold accuracy, L1 and majority-baseline accuracy
/// - `<dataset>/<method>.json` and `<dataset>/<method>.predictions.csv`
/// - `<dataset>/folds.tsv`: the fold plan
/// - `<dataset>/psp_stats.csv` when a polarity model is configured
/// - `significance.txt`, `significance.json`, `run.json`
pub fn cmd_evaluate(mut cfg: RunConfig, flags: &EvaluateFlags) -> Result<EvaluateSummary> {
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let out = flags
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| Error::invalid("no output directory (use --out or `out` in the config)"))?;
    let (methods, duplicates) = cfg.parse_methods()?;
    for d in &duplicates {
        log::warn!("method `{d}` listed more than once; evaluating it once");
    }
    let mut options = cfg.options();
    options.oracle_tuning = flags.oracle_tuning;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(flags.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let prefix = if flags.oracle_tuning { "oracle-" } else { "" };

    let scale = cfg.scale()?;
    let pre = Preprocessor::default();
    let polarity = cfg.polarity_model()?.map(Arc::new);
    let predictors: Vec<&dyn FoldPredictor> = methods.iter().map(|m| m as &dyn FoldPredictor).collect();

    create_dir(&out)?;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for path in &cfg.corpora {
        let corpus = load_corpus(path, scale, &pre)?;
        let dataset = Dataset::from_corpus(&corpus, polarity.as_deref())?;
        let plan = stratified_folds(&corpus, cfg.folds, cfg.seed)?;
        let dir = out.join(&dataset.name);
        create_dir(&dir)?;
        plan.write_tsv(&dir.join("folds.tsv"))?;
        if let Some(values) = &dataset.inputs.psp {
            let stats = psp_stats_from_values(values, &dataset.labels, scale.num_classes())?;
            write_file(&dir.join("psp_stats.csv"), csv_bytes(|w| write_psp_stats_csv(&stats, w)))?;
        }
        log::info!("{}: {} documents, {} methods", dataset.name, dataset.len(), methods.len());
        let results = pool.install(|| -> Result<Vec<Result<EvalReport>>> {
            let contexts = fold_contexts(&dataset, &plan, &options, polarity.clone())?;
            Ok(evaluate_on_contexts(&predictors, &dataset.name, &plan, &contexts, options.oracle_tuning))
        })?;
        for (method, result) in methods.iter().zip(results) {
            match result {
                Ok(report) => {
                    let stem = format!("{prefix}{}", file_stem(&report.method));
                    write_file(&dir.join(format!("{stem}.json")), to_json_pretty(&report))?;
                    write_file(
                        &dir.join(format!("{stem}.predictions.csv")),
                        csv_bytes(|w| report.write_predictions_csv(w)),
                    )?;
                    reports.push(report);
                }
                Err(e) => {
                    log::error!("{} / {method}: {e}", dataset.name);
                    failures.push(MethodFailure {
                        dataset: dataset.name.clone(),
                        method: method.to_string(),
                        error: e.to_string(),
                    });
                }
            }
        }
    }

    let mut summary_csv = String::from("dataset,method,oracle_tuning,mean_accuracy,mean_l1,mean_baseline_accuracy\n");
    let mut folds_csv = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let baseline = r.baseline_accuracy.iter().sum::<f64>() / r.baseline_accuracy.len().max(1) as f64;
        summary_csv.push_str(&format!(
            "{},{},{},{},{},{baseline}\n",
            r.dataset, r.method, r.oracle_tuning, r.mean_accuracy, r.mean_l1
        ));
        let mut part = csv_bytes(|w| r.write_folds_csv(w));
        if i > 0 {
            // drop the repeated header line
            let cut = part.iter().position(|&b| b == b'\n').map_or(part.len(), |p| p + 1);
            part.drain(..cut);
        }
        folds_csv.extend(part);
    }
    write_file(&out.join(format!("{prefix}summary.csv")), summary_csv)?;
    write_file(&out.join(format!("{prefix}folds.csv")), folds_csv)?;

    if !reports.is_empty() {
        let table = significance_table(&reports, cfg.significance_level)?;
        let mut text = String::new();
        if flags.oracle_tuning {
            text.push_str("ORACLE TUNING: (k, alpha) chosen on the test folds; diagnostic only\n");
        }
        text.push_str(&table.render());
        write_file(&out.join(format!("{prefix}significance.txt")), text)?;
        write_file(&out.join(format!("{prefix}significance.json")), to_json_pretty(&table))?;
    }

    let summary = EvaluateSummary {
        oracle_tuning: flags.oracle_tuning,
        seed: cfg.seed,
        methods: methods.iter().map(ToString::to_string).collect(),
        duplicates,
        reports,
        failures,
    };
    let run = serde_json::json!({
        "config": cfg,
        "oracle_tuning": summary.oracle_tuning,
        "methods": summary.methods,
        "duplicates": summary.duplicates,
        "failures": summary.failures,
    });
    write_file(&out.join(format!("{prefix}run.json")), to_json_pretty(&run))?;
    Ok(summary)
}

/// Fits `method` on the whole of corpus `corpus_index` of the config and
/// saves the artifact to `out`.
pub fn cmd_train(cfg: &RunConfig, method: Method, corpus_index: usize, out: &Path) -> Result<TrainedPipeline> {
    cfg.validate()?;
    let path = cfg
        .corpora
        .get(corpus_index)
        .ok_or_else(|| Error::invalid(format!("no corpus #{corpus_index} in the config")))?;
    let corpus = load_corpus(path, cfg.scale()?, &Preprocessor::default())?;
    let polarity = if method.needs_psp() {
        cfg.polarity_model()?.map(Arc::new)
    } else {
        None
    };
    let dataset = Dataset::from_corpus(&corpus, polarity.as_deref())?;
    let pipeline = fit_pipeline(&dataset, method, &cfg.options(), polarity)?;
    pipeline.save(out)?;
    Ok(pipeline)
}

/// Reads documents to label: a file of `id<TAB>text` lines, or a directory
/// whose `*.txt` files are documents named by their stem.
pub fn read_documents(path: &Path) -> Result<Vec<(String, String)>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        files.sort();
        return files
            .iter()
            .map(|p| {
                let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                Ok((id, text))
            })
            .collect();
    }
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut items = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            message: "expected `id<TAB>text`".into(),
        })?;
        let id = id.trim().to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        items.push((id, text.to_string()));
    }
    Ok(items)
}

/// Labels documents with a saved pipeline. CSV columns: `id,label,k,alpha`.
pub fn cmd_predict(model: &Path, input: &Path, out: &Path) -> Result<usize> {
    let pipeline = TrainedPipeline::load(model)?;
    let items = read_documents(input)?;
    let inputs = Inputs::from_texts(&items, &Preprocessor::default(), pipeline.polarity.as_ref())?;
    let predictions = if inputs.is_empty() {
        Vec::new()
    } else {
        pipeline.predict(&inputs)?
    };
    let mut csv = String::from("id,label,k,alpha\n");
    for p in &predictions {
        let k = p.k.map(|k| k.to_string()).unwrap_or_default();
        let a = p.alpha.map(|a| a.to_string()).unwrap_or_default();
        csv.push_str(&format!("{},{},{k},{a}\n", p.id, p.label));
    }
    write_file(out, csv)?;
    Ok(predictions.len())
}
