//! Review corpora: ingestion, rating conversion and stratified folds.
//!
//! Two on-disk layouts are understood by [`load_corpus`]:
//!
//! * a tab-separated index (`id`, `label`, `author`, `path`) pointing at one
//!   UTF-8 file per document, either given directly or as `index.tsv` inside
//!   a directory;
//! * the per-author layout of the public movie-review scale data
//!   (`subj.<author>`, `id.<author>`, `label.3class.<author>`,
//!   `label.4class.<author>`), one document per line.
//!
//! Every document goes through a [`Preprocessor`] that strips explicit rating
//! indicators and splits the remaining text into sentences.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A discrete rating scale with labels `0..num_classes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelScale {
    num_classes: usize,
}

impl LabelScale {
    pub fn new(num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::invalid(format!(
                "a label scale needs at least 2 classes, got {num_classes}"
            )));
        }
        Ok(Self { num_classes })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn labels(&self) -> std::ops::Range<usize> {
        0..self.num_classes
    }

    pub fn contains(&self, label: usize) -> bool {
        label < self.num_classes
    }

    /// Label distance `|a - b|`.
    pub fn distance(a: usize, b: usize) -> usize {
        a.abs_diff(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    /// Text after rating-indicator stripping and whitespace normalization.
    pub text: String,
    pub sentences: Vec<String>,
    pub label: usize,
    pub author: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub scale: LabelScale,
    documents: Vec<Document>,
    /// Whether the source claims objective sentences were already removed.
    pub subjective_only: bool,
}

impl Corpus {
    /// Builds a corpus, sorting documents by id.
    ///
    /// Classes may be missing here (training subsets are corpora too); the
    /// loaders insist on every class being present.
    pub fn new(name: impl Into<String>, scale: LabelScale, mut documents: Vec<Document>) -> Result<Self> {
        documents.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in documents.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateId(pair[0].id.clone()));
            }
        }
        for doc in &documents {
            if !scale.contains(doc.label) {
                return Err(Error::RejectedRecord {
                    id: doc.id.clone(),
                    reason: format!("label {} outside a {}-class scale", doc.label, scale.num_classes()),
                });
            }
            if doc.sentences.is_empty() {
                return Err(Error::RejectedRecord {
                    id: doc.id.clone(),
                    reason: "no sentences".into(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            scale,
            documents,
            subjective_only: false,
        })
    }

    /// Convenience constructor from raw `(id, text, label)` triples.
    pub fn from_texts<I, S, T>(name: &str, scale: LabelScale, items: I, pre: &Preprocessor) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T, usize)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let docs = items
            .into_iter()
            .map(|(id, text, label)| pre.document(id.into(), text.as_ref(), label, None))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, scale, docs)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.documents.iter().map(|d| d.label).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.scale.num_classes()];
        for d in &self.documents {
            counts[d.label] += 1;
        }
        counts
    }

    /// Fails with [`Error::ClassAbsent`] naming the first empty class.
    pub fn require_all_classes(&self) -> Result<()> {
        match self.class_counts().iter().position(|&c| c == 0) {
            Some(class) => Err(Error::ClassAbsent(class)),
            None => Ok(()),
        }
    }

    /// Sub-corpus holding the documents at `indices`.
    pub fn subset(&self, indices: &[usize]) -> Result<Corpus> {
        let docs = indices.iter().map(|&i| self.documents[i].clone()).collect();
        let mut c = Corpus::new(self.name.clone(), self.scale, docs)?;
        c.subjective_only = self.subjective_only;
        Ok(c)
    }
}

/// Rating-indicator stripping and sentence segmentation.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    indicators: Vec<Regex>,
    abbreviations: HashSet<String>,
}

const DEFAULT_INDICATORS: &[&str] = &[
    // "3.5 out of 4 stars", "3/4 stars"
    r"(?i)\b\d+(?:\.\d+)?\s*(?:/|out\s+of)\s*\d+(?:\.\d+)?\s*stars?\b",
    // "3 stars", "3.5-star", "***1/2"-style counts spelled in digits
    r"(?i)\b\d+(?:\.\d+)?\s*-?\s*stars?\b",
    r"(?i)\b(?:zero|one|two|three|four|five)(?:\s+and\s+(?:a\s+)?half)?[\s-]+stars?\b",
    // "7/10", "3.5/4", "85/100"
    r"\b\d+(?:\.\d+)?\s*/\s*(?:4|5|10|100)\b",
    // "Grade: B+" or "Rating: C-" at line start
    r"(?im)^\s*(?:(?:letter\s+)?grade|rating)\s*[:=]?\s*[A-F][+-]?(?:\s|$)",
    // a lone letter grade on its own line
    r"(?m)^\s*[A-F][+-]?\s*$",
];

const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "vs", "etc", "e.g", "i.e", "inc", "ltd", "co", "no",
    "vol", "mt", "ft", "approx", "dept", "est",
];

impl Default for Preprocessor {
    fn default() -> Self {
        Self::new(DEFAULT_INDICATORS, DEFAULT_ABBREVIATIONS).expect("default patterns compile")
    }
}

impl Preprocessor {
    pub fn new<P: AsRef<str>, A: AsRef<str>>(indicators: &[P], abbreviations: &[A]) -> Result<Self> {
        let indicators = indicators
            .iter()
            .map(|p| Regex::new(p.as_ref()).map_err(|e| Error::invalid(format!("bad indicator pattern: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let abbreviations = abbreviations.iter().map(|a| a.as_ref().to_lowercase()).collect();
        Ok(Self {
            indicators,
            abbreviations,
        })
    }

    /// Removes rating indicators and collapses whitespace runs to one space.
    pub fn strip_indicators(&self, raw: &str) -> String {
        let mut text = raw.to_string();
        for re in &self.indicators {
            text = re.replace_all(&text, " ").into_owned();
        }
        normalize_whitespace(&text)
    }

    /// Splits normalized text on `.`, `!` or `?` followed by whitespace.
    ///
    /// Joining the result with single spaces gives back the input.
    pub fn split_sentences(&self, text: &str) -> Vec<String> {
        let text = normalize_whitespace(text);
        let bytes = text.as_bytes();
        let mut sentences = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < bytes.len() {
            if matches!(bytes[i], b'.' | b'!' | b'?') {
                let punct_start = i;
                while i < bytes.len() && matches!(bytes[i], b'.' | b'!' | b'?' | b'"' | b'\'' | b')' | b']') {
                    i += 1;
                }
                if i == bytes.len() || bytes[i] == b' ' {
                    let word_start = text[start..punct_start].rfind(' ').map_or(start, |p| start + p + 1);
                    let word = &text[word_start..punct_start];
                    if !self.is_abbreviation(word, bytes[punct_start]) {
                        sentences.push(text[start..i].to_string());
                        start = (i + 1).min(bytes.len());
                    }
                }
            } else {
                i += 1;
            }
        }
        if start < bytes.len() {
            sentences.push(text[start..].to_string());
        }
        sentences
    }

    fn is_abbreviation(&self, word: &str, punct: u8) -> bool {
        if punct != b'.' {
            return false;
        }
        let w = word.trim_start_matches(['(', '"', '\'']).to_lowercase();
        // single initials such as "J." in "J. Smith"
        let is_initial = w.chars().count() == 1 && w.chars().all(char::is_alphabetic);
        is_initial || self.abbreviations.contains(w.as_str())
    }

    /// Strips, splits and validates one record.
    pub fn document(&self, id: String, raw: &str, label: usize, author: Option<String>) -> Result<Document> {
        let text = self.strip_indicators(raw);
        if text.is_empty() {
            return Err(Error::RejectedRecord {
                id,
                reason: "empty text after stripping rating indicators".into(),
            });
        }
        let sentences = self.split_sentences(&text);
        Ok(Document {
            id,
            text,
            sentences,
            label,
            author,
        })
    }
}

fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// One row of a corpus index file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRecord {
    pub id: String,
    pub label: usize,
    pub author: Option<String>,
    pub path: PathBuf,
}

/// Reads an index TSV (`id`, `label`, `author`, `path`); a header row whose
/// first field is `id` is skipped.
pub fn read_index(path: &Path) -> Result<Vec<IndexRecord>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() || (lineno == 0 && line.starts_with("id\t")) {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                message: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let id = fields[0].trim().to_string();
        let label_field = fields[1].trim();
        if label_field.is_empty() {
            return Err(Error::RejectedRecord {
                id,
                reason: format!("missing label for {}", fields[3].trim()),
            });
        }
        let label = label_field.parse::<usize>().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            message: format!("label `{label_field}` is not a class index"),
        })?;
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        let author = Some(fields[2].trim()).filter(|a| !a.is_empty()).map(str::to_string);
        records.push(IndexRecord {
            id,
            label,
            author,
            path: PathBuf::from(fields[3].trim()),
        });
    }
    Ok(records)
}

pub fn write_index(path: &Path, records: &[IndexRecord]) -> Result<()> {
    let mut out = String::from("id\tlabel\tauthor\tpath\n");
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.id,
            r.label,
            r.author.as_deref().unwrap_or(""),
            r.path.display()
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Loads a corpus from an index file, a directory holding `index.tsv`, or a
/// directory in the per-author scale-data layout.
pub fn load_corpus(path: &Path, scale: LabelScale, pre: &Preprocessor) -> Result<Corpus> {
    let corpus = if path.is_file() {
        load_from_index(path, scale, pre)?
    } else if path.is_dir() {
        let index = path.join("index.tsv");
        if index.is_file() {
            load_from_index(&index, scale, pre)?
        } else {
            load_scale_layout(path, scale, pre)?
        }
    } else {
        return Err(Error::io(path, "no such file or directory"));
    };
    corpus.require_all_classes()?;
    Ok(corpus)
}

fn load_from_index(index: &Path, scale: LabelScale, pre: &Preprocessor) -> Result<Corpus> {
    let base = index.parent().unwrap_or(Path::new("."));
    let records = read_index(index)?;
    let mut docs = Vec::with_capacity(records.len());
    for r in records {
        if !scale.contains(r.label) {
            return Err(Error::RejectedRecord {
                id: r.id,
                reason: format!("label {} outside a {}-class scale", r.label, scale.num_classes()),
            });
        }
        let file = base.join(&r.path);
        let raw = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        docs.push(pre.document(r.id, &raw, r.label, r.author)?);
    }
    let name = base
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    Corpus::new(name, scale, docs)
}

fn load_scale_layout(dir: &Path, scale: LabelScale, pre: &Preprocessor) -> Result<Corpus> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut authors: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_prefix("subj.")).map(str::to_string))
        .collect();
    authors.sort();
    let author = match authors.as_slice() {
        [one] => one.clone(),
        [] => {
            return Err(Error::io(dir, "neither index.tsv nor subj.<author> found"));
        }
        _ => return Err(Error::io(dir, "several subj.<author> files; point at one author directory")),
    };
    let label_file = match scale.num_classes() {
        3 => format!("label.3class.{author}"),
        4 => format!("label.4class.{author}"),
        n => return Err(Error::invalid(format!("scale-data layout has no {n}-class labels"))),
    };
    let read_lines = |name: &str| -> Result<Vec<String>> {
        let p = dir.join(name);
        let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
        Ok(String::from_utf8_lossy(&bytes).lines().map(str::to_string).collect())
    };
    let texts = read_lines(&format!("subj.{author}"))?;
    let ids = read_lines(&format!("id.{author}"))?;
    let labels = read_lines(&label_file)?;
    if texts.len() != ids.len() || texts.len() != labels.len() {
        return Err(Error::LengthMismatch(texts.len(), ids.len().min(labels.len())));
    }
    let mut docs = Vec::with_capacity(texts.len());
    for (lineno, ((text, id), label)) in texts.iter().zip(&ids).zip(&labels).enumerate() {
        let label = label.trim().parse::<usize>().map_err(|_| Error::Parse {
            path: dir.join(&label_file).display().to_string(),
            line: lineno + 1,
            message: format!("label `{}` is not a class index", label.trim()),
        })?;
        docs.push(pre.document(id.trim().to_string(), text, label, Some(author.clone()))?);
    }
    let mut corpus = Corpus::new(author.clone(), scale, docs)?;
    corpus.subjective_only = true;
    Ok(corpus)
}

/// Raw rating systems seen in review sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingScheme {
    /// 0 to 4 stars in half-star steps.
    FourStarHalfSteps,
    /// 0 to 5 stars in half-star steps.
    FiveStarHalfSteps,
    /// 0 to 100 points.
    HundredPoint,
}

impl RatingScheme {
    pub fn max_value(&self) -> f64 {
        match self {
            RatingScheme::FourStarHalfSteps => 4.0,
            RatingScheme::FiveStarHalfSteps => 5.0,
            RatingScheme::HundredPoint => 100.0,
        }
    }

    /// Size of one notch: half a star, or ten points.
    pub fn notch_size(&self) -> f64 {
        match self {
            RatingScheme::FourStarHalfSteps | RatingScheme::FiveStarHalfSteps => 0.5,
            RatingScheme::HundredPoint => 10.0,
        }
    }

    pub fn max_notch(&self) -> f64 {
        self.max_value() / self.notch_size()
    }

    /// Position of `raw` in notches from the bottom of the scale.
    pub fn notch(&self, raw: f64) -> Result<f64> {
        if !raw.is_finite() || raw < 0.0 || raw > self.max_value() {
            return Err(Error::RatingOutOfRange {
                value: raw,
                scheme: self.to_string(),
            });
        }
        Ok(raw / self.notch_size())
    }
}

impl fmt::Display for RatingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatingScheme::FourStarHalfSteps => "four_star_half_steps",
            RatingScheme::FiveStarHalfSteps => "five_star_half_steps",
            RatingScheme::HundredPoint => "hundred_point",
        })
    }
}

impl FromStr for RatingScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "four_star_half_steps" => Ok(RatingScheme::FourStarHalfSteps),
            "five_star_half_steps" => Ok(RatingScheme::FiveStarHalfSteps),
            "hundred_point" => Ok(RatingScheme::HundredPoint),
            other => Err(Error::invalid(format!("unknown rating scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTarget {
    ThreeClass,
    FourClass,
}

/// Which sparse extreme of the five-way split gets folded into its neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldSide {
    Low,
    High,
}

/// Class boundaries in notch units; a notch position on a boundary belongs
/// to the upper class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingBins {
    boundaries: Vec<f64>,
}

impl RatingBins {
    pub fn new(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.is_empty() || boundaries.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("bin boundaries must be non-empty and nondecreasing"));
        }
        Ok(Self { boundaries })
    }

    /// Thirds of the notch range.
    pub fn three_class(scheme: RatingScheme) -> Self {
        let m = scheme.max_notch();
        Self {
            boundaries: vec![m / 3.0, 2.0 * m / 3.0],
        }
    }

    /// Five equal bins with one extreme merged into its neighbour.
    pub fn four_class(scheme: RatingScheme, side: FoldSide) -> Self {
        let fifths: Vec<f64> = (1..5).map(|j| scheme.max_notch() * j as f64 / 5.0).collect();
        let boundaries = match side {
            FoldSide::Low => fifths[1..].to_vec(),
            FoldSide::High => fifths[..3].to_vec(),
        };
        Self { boundaries }
    }

    /// Four-class bins folding whichever extreme of the five-way split holds
    /// fewer than 10% of `raws`.
    pub fn four_class_for(scheme: RatingScheme, raws: &[f64]) -> Result<(Self, FoldSide)> {
        if raws.is_empty() {
            return Err(Error::invalid("no ratings to choose a fold side from"));
        }
        let five = RatingBins {
            boundaries: (1..5).map(|j| scheme.max_notch() * j as f64 / 5.0).collect(),
        };
        let mut counts = [0usize; 5];
        for &r in raws {
            counts[five.class_of(scheme.notch(r)?)] += 1;
        }
        let n = raws.len() as f64;
        let (low, high) = (counts[0] as f64 / n, counts[4] as f64 / n);
        let side = match (low < 0.1, high < 0.1) {
            (true, false) => FoldSide::Low,
            (false, true) => FoldSide::High,
            _ => {
                log::warn!(
                    "fold-side rule ambiguous (lowest {:.1}%, highest {:.1}%); folding the smaller",
                    low * 100.0,
                    high * 100.0
                );
                if high < low {
                    FoldSide::High
                } else {
                    FoldSide::Low
                }
            }
        };
        Ok((Self::four_class(scheme, side), side))
    }

    pub fn num_classes(&self) -> usize {
        self.boundaries.len() + 1
    }

    pub fn class_of(&self, notch: f64) -> usize {
        self.boundaries.iter().filter(|&&b| notch >= b).count()
    }
}

/// Default bins: thirds for three classes, low-side fold for four.
pub fn default_bins(scheme: RatingScheme, target: ClassTarget) -> RatingBins {
    match target {
        ClassTarget::ThreeClass => RatingBins::three_class(scheme),
        ClassTarget::FourClass => RatingBins::four_class(scheme, FoldSide::Low),
    }
}

/// Maps a raw rating to a class label through its notch position.
pub fn convert_rating(raw: f64, scheme: RatingScheme, bins: &RatingBins) -> Result<usize> {
    Ok(bins.class_of(scheme.notch(raw)?))
}

/// Assignment of document ids to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n_folds: usize,
    pub seed: u64,
    assignments: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn new(n_folds: usize, seed: u64, assignments: BTreeMap<String, usize>) -> Result<Self> {
        if let Some((id, f)) = assignments.iter().find(|(_, &f)| f >= n_folds) {
            return Err(Error::FoldPlanMismatch(format!("{id} assigned to fold {f} of {n_folds}")));
        }
        Ok(Self {
            n_folds,
            seed,
            assignments,
        })
    }

    /// Stratified plan over parallel `ids` and `labels`.
    pub fn stratified<S: AsRef<str>>(ids: &[S], labels: &[usize], n_folds: usize, seed: u64) -> Result<Self> {
        if ids.len() != labels.len() {
            return Err(Error::LengthMismatch(ids.len(), labels.len()));
        }
        let folds = stratified_assignment(labels, n_folds, seed)?;
        let assignments = ids.iter().map(|i| i.as_ref().to_string()).zip(folds).collect();
        Ok(Self {
            n_folds,
            seed,
            assignments,
        })
    }

    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.assignments.get(id).copied()
    }

    pub fn assignments(&self) -> &BTreeMap<String, usize> {
        &self.assignments
    }

    /// Document ids per fold, each list sorted.
    pub fn folds(&self) -> Vec<Vec<String>> {
        let mut folds = vec![Vec::new(); self.n_folds];
        for (id, &f) in &self.assignments {
            folds[f].push(id.clone());
        }
        folds
    }

    /// Stable 64-bit FNV-1a digest of the assignment, used to check that
    /// reports were produced on the same split.
    pub fn fingerprint(&self) -> String {
        let mut h = Fnv::new();
        h.write(&(self.n_folds as u64).to_le_bytes());
        for (id, f) in &self.assignments {
            h.write(id.as_bytes());
            h.write(&[0]);
            h.write(&(*f as u64).to_le_bytes());
        }
        format!("{:016x}", h.0)
    }

    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        writeln!(out, "id\tfold").ok();
        for (id, f) in &self.assignments {
            writeln!(out, "{id}\t{f}").ok();
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

pub(crate) struct Fnv(pub(crate) u64);

impl Fnv {
    pub(crate) fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}

/// Stratified fold index for each position of `labels`.
///
/// Members of each class are shuffled with a seeded ChaCha stream and dealt
/// round-robin, the dealing offset carrying over from class to class so
/// overall fold sizes stay balanced too.
pub fn stratified_assignment(labels: &[usize], n_folds: usize, seed: u64) -> Result<Vec<usize>> {
    if n_folds < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {n_folds}")));
    }
    if n_folds > labels.len() {
        return Err(Error::invalid(format!(
            "{n_folds} folds requested for only {} documents",
            labels.len()
        )));
    }
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut members = vec![Vec::new(); num_classes];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0; labels.len()];
    let mut offset = 0;
    for (class, mut m) in members.into_iter().enumerate() {
        if !m.is_empty() && m.len() < n_folds {
            log::warn!(
                "class {class} has {} members for {n_folds} folds; some folds will lack it",
                m.len()
            );
        }
        m.shuffle(&mut rng);
        for (j, i) in m.iter().enumerate() {
            folds[*i] = (offset + j) % n_folds;
        }
        offset += m.len();
    }
    Ok(folds)
}

pub fn stratified_folds(corpus: &Corpus, n_folds: usize, seed: u64) -> Result<FoldPlan> {
    let ids: Vec<&str> = corpus.documents().iter().map(|d| d.id.as_str()).collect();
    FoldPlan::stratified(&ids, &corpus.labels(), n_folds, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl FromStr for Polarity {
    type Err = ();
    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "pos" | "positive" | "+" | "+1" => Ok(Polarity::Positive),
            "neg" | "negative" | "-" | "-1" => Ok(Polarity::Negative),
            _ => Err(()),
        }
    }
}

/// Sentence-level polarity training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetSet {
    snippets: Vec<(String, Polarity)>,
}

impl SnippetSet {
    pub fn new(snippets: Vec<(String, Polarity)>) -> Result<Self> {
        let set = Self { snippets };
        let (pos, neg) = set.counts();
        if pos == 0 || neg == 0 {
            return Err(Error::invalid(format!(
                "snippet set needs both polarities (positive {pos}, negative {neg})"
            )));
        }
        Ok(set)
    }

    pub fn snippets(&self) -> &[(String, Polarity)] {
        &self.snippets
    }

    pub fn len(&self) -> usize {
        self.snippets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snippets.is_empty()
    }

    /// `(positive, negative)` counts.
    pub fn counts(&self) -> (usize, usize) {
        let pos = self.snippets.iter().filter(|(_, p)| *p == Polarity::Positive).count();
        (pos, self.snippets.len() - pos)
    }
}

/// Loads snippets from a `polarity<TAB>text` file, or from a directory with
/// `rt-polarity.pos` / `rt-polarity.neg` (Latin-1, one snippet per line).
pub fn load_snippets(path: &Path) -> Result<SnippetSet> {
    if path.is_dir() {
        let mut snippets = Vec::new();
        for (file, polarity) in [("rt-polarity.pos", Polarity::Positive), ("rt-polarity.neg", Polarity::Negative)] {
            let p = path.join(file);
            let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
            let text: String = bytes.iter().map(|&b| b as char).collect();
            snippets.extend(
                text.lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| (l.trim().to_string(), polarity)),
            );
        }
        return SnippetSet::new(snippets);
    }
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut snippets = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (token, text) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            message: "expected `polarity<TAB>text`".into(),
        })?;
        let polarity = token.trim().parse::<Polarity>().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            message: format!("unknown polarity `{}`", token.trim()),
        })?;
        snippets.push((text.trim().to_string(), polarity));
    }
    SnippetSet::new(snippets)
}
