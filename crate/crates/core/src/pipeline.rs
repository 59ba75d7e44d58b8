//! End-to-end rating methods on train/test splits.
//!
//! A [`FoldContext`] owns one split and caches whatever several methods can
//! share: the vocabulary and feature vectors, the base learners, and the
//! inner splits used for tuning metric labeling. Every method is fitted into
//! a self-contained [`TrainedPipeline`] and then applied to the test side,
//! so library runs and saved artifacts go through the same code.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{
    argmax_lowest, binary_positivity_classifier, discretize_fixed, learn_thresholds, pref_reg, train_ova, train_reg,
    BinaryThresholded, OvaModels, ThresholdVector,
};
use crate::corpus::{stratified_assignment, Corpus, Document, FoldPlan, LabelScale, Preprocessor};
use crate::error::{Error, Result};
use crate::eval::majority_label;
use crate::features::{cosine, tf_vector, tokenize, SparseVector, Vocabulary};
use crate::linear::{LinearModel, TrainParams};
use crate::metric_labeling::{
    knn, label_item, select_parameters, MetricConfig, MetricTransform, Neighbor, SimilarityKind, TuningFold,
    TuningGrid, TuningResult,
};
use crate::psp::{psp_of_sentences, psp_similarity, PolarityModel};

/// Version of the [`TrainedPipeline`] JSON layout.
pub const ARTIFACT_VERSION: u32 = 1;

/// Unlabeled model inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub ids: Vec<String>,
    pub tokens: Vec<Vec<String>>,
    /// PSP of each item, when a polarity model was available.
    pub psp: Option<Vec<f64>>,
}

impl Inputs {
    pub fn from_documents(docs: &[Document], polarity: Option<&PolarityModel>) -> Result<Self> {
        let psp = polarity
            .map(|m| {
                docs.par_iter()
                    .map(|d| {
                        psp_of_sentences(&d.sentences, m)
                            .map(|v| v.psp)
                            .map_err(|_| Error::RejectedRecord {
                                id: d.id.clone(),
                                reason: "no sentences".into(),
                            })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        Ok(Self {
            ids: docs.iter().map(|d| d.id.clone()).collect(),
            tokens: docs.par_iter().map(|d| tokenize(&d.text)).collect(),
            psp,
        })
    }

    /// Preprocesses raw `(id, text)` pairs.
    pub fn from_texts(items: &[(String, String)], pre: &Preprocessor, polarity: Option<&PolarityModel>) -> Result<Self> {
        let docs = items
            .iter()
            .map(|(id, raw)| pre.document(id.clone(), raw, 0, None))
            .collect::<Result<Vec<_>>>()?;
        Self::from_documents(&docs, polarity)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn subset(&self, indices: &[usize]) -> Self {
        Self {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            tokens: indices.iter().map(|&i| self.tokens[i].clone()).collect(),
            psp: self.psp.as_ref().map(|p| indices.iter().map(|&i| p[i]).collect()),
        }
    }

    fn psp_values(&self) -> Result<&[f64]> {
        self.psp
            .as_deref()
            .ok_or_else(|| Error::invalid("method needs PSP values but no polarity model was supplied"))
    }
}

/// Labeled inputs on a fixed scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub scale: LabelScale,
    pub inputs: Inputs,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, scale: LabelScale, inputs: Inputs, labels: Vec<usize>) -> Result<Self> {
        if inputs.len() != labels.len() || inputs.tokens.len() != labels.len() {
            return Err(Error::LengthMismatch(inputs.len(), labels.len()));
        }
        if let Some(p) = &inputs.psp {
            if p.len() != labels.len() {
                return Err(Error::LengthMismatch(p.len(), labels.len()));
            }
        }
        if let Some(&l) = labels.iter().find(|&&l| !scale.contains(l)) {
            return Err(Error::invalid(format!("label {l} outside a {}-class scale", scale.num_classes())));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(id) = inputs.ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::DuplicateId(id.clone()));
        }
        Ok(Self {
            name: name.into(),
            scale,
            inputs,
            labels,
        })
    }

    pub fn from_corpus(corpus: &Corpus, polarity: Option<&PolarityModel>) -> Result<Self> {
        let inputs = Inputs::from_documents(corpus.documents(), polarity)?;
        Self::new(corpus.name.clone(), corpus.scale, inputs, corpus.labels())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.inputs.ids
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            scale: self.scale,
            inputs: self.inputs.subset(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// `(train, test)` for one fold of `plan`.
    pub fn split(&self, plan: &FoldPlan, fold: usize) -> Result<(Dataset, Dataset)> {
        if plan.assignments().len() != self.len() {
            return Err(Error::FoldPlanMismatch(format!(
                "plan covers {} documents, dataset has {}",
                plan.assignments().len(),
                self.len()
            )));
        }
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for (i, id) in self.ids().iter().enumerate() {
            match plan.fold_of(id) {
                Some(f) if f == fold => test.push(i),
                Some(_) => train.push(i),
                None => return Err(Error::FoldPlanMismatch(format!("{id} is not in the fold plan"))),
            }
        }
        Ok((self.subset(&train), self.subset(&test)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    Ova,
    Reg,
    /// The constant-zero preference function.
    Zero,
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ova => "ova",
            Self::Reg => "reg",
            Self::Zero => "zero",
        })
    }
}

/// A rating method, written `ova`, `reg+psp`, `ova+to-potts` and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Majority,
    Ova,
    /// Regression rounded at the fixed thresholds.
    Reg,
    /// Regression cut at thresholds learned on the training predictions.
    RegLearned,
    BinaryThresholded,
    /// Learned thresholds applied directly to PSP.
    PspThreshold,
    Metric {
        base: Base,
        similarity: SimilarityKind,
        transform: MetricTransform,
    },
}

impl Method {
    pub fn metric(base: Base, similarity: SimilarityKind) -> Self {
        Self::Metric {
            base,
            similarity,
            transform: MetricTransform::Identity,
        }
    }

    /// Every method the command line accepts.
    pub fn registered() -> Vec<Method> {
        let mut all = vec![
            Self::Majority,
            Self::Ova,
            Self::Reg,
            Self::RegLearned,
            Self::BinaryThresholded,
            Self::PspThreshold,
        ];
        for transform in [MetricTransform::Identity, MetricTransform::Potts] {
            for similarity in [SimilarityKind::Psp, SimilarityKind::TermOverlap] {
                for base in [Base::Ova, Base::Reg, Base::Zero] {
                    all.push(Self::Metric {
                        base,
                        similarity,
                        transform,
                    });
                }
            }
        }
        all
    }

    pub fn needs_psp(&self) -> bool {
        matches!(
            self,
            Self::PspThreshold
                | Self::Metric {
                    similarity: SimilarityKind::Psp,
                    ..
                }
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Majority => f.write_str("majority"),
            Self::Ova => f.write_str("ova"),
            Self::Reg => f.write_str("reg"),
            Self::RegLearned => f.write_str("reg-learned"),
            Self::BinaryThresholded => f.write_str("binary-thresholded"),
            Self::PspThreshold => f.write_str("psp-threshold"),
            Self::Metric {
                base,
                similarity,
                transform,
            } => {
                write!(f, "{base}+{similarity}")?;
                if *transform == MetricTransform::Potts {
                    f.write_str("-potts")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::invalid(format!("unknown method {s:?}"));
        Ok(match s {
            "majority" => Self::Majority,
            "ova" => Self::Ova,
            "reg" => Self::Reg,
            "reg-learned" => Self::RegLearned,
            "binary-thresholded" => Self::BinaryThresholded,
            "psp-threshold" => Self::PspThreshold,
            _ => {
                let (base, rest) = s.split_once('+').ok_or_else(unknown)?;
                let base = match base {
                    "ova" => Base::Ova,
                    "reg" => Base::Reg,
                    "zero" => Base::Zero,
                    _ => return Err(unknown()),
                };
                let (sim, transform) = match rest.strip_suffix("-potts") {
                    Some(sim) => (sim, MetricTransform::Potts),
                    None => (rest, MetricTransform::Identity),
                };
                Self::Metric {
                    base,
                    similarity: sim.parse().map_err(|_| unknown())?,
                    transform,
                }
            }
        })
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Learner settings and the metric-labeling tuning protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentOptions {
    pub hinge: TrainParams,
    pub regression: TrainParams,
    pub grid: TuningGrid,
    pub inner_folds: usize,
    /// Seed of the inner tuning folds.
    pub seed: u64,
    /// Tune `(k, alpha)` on the test fold itself. A diagnostic upper bound.
    pub oracle_tuning: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            hinge: TrainParams::default(),
            regression: TrainParams::default(),
            grid: TuningGrid::default(),
            inner_folds: 9,
            seed: 0,
            oracle_tuning: false,
        }
    }
}

/// Base preference function of a fitted pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseModel {
    Ova(OvaModels),
    Reg(LinearModel),
    Zero,
}

impl BaseModel {
    pub fn preferences(&self, x: &SparseVector, num_classes: usize) -> Result<Vec<f64>> {
        match self {
            Self::Ova(m) => m.preferences(x),
            Self::Reg(m) => Ok(pref_reg(m.predict_raw(x), num_classes)),
            Self::Zero => Ok(vec![0.0; num_classes]),
        }
    }
}

/// Training items that may serve as neighbors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborPool {
    pub ids: Vec<String>,
    pub labels: Vec<usize>,
    pub psp: Option<Vec<f64>>,
    pub tf: Option<Vec<SparseVector>>,
}

impl NeighborPool {
    fn new(train: &Dataset, train_x: &[SparseVector], similarity: SimilarityKind) -> Result<Self> {
        let (psp, tf) = match similarity {
            SimilarityKind::Psp => (Some(train.inputs.psp_values()?.to_vec()), None),
            SimilarityKind::TermOverlap => (None, Some(train_x.to_vec())),
        };
        Ok(Self {
            ids: train.ids().to_vec(),
            labels: train.labels.clone(),
            psp,
            tf,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// The `k` nearest pool items to one query item.
    pub fn neighbors(&self, x: &SparseVector, psp: Option<f64>, k: usize) -> Result<Vec<Neighbor>> {
        let sims: Vec<f64> = match (&self.psp, &self.tf) {
            (Some(pool), _) => {
                let p = psp.ok_or_else(|| Error::invalid("query item has no PSP value"))?;
                pool.iter().map(|&q| psp_similarity(p, q)).collect()
            }
            (None, Some(pool)) => pool.iter().map(|y| cosine(x, y)).collect(),
            (None, None) => return Err(Error::Artifact("neighbor pool has no similarity data".into())),
        };
        knn(&sims, &self.ids, &self.labels, k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FittedModel {
    Majority(usize),
    Ova(OvaModels),
    Reg(LinearModel),
    RegLearned {
        model: LinearModel,
        thresholds: ThresholdVector,
    },
    BinaryThresholded(BinaryThresholded),
    PspThreshold(ThresholdVector),
    Metric {
        base: BaseModel,
        config: MetricConfig,
        pool: NeighborPool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub label: usize,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
}

/// A fitted method, ready to label new items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub format_version: u32,
    pub method: Method,
    pub scale: LabelScale,
    vocabulary: Vocabulary,
    vocabulary_fingerprint: String,
    pub model: FittedModel,
    /// Needed to compute PSP for new documents.
    pub polarity: Option<PolarityModel>,
    pub tuning: Option<TuningResult>,
}

fn vocabulary_fingerprint(v: &Vocabulary) -> String {
    let mut h = crate::corpus::Fnv::new();
    for t in v.terms() {
        h.write(t.as_bytes());
        h.write(&[0]);
    }
    format!("{:016x}", h.0)
}

impl TrainedPipeline {
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn config(&self) -> Option<&MetricConfig> {
        match &self.model {
            FittedModel::Metric { config, .. } => Some(config),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pipeline serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mut p: TrainedPipeline = serde_json::from_str(s).map_err(|e| Error::Artifact(e.to_string()))?;
        if p.format_version != ARTIFACT_VERSION {
            return Err(Error::Artifact(format!(
                "artifact format version {} (expected {ARTIFACT_VERSION})",
                p.format_version
            )));
        }
        p.vocabulary.reindex();
        if vocabulary_fingerprint(&p.vocabulary) != p.vocabulary_fingerprint {
            return Err(Error::Artifact("vocabulary does not match its fingerprint".into()));
        }
        Ok(p)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }

    /// Builds inputs for raw documents, computing PSP when the method needs it.
    pub fn inputs_from_documents(&self, docs: &[Document]) -> Result<Inputs> {
        Inputs::from_documents(docs, self.polarity.as_ref())
    }

    pub fn predict(&self, inputs: &Inputs) -> Result<Vec<Prediction>> {
        let m = self.scale.num_classes();
        let xs: Vec<SparseVector> = inputs.tokens.par_iter().map(|t| tf_vector(t, &self.vocabulary)).collect();
        let labels: Vec<usize> = match &self.model {
            FittedModel::Majority(l) => vec![*l; inputs.len()],
            FittedModel::Ova(ova) => xs
                .par_iter()
                .map(|x| ova.preferences(x).map(|p| argmax_lowest(&p)))
                .collect::<Result<_>>()?,
            FittedModel::Reg(model) => xs.iter().map(|x| discretize_fixed(model.predict_raw(x), m)).collect(),
            FittedModel::RegLearned { model, thresholds } => {
                xs.iter().map(|x| thresholds.classify(model.predict_raw(x))).collect()
            }
            FittedModel::BinaryThresholded(b) => xs.par_iter().map(|x| b.predict(x)).collect::<Result<_>>()?,
            FittedModel::PspThreshold(t) => inputs.psp_values()?.iter().map(|&p| t.classify(p)).collect(),
            FittedModel::Metric { base, config, pool } => {
                let psp = match config.similarity {
                    SimilarityKind::Psp => Some(inputs.psp_values()?),
                    SimilarityKind::TermOverlap => None,
                };
                (0..inputs.len())
                    .into_par_iter()
                    .map(|i| {
                        let prefs = base.preferences(&xs[i], m)?;
                        let nb = pool.neighbors(&xs[i], psp.map(|p| p[i]), config.k)?;
                        Ok(label_item(&prefs, &nb, config.alpha, config.transform))
                    })
                    .collect::<Result<_>>()?
            }
        };
        let (k, alpha) = match self.config() {
            Some(c) => (Some(c.k), Some(c.alpha)),
            None => (None, None),
        };
        Ok(inputs
            .ids
            .iter()
            .zip(labels)
            .map(|(id, label)| Prediction {
                id: id.clone(),
                label,
                k,
                alpha,
            })
            .collect())
    }
}

struct Features {
    vocab: Vocabulary,
    train: Vec<SparseVector>,
    test: Vec<SparseVector>,
}

/// One train/test split with shared, lazily trained components.
pub struct FoldContext {
    train: Dataset,
    test: Dataset,
    options: Arc<ExperimentOptions>,
    polarity: Option<Arc<PolarityModel>>,
    features: OnceLock<Features>,
    ova: OnceLock<Result<OvaModels>>,
    reg: OnceLock<Result<LinearModel>>,
    inner: OnceLock<Result<Vec<FoldContext>>>,
}

/// What running a method on a split produced.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRun {
    pub predictions: Vec<usize>,
    pub config: Option<MetricConfig>,
    pub tuning: Option<TuningResult>,
}

impl FoldContext {
    pub fn new(train: Dataset, test: Dataset, options: Arc<ExperimentOptions>) -> Self {
        Self {
            train,
            test,
            options,
            polarity: None,
            features: OnceLock::new(),
            ova: OnceLock::new(),
            reg: OnceLock::new(),
            inner: OnceLock::new(),
        }
    }

    /// Attaches the polarity model so fitted pipelines can score new text.
    pub fn with_polarity(mut self, polarity: Option<Arc<PolarityModel>>) -> Self {
        self.polarity = polarity;
        self
    }

    pub fn train(&self) -> &Dataset {
        &self.train
    }

    pub fn test(&self) -> &Dataset {
        &self.test
    }

    pub fn options(&self) -> &ExperimentOptions {
        &self.options
    }

    fn features(&self) -> &Features {
        self.features.get_or_init(|| {
            let vocab = Vocabulary::build(self.train.inputs.tokens.iter().map(Vec::as_slice));
            let vectorize = |d: &Dataset| d.inputs.tokens.par_iter().map(|t| tf_vector(t, &vocab)).collect();
            let train = vectorize(&self.train);
            let test = vectorize(&self.test);
            Features { vocab, train, test }
        })
    }

    fn ova(&self) -> Result<&OvaModels> {
        self.ova
            .get_or_init(|| {
                let f = self.features();
                train_ova(&f.train, &self.train.labels, self.train.scale, f.vocab.len(), &self.options.hinge)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn reg(&self) -> Result<&LinearModel> {
        self.reg
            .get_or_init(|| {
                let f = self.features();
                train_reg(&f.train, &self.train.labels, f.vocab.len(), &self.options.regression)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn base(&self, base: Base) -> Result<BaseModel> {
        Ok(match base {
            Base::Ova => BaseModel::Ova(self.ova()?.clone()),
            Base::Reg => BaseModel::Reg(self.reg()?.clone()),
            Base::Zero => BaseModel::Zero,
        })
    }

    fn inner(&self) -> Result<&[FoldContext]> {
        self.inner
            .get_or_init(|| {
                let n = self.options.inner_folds;
                if self.train.len() < n || n < 2 {
                    return Err(Error::invalid(format!(
                        "{} training documents cannot support {n} inner folds; lower inner_folds",
                        self.train.len()
                    )));
                }
                let folds = stratified_assignment(&self.train.labels, n, self.options.seed)?;
                let inner_options = Arc::new(ExperimentOptions {
                    oracle_tuning: false,
                    ..(*self.options).clone()
                });
                Ok((0..n)
                    .map(|f| {
                        let (tr, te): (Vec<usize>, Vec<usize>) = (0..folds.len()).partition(|&i| folds[i] != f);
                        FoldContext::new(self.train.subset(&tr), self.train.subset(&te), inner_options.clone())
                    })
                    .collect())
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    /// Held-out preferences, truths and neighbors of this split's test side.
    fn tuning_fold(&self, base: Base, similarity: SimilarityKind) -> Result<TuningFold> {
        let m = self.train.scale.num_classes();
        let f = self.features();
        let model = self.base(base)?;
        let pool = NeighborPool::new(&self.train, &f.train, similarity)?;
        let k_max = self.options.grid.max_k().min(pool.len());
        let psp = match similarity {
            SimilarityKind::Psp => Some(self.test.inputs.psp_values()?),
            SimilarityKind::TermOverlap => None,
        };
        let rows = (0..self.test.len())
            .into_par_iter()
            .map(|i| {
                let prefs = model.preferences(&f.test[i], m)?;
                let nb = pool.neighbors(&f.test[i], psp.map(|p| p[i]), k_max)?;
                Ok((prefs, nb))
            })
            .collect::<Result<Vec<_>>>()?;
        let (prefs, neighbors) = rows.into_iter().unzip();
        Ok(TuningFold {
            prefs,
            truths: self.test.labels.clone(),
            neighbors,
            n_train: self.train.len(),
        })
    }

    /// Chooses `(k, alpha)` by inner cross-validation on the training side.
    pub fn tune(&self, base: Base, similarity: SimilarityKind, transform: MetricTransform) -> Result<TuningResult> {
        let folds = if self.options.oracle_tuning {
            vec![self.tuning_fold(base, similarity)?]
        } else {
            self.inner()?
                .iter()
                .map(|c| c.tuning_fold(base, similarity))
                .collect::<Result<Vec<_>>>()?
        };
        select_parameters(&folds, &self.options.grid, transform)
    }

    /// Fits `method` on the training side.
    pub fn fit(&self, method: Method) -> Result<TrainedPipeline> {
        if method.needs_psp() {
            self.train.inputs.psp_values()?;
        }
        let f = self.features();
        let m = self.train.scale.num_classes();
        let dim = f.vocab.len();
        let mut tuning = None;
        let model = match method {
            Method::Majority => FittedModel::Majority(majority_label(&self.train.labels, m)),
            Method::Ova => FittedModel::Ova(self.ova()?.clone()),
            Method::Reg => FittedModel::Reg(self.reg()?.clone()),
            Method::RegLearned => {
                let model = self.reg()?.clone();
                let g: Vec<f64> = f.train.iter().map(|x| model.predict_raw(x)).collect();
                let thresholds = learn_thresholds(&g, &self.train.labels, m)?;
                FittedModel::RegLearned { model, thresholds }
            }
            Method::BinaryThresholded => FittedModel::BinaryThresholded(binary_positivity_classifier(
                &f.train,
                &self.train.labels,
                self.train.scale,
                dim,
                &self.options.hinge,
            )?),
            Method::PspThreshold => {
                FittedModel::PspThreshold(learn_thresholds(self.train.inputs.psp_values()?, &self.train.labels, m)?)
            }
            Method::Metric {
                base,
                similarity,
                transform,
            } => {
                let t = self.tune(base, similarity, transform)?;
                let config = MetricConfig {
                    alpha: t.alpha,
                    k: t.k,
                    transform,
                    similarity,
                    zero_preference: base == Base::Zero,
                };
                config.validate(self.train.len())?;
                tuning = Some(t);
                FittedModel::Metric {
                    base: self.base(base)?,
                    config,
                    pool: NeighborPool::new(&self.train, &f.train, similarity)?,
                }
            }
        };
        Ok(TrainedPipeline {
            format_version: ARTIFACT_VERSION,
            method,
            scale: self.train.scale,
            vocabulary: f.vocab.clone(),
            vocabulary_fingerprint: vocabulary_fingerprint(&f.vocab),
            model,
            polarity: self.polarity.as_deref().cloned(),
            tuning,
        })
    }

    /// Fits `method` and labels the test side.
    pub fn run(&self, method: Method) -> Result<MethodRun> {
        let pipeline = self.fit(method)?;
        let predictions = pipeline.predict(&self.test.inputs)?.into_iter().map(|p| p.label).collect();
        Ok(MethodRun {
            predictions,
            config: pipeline.config().copied(),
            tuning: pipeline.tuning,
        })
    }

    /// Trained OVA weights, for inspection.
    pub fn ova_models(&self) -> Result<&OvaModels> {
        self.ova()
    }

    /// Trained regression model, for inspection.
    pub fn reg_model(&self) -> Result<&LinearModel> {
        self.reg()
    }
}

/// Fits `method` on `train` alone.
pub fn fit_pipeline(
    train: &Dataset,
    method: Method,
    options: &ExperimentOptions,
    polarity: Option<Arc<PolarityModel>>,
) -> Result<TrainedPipeline> {
    let empty = train.subset(&[]);
    FoldContext::new(train.clone(), empty, Arc::new(options.clone()))
        .with_polarity(polarity)
        .fit(method)
}

/// Tunes and trains on `train`, then labels `test`.
pub fn run_pipeline(train: &Dataset, test: &Dataset, method: Method, options: &ExperimentOptions) -> Result<MethodRun> {
    FoldContext::new(train.clone(), test.clone(), Arc::new(options.clone())).run(method)
}
