//! Label preference functions built from the linear learners.
//!
//! Every preference function maps an item to one score per label, higher
//! meaning more preferred. Argmax ties always go to the lowest label.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::LabelScale;
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::linear::{train_eps_regression, train_hinge, LinearModel, TrainParams};

/// Index of the largest score, preferring the lowest index on ties.
pub fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Scores pi(x, l) for a set of items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceTable {
    pub method: String,
    num_classes: usize,
    rows: Vec<(String, Vec<f64>)>,
}

impl PreferenceTable {
    pub fn new(method: impl Into<String>, num_classes: usize) -> Self {
        Self {
            method: method.into(),
            num_classes,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, id: impl Into<String>, scores: Vec<f64>) -> Result<()> {
        if scores.len() != self.num_classes {
            return Err(Error::LengthMismatch(scores.len(), self.num_classes));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite);
        }
        self.rows.push((id.into(), scores));
        Ok(())
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn rows(&self) -> &[(String, Vec<f64>)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn argmax_labels(&self) -> Vec<usize> {
        self.rows.iter().map(|(_, s)| argmax_lowest(s)).collect()
    }

    /// CSV with header `id,label,score`, one line per (item, label).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "id,label,score")?;
        for (id, scores) in &self.rows {
            for (label, s) in scores.iter().enumerate() {
                writeln!(w, "{id},{label},{s}")?;
            }
        }
        Ok(())
    }
}

/// One binary machine per label, label vs rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvaModels {
    models: Vec<LinearModel>,
}

impl OvaModels {
    pub fn models(&self) -> &[LinearModel] {
        &self.models
    }

    pub fn num_classes(&self) -> usize {
        self.models.len()
    }

    /// Signed geometric distance of `x` to each label's side of its plane.
    pub fn preferences(&self, x: &SparseVector) -> Result<Vec<f64>> {
        self.models.iter().map(|m| m.geometric_margin(x)).collect()
    }
}

pub fn train_ova(xs: &[SparseVector], labels: &[usize], scale: LabelScale, dim: usize, params: &TrainParams) -> Result<OvaModels> {
    if xs.len() != labels.len() {
        return Err(Error::LengthMismatch(xs.len(), labels.len()));
    }
    let mut counts = vec![0usize; scale.num_classes()];
    for &l in labels {
        if !scale.contains(l) {
            return Err(Error::invalid(format!("label {l} outside the scale")));
        }
        counts[l] += 1;
    }
    if let Some(missing) = counts.iter().position(|&c| c == 0) {
        return Err(Error::ClassAbsent(missing));
    }
    let models = scale
        .labels()
        .into_par_iter()
        .map(|l| {
            let ys: Vec<f64> = labels.iter().map(|&y| if y == l { 1.0 } else { -1.0 }).collect();
            train_hinge(xs, &ys, dim, params)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OvaModels { models })
}

/// Epsilon-insensitive regression on the integer labels.
pub fn train_reg(xs: &[SparseVector], labels: &[usize], dim: usize, params: &TrainParams) -> Result<LinearModel> {
    if labels.iter().all(|&l| Some(&l) == labels.first()) {
        return Err(Error::SingleClass);
    }
    let ys: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    train_eps_regression(xs, &ys, dim, params)
}

/// `pi(x, l) = -|l - g(x)|`.
pub fn pref_reg(g: f64, num_classes: usize) -> Vec<f64> {
    (0..num_classes).map(|l| -(l as f64 - g).abs()).collect()
}

/// Rounds at the fixed thresholds 0.5, 1.5, ...; boundaries go upward.
pub fn discretize_fixed(g: f64, num_classes: usize) -> usize {
    let top = num_classes.saturating_sub(1) as f64;
    let r = (g + 0.5).floor();
    if r.is_nan() {
        0
    } else {
        r.clamp(0.0, top) as usize
    }
}

/// Nondecreasing cut points; a score's label is how many it reaches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdVector {
    #[serde(with = "extended_reals")]
    thresholds: Vec<f64>,
}

impl ThresholdVector {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.iter().any(|t| t.is_nan()) {
            return Err(Error::NonFinite);
        }
        if thresholds.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("thresholds must be nondecreasing"));
        }
        Ok(Self { thresholds })
    }

    /// The fixed rounding thresholds used by [`discretize_fixed`].
    pub fn fixed(num_classes: usize) -> Self {
        Self {
            thresholds: (1..num_classes).map(|l| l as f64 - 0.5).collect(),
        }
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn num_classes(&self) -> usize {
        self.thresholds.len() + 1
    }

    pub fn classify(&self, score: f64) -> usize {
        self.thresholds.iter().filter(|&&t| score >= t).count()
    }

    pub fn training_errors(&self, scores: &[f64], labels: &[usize]) -> usize {
        scores.iter().zip(labels).filter(|(&s, &l)| self.classify(s) != l).count()
    }
}

mod extended_reals {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Real {
        Finite(f64),
        Named(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|&x| match x {
                f64::INFINITY => Real::Named("inf".into()),
                f64::NEG_INFINITY => Real::Named("-inf".into()),
                x => Real::Finite(x),
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Real>::deserialize(d)?
            .into_iter()
            .map(|r| match r {
                Real::Finite(x) => Ok(x),
                Real::Named(n) if n == "inf" => Ok(f64::INFINITY),
                Real::Named(n) if n == "-inf" => Ok(f64::NEG_INFINITY),
                Real::Named(n) => Err(serde::de::Error::custom(format!("bad threshold {n:?}"))),
            })
            .collect()
    }
}

/// Minimum-training-error thresholds by dynamic programming.
///
/// Candidate cuts are `-inf`, the midpoints between adjacent distinct
/// sorted scores, and `+inf`. Among optimal solutions the lexicographically
/// lowest threshold vector is returned.
pub fn learn_thresholds(scores: &[f64], labels: &[usize], num_classes: usize) -> Result<ThresholdVector> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch(scores.len(), labels.len()));
    }
    if num_classes < 2 {
        return Err(Error::invalid("need at least 2 classes"));
    }
    if scores.len() < num_classes {
        return Err(Error::invalid(format!(
            "{} examples cannot fit {num_classes} classes",
            scores.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite);
    }
    if let Some(&l) = labels.iter().find(|&&l| l >= num_classes) {
        return Err(Error::invalid(format!("label {l} outside {num_classes} classes")));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // distinct score values and per-label counts in each group
    let mut values: Vec<f64> = Vec::new();
    let mut counts: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        if values.last() != Some(&scores[i]) {
            values.push(scores[i]);
            counts.push(vec![0; num_classes]);
        }
        counts.last_mut().unwrap()[labels[i]] += 1;
    }
    let g = values.len();
    let m = num_classes;
    // prefix[l][c]: examples with label l in groups [0, c)
    let mut prefix = vec![vec![0usize; g + 1]; m];
    for l in 0..m {
        for c in 0..g {
            prefix[l][c + 1] = prefix[l][c] + counts[c][l];
        }
    }
    let total = |c: usize| -> usize { (0..m).map(|l| prefix[l][c]).sum() };
    let totals: Vec<usize> = (0..=g).map(total).collect();
    let seg_cost = |l: usize, a: usize, b: usize| (totals[b] - totals[a]) - (prefix[l][b] - prefix[l][a]);

    // suffix[j][c]: least errors labelling groups [c, g) with labels j..m,
    // segment j starting at c
    let mut suffix = vec![vec![usize::MAX; g + 1]; m];
    for (c, s) in suffix[m - 1].iter_mut().enumerate() {
        *s = seg_cost(m - 1, c, g);
    }
    for j in (0..m - 1).rev() {
        for c in 0..=g {
            suffix[j][c] = (c..=g).map(|e| seg_cost(j, c, e) + suffix[j + 1][e]).min().unwrap();
        }
    }
    let best = suffix[0][0];
    let mut cuts = Vec::with_capacity(m - 1);
    let (mut start, mut spent) = (0, 0);
    for j in 0..m - 1 {
        let e = (start..=g)
            .find(|&e| spent + seg_cost(j, start, e) + suffix[j + 1][e] == best)
            .expect("an optimal cut exists");
        spent += seg_cost(j, start, e);
        cuts.push(e);
        start = e;
    }
    let thresholds = cuts
        .into_iter()
        .map(|c| match c {
            0 => f64::NEG_INFINITY,
            c if c == g => f64::INFINITY,
            c => 0.5 * (values[c - 1] + values[c]),
        })
        .collect();
    ThresholdVector::new(thresholds)
}

/// A positive-vs-negative machine whose margins are cut into classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryThresholded {
    pub model: LinearModel,
    pub thresholds: ThresholdVector,
}

impl BinaryThresholded {
    pub fn predict(&self, x: &SparseVector) -> Result<usize> {
        Ok(self.thresholds.classify(self.model.geometric_margin(x)?))
    }
}

/// Labels above 0.5 are positive; thresholds are learned on training margins.
pub fn binary_positivity_classifier(
    xs: &[SparseVector],
    labels: &[usize],
    scale: LabelScale,
    dim: usize,
    params: &TrainParams,
) -> Result<BinaryThresholded> {
    if xs.len() != labels.len() {
        return Err(Error::LengthMismatch(xs.len(), labels.len()));
    }
    let ys: Vec<f64> = labels.iter().map(|&l| if l as f64 > 0.5 { 1.0 } else { -1.0 }).collect();
    let model = train_hinge(xs, &ys, dim, params)?;
    let margins = xs.iter().map(|x| model.geometric_margin(x)).collect::<Result<Vec<_>>>()?;
    let thresholds = learn_thresholds(&margins, labels, scale.num_classes())?;
    Ok(BinaryThresholded { model, thresholds })
}
