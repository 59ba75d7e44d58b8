//! Metric labeling over nearest training neighbors.
//!
//! Each test item `x` gets the label minimizing
//!
//! ```text
//! -pi(x, l) + alpha * sum_{y in nn_k(x)} f(|l - l_y|) * sim(x, y)
//! ```
//!
//! Neighbors come from the training set only, so items are labeled
//! independently of one another.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricTransform {
    /// `f(d) = d`
    Identity,
    /// `f(d) = 1` if `d > 0`, else 0
    Potts,
}

impl MetricTransform {
    pub fn apply(self, d: usize) -> f64 {
        match self {
            Self::Identity => d as f64,
            Self::Potts => (d > 0) as u8 as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    /// Cosine of PSP vectors.
    Psp,
    /// Cosine of term-frequency vectors.
    TermOverlap,
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Psp => "psp",
            Self::TermOverlap => "to",
        })
    }
}

impl FromStr for SimilarityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psp" => Ok(Self::Psp),
            "to" | "term_overlap" => Ok(Self::TermOverlap),
            other => Err(Error::invalid(format!("unknown similarity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub alpha: f64,
    pub k: usize,
    pub transform: MetricTransform,
    pub similarity: SimilarityKind,
    /// Replace the base preferences with the constant 0.
    pub zero_preference: bool,
}

impl MetricConfig {
    pub fn validate(&self, n_train: usize) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be finite and >= 0, got {}", self.alpha)));
        }
        if self.k == 0 || self.k > n_train {
            return Err(Error::invalid(format!("k = {} outside [1, {n_train}]", self.k)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    /// Position in the training set.
    pub index: usize,
    pub label: usize,
    pub similarity: f64,
}

/// The `k` most similar training items; ties go to the smaller id.
pub fn knn<S: AsRef<str>>(similarities: &[f64], ids: &[S], labels: &[usize], k: usize) -> Result<Vec<Neighbor>> {
    let n = similarities.len();
    if ids.len() != n || labels.len() != n {
        return Err(Error::LengthMismatch(ids.len().min(labels.len()), n));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds the {n} training items")));
    }
    if similarities.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let cmp = |&a: &usize, &b: &usize| {
        similarities[b]
            .total_cmp(&similarities[a])
            .then_with(|| ids[a].as_ref().cmp(ids[b].as_ref()))
    };
    if k < n && k > 0 {
        order.select_nth_unstable_by(k - 1, cmp);
        order.truncate(k);
    }
    order.sort_by(cmp);
    order.truncate(k);
    Ok(order
        .into_iter()
        .map(|i| Neighbor {
            index: i,
            label: labels[i],
            similarity: similarities[i],
        })
        .collect())
}

/// Neighborhood penalty `sum f(|l - l_y|) * sim(x, y)` without alpha.
pub fn penalty(label: usize, neighbors: &[Neighbor], transform: MetricTransform) -> f64 {
    neighbors
        .iter()
        .map(|n| transform.apply(label.abs_diff(n.label)) * n.similarity)
        .sum()
}

pub fn item_cost(prefs: &[f64], label: usize, neighbors: &[Neighbor], alpha: f64, transform: MetricTransform) -> f64 {
    let base = -prefs[label];
    if alpha == 0.0 {
        base
    } else {
        base + alpha * penalty(label, neighbors, transform)
    }
}

/// Label of least cost; ties go to the lowest label.
pub fn label_item(prefs: &[f64], neighbors: &[Neighbor], alpha: f64, transform: MetricTransform) -> usize {
    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for l in 0..prefs.len() {
        let c = item_cost(prefs, l, neighbors, alpha, transform);
        if c < best_cost {
            best = l;
            best_cost = c;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningGrid {
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
}

impl Default for TuningGrid {
    fn default() -> Self {
        Self {
            ks: vec![1, 3, 5, 7, 10, 15, 20, 25, 30],
            alphas: vec![0.0, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0],
        }
    }
}

impl TuningGrid {
    pub fn single(k: usize, alpha: f64) -> Self {
        Self {
            ks: vec![k],
            alphas: vec![alpha],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() || self.alphas.is_empty() {
            return Err(Error::invalid("tuning grid is empty"));
        }
        if self.ks.contains(&0) {
            return Err(Error::invalid("k must be >= 1"));
        }
        if self.alphas.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::invalid("alpha values must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn max_k(&self) -> usize {
        self.ks.iter().copied().max().unwrap_or(0)
    }
}

/// Everything needed to score a grid point on one held-out split.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningFold {
    pub prefs: Vec<Vec<f64>>,
    pub truths: Vec<usize>,
    /// Neighbors of each held-out item, at least as many as the largest `k`
    /// used, most similar first.
    pub neighbors: Vec<Vec<Neighbor>>,
    /// Size of the split's training side.
    pub n_train: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub alpha: f64,
    pub k: usize,
    pub accuracy: f64,
    /// Mean held-out accuracy of every grid point, as `(alpha, k, accuracy)`.
    pub table: Vec<(f64, usize, f64)>,
}

/// Grid point with the best mean held-out accuracy.
///
/// Ties go to the smaller alpha, then the smaller k. Values of `k` larger
/// than any split's training side are skipped.
pub fn select_parameters(folds: &[TuningFold], grid: &TuningGrid, transform: MetricTransform) -> Result<TuningResult> {
    grid.validate()?;
    if folds.is_empty() {
        return Err(Error::invalid("no tuning folds"));
    }
    let k_cap = folds.iter().map(|f| f.n_train).min().unwrap_or(0);
    let mut alphas = grid.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let mut ks: Vec<usize> = grid.ks.iter().copied().filter(|&k| k <= k_cap).collect();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return Err(Error::invalid(format!("no grid k fits training splits of {k_cap} items")));
    }
    let mut table = Vec::with_capacity(alphas.len() * ks.len());
    let mut best: Option<(f64, usize, f64)> = None;
    for &alpha in &alphas {
        for &k in &ks {
            let mut total = 0.0;
            for fold in folds {
                let correct = fold
                    .prefs
                    .iter()
                    .zip(&fold.neighbors)
                    .zip(&fold.truths)
                    .filter(|((p, nb), &t)| label_item(p, &nb[..k.min(nb.len())], alpha, transform) == t)
                    .count();
                total += correct as f64 / fold.truths.len().max(1) as f64;
            }
            let acc = total / folds.len() as f64;
            table.push((alpha, k, acc));
            if best.is_none_or(|b| acc > b.2) {
                best = Some((alpha, k, acc));
            }
        }
    }
    let (alpha, k, accuracy) = best.expect("grid is non-empty");
    Ok(TuningResult {
        alpha,
        k,
        accuracy,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nb(label: usize, similarity: f64) -> Neighbor {
        Neighbor {
            index: 0,
            label,
            similarity,
        }
    }

    #[test]
    fn transforms() {
        assert_eq!(MetricTransform::Identity.apply(3), 3.0);
        assert_eq!(MetricTransform::Potts.apply(3), 1.0);
        assert_eq!(MetricTransform::Potts.apply(0), 0.0);
    }

    #[test]
    fn knn_examples() {
        let ids = ["a", "b", "c", "d"];
        let labels = [0, 1, 2, 0];
        let all = knn(&[0.1, 0.5, 0.5, 0.2], &ids, &labels, 4).unwrap();
        assert_eq!(all.iter().map(|n| n.index).collect::<Vec<_>>(), vec![1, 2, 3, 0]);
        let one = knn(&[0.0, 1.0, 0.0, 0.0], &ids, &labels, 1).unwrap();
        assert_eq!((one[0].index, one[0].label), (1, 1));
        let tie = knn(&[0.3, 0.3, 0.3, 0.3], &["z", "y", "x", "w"], &labels, 2).unwrap();
        assert_eq!(tie.iter().map(|n| n.index).collect::<Vec<_>>(), vec![3, 2]);
        assert!(knn(&[0.1], &["a"], &[0], 2).is_err());
    }

    #[test]
    fn cost_examples() {
        let prefs = [0.3, -0.1, 0.7];
        let neighbors = [nb(0, 0.5), nb(2, 1.0)];
        for l in 0..3 {
            assert_eq!(item_cost(&prefs, l, &neighbors, 0.0, MetricTransform::Identity), -prefs[l]);
        }
        let same = [nb(1, 0.4), nb(1, 0.9)];
        assert_eq!(penalty(1, &same, MetricTransform::Identity), 0.0);
        assert_eq!(penalty(1, &neighbors, MetricTransform::Identity), 1.5);
        assert_eq!(item_cost(&prefs, 1, &neighbors, 1.0, MetricTransform::Identity), 0.1 + 1.5);
    }

    #[test]
    fn label_examples() {
        let prefs = [0.9, 0.1, -0.4];
        assert_eq!(label_item(&prefs, &[nb(2, 1.0)], 0.0, MetricTransform::Identity), 0);
        let all_two = [nb(2, 0.3), nb(2, 0.8), nb(2, 0.1)];
        assert_eq!(label_item(&prefs, &all_two, 1e6, MetricTransform::Identity), 2);
        assert_eq!(label_item(&[0.0, 0.0, 0.0], &[], 1.0, MetricTransform::Potts), 0);
    }

    fn fold(prefs: Vec<Vec<f64>>, truths: Vec<usize>, neighbors: Vec<Vec<Neighbor>>) -> TuningFold {
        TuningFold {
            n_train: 100,
            prefs,
            truths,
            neighbors,
        }
    }

    #[test]
    fn tuning_single_point_and_ties() {
        let f = fold(vec![vec![1.0, 0.0]], vec![0], vec![vec![nb(1, 1.0); 3]]);
        let r = select_parameters(std::slice::from_ref(&f), &TuningGrid::single(3, 0.5), MetricTransform::Identity).unwrap();
        assert_eq!((r.alpha, r.k), (0.5, 3));
        // every grid point gets the item right, so the smallest alpha and k win
        let r = select_parameters(&[f], &TuningGrid::default(), MetricTransform::Identity).unwrap();
        assert_eq!((r.alpha, r.k, r.accuracy), (0.0, 1, 1.0));
        assert_eq!(r.table.len(), 9 * 9);
    }

    #[test]
    fn tuning_prefers_helpful_neighbors() {
        // base preferences point the wrong way; neighbors know the truth
        let f = fold(
            vec![vec![0.2, 0.0], vec![0.0, 0.2]],
            vec![1, 0],
            vec![vec![nb(1, 1.0); 5], vec![nb(0, 1.0); 5]],
        );
        let r = select_parameters(&[f], &TuningGrid::default(), MetricTransform::Identity).unwrap();
        assert!(r.alpha > 0.0 && r.accuracy == 1.0);
        assert_eq!((r.alpha, r.k), (0.05, 5));
    }

    #[test]
    fn tuning_skips_oversized_k() {
        let mut f = fold(vec![vec![1.0, 0.0]], vec![0], vec![vec![nb(0, 1.0); 2]]);
        f.n_train = 2;
        let r = select_parameters(&[f], &TuningGrid::default(), MetricTransform::Identity).unwrap();
        assert!(r.table.iter().all(|&(_, k, _)| k <= 2));
    }

    fn neighbor_strategy(max_label: usize) -> impl Strategy<Value = Vec<Neighbor>> {
        prop::collection::vec((0..max_label, 0.0f64..1.0), 0..30)
            .prop_map(|v| v.into_iter().map(|(l, s)| nb(l, s)).collect())
    }

    proptest! {
        #[test]
        fn knn_matches_full_sort(sims in prop::collection::vec(0u8..5, 1..25), k_frac in 0.0f64..=1.0) {
            let sims: Vec<f64> = sims.into_iter().map(|s| s as f64 / 4.0).collect();
            let n = sims.len();
            let ids: Vec<String> = (0..n).map(|i| format!("doc{:05}", (i * 7919) % 10007)).collect();
            let labels = vec![0; n];
            let k = ((n as f64) * k_frac).round() as usize;
            let got: Vec<usize> = knn(&sims, &ids, &labels, k).unwrap().iter().map(|n| n.index).collect();
            let mut all: Vec<usize> = (0..n).collect();
            all.sort_by(|&a, &b| sims[b].partial_cmp(&sims[a]).unwrap().then(ids[a].cmp(&ids[b])));
            prop_assert_eq!(got, all[..k].to_vec());
        }

        #[test]
        fn large_alpha_reaches_zero_preference_choice(
            prefs in prop::collection::vec(-2.0f64..2.0, 2..5),
            neighbors in neighbor_strategy(4),
            potts in any::<bool>(),
        ) {
            let m = prefs.len();
            let neighbors: Vec<Neighbor> = neighbors.into_iter().map(|n| nb(n.label % m, n.similarity)).collect();
            let t = if potts { MetricTransform::Potts } else { MetricTransform::Identity };
            let pens: Vec<f64> = (0..m).map(|l| penalty(l, &neighbors, t)).collect();
            let min = pens.iter().cloned().fold(f64::INFINITY, f64::min);
            let minimizers: Vec<usize> = (0..m).filter(|&l| pens[l] == min).collect();
            let second = pens.iter().cloned().filter(|&p| p > min).fold(f64::INFINITY, f64::min);
            if minimizers.len() == 1 && second.is_finite() {
                // beyond this alpha the penalty gap outweighs any preference gap
                let spread = prefs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - prefs.iter().cloned().fold(f64::INFINITY, f64::min);
                let alpha_star = spread / (second - min);
                let zero = label_item(&vec![0.0; m], &neighbors, 1.0, t);
                prop_assert_eq!(label_item(&prefs, &neighbors, 2.0 * alpha_star + 1.0, t), zero);
            }
        }
    }
}
