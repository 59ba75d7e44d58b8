//! Term-frequency features and corpus-level lexical statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Lowercased runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Term index built from training documents only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Indexes every term of `docs` in lexicographic order.
    pub fn build<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let distinct: BTreeSet<&str> = doc.iter().map(String::as_str).collect();
            for t in distinct {
                *df.entry(t).or_default() += 1;
            }
        }
        let (terms, doc_freq): (Vec<String>, Vec<usize>) = df.into_iter().map(|(t, n)| (t.to_string(), n)).unzip();
        Self::from_parts(terms, doc_freq)
    }

    fn from_parts(terms: Vec<String>, doc_freq: Vec<usize>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Self { terms, doc_freq, index }
    }

    /// Rebuilds a vocabulary from its term list (document frequencies zeroed).
    pub fn from_terms(terms: Vec<String>) -> Self {
        let n = terms.len();
        Self::from_parts(terms, vec![0; n])
    }

    /// Restores the lookup table after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self, index: usize) -> usize {
        self.doc_freq[index]
    }

    /// Debug dump: `term<TAB>index<TAB>df` per line.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "term\tindex\tdf")?;
        for (i, (t, df)) in self.terms.iter().zip(&self.doc_freq).enumerate() {
            writeln!(w, "{t}\t{i}\t{df}")?;
        }
        Ok(())
    }
}

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Sorts, merges duplicate indices by summing, and drops zeros.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|&(i, _)| i);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|&(_, v)| v != 0.0);
        Self { entries }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        Self::from_pairs(values.iter().copied().enumerate().collect())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One past the largest stored index.
    pub fn dim_hint(&self) -> usize {
        self.entries.last().map_or(0, |&(i, _)| i + 1)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Dot product with a dense vector; indices beyond `dense` count as zero.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .filter_map(|&(i, v)| dense.get(i).map(|w| w * v))
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.is_finite())
    }
}

/// Term counts of in-vocabulary tokens.
pub fn tf_vector(tokens: &[String], vocab: &Vocabulary) -> SparseVector {
    let pairs = tokens.iter().filter_map(|t| vocab.index_of(t)).map(|i| (i, 1.0)).collect();
    SparseVector::from_pairs(pairs)
}

/// `u.v / (|u| |v|)`, or 0 when either vector is empty.
pub fn cosine(u: &SparseVector, v: &SparseVector) -> f64 {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0)
}

/// Term-set construction for vocabulary overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapOptions {
    /// A term belongs to a class's vocabulary once it occurs this many times
    /// in that class.
    pub min_count: usize,
}

impl Default for OverlapOptions {
    fn default() -> Self {
        Self { min_count: 2 }
    }
}

fn class_term_counts(corpus: &Corpus) -> Vec<HashMap<String, usize>> {
    let mut counts = vec![HashMap::new(); corpus.scale.num_classes()];
    for doc in corpus.documents() {
        for t in tokenize(&doc.text) {
            *counts[doc.label].entry(t).or_default() += 1;
        }
    }
    counts
}

fn term_set(counts: &HashMap<String, usize>, min_count: usize) -> BTreeSet<&str> {
    counts
        .iter()
        .filter(|(_, &n)| n >= min_count)
        .map(|(t, _)| t.as_str())
        .collect()
}

fn jaccard_percent(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    100.0 * a.intersection(b).count() as f64 / union as f64
}

fn check_class(corpus: &Corpus, class: usize, counts: &[usize]) -> Result<()> {
    if !corpus.scale.contains(class) {
        return Err(Error::invalid(format!(
            "unknown class {class} for a {}-class corpus",
            corpus.scale.num_classes()
        )));
    }
    if counts[class] == 0 {
        return Err(Error::ClassAbsent(class));
    }
    Ok(())
}

/// Jaccard overlap, in percent, of the term sets of two classes.
pub fn class_vocab_overlap(corpus: &Corpus, class_a: usize, class_b: usize, opts: OverlapOptions) -> Result<f64> {
    let doc_counts = corpus.class_counts();
    check_class(corpus, class_a, &doc_counts)?;
    check_class(corpus, class_b, &doc_counts)?;
    let counts = class_term_counts(corpus);
    Ok(jaccard_percent(
        &term_set(&counts[class_a], opts.min_count),
        &term_set(&counts[class_b], opts.min_count),
    ))
}

/// Overlap averaged over all class pairs at each label distance `1..m`.
pub fn overlap_by_distance(corpus: &Corpus, opts: OverlapOptions) -> Vec<(usize, f64)> {
    let m = corpus.scale.num_classes();
    let counts = class_term_counts(corpus);
    let sets: Vec<_> = counts.iter().map(|c| term_set(c, opts.min_count)).collect();
    (1..m)
        .map(|d| {
            let vals: Vec<f64> = (0..m - d).map(|a| jaccard_percent(&sets[a], &sets[a + d])).collect();
            (d, vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguishingTerm {
    pub term: String,
    pub class: usize,
    /// Share of the term's occurrences that fall in `class`.
    pub purity: f64,
    pub count: usize,
}

/// Frequent terms whose occurrences concentrate in one class, sorted by
/// purity then count (both descending), then term.
pub fn distinguishing_terms(corpus: &Corpus, min_count: usize, purity: f64) -> Result<Vec<DistinguishingTerm>> {
    if min_count == 0 || !(purity > 0.0 && purity <= 1.0) {
        return Err(Error::invalid("need min_count >= 1 and 0 < purity <= 1"));
    }
    let m = corpus.scale.num_classes();
    let mut per_term: HashMap<String, Vec<usize>> = HashMap::new();
    for doc in corpus.documents() {
        for t in tokenize(&doc.text) {
            per_term.entry(t).or_insert_with(|| vec![0; m])[doc.label] += 1;
        }
    }
    let mut out: Vec<DistinguishingTerm> = per_term
        .into_iter()
        .filter_map(|(term, counts)| {
            let total: usize = counts.iter().sum();
            if total < min_count {
                return None;
            }
            // first class wins ties so the report is deterministic
            let (class, best) = counts
                .iter()
                .enumerate()
                .fold((0, 0), |acc, (c, &n)| if n > acc.1 { (c, n) } else { acc });
            let p = best as f64 / total as f64;
            (p >= purity).then_some(DistinguishingTerm {
                term,
                class,
                purity: p,
                count: total,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.purity
            .total_cmp(&a.purity)
            .then(b.count.cmp(&a.count))
            .then_with(|| a.term.cmp(&b.term))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LabelScale, Preprocessor};
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn corpus(items: &[(&str, &str, usize)], classes: usize) -> Corpus {
        Corpus::from_texts(
            "t",
            LabelScale::new(classes).unwrap(),
            items.iter().map(|&(i, t, l)| (i, t, l)),
            &Preprocessor::default(),
        )
        .unwrap()
    }

    #[test]
    fn tokenize_folds_case_and_punctuation() {
        assert_eq!(tokenize("Great, GREAT film."), toks("great great film"));
        assert!(tokenize("").is_empty());
        // hand count: it(1) s(2) a(3) 2(4) hour(5) slog(6) but(7) the(8)
        // score(9) soars(10)
        assert_eq!(tokenize("It's a 2-hour slog -- but the score... soars!").len(), 10);
    }

    #[test]
    fn tf_vector_counts_in_vocab_tokens() {
        let vocab = Vocabulary::build([toks("a b").as_slice()]);
        let v = tf_vector(&toks("a a b"), &vocab);
        assert_eq!(v.entries(), &[(0, 2.0), (1, 1.0)]);
        assert!(tf_vector(&toks("x y"), &vocab).is_empty());
    }

    #[test]
    fn tf_vector_matches_dictionary_count() {
        let doc = toks("the cat saw the other cat and the dog ran off");
        let vocab = Vocabulary::build([toks("cat dog the ran zebra").as_slice()]);
        let mut oracle: BTreeMap<&str, f64> = BTreeMap::new();
        for t in &doc {
            if ["cat", "dog", "the", "ran", "zebra"].contains(&t.as_str()) {
                *oracle.entry(t.as_str()).or_default() += 1.0;
            }
        }
        let expected: Vec<(usize, f64)> = oracle.iter().map(|(t, &n)| (vocab.index_of(t).unwrap(), n)).collect();
        assert_eq!(tf_vector(&doc, &vocab).entries(), expected.as_slice());
    }

    #[test]
    fn cosine_examples() {
        let u = SparseVector::from_pairs(vec![(0, 1.0), (1, 1.0)]);
        let v = SparseVector::from_pairs(vec![(0, 1.0)]);
        assert!((cosine(&u, &u) - 1.0).abs() < 1e-15);
        assert!((cosine(&u, &v) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let w = SparseVector::from_pairs(vec![(2, 3.0)]);
        assert_eq!(cosine(&u, &w), 0.0);
        assert_eq!(cosine(&u, &SparseVector::default()), 0.0);
    }

    #[test]
    fn overlap_examples() {
        let opts = OverlapOptions { min_count: 1 };
        let c = corpus(&[("1", "a b c", 0), ("2", "b c d", 1), ("3", "a b c", 2)], 3);
        assert_eq!(class_vocab_overlap(&c, 0, 1, opts).unwrap(), 50.0);
        assert_eq!(class_vocab_overlap(&c, 0, 2, opts).unwrap(), 100.0);
        let d = corpus(&[("1", "a b", 0), ("2", "c d", 1)], 2);
        assert_eq!(class_vocab_overlap(&d, 0, 1, opts).unwrap(), 0.0);
        assert!(class_vocab_overlap(&d, 0, 5, opts).is_err());
        // the default hapax cut drops once-seen terms
        let e = corpus(&[("1", "a a b b c", 0), ("2", "b b c c d d", 1)], 2);
        assert_eq!(class_vocab_overlap(&e, 0, 1, OverlapOptions::default()).unwrap(), 25.0);
        let by_d = overlap_by_distance(&c, opts);
        assert_eq!(by_d, vec![(1, 50.0), (2, 100.0)]);
    }

    #[test]
    fn distinguishing_terms_gates() {
        let mut items = Vec::new();
        let mut texts = Vec::new();
        for i in 0..25 {
            texts.push((format!("a{i}"), "gem filler".to_string(), 0));
        }
        for i in 0..19 {
            texts.push((format!("b{i}"), "rare filler".to_string(), 1));
        }
        for (id, t, l) in &texts {
            items.push((id.as_str(), t.as_str(), *l));
        }
        let c = corpus(&items, 2);
        let terms = distinguishing_terms(&c, 20, 0.5).unwrap();
        let gem = terms.iter().find(|t| t.term == "gem").unwrap();
        assert_eq!((gem.class, gem.count, gem.purity), (0, 25, 1.0));
        assert!(terms.iter().all(|t| t.term != "rare"));
        // filler: 25 in class 0, 19 in class 1
        let filler = terms.iter().find(|t| t.term == "filler").unwrap();
        assert_eq!(filler.class, 0);
        assert!((filler.purity - 25.0 / 44.0).abs() < 1e-12);
    }

    #[test]
    fn planted_sixty_percent_term() {
        // "planted" occurs 30 times: 18 in class 1, 12 in class 0.
        let mut owned = Vec::new();
        for i in 0..30 {
            let label = usize::from(i < 18);
            owned.push((format!("d{i:02}"), format!("planted noise{}", i % 3), label));
        }
        let items: Vec<(&str, &str, usize)> = owned.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), *c)).collect();
        let c = corpus(&items, 2);
        let terms = distinguishing_terms(&c, 20, 0.55).unwrap();
        // brute-force recount
        let (mut n0, mut n1) = (0, 0);
        for d in c.documents() {
            let k = tokenize(&d.text).iter().filter(|t| *t == "planted").count();
            if d.label == 0 {
                n0 += k
            } else {
                n1 += k
            }
        }
        let p = terms.iter().find(|t| t.term == "planted").unwrap();
        assert_eq!((p.class, p.count), (1, n0 + n1));
        assert!((p.purity - n1 as f64 / (n0 + n1) as f64).abs() < 1e-12);
        assert!((p.purity - 0.6).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn cosine_symmetric_and_bounded(a in prop::collection::vec(0.0f64..5.0, 1..8), b in prop::collection::vec(0.0f64..5.0, 1..8), s in 0.1f64..10.0) {
            let (u, v) = (SparseVector::from_dense(&a), SparseVector::from_dense(&b));
            let c = cosine(&u, &v);
            prop_assert!((0.0..=1.0).contains(&c));
            prop_assert!((c - cosine(&v, &u)).abs() < 1e-15);
            if !u.is_empty() {
                let scaled = SparseVector::from_dense(&a.iter().map(|x| x * s).collect::<Vec<_>>());
                prop_assert!((cosine(&u, &scaled) - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn tf_vector_invariants(words in prop::collection::vec("[a-e]", 0..30)) {
            let vocab = Vocabulary::build([toks("a b c").as_slice()]);
            let v = tf_vector(&words, &vocab);
            prop_assert!(v.entries().windows(2).all(|w| w[0].0 < w[1].0));
            let in_vocab = words.iter().filter(|w| vocab.index_of(w).is_some()).count();
            prop_assert_eq!(v.sum() as usize, in_vocab);
        }

        #[test]
        fn overlap_symmetric(texts in prop::collection::vec(("[a-f]( [a-f]){0,6}", 0usize..3), 3..12)) {
            let owned: Vec<(String, String, usize)> = texts.iter().enumerate().map(|(i, (t, l))| (format!("d{i}"), t.clone(), *l)).collect();
            let items: Vec<(&str, &str, usize)> = owned.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), *c)).collect();
            let c = corpus(&items, 3);
            let counts = c.class_counts();
            let opts = OverlapOptions { min_count: 1 };
            for a in 0..3 {
                for b in 0..3 {
                    if counts[a] > 0 && counts[b] > 0 {
                        let ab = class_vocab_overlap(&c, a, b, opts).unwrap();
                        prop_assert_eq!(ab, class_vocab_overlap(&c, b, a, opts).unwrap());
                        if a == b { prop_assert_eq!(ab, 100.0); }
                    }
                }
            }
        }
    }
}
