//! Sentence polarity and positive-sentence percentage (PSP).

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Polarity, SnippetSet};
use crate::error::{Error, Result};
use crate::features::tokenize;

/// Multinomial naive Bayes over snippet tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarityModel {
    pub smoothing: f64,
    /// Log priors, positive then negative.
    log_prior: [f64; 2],
    /// Per-term log likelihoods, positive then negative.
    log_likelihood: BTreeMap<String, [f64; 2]>,
}

pub fn train_polarity(snippets: &SnippetSet, smoothing: f64) -> Result<PolarityModel> {
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(Error::invalid(format!("smoothing must be positive, got {smoothing}")));
    }
    let (n_pos, n_neg) = snippets.counts();
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::invalid("polarity training needs both positive and negative snippets"));
    }
    let mut counts: BTreeMap<String, [f64; 2]> = BTreeMap::new();
    let mut totals = [0.0f64; 2];
    for (text, polarity) in snippets.snippets() {
        let side = side(*polarity);
        for tok in tokenize(text) {
            counts.entry(tok).or_default()[side] += 1.0;
            totals[side] += 1.0;
        }
    }
    let v = counts.len() as f64;
    let denom = [totals[0] + smoothing * v, totals[1] + smoothing * v];
    let log_likelihood = counts
        .into_iter()
        .map(|(t, c)| {
            let ll = [
                ((c[0] + smoothing) / denom[0]).ln(),
                ((c[1] + smoothing) / denom[1]).ln(),
            ];
            (t, ll)
        })
        .collect();
    let n = (n_pos + n_neg) as f64;
    Ok(PolarityModel {
        smoothing,
        log_prior: [(n_pos as f64 / n).ln(), (n_neg as f64 / n).ln()],
        log_likelihood,
    })
}

fn side(p: Polarity) -> usize {
    match p {
        Polarity::Positive => 0,
        Polarity::Negative => 1,
    }
}

impl PolarityModel {
    pub fn vocabulary_size(&self) -> usize {
        self.log_likelihood.len()
    }

    pub fn log_prior(&self, p: Polarity) -> f64 {
        self.log_prior[side(p)]
    }

    /// `ln P(term | p)`, or `None` for an unseen term.
    pub fn log_likelihood(&self, term: &str, p: Polarity) -> Option<f64> {
        self.log_likelihood.get(term).map(|ll| ll[side(p)])
    }

    /// Joint log scores (positive, negative); unseen tokens are skipped.
    pub fn log_scores(&self, sentence: &str) -> [f64; 2] {
        let mut s = self.log_prior;
        for tok in tokenize(sentence) {
            if let Some(ll) = self.log_likelihood.get(&tok) {
                s[0] += ll[0];
                s[1] += ll[1];
            }
        }
        s
    }

    pub fn posterior_positive(&self, sentence: &str) -> f64 {
        let [p, n] = self.log_scores(sentence);
        1.0 / (1.0 + (n - p).exp())
    }

    /// Ties go to positive.
    pub fn classify_sentence(&self, sentence: &str) -> Polarity {
        let [p, n] = self.log_scores(sentence);
        if p >= n {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PspValue {
    pub psp: f64,
    pub n_positive: usize,
    pub n_subjective: usize,
}

/// Fraction of sentences classified positive.
pub fn psp_of_sentences<S: AsRef<str>>(sentences: &[S], model: &PolarityModel) -> Result<PspValue> {
    if sentences.is_empty() {
        return Err(Error::invalid("PSP needs at least one sentence"));
    }
    let n_positive = sentences
        .iter()
        .filter(|s| model.classify_sentence(s.as_ref()) == Polarity::Positive)
        .count();
    Ok(PspValue {
        psp: n_positive as f64 / sentences.len() as f64,
        n_positive,
        n_subjective: sentences.len(),
    })
}

pub fn psp(doc: &Document, model: &PolarityModel) -> Result<PspValue> {
    psp_of_sentences(&doc.sentences, model).map_err(|_| Error::RejectedRecord {
        id: doc.id.clone(),
        reason: "no sentences".into(),
    })
}

/// PSP of every document, in corpus order.
pub fn corpus_psp(corpus: &Corpus, model: &PolarityModel) -> Result<Vec<f64>> {
    corpus.documents().par_iter().map(|d| psp(d, model).map(|v| v.psp)).collect()
}

/// The two-dimensional vector `(psp, 1 - psp)`.
pub fn psp_vector(psp: f64) -> [f64; 2] {
    [psp, 1.0 - psp]
}

/// Cosine between the PSP vectors of two items.
pub fn psp_similarity(a: f64, b: f64) -> f64 {
    let (u, v) = (psp_vector(a), psp_vector(b));
    let dot = u[0] * v[0] + u[1] * v[1];
    let nu = (u[0] * u[0] + u[1] * u[1]).sqrt();
    let nv = (v[0] * v[0] + v[1] * v[1]).sqrt();
    (dot / (nu * nv)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PspStats {
    pub class: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
    pub n: usize,
}

pub fn psp_stats_from_values(values: &[f64], labels: &[usize], num_classes: usize) -> Result<Vec<PspStats>> {
    if values.len() != labels.len() {
        return Err(Error::LengthMismatch(values.len(), labels.len()));
    }
    (0..num_classes)
        .map(|class| {
            let xs: Vec<f64> = values.iter().zip(labels).filter(|(_, &l)| l == class).map(|(&v, _)| v).collect();
            if xs.is_empty() {
                return Err(Error::ClassAbsent(class));
            }
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            Ok(PspStats {
                class,
                mean,
                stddev: var.sqrt(),
                n: xs.len(),
            })
        })
        .collect()
}

pub fn psp_stats(corpus: &Corpus, model: &PolarityModel) -> Result<Vec<PspStats>> {
    let values = corpus_psp(corpus, model)?;
    psp_stats_from_values(&values, &corpus.labels(), corpus.scale.num_classes())
}

/// CSV with header `class,mean,stddev,n`.
pub fn write_psp_stats_csv<W: Write>(stats: &[PspStats], mut w: W) -> std::io::Result<()> {
    writeln!(w, "class,mean,stddev,n")?;
    for s in stats {
        writeln!(w, "{},{},{},{}", s.class, s.mean, s.stddev, s.n)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(items: &[(&str, Polarity)]) -> SnippetSet {
        SnippetSet::new(items.iter().map(|(t, p)| (t.to_string(), *p)).collect()).unwrap()
    }

    use Polarity::{Negative as Neg, Positive as Pos};

    #[test]
    fn direction_and_errors() {
        let m = train_polarity(&set(&[("good", Pos), ("bad", Neg)]), 1.0).unwrap();
        assert!(m.posterior_positive("good") > 0.5);
        assert_eq!(m.classify_sentence("bad"), Neg);
        assert!(SnippetSet::new(vec![("bad".into(), Neg)]).is_err());
        assert!(train_polarity(&set(&[("good", Pos), ("bad", Neg)]), 0.0).is_err());
    }

    #[test]
    fn hand_computed_posterior() {
        // pos tokens: a b a | a c   -> counts a:3 b:1 c:1, total 5
        // neg tokens: b d   | d      -> counts b:1 d:2, total 3
        // vocabulary {a,b,c,d}; add-one: pos denom 9, neg denom 7
        let s = set(&[("a b a", Pos), ("a c", Pos), ("b d", Neg), ("d", Neg)]);
        let m = train_polarity(&s, 1.0).unwrap();
        // sentence "a d b": pos 0.5 * 4/9 * 1/9 * 2/9, neg 0.5 * 1/7 * 3/7 * 2/7
        let pos = 0.5 * (4.0 / 9.0) * (1.0 / 9.0) * (2.0 / 9.0);
        let neg = 0.5 * (1.0 / 7.0) * (3.0 / 7.0) * (2.0 / 7.0);
        assert!((m.posterior_positive("a d b") - pos / (pos + neg)).abs() < 1e-9);
        assert_eq!(m.classify_sentence("a b a"), Pos);
        assert_eq!(m.classify_sentence("d"), Neg);
    }

    #[test]
    fn unknown_tokens_fall_back_to_prior() {
        let m = train_polarity(&set(&[("x", Pos), ("y", Pos), ("z", Pos), ("u", Neg), ("w", Neg)]), 1.0).unwrap();
        assert_eq!(m.classify_sentence("zzz qqq"), Pos);
        let m = train_polarity(&set(&[("x", Pos), ("u", Neg), ("w", Neg)]), 1.0).unwrap();
        assert_eq!(m.classify_sentence("zzz"), Neg);
    }

    #[test]
    fn exact_tie_is_positive() {
        let m = train_polarity(&set(&[("good", Pos), ("bad", Neg)]), 1.0).unwrap();
        assert_eq!(m.classify_sentence("good bad"), Pos);
        assert_eq!(m.classify_sentence(""), Pos);
    }

    #[test]
    fn psp_arithmetic() {
        let m = train_polarity(&set(&[("good", Pos), ("bad", Neg)]), 1.0).unwrap();
        let v = psp_of_sentences(&["good", "good", "bad", "good"], &m).unwrap();
        assert_eq!((v.psp, v.n_positive, v.n_subjective), (0.75, 3, 4));
        assert_eq!(psp_of_sentences(&["good"], &m).unwrap().psp, 1.0);
        assert_eq!(psp_of_sentences(&["bad", "bad"], &m).unwrap().psp, 0.0);
        assert!(psp_of_sentences::<&str>(&[], &m).is_err());
    }

    #[test]
    fn vectors_and_similarity() {
        assert_eq!(psp_vector(1.0), [1.0, 0.0]);
        assert_eq!(psp_vector(0.0), [0.0, 1.0]);
        assert_eq!(psp_vector(0.75), [0.75, 0.25]);
        assert!((psp_similarity(0.4, 0.4) - 1.0).abs() < 1e-15);
        assert_eq!(psp_similarity(1.0, 0.0), 0.0);
        assert!((psp_similarity(0.75, 0.25) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn stats() {
        let s = psp_stats_from_values(&[0.2, 0.4, 0.9], &[0, 0, 1], 2).unwrap();
        assert!((s[0].mean - 0.3).abs() < 1e-12 && (s[0].stddev - 0.1).abs() < 1e-12);
        assert_eq!((s[1].mean, s[1].stddev, s[1].n), (0.9, 0.0, 1));
        let s = psp_stats_from_values(&[0.5, 0.5], &[0, 0], 1).unwrap();
        assert_eq!((s[0].mean, s[0].stddev), (0.5, 0.0));
        assert_eq!(psp_stats_from_values(&[0.5], &[0], 2), Err(Error::ClassAbsent(1)));
        let mut out = Vec::new();
        write_psp_stats_csv(&s, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "class,mean,stddev,n\n0,0.5,0,2\n");
    }

    const WORDS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

    fn snippet_strategy() -> impl Strategy<Value = Vec<(Vec<usize>, bool)>> {
        prop::collection::vec((prop::collection::vec(0usize..6, 1..5), any::<bool>()), 2..10)
            .prop_filter("both polarities", |v| v.iter().any(|s| s.1) && v.iter().any(|s| !s.1))
    }

    proptest! {
        #[test]
        fn log_scores_match_probability_products(snips in snippet_strategy(), sentence in prop::collection::vec(0usize..6, 0..6), alpha in 0.1f64..3.0) {
            let items: Vec<(String, Polarity)> = snips
                .iter()
                .map(|(ws, p)| (ws.iter().map(|&w| WORDS[w]).collect::<Vec<_>>().join(" "), if *p { Pos } else { Neg }))
                .collect();
            let m = train_polarity(&SnippetSet::new(items.clone()).unwrap(), alpha).unwrap();
            // independent count-based oracle
            let vocab: std::collections::BTreeSet<&str> = items.iter().flat_map(|(t, _)| t.split(' ')).collect();
            let v = vocab.len() as f64;
            let text = sentence.iter().map(|&w| WORDS[w]).collect::<Vec<_>>().join(" ");
            for (pol, _) in [(Pos, 0), (Neg, 1)] {
                let docs: Vec<&String> = items.iter().filter(|(_, p)| *p == pol).map(|(t, _)| t).collect();
                let toks: Vec<&str> = docs.iter().flat_map(|t| t.split(' ')).collect();
                let mut prob = docs.len() as f64 / items.len() as f64;
                for w in text.split(' ').filter(|w| vocab.contains(w)) {
                    prob *= (toks.iter().filter(|&&t| t == w).count() as f64 + alpha) / (toks.len() as f64 + alpha * v);
                }
                let got = m.log_scores(&text)[side(pol)];
                prop_assert!((got - prob.ln()).abs() < 1e-9);
            }
        }

        #[test]
        fn similarity_properties(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
            let s = psp_similarity(a, b);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s, psp_similarity(b, a));
            if (a - b).abs() > 1e-6 {
                prop_assert!(s < 1.0);
            }
            // monotone in the gap when measured from the same anchor on one side
            let (near, far) = if (b - a).abs() <= (c - a).abs() { (b, c) } else { (c, b) };
            if (near - a) * (far - a) >= 0.0 {
                prop_assert!(psp_similarity(a, near) >= psp_similarity(a, far) - 1e-12);
            }
        }
    }
}
