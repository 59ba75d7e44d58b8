//! Planted-structure review corpora.
//!
//! Each document has a latent positive-sentence rate centred on its class
//! and jittered with Gaussian noise. Sentences are positive or negative at
//! that rate and mix polarity words (mostly, not always, of the sentence's
//! own polarity) with neutral filler, topic words that ignore the label,
//! and a sprinkling of weak class-specific words. Document lengths vary
//! widely, so raw term counts carry the class signal only noisily while the
//! sentence-level positive fraction carries it well.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, LabelScale, Polarity, Preprocessor, SnippetSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantedConfig {
    pub n_docs: usize,
    pub num_classes: usize,
    /// Standard deviation of each document's positive rate around its class centre.
    pub rate_noise: f64,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub sentence_len: usize,
    /// Chance that a token is a polarity word.
    pub polarity_rate: f64,
    /// Chance that a polarity word matches its sentence's polarity.
    pub polarity_purity: f64,
    /// Chance that a token is a word of the document's topic.
    pub topic_rate: f64,
    pub n_topics: usize,
    /// Chance that a token is a word specific to the document's class.
    pub class_word_rate: f64,
    pub lexicon_size: usize,
    pub neutral_size: usize,
    pub topic_size: usize,
    pub class_vocab_size: usize,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            n_docs: 600,
            num_classes: 3,
            rate_noise: 0.08,
            min_sentences: 5,
            max_sentences: 30,
            sentence_len: 8,
            polarity_rate: 0.3,
            polarity_purity: 0.85,
            topic_rate: 0.2,
            n_topics: 6,
            class_word_rate: 0.01,
            lexicon_size: 40,
            neutral_size: 300,
            topic_size: 40,
            class_vocab_size: 20,
        }
    }
}

impl PlantedConfig {
    /// Class centre of the positive-sentence rate, evenly spaced in (0, 1).
    pub fn class_rate(&self, class: usize) -> f64 {
        (class + 1) as f64 / (self.num_classes + 1) as f64
    }

    fn validate(&self) -> Result<()> {
        LabelScale::new(self.num_classes)?;
        if self.n_docs < self.num_classes {
            return Err(Error::invalid("fewer documents than classes"));
        }
        if self.min_sentences == 0 || self.min_sentences > self.max_sentences || self.sentence_len == 0 {
            return Err(Error::invalid("bad sentence length settings"));
        }
        let rates = [self.polarity_rate, self.polarity_purity, self.topic_rate, self.class_word_rate];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) || self.polarity_rate + self.topic_rate + self.class_word_rate > 1.0 {
            return Err(Error::invalid("token rates must be probabilities summing to at most 1"));
        }
        if self.rate_noise.is_nan() || self.rate_noise < 0.0 {
            return Err(Error::invalid("rate noise must be >= 0"));
        }
        if [self.lexicon_size, self.neutral_size, self.topic_size, self.n_topics, self.class_vocab_size].contains(&0) {
            return Err(Error::invalid("word lists must be non-empty"));
        }
        Ok(())
    }
}

fn words(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

struct Lexicon {
    positive: Vec<String>,
    negative: Vec<String>,
    neutral: Vec<String>,
    topics: Vec<Vec<String>>,
    classes: Vec<Vec<String>>,
}

impl Lexicon {
    fn new(cfg: &PlantedConfig) -> Self {
        Self {
            positive: words("pos", cfg.lexicon_size),
            negative: words("neg", cfg.lexicon_size),
            neutral: words("neu", cfg.neutral_size),
            topics: (0..cfg.n_topics).map(|t| words(&format!("top{t}x"), cfg.topic_size)).collect(),
            classes: (0..cfg.num_classes).map(|c| words(&format!("cls{c}x"), cfg.class_vocab_size)).collect(),
        }
    }

    fn polarity_word<R: Rng>(&self, rng: &mut R, positive: bool, purity: f64) -> &str {
        let own = rng.gen_bool(purity);
        let list = if positive == own { &self.positive } else { &self.negative };
        list.choose(rng).expect("non-empty lexicon")
    }
}

fn sentence<R: Rng>(
    rng: &mut R,
    cfg: &PlantedConfig,
    lex: &Lexicon,
    positive: bool,
    topic: Option<usize>,
    class: Option<usize>,
) -> String {
    let mut toks: Vec<&str> = Vec::with_capacity(cfg.sentence_len);
    for _ in 0..cfg.sentence_len {
        let u: f64 = rng.gen();
        let w = match (topic, class) {
            _ if u < cfg.polarity_rate => lex.polarity_word(rng, positive, cfg.polarity_purity),
            (Some(t), _) if u < cfg.polarity_rate + cfg.topic_rate => {
                lex.topics[t].choose(rng).expect("non-empty topic")
            }
            (_, Some(c)) if u < cfg.polarity_rate + cfg.topic_rate + cfg.class_word_rate => {
                lex.classes[c].choose(rng).expect("non-empty class words")
            }
            _ => lex.neutral.choose(rng).expect("non-empty filler"),
        };
        toks.push(w);
    }
    let mut s = toks.join(" ");
    s.push('.');
    s
}

/// A planted corpus together with each document's latent rate.
#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub corpus: Corpus,
    /// Latent positive-sentence rate, in corpus order.
    pub rates: Vec<f64>,
    /// Topic of each document, in corpus order.
    pub topics: Vec<usize>,
}

/// Generates a corpus with classes as balanced as `n_docs` allows.
pub fn planted_corpus(cfg: &PlantedConfig, seed: u64) -> Result<PlantedCorpus> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lex = Lexicon::new(cfg);
    let noise = Normal::new(0.0, cfg.rate_noise).map_err(|e| Error::invalid(e.to_string()))?;
    let mut items = Vec::with_capacity(cfg.n_docs);
    let mut meta = Vec::with_capacity(cfg.n_docs);
    for i in 0..cfg.n_docs {
        let class = i % cfg.num_classes;
        let rate = (cfg.class_rate(class) + noise.sample(&mut rng)).clamp(0.02, 0.98);
        let topic = rng.gen_range(0..cfg.n_topics);
        let n = rng.gen_range(cfg.min_sentences..=cfg.max_sentences);
        let text: Vec<String> = (0..n)
            .map(|_| {
                let positive = rng.gen_bool(rate);
                sentence(&mut rng, cfg, &lex, positive, Some(topic), Some(class))
            })
            .collect();
        let id = format!("doc{i:05}");
        meta.push((id.clone(), rate, topic));
        items.push((id, text.join(" "), class));
    }
    let corpus = Corpus::from_texts(
        "planted",
        LabelScale::new(cfg.num_classes)?,
        items,
        &Preprocessor::default(),
    )?;
    // the corpus sorts by id, which matches generation order here
    meta.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(PlantedCorpus {
        corpus,
        rates: meta.iter().map(|m| m.1).collect(),
        topics: meta.iter().map(|m| m.2).collect(),
    })
}

/// Single-sentence snippets, half positive, drawn from the same lexicon.
pub fn planted_snippets(cfg: &PlantedConfig, n: usize, seed: u64) -> Result<SnippetSet> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
    let lex = Lexicon::new(cfg);
    let snippets = (0..n.max(2))
        .map(|i| {
            let positive = i % 2 == 0;
            let s = sentence(&mut rng, cfg, &lex, positive, None, None);
            (s, if positive { Polarity::Positive } else { Polarity::Negative })
        })
        .collect();
    SnippetSet::new(snippets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_balanced() {
        let cfg = PlantedConfig {
            n_docs: 30,
            ..Default::default()
        };
        let a = planted_corpus(&cfg, 7).unwrap();
        let b = planted_corpus(&cfg, 7).unwrap();
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.corpus.class_counts(), vec![10, 10, 10]);
        assert_ne!(planted_corpus(&cfg, 8).unwrap().corpus, a.corpus);
        for d in a.corpus.documents() {
            assert!((cfg.min_sentences..=cfg.max_sentences).contains(&d.sentences.len()), "{}", d.sentences.len());
        }
    }

    #[test]
    fn snippets_have_both_polarities() {
        let s = planted_snippets(&PlantedConfig::default(), 100, 1).unwrap();
        assert_eq!(s.counts(), (50, 50));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = PlantedConfig {
            polarity_rate: 0.9,
            topic_rate: 0.3,
            ..Default::default()
        };
        assert!(planted_corpus(&cfg, 0).is_err());
    }
}
