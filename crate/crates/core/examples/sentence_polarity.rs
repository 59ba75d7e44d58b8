//! Naive Bayes sentence polarity and the positive-sentence percentage of
//! each class in a planted corpus.

use rating_inference::corpus::Polarity;
use rating_inference::psp::{psp_stats, train_polarity};
use rating_inference::synthetic::{planted_corpus, planted_snippets, PlantedConfig};

fn main() -> rating_inference::Result<()> {
    let cfg = PlantedConfig::default();
    let snippets = planted_snippets(&cfg, 2000, 5)?;
    let model = train_polarity(&snippets, 1.0)?;
    println!("polarity model: {} terms", model.vocabulary_size());

    let held_out = planted_snippets(&cfg, 400, 6)?;
    let correct = held_out
        .snippets()
        .iter()
        .filter(|(s, p)| model.classify_sentence(s) == *p)
        .count();
    println!("held-out sentence accuracy: {:.3}", correct as f64 / held_out.len() as f64);
    let probe = "pos1 pos7 neu3 neu9 neg2.";
    println!(
        "P(positive | \"{probe}\") = {:.3} -> {:?}",
        model.posterior_positive(probe),
        model.classify_sentence(probe)
    );
    assert!(matches!(model.classify_sentence("pos1 pos2 pos3."), Polarity::Positive));

    let corpus = planted_corpus(&cfg, 5)?.corpus;
    println!("\nclass  mean PSP  stddev   n");
    for s in psp_stats(&corpus, &model)? {
        println!("{:>5}  {:>8.3}  {:>6.3}  {}", s.class, s.mean, s.stddev, s.n);
    }
    Ok(())
}
