//! Term-frequency features, cosine similarity and class vocabulary overlap
//! on a small planted corpus.

use rating_inference::features::{
    cosine, distinguishing_terms, overlap_by_distance, tf_vector, tokenize, OverlapOptions, Vocabulary,
};
use rating_inference::synthetic::{planted_corpus, PlantedConfig};

fn main() -> rating_inference::Result<()> {
    let cfg = PlantedConfig {
        n_docs: 90,
        ..Default::default()
    };
    let corpus = planted_corpus(&cfg, 3)?.corpus;
    let tokens: Vec<Vec<String>> = corpus.documents().iter().map(|d| tokenize(&d.text)).collect();
    let vocab = Vocabulary::build(tokens.iter().map(|t| t.as_slice()));
    let xs: Vec<_> = tokens.iter().map(|t| tf_vector(t, &vocab)).collect();
    println!("{} documents, {} terms", corpus.len(), vocab.len());
    println!("first document: {} distinct terms, {} tokens", xs[0].nnz(), xs[0].sum());
    println!("cosine(doc 0, doc 1) = {:.4}", cosine(&xs[0], &xs[1]));

    println!("\nvocabulary overlap by label distance:");
    for (d, pct) in overlap_by_distance(&corpus, OverlapOptions::default()) {
        println!("  distance {d}: {pct:.1}%");
    }

    println!("\nmost class-specific frequent terms:");
    for t in distinguishing_terms(&corpus, 10, 0.6)?.iter().take(8) {
        println!("  {:<10} class {}  purity {:.2}  count {}", t.term, t.class, t.purity, t.count);
    }
    Ok(())
}
