//! Fits a metric-labeling pipeline on a planted corpus, saves it, loads it
//! back and labels fresh documents.

use std::sync::Arc;

use rating_inference::corpus::Preprocessor;
use rating_inference::pipeline::{fit_pipeline, Dataset, ExperimentOptions, Inputs, TrainedPipeline};
use rating_inference::psp::train_polarity;
use rating_inference::synthetic::{planted_corpus, planted_snippets, PlantedConfig};

fn main() -> rating_inference::Result<()> {
    let cfg = PlantedConfig {
        n_docs: 240,
        ..Default::default()
    };
    let polarity = Arc::new(train_polarity(&planted_snippets(&cfg, 1000, 2)?, 1.0)?);
    let train = Dataset::from_corpus(&planted_corpus(&cfg, 2)?.corpus, Some(&polarity))?;
    let pipeline = fit_pipeline(&train, "ova+psp".parse()?, &ExperimentOptions::default(), Some(polarity))?;
    let config = pipeline.config().expect("metric method");
    println!("tuned k = {}, alpha = {}", config.k, config.alpha);

    let path = std::env::temp_dir().join("rating-inference-pipeline.json");
    pipeline.save(&path)?;
    let loaded = TrainedPipeline::load(&path)?;
    println!("artifact: {} ({} bytes)", path.display(), std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0));

    let fresh = planted_corpus(&PlantedConfig { n_docs: 9, ..cfg }, 99)?.corpus;
    let items: Vec<(String, String)> = fresh.documents().iter().map(|d| (d.id.clone(), d.text.clone())).collect();
    let inputs = Inputs::from_texts(&items, &Preprocessor::default(), loaded.polarity.as_ref())?;
    for (p, d) in loaded.predict(&inputs)?.iter().zip(fresh.documents()) {
        println!("{}  predicted {}  true {}", p.id, p.label, d.label);
    }
    Ok(())
}
