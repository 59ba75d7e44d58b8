//! Ten-fold cross-validation of several methods on a planted corpus, with
//! the pairwise significance table.
//!
//! Run with `cargo run --release --example cross_validation [seed]`.

use std::sync::Arc;
use std::time::Instant;

use rating_inference::corpus::stratified_folds;
use rating_inference::eval::{evaluate_on_contexts, fold_contexts, significance_table, FoldPredictor};
use rating_inference::pipeline::{Dataset, ExperimentOptions, Method};
use rating_inference::psp::train_polarity;
use rating_inference::synthetic::{planted_corpus, planted_snippets, PlantedConfig};

fn main() -> rating_inference::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = PlantedConfig::default();
    let planted = planted_corpus(&cfg, seed)?;
    let polarity = Arc::new(train_polarity(&planted_snippets(&cfg, 2000, seed)?, 1.0)?);
    let dataset = Dataset::from_corpus(&planted.corpus, Some(&polarity))?;
    let plan = stratified_folds(&planted.corpus, 10, seed)?;
    let options = ExperimentOptions {
        seed,
        ..Default::default()
    };

    let methods: Vec<Method> = ["majority", "ova", "reg", "ova+psp", "reg+psp", "ova+to", "psp-threshold"]
        .iter()
        .map(|m| m.parse())
        .collect::<Result<_, _>>()?;
    let predictors: Vec<&dyn FoldPredictor> = methods.iter().map(|m| m as &dyn FoldPredictor).collect();

    let start = Instant::now();
    let contexts = fold_contexts(&dataset, &plan, &options, Some(polarity))?;
    let reports = evaluate_on_contexts(&predictors, &dataset.name, &plan, &contexts, false)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    for r in &reports {
        println!("{:<14} accuracy {:.3}  L1 {:.3}", r.method, r.mean_accuracy, r.mean_l1);
    }
    println!("evaluated in {:.1?}\n", start.elapsed());
    print!("{}", significance_table(&reports, 0.05)?.render());
    Ok(())
}
