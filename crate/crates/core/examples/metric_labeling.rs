//! Labels one item from its base preferences and its nearest neighbours,
//! for a range of alpha values and both distance transforms.

use rating_inference::metric_labeling::{item_cost, knn, label_item, MetricTransform};
use rating_inference::psp::psp_similarity;

fn main() -> rating_inference::Result<()> {
    // base classifier mildly prefers class 0
    let prefs = [0.4, 0.3, -0.6];
    let test_psp = 0.55;
    let train: [(&str, f64, usize); 6] = [
        ("a", 0.50, 1),
        ("b", 0.60, 1),
        ("c", 0.58, 2),
        ("d", 0.20, 0),
        ("e", 0.10, 0),
        ("f", 0.52, 1),
    ];
    let sims: Vec<f64> = train.iter().map(|t| psp_similarity(test_psp, t.1)).collect();
    let ids: Vec<&str> = train.iter().map(|t| t.0).collect();
    let labels: Vec<usize> = train.iter().map(|t| t.2).collect();
    let neighbors = knn(&sims, &ids, &labels, 4)?;
    for n in &neighbors {
        println!("neighbour {} label {} similarity {:.4}", n.index, n.label, n.similarity);
    }

    for transform in [MetricTransform::Identity, MetricTransform::Potts] {
        println!("\n{transform:?}");
        for alpha in [0.0, 0.05, 0.1, 0.5, 1.0] {
            let label = label_item(&prefs, &neighbors, alpha, transform);
            let costs: Vec<String> = (0..prefs.len())
                .map(|l| format!("{:.3}", item_cost(&prefs, l, &neighbors, alpha, transform)))
                .collect();
            println!("  alpha {alpha:<4} -> label {label}  costs [{}]", costs.join(", "));
        }
    }
    Ok(())
}
