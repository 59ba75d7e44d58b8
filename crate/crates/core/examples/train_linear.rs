//! Trains a hinge-loss classifier and an epsilon-insensitive regressor on
//! toy data, then round-trips a model through JSON.

use rating_inference::features::SparseVector;
use rating_inference::linear::{train_eps_regression, train_hinge, LinearModel, TrainParams};

fn main() -> rating_inference::Result<()> {
    // two blobs in the plane
    let points = [(1.0, 2.0, 1.0), (2.0, 1.5, 1.0), (1.5, 3.0, 1.0), (-1.0, -0.5, -1.0), (-2.0, -1.0, -1.0), (-0.5, -2.0, -1.0)];
    let xs: Vec<SparseVector> = points.iter().map(|&(a, b, _)| SparseVector::from_dense(&[a, b])).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
    let svm = train_hinge(&xs, &ys, 2, &TrainParams::default().with_c(10.0))?;
    println!("hinge: w = {:?}, b = {:.4}", svm.weights(), svm.bias());
    for x in &xs {
        println!("  margin {:+.4}", svm.geometric_margin(x)?);
    }
    println!("  objective by stage: {:?}", svm.meta.objective_history);

    // y = 2x + 1 with one small wobble
    let line: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, 2.0 * i as f64 + 1.0 + if i == 3 { 0.05 } else { 0.0 })).collect();
    let xs: Vec<SparseVector> = line.iter().map(|&(x, _)| SparseVector::from_dense(&[x])).collect();
    let ys: Vec<f64> = line.iter().map(|p| p.1).collect();
    let params = TrainParams::default().with_c(100.0).with_epsilon(0.1);
    let reg = train_eps_regression(&xs, &ys, 1, &params)?;
    println!("\nregression: slope {:.4}, intercept {:.4}", reg.weights()[0], reg.bias());

    let restored = LinearModel::from_json(&reg.to_json())?;
    println!("JSON round trip exact: {}", restored == reg);
    Ok(())
}
