//! Learns class thresholds on a one-dimensional score that minimize
//! training errors, and compares them with evenly spaced cuts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rating_inference::classifiers::{learn_thresholds, ThresholdVector};

fn main() -> rating_inference::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // class c scores cluster around 0.2 + 0.25 c
    let (mut scores, mut labels) = (Vec::new(), Vec::new());
    for _ in 0..200 {
        let c = rng.gen_range(0..4usize);
        scores.push(0.2 + 0.25 * c as f64 + rng.gen_range(-0.15..0.15));
        labels.push(c);
    }
    let learned = learn_thresholds(&scores, &labels, 4)?;
    let fixed = ThresholdVector::fixed(4);
    println!("learned thresholds: {:?}", learned.thresholds());
    println!("training errors: learned {}, fixed {:?} -> {}", learned.training_errors(&scores, &labels), fixed.thresholds(), fixed.training_errors(&scores, &labels));
    for s in [0.1, 0.4, 0.6, 0.95] {
        println!("  score {s:.2} -> class {}", learned.classify(s));
    }
    Ok(())
}
