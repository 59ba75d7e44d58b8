//! Maps raw star and point ratings onto three- and four-class scales.

use rating_inference::corpus::{convert_rating, default_bins, ClassTarget, RatingBins, RatingScheme};

fn main() -> rating_inference::Result<()> {
    for scheme in [RatingScheme::FourStarHalfSteps, RatingScheme::FiveStarHalfSteps, RatingScheme::HundredPoint] {
        let three = default_bins(scheme, ClassTarget::ThreeClass);
        let four = default_bins(scheme, ClassTarget::FourClass);
        println!("{scheme} (notch = {})", scheme.notch_size());
        let steps = scheme.max_notch() as usize;
        for i in 0..=steps {
            let raw = i as f64 * scheme.notch_size();
            println!(
                "  {raw:>5}  -> 3-class {}  4-class {}",
                convert_rating(raw, scheme, &three)?,
                convert_rating(raw, scheme, &four)?
            );
        }
    }

    // a reviewer who almost never hands out the lowest grades
    let raws = [2.5, 3.0, 3.5, 4.0, 2.0, 3.0, 1.5, 3.5, 4.0, 3.0, 2.5, 3.0];
    let (bins, side) = RatingBins::four_class_for(RatingScheme::FourStarHalfSteps, &raws)?;
    println!("\nfold side chosen from the data: {side:?}, {} classes", bins.num_classes());
    Ok(())
}
