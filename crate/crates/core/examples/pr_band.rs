//! Per-fold precision/recall curves and the covariance-ellipse band around them.

use std::collections::{BTreeMap, BTreeSet};

use namevar::eval::{compute_pr_curve, confidence_band, max_f1, render_svg, sigma_multiplier};
use namevar::Name;

fn n(s: &str) -> Name {
    Name::new(s).unwrap()
}

fn main() -> Result<(), namevar::Error> {
    let truth: BTreeMap<Name, BTreeSet<Name>> = [
        ("smith", vec!["smyth", "smithe"]),
        ("shepard", vec!["shephard"]),
        ("clark", vec!["clarke"]),
    ]
    .into_iter()
    .map(|(s, ts)| (n(s), ts.into_iter().map(n).collect()))
    .collect();
    // Three folds' worth of predictions with slightly different orderings.
    let folds = [
        vec![("smith", vec!["smyth", "smart", "smithe"]), ("shepard", vec!["shephard"]), ("clark", vec!["clarke"])],
        vec![("smith", vec!["smart", "smyth", "smithe"]), ("shepard", vec!["sheppard", "shephard"]), ("clark", vec!["clerk"])],
        vec![("smith", vec!["smithe", "smyth"]), ("shepard", vec!["shephard"]), ("clark", vec!["clerk", "clarke"])],
    ];
    let mut curves = Vec::new();
    for (fold, preds) in folds.iter().enumerate() {
        let preds: BTreeMap<Name, Vec<Name>> =
            preds.iter().map(|(s, l)| (n(s), l.iter().map(|c| n(c)).collect())).collect();
        let curve = compute_pr_curve("demo", fold, &preds, &truth, 4)?;
        println!("fold {fold}: max-F1 {:.3}", max_f1(&curve));
        curves.push(curve);
    }
    let band = confidence_band(&curves, 0.95)?;
    println!("sigma multiplier at 95%: {:.4}", sigma_multiplier(0.95));
    for (i, ((c, hi), lo)) in band.centroid.iter().zip(&band.upper).zip(&band.lower).enumerate() {
        println!("position {}: centroid {c:.3?} upper {hi:.3?} lower {lo:.3?}", i + 1);
    }
    let svg = render_svg(&[band]);
    println!("svg: {} bytes", svg.len());
    Ok(())
}
