//! The full comparison on a synthetic corpus: 7 phonetic encoders, 3 similarity
//! measures and MT at order 4, each over k folds.
//!
//! `cargo run --release --example experiment`

use namevar::experiment::{run_experiment, train_name_models, ExperimentConfig, Method};
use namevar::langmodel::Weighting;
use namevar::synthbench::{base_names, generate_corpus, NoiseChannel, SynthConfig};

fn main() -> Result<(), namevar::Error> {
    let synth = generate_corpus(
        &base_names(300, 1),
        &NoiseChannel::bundle("phonetic-drift")?,
        &SynthConfig {
            pair_count: 2000,
            ..SynthConfig::default()
        },
    )?;
    let lms = train_name_models(&synth.universe, &[4], Weighting::Forms)?;
    let config = ExperimentConfig {
        folds: 5,
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&synth.records, &synth.universe, &Method::default_grid(&[4]), &lms, &config)?;
    let mut rows: Vec<_> = report.results.iter().collect();
    rows.sort_by(|a, b| b.centroid_max_f1.total_cmp(&a.centroid_max_f1));
    println!("{:<18} {:>12} {:>14}", "method", "centroid F1", "mean fold F1");
    for r in rows {
        println!("{:<18} {:>12.3} {:>14.3}", r.method, r.centroid_max_f1, r.mean_fold_max_f1);
    }
    Ok(())
}
