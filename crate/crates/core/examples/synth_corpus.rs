//! A synthetic universe and pair corpus from a noise-channel bundle.
//!
//! `cargo run --example synth_corpus -- ocr`

use namevar::dataprep::corpus_statistics;
use namevar::synthbench::{base_names, generate_corpus, NoiseChannel, SynthConfig};

fn main() -> Result<(), namevar::Error> {
    let bundle = std::env::args().nth(1).unwrap_or_else(|| "phonetic-drift".into());
    let channel = NoiseChannel::bundle(&bundle)?;
    let config = SynthConfig {
        pair_count: 2000,
        ..SynthConfig::default()
    };
    let corpus = generate_corpus(&base_names(300, 1), &channel, &config)?;
    println!(
        "{bundle}: {} pairs from {} draws, universe of {}",
        corpus.records.len(),
        corpus.draws,
        corpus.universe.len()
    );
    for r in corpus.records.iter().take(8) {
        println!("  {} -> {}", r.source, r.target);
    }
    println!("{:?}", corpus_statistics(&corpus.records));
    Ok(())
}
