//! Trains character models of each order on synthetic names and compares scores.

use namevar::langmodel::{train_lm, Weighting};
use namevar::synthbench::base_names;
use namevar::Name;

fn main() -> Result<(), namevar::Error> {
    let names = base_names(2000, 3);
    let probes = ["melson", "mlsnoe", names[0].as_str(), names[100].as_str()].map(|s| Name::new(s).unwrap());
    for order in 2..=6 {
        let lm = train_lm(&names, order, Weighting::Forms)?;
        let scores: Vec<String> = probes.iter().map(|p| format!("{p}={:.2}", lm.score(p))).collect();
        println!("order {order}: ngrams {:?} | {}", lm.ngram_counts(), scores.join(" "));
    }
    let lm = train_lm(&names, 3, Weighting::Forms)?;
    let arpa = lm.to_arpa_string();
    println!("\nARPA header of the 3-gram model:");
    for line in arpa.lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}
