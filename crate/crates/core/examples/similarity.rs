//! Levenshtein, Jaro and Jaro-Winkler plus the edit operations behind a distance.

use namevar::similarity::{edit_ops_breakdown, levenshtein_distance, SimilarityMeasure};

fn main() {
    let pairs = [("johnson", "johnston"), ("martha", "marhta"), ("clark", "clarke"), ("shepard", "shephard")];
    for (a, b) in pairs {
        let ops = edit_ops_breakdown(a, b);
        print!("{a:>9} {b:<9} lev={} ", levenshtein_distance(a, b));
        for m in SimilarityMeasure::ALL {
            print!("{}={:.4} ", m.id(), m.similarity(a, b));
        }
        println!("ops={ops:?}");
    }
}
