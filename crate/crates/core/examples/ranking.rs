//! Candidate lists from a phonetic bucket and from similarity times frequency.

use namevar::corpus::build_universe;
use namevar::phonetic::PhoneticMethod;
use namevar::ranking::{rank_phonetic, rank_similarity};
use namevar::similarity::SimilarityMeasure;
use namevar::Name;

fn main() {
    let counts = [
        ("smith", 5000),
        ("smyth", 300),
        ("smithe", 40),
        ("schmidt", 900),
        ("smart", 700),
        ("snith", 3),
        ("schmitt", 200),
    ];
    let universe = build_universe(counts.iter().map(|(n, c)| (Name::new(*n).unwrap(), *c)), 100);
    let source = Name::new("smith").unwrap();
    let show = |label: &str, list: Vec<namevar::RankedCandidate>| {
        let items: Vec<String> = list.iter().map(|c| format!("{}:{}({:.3})", c.rank, c.candidate, c.score)).collect();
        println!("{label:<22} {}", items.join(" "));
    };
    for m in [PhoneticMethod::Soundex, PhoneticMethod::DoubleMetaphone, PhoneticMethod::Nysiis] {
        show(m.id(), rank_phonetic(&source, m, &universe));
    }
    for gamma in [0.0, 0.1, 0.5] {
        show(&format!("jaro-winkler g={gamma}"), rank_similarity(&source, SimilarityMeasure::JaroWinkler, gamma, &universe, 5));
    }
}
