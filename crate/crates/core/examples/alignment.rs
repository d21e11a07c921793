//! Character alignment with EM, then segment extraction from symmetrized alignments.

use namevar::alignment::{train_em, train_segments, viterbi_align, EmConfig, SegmentConfig};
use namevar::Name;

fn main() -> Result<(), namevar::Error> {
    let raw = [
        ("shepard", "shephard"),
        ("stephen", "steven"),
        ("philips", "phillips"),
        ("catherine", "katherine"),
        ("carl", "karl"),
        ("smith", "smyth"),
        ("jonson", "johnson"),
        ("stephens", "stevens"),
    ];
    let pairs: Vec<(Name, Name, f64)> =
        raw.iter().map(|(s, t)| (Name::new(*s).unwrap(), Name::new(*t).unwrap(), 1.0)).collect();

    let run = train_em(&pairs, &EmConfig::default())?;
    println!("log-likelihood per E-step:");
    for (i, ll) in run.log_likelihoods.iter().enumerate() {
        println!("  {i:>2} {ll:.4}");
    }
    let (s, t) = (&pairs[0].0, &pairs[0].1);
    println!("\nviterbi links {s} -> {t}: {:?}", viterbi_align(&run.table, s, t));

    let table = train_segments(&pairs, &SegmentConfig::default())?;
    let mut rows: Vec<_> = table.iter().filter(|(s, t, _, _)| s != t).collect();
    rows.sort_by(|a, b| b.3.total_cmp(&a.3));
    println!("\n{} segments; strongest rewrites by p(source|target):", table.len());
    for (s, t, pf, pb) in rows.into_iter().take(10) {
        println!("  {s:>4} -> {t:<4} pf={pf:.3} pb={pb:.3}");
    }
    Ok(())
}
