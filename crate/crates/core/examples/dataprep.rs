//! Query-log sessions to a filtered pair corpus with its statistics.

use namevar::corpus::build_universe;
use namevar::dataprep::{corpus_statistics, filter_cascade, pair_sessions, QueryLogEvent, SessionConfig};

fn main() -> Result<(), namevar::Error> {
    let log = [
        ("u1", 0, "Shepard"),
        ("u1", 40, "Shephard"),
        ("u1", 4000, "Smith"),
        ("u2", 10, "shepard"),
        ("u2", 95, "Sheppard"),
        ("u2", 120, "Shephard"),
        ("u3", 5, "Smith"),
        ("u3", 50, "Smyth"),
        ("u4", 7, "smyth"),
        ("u4", 9, "Smith"),
        ("u4", 11, "??"),
    ];
    let events = log.iter().map(|&(u, t, n)| QueryLogEvent {
        user: u.into(),
        timestamp: t,
        raw_name: n.into(),
    });
    let prepared = pair_sessions(events, &SessionConfig::default());
    println!("{} raw pairs, {} names dropped", prepared.records.len(), prepared.dropped_names);
    let mut counts = std::collections::BTreeMap::new();
    for r in &prepared.records {
        *counts.entry(r.source.clone()).or_insert(0u64) += r.source_count;
        *counts.entry(r.target.clone()).or_insert(0u64) += r.target_count;
    }
    let universe = build_universe(counts, 100);
    let (kept, report) = filter_cascade(prepared.records, &universe, 100, 0.1)?;
    println!("{report:?}");
    for r in &kept {
        println!("  {} -> {} x{}", r.source, r.target, r.cooccurrence);
    }
    println!("{:?}", corpus_statistics(&kept));
    Ok(())
}
