//! Corpus construction from query logs and record attachments, the filtering
//! cascade, false-positive sampling and corpus statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{normalize, FrequencyUniverse, Name, NamePairRecord};
use crate::error::{Error, Result};
use crate::similarity::{edit_ops_breakdown, jaccard_index, levenshtein_distance};

pub const DEFAULT_WINDOW_SECONDS: u64 = 1800;
pub const DEFAULT_JACCARD_MIN: f64 = 0.01;
pub const DEFAULT_TOPK_RECORDS: usize = 500_000;
pub const DEFAULT_TOPK_SEARCH: usize = 250_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryLogEvent {
    pub user: String,
    pub timestamp: u64,
    pub raw_name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionConfig {
    /// Two queries pair only when the later one comes strictly less than this many seconds after.
    pub window_seconds: u64,
    /// Pair every ordered couple inside the window instead of neighbours only.
    pub all_pairs: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            window_seconds: DEFAULT_WINDOW_SECONDS,
            all_pairs: false,
        }
    }
}

/// Pairs plus the number of inputs whose names cleaned to nothing.
#[derive(Clone, Debug, Default)]
pub struct Prepared {
    pub records: Vec<NamePairRecord>,
    pub dropped_names: usize,
}

/// Co-occurrence per directed pair, and per-side totals and user sets.
#[derive(Default)]
struct PairAccumulator {
    pairs: BTreeMap<(Name, Name), u64>,
    users_of: HashMap<Name, BTreeSet<String>>,
}

impl PairAccumulator {
    /// Marginals are the co-occurrence totals of each name on its side.
    fn finish_with_pair_marginals(self) -> Vec<NamePairRecord> {
        let mut src_total: HashMap<&Name, u64> = HashMap::new();
        let mut tgt_total: HashMap<&Name, u64> = HashMap::new();
        for ((s, t), &c) in &self.pairs {
            *src_total.entry(s).or_insert(0) += c;
            *tgt_total.entry(t).or_insert(0) += c;
        }
        self.pairs
            .iter()
            .map(|((s, t), &c)| NamePairRecord {
                source: s.clone(),
                target: t.clone(),
                cooccurrence: c,
                source_count: src_total[s],
                target_count: tgt_total[t],
                source_users: self.users_of.get(s).cloned().unwrap_or_default(),
                target_users: self.users_of.get(t).cloned().unwrap_or_default(),
            })
            .collect()
    }
}

/// Directed earlier-to-later pairs from each user's query sequence.
///
/// Queries are ordered per user by timestamp (input order breaks ties). Names that
/// clean to nothing are dropped before pairing. Identical neighbours emit nothing.
/// User sets hold every user who queried the name.
pub fn pair_sessions<I>(events: I, config: &SessionConfig) -> Prepared
where
    I: IntoIterator<Item = QueryLogEvent>,
{
    let mut per_user: BTreeMap<String, Vec<(u64, usize, Name)>> = BTreeMap::new();
    let mut dropped = 0;
    for (i, ev) in events.into_iter().enumerate() {
        match normalize(&ev.raw_name) {
            Ok(name) => per_user.entry(ev.user).or_default().push((ev.timestamp, i, name)),
            Err(_) => dropped += 1,
        }
    }
    let mut acc = PairAccumulator::default();
    for (user, mut queries) in per_user {
        queries.sort();
        for (_, _, name) in &queries {
            acc.users_of.entry(name.clone()).or_default().insert(user.clone());
        }
        for i in 0..queries.len() {
            let last = if config.all_pairs { queries.len() } else { (i + 2).min(queries.len()) };
            for j in i + 1..last {
                let (ta, _, a) = &queries[i];
                let (tb, _, b) = &queries[j];
                if tb - ta >= config.window_seconds {
                    break;
                }
                if a != b {
                    *acc.pairs.entry((a.clone(), b.clone())).or_insert(0) += 1;
                }
            }
        }
    }
    Prepared {
        records: acc.finish_with_pair_marginals(),
        dropped_names: dropped,
    }
}

/// Tree-name to record-name pairs. Marginals and user sets cover every row of the
/// name on its side, identity rows included; identity pairs themselves are dropped.
pub fn aggregate_attachments<I, S>(rows: I) -> Prepared
where
    I: IntoIterator<Item = (S, S, S)>,
    S: AsRef<str>,
{
    let mut pairs: BTreeMap<(Name, Name), u64> = BTreeMap::new();
    let mut tree_count: HashMap<Name, u64> = HashMap::new();
    let mut record_count: HashMap<Name, u64> = HashMap::new();
    let mut tree_users: HashMap<Name, BTreeSet<String>> = HashMap::new();
    let mut record_users: HashMap<Name, BTreeSet<String>> = HashMap::new();
    let mut dropped = 0;
    for (tree, record, user) in rows {
        let (Ok(a), Ok(b)) = (normalize(tree.as_ref()), normalize(record.as_ref())) else {
            dropped += 1;
            continue;
        };
        *tree_count.entry(a.clone()).or_insert(0) += 1;
        *record_count.entry(b.clone()).or_insert(0) += 1;
        tree_users.entry(a.clone()).or_default().insert(user.as_ref().to_string());
        record_users.entry(b.clone()).or_default().insert(user.as_ref().to_string());
        if a != b {
            *pairs.entry((a, b)).or_insert(0) += 1;
        }
    }
    let records = pairs
        .into_iter()
        .map(|((s, t), c)| NamePairRecord {
            source_count: tree_count[&s],
            target_count: record_count[&t],
            source_users: tree_users[&s].clone(),
            target_users: record_users[&t].clone(),
            source: s,
            target: t,
            cooccurrence: c,
        })
        .collect();
    Prepared {
        records,
        dropped_names: dropped,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_pairs: usize,
    pub after_universe: usize,
    pub after_cooccurrence_topk: usize,
    pub after_jaccard: usize,
    pub sampled_false_positive_rate: Option<f64>,
}

pub fn universe_stage(pairs: Vec<NamePairRecord>, universe: &FrequencyUniverse) -> Vec<NamePairRecord> {
    pairs
        .into_iter()
        .filter(|p| universe.contains(p.source.as_str()) && universe.contains(p.target.as_str()))
        .collect()
}

/// The `topk` pairs by co-occurrence, ties by source then target ascending.
pub fn topk_stage(mut pairs: Vec<NamePairRecord>, topk: usize) -> Vec<NamePairRecord> {
    pairs.sort_by(|a, b| {
        b.cooccurrence
            .cmp(&a.cooccurrence)
            .then_with(|| a.source.cmp(&b.source))
            .then_with(|| a.target.cmp(&b.target))
    });
    pairs.truncate(topk);
    pairs
}

pub fn jaccard_stage(pairs: Vec<NamePairRecord>, jaccard_min: f64) -> Vec<NamePairRecord> {
    pairs
        .into_iter()
        .filter(|p| jaccard_index(&p.source_users, &p.target_users) >= jaccard_min)
        .collect()
}

/// Universe membership, then top-k by co-occurrence, then the user-overlap filter.
pub fn filter_cascade(
    pairs: Vec<NamePairRecord>,
    universe: &FrequencyUniverse,
    topk: usize,
    jaccard_min: f64,
) -> Result<(Vec<NamePairRecord>, FilterReport)> {
    if topk == 0 || !(0.0..=1.0).contains(&jaccard_min) {
        return Err(Error::InvalidArgument(
            "topk must be positive and jaccard_min within [0, 1]".into(),
        ));
    }
    let mut report = FilterReport {
        input_pairs: pairs.len(),
        ..FilterReport::default()
    };
    let pairs = universe_stage(pairs, universe);
    report.after_universe = pairs.len();
    let pairs = topk_stage(pairs, topk);
    report.after_cooccurrence_topk = pairs.len();
    let pairs = jaccard_stage(pairs, jaccard_min);
    report.after_jaccard = pairs.len();
    Ok((pairs, report))
}

/// One pair drawn for manual review.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRow {
    pub stratum: usize,
    /// Pairs in the whole stratum.
    pub population: usize,
    pub source: Name,
    pub target: Name,
    /// `Some(true)` for an obvious false positive once labeled.
    pub false_positive: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleManifest {
    pub rows: Vec<SampleRow>,
    /// Requested strata with no pairs.
    pub empty_strata: Vec<usize>,
}

/// Up to `per_stratum` pairs per requested edit distance, drawn with a seeded shuffle.
pub fn false_positive_sample(
    pairs: &[NamePairRecord],
    strata: &[usize],
    per_stratum: usize,
    seed: u64,
) -> Result<SampleManifest> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("cannot sample from an empty corpus".into()));
    }
    let mut by_distance: BTreeMap<usize, Vec<&NamePairRecord>> = BTreeMap::new();
    for p in pairs {
        by_distance
            .entry(levenshtein_distance(p.source.as_str(), p.target.as_str()))
            .or_default()
            .push(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut manifest = SampleManifest::default();
    for &stratum in strata {
        let Some(members) = by_distance.get(&stratum) else {
            log::warn!("EmptyStratum: no pairs at edit distance {stratum}");
            manifest.empty_strata.push(stratum);
            continue;
        };
        let mut members = members.clone();
        members.sort_by(|a, b| (&a.source, &a.target).cmp(&(&b.source, &b.target)));
        members.shuffle(&mut rng);
        for p in members.iter().take(per_stratum) {
            manifest.rows.push(SampleRow {
                stratum,
                population: members.len(),
                source: p.source.clone(),
                target: p.target.clone(),
                false_positive: None,
            });
        }
    }
    Ok(manifest)
}

impl SampleManifest {
    /// `stratum<TAB>population<TAB>source<TAB>target<TAB>label`, label empty, `fp` or `ok`.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.rows {
            let label = match r.false_positive {
                None => "",
                Some(true) => "fp",
                Some(false) => "ok",
            };
            writeln!(w, "{}\t{}\t{}\t{}\t{}", r.stratum, r.population, r.source, r.target, label)?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R, label: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(label, e))?;
            if line.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::parse(label, i + 1, m);
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 5 {
                return Err(bad("expected five tab-separated fields"));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad number"));
            let name = |s: &str| Name::new(s).map_err(|_| bad("bad name"));
            let false_positive = match f[4].trim() {
                "" => None,
                "fp" | "1" | "yes" => Some(true),
                "ok" | "0" | "no" => Some(false),
                _ => return Err(bad("label must be empty, fp or ok")),
            };
            rows.push(SampleRow {
                stratum: num(f[0])?,
                population: num(f[1])?,
                source: name(f[2])?,
                target: name(f[3])?,
                false_positive,
            });
        }
        Ok(SampleManifest {
            rows,
            empty_strata: Vec::new(),
        })
    }

    /// Stratified estimate over labeled rows: each stratum's labeled rate weighted by
    /// its population. `None` when nothing is labeled.
    pub fn false_positive_rate(&self) -> Option<f64> {
        let mut strata: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
        for r in &self.rows {
            if let Some(fp) = r.false_positive {
                let e = strata.entry(r.stratum).or_insert((r.population, 0, 0));
                e.1 += 1;
                e.2 += usize::from(fp);
            }
        }
        let population: usize = strata.values().map(|e| e.0).sum();
        if population == 0 {
            return None;
        }
        let weighted: f64 = strata
            .values()
            .map(|&(pop, n, fp)| pop as f64 * fp as f64 / n as f64)
            .sum();
        Some(weighted / population as f64)
    }
}

/// Operation shares among distance-one pairs, in percent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpsPercentages {
    pub deletes: f64,
    pub inserts: f64,
    pub replaces: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStatistics {
    /// Pairs per edit distance.
    pub edit_distance: BTreeMap<usize, u64>,
    pub distance_one_ops: Option<OpsPercentages>,
}

pub fn corpus_statistics(pairs: &[NamePairRecord]) -> CorpusStatistics {
    let mut stats = CorpusStatistics::default();
    let (mut d, mut i, mut r) = (0usize, 0usize, 0usize);
    for p in pairs {
        let (s, t) = (p.source.as_str(), p.target.as_str());
        let ed = levenshtein_distance(s, t);
        *stats.edit_distance.entry(ed).or_insert(0) += 1;
        if ed == 1 {
            let ops = edit_ops_breakdown(s, t);
            d += ops.deletes;
            i += ops.inserts;
            r += ops.replaces;
        }
    }
    let total = (d + i + r) as f64;
    if total > 0.0 {
        stats.distance_one_ops = Some(OpsPercentages {
            deletes: 100.0 * d as f64 / total,
            inserts: 100.0 * i as f64 / total,
            replaces: 100.0 * r as f64 / total,
        });
    }
    stats
}

impl CorpusStatistics {
    /// Two small tables: `distance<TAB>pairs<TAB>percent`, then the operation shares.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let total: u64 = self.edit_distance.values().sum();
        writeln!(w, "edit_distance\tpairs\tpercent")?;
        for (ed, n) in &self.edit_distance {
            writeln!(w, "{ed}\t{n}\t{:.2}", 100.0 * *n as f64 / total as f64)?;
        }
        writeln!(w)?;
        writeln!(w, "operation\tpercent")?;
        if let Some(ops) = self.distance_one_ops {
            writeln!(w, "delete\t{:.2}", ops.deletes)?;
            writeln!(w, "insert\t{:.2}", ops.inserts)?;
            writeln!(w, "replace\t{:.2}", ops.replaces)?;
        }
        Ok(())
    }
}

pub fn parse_query_log<R: BufRead>(reader: R, label: &str) -> Result<Vec<QueryLogEvent>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(label, e))?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.splitn(3, '\t').collect();
        if f.len() != 3 {
            return Err(Error::parse(label, i + 1, "expected user<TAB>timestamp<TAB>name"));
        }
        let timestamp = f[1]
            .parse::<u64>()
            .map_err(|_| Error::parse(label, i + 1, "timestamp must be a non-negative integer"))?;
        out.push(QueryLogEvent {
            user: f[0].to_string(),
            timestamp,
            raw_name: f[2].to_string(),
        });
    }
    Ok(out)
}

pub fn parse_attachments<R: BufRead>(reader: R, label: &str) -> Result<Vec<(String, String, String)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(label, e))?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(Error::parse(label, i + 1, "expected tree_name<TAB>record_name<TAB>user"));
        }
        out.push((f[0].to_string(), f[1].to_string(), f[2].to_string()));
    }
    Ok(out)
}
