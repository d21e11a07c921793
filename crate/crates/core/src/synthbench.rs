//! Synthetic name universes and misspelling pairs from rule-based noise channels.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{build_universe, FrequencyUniverse, Name, NamePairRecord};
use crate::error::{Error, Result};

/// Draws allowed per requested pair before generation gives up.
pub const DRAW_BUDGET: usize = 20;

/// Rewrites `from` as `to` with probability `prob` wherever it is tried.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRule {
    pub from: String,
    pub to: String,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseChannel {
    pub rules: Vec<NoiseRule>,
    pub max_applications: usize,
}

fn rules(list: &[(&str, &str, f64)]) -> Vec<NoiseRule> {
    list.iter()
        .map(|&(from, to, prob)| NoiseRule {
            from: from.into(),
            to: to.into(),
            prob,
        })
        .collect()
}

impl NoiseChannel {
    pub const BUNDLES: [&'static str; 3] = ["ocr", "phonetic-drift", "suffix"];

    pub fn new(rules: Vec<NoiseRule>, max_applications: usize) -> Result<Self> {
        for r in &rules {
            if !(r.prob > 0.0 && r.prob <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "rule {}->{} has probability {} outside (0, 1]",
                    r.from, r.to, r.prob
                )));
            }
            if r.from.is_empty() || !r.from.bytes().chain(r.to.bytes()).all(|b| b.is_ascii_lowercase()) {
                return Err(Error::InvalidArgument(format!(
                    "rule {:?}->{:?} must rewrite a nonempty a-z segment into a-z",
                    r.from, r.to
                )));
            }
        }
        Ok(NoiseChannel {
            rules,
            max_applications,
        })
    }

    /// Built-in rule sets.
    pub fn bundle(name: &str) -> Result<Self> {
        let (list, max): (&[(&str, &str, f64)], usize) = match name {
            "ocr" => (
                &[
                    ("rn", "m", 0.3),
                    ("m", "rn", 0.08),
                    ("cl", "d", 0.3),
                    ("d", "cl", 0.05),
                    ("li", "h", 0.15),
                    ("h", "li", 0.04),
                    ("vv", "w", 0.3),
                    ("w", "vv", 0.06),
                    ("e", "c", 0.04),
                    ("c", "e", 0.04),
                    ("n", "u", 0.03),
                    ("u", "n", 0.04),
                    ("l", "i", 0.03),
                    ("i", "l", 0.03),
                ],
                2,
            ),
            "phonetic-drift" => (
                &[
                    ("ph", "f", 0.5),
                    ("ck", "k", 0.35),
                    ("ie", "y", 0.3),
                    ("ei", "ie", 0.2),
                    ("ee", "ea", 0.2),
                    ("ou", "ow", 0.2),
                    ("th", "t", 0.12),
                    ("ll", "l", 0.35),
                    ("tt", "t", 0.35),
                    ("nn", "n", 0.35),
                    ("ss", "s", 0.35),
                    ("pp", "p", 0.35),
                    ("rr", "r", 0.35),
                    ("mm", "m", 0.35),
                    ("f", "ph", 0.1),
                    ("y", "ie", 0.15),
                    ("k", "ck", 0.08),
                    ("c", "k", 0.06),
                    ("z", "s", 0.1),
                    ("l", "ll", 0.05),
                    ("t", "tt", 0.05),
                    ("n", "nn", 0.05),
                    ("s", "ss", 0.05),
                    ("p", "pp", 0.05),
                    ("r", "rr", 0.05),
                    ("m", "mm", 0.05),
                    ("i", "y", 0.04),
                    ("e", "", 0.03),
                    ("a", "e", 0.03),
                ],
                2,
            ),
            "suffix" => (
                &[
                    ("sson", "son", 0.4),
                    ("son", "sen", 0.3),
                    ("sen", "son", 0.3),
                    ("son", "sson", 0.15),
                    ("mann", "man", 0.4),
                    ("man", "mann", 0.3),
                    ("ez", "es", 0.3),
                    ("es", "ez", 0.2),
                    ("ski", "sky", 0.4),
                    ("sky", "ski", 0.4),
                    ("s", "", 0.04),
                ],
                1,
            ),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown channel {name:?}; expected one of {:?}",
                    Self::BUNDLES
                )))
            }
        };
        Self::new(rules(list), max)
    }

    /// Reads `from<TAB>to<TAB>prob` lines; `max_applications<TAB>n` sets the cap (default 1).
    pub fn parse<R: BufRead>(reader: R, label: &str) -> Result<Self> {
        let mut list = Vec::new();
        let mut max = 1;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(label, e))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            match f.as_slice() {
                ["max_applications", n] => {
                    max = n.parse().map_err(|_| Error::parse(label, i + 1, "bad max_applications"))?
                }
                [from, to, p] => list.push(NoiseRule {
                    from: from.to_string(),
                    to: to.to_string(),
                    prob: p.parse().map_err(|_| Error::parse(label, i + 1, "bad probability"))?,
                }),
                _ => return Err(Error::parse(label, i + 1, "expected from<TAB>to<TAB>prob")),
            }
        }
        Self::new(list, max)
    }

    /// One left-to-right pass. Rules matching at a position are mutually exclusive:
    /// each fires with its own probability, scaled down proportionally when those
    /// probabilities sum above 1. A fired rule consumes its segment, so rewritten text
    /// is never revisited.
    pub fn apply<R: Rng>(&self, name: &str, rng: &mut R) -> String {
        let bytes = name.as_bytes();
        let mut out = String::with_capacity(name.len() + 4);
        let mut applied = 0;
        let mut i = 0;
        'scan: while i < bytes.len() {
            if applied < self.max_applications {
                let matching: Vec<&NoiseRule> = self
                    .rules
                    .iter()
                    .filter(|r| bytes[i..].starts_with(r.from.as_bytes()))
                    .collect();
                if !matching.is_empty() {
                    let total: f64 = matching.iter().map(|r| r.prob).sum();
                    let mut u = rng.gen::<f64>() * total.max(1.0);
                    for r in matching {
                        if u < r.prob {
                            out.push_str(&r.to);
                            i += r.from.len();
                            applied += 1;
                            continue 'scan;
                        }
                        u -= r.prob;
                    }
                }
            }
            out.push(bytes[i] as char);
            i += 1;
        }
        out
    }
}

impl FromStr for NoiseChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::bundle(s)
    }
}

impl fmt::Display for NoiseChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "max_applications\t{}", self.max_applications)?;
        for r in &self.rules {
            writeln!(f, "{}\t{}\t{}", r.from, r.to, r.prob)?;
        }
        Ok(())
    }
}

const EMBEDDED: &[&str] = &[
    "smith", "johnson", "williams", "brown", "jones", "miller", "davis", "wilson", "anderson", "taylor",
    "thomas", "moore", "martin", "jackson", "thompson", "white", "harris", "clark", "lewis", "robinson",
    "walker", "young", "allen", "king", "wright", "scott", "hill", "green", "adams", "baker", "nelson",
    "carter", "mitchell", "roberts", "phillips", "campbell", "parker", "evans", "edwards", "collins",
    "stewart", "morris", "murphy", "cook", "rogers", "peterson", "cooper", "reed", "bailey", "bell",
    "kelly", "howard", "ward", "cox", "richardson", "wood", "watson", "brooks", "bennett", "gray",
    "hughes", "price", "sanders", "myers", "ross", "foster", "shepard", "johansson", "olsen", "larsen",
    "schmidt", "schneider", "fischer", "meyer", "weber", "wagner", "becker", "hoffmann", "kowalski",
    "novak", "fernandez", "gonzalez", "rodriguez", "lopez", "martinez", "hernandez", "philpott",
    "mackenzie", "mcdonald", "fitzgerald", "sullivan", "kennedy", "oneill", "gallagher", "murray",
];

const ONSETS: &[&str] = &[
    "b", "br", "ch", "d", "f", "g", "gr", "h", "j", "k", "l", "m", "n", "p", "ph", "r", "s", "sh", "st",
    "t", "th", "w", "v", "z", "cl", "bl", "fr", "kn",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ee", "ai", "ou", "ie", "ei", "y", "oo"];
const CODAS: &[&str] = &[
    "", "", "n", "r", "l", "ll", "s", "ss", "t", "tt", "ck", "ph", "rd", "nd", "ng", "m", "mm", "rn", "pp",
    "nn", "rr", "k",
];
const ENDINGS: &[&str] = &[
    "", "", "", "son", "sen", "man", "ley", "ford", "ton", "er", "ard", "ins", "ey", "ski", "ez", "field",
];

/// `count` distinct names: the embedded common surnames first, then seeded
/// syllable compositions.
pub fn base_names(count: usize, seed: u64) -> Vec<Name> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    for s in EMBEDDED {
        if out.len() == count {
            return out;
        }
        if seen.insert(s.to_string()) {
            out.push(Name::new(*s).expect("embedded names are valid"));
        }
    }
    let pick = |rng: &mut ChaCha8Rng, list: &[&'static str]| list[rng.gen_range(0..list.len())];
    while out.len() < count {
        let syllables = rng.gen_range(1..=2);
        let mut s = String::new();
        for _ in 0..syllables {
            s.push_str(pick(&mut rng, ONSETS));
            s.push_str(pick(&mut rng, NUCLEI));
            s.push_str(pick(&mut rng, CODAS));
        }
        s.push_str(pick(&mut rng, ENDINGS));
        if s.len() >= 3 && seen.insert(s.clone()) {
            out.push(Name::new(s).expect("syllables are lowercase letters"));
        }
    }
    out
}

/// Normalized Zipf weights `r^-s / H` for ranks `1..=n`.
pub fn zipf_weights(n: usize, exponent: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=n).map(|r| (r as f64).powf(-exponent)).collect();
    let h: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / h).collect()
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    /// Distinct directed pairs wanted.
    pub pair_count: usize,
    pub zipf_exponent: f64,
    /// Total frequency mass spread over the base names.
    pub population: u64,
    /// Channel passes per base name when seeding the universe with variants.
    pub variant_draws: usize,
    /// A variant's frequency per hit, as a fraction of its base name's frequency.
    pub variant_share: f64,
    /// Pair sources are drawn in proportion to `frequency ^ source_exponent`.
    pub source_exponent: f64,
    /// Size of the synthetic user pool.
    pub users: usize,
    pub universe_capacity: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            pair_count: 10_000,
            zipf_exponent: 1.0,
            population: 10_000_000,
            variant_draws: 18,
            variant_share: 0.05,
            source_exponent: 0.5,
            users: 2_000,
            universe_capacity: 250_000,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthCorpus {
    pub records: Vec<NamePairRecord>,
    pub universe: FrequencyUniverse,
    /// Pair draws made, including those that produced nothing.
    pub draws: usize,
}

/// Builds a universe and a directed pair corpus over it.
///
/// Base name `r` gets frequency `max(1, round(population * w_r))` with Zipf weights
/// `w`. Each base name then takes `variant_draws` channel passes; every distinct
/// variant adds `max(1, round(variant_share * f))` per hit. The universe keeps the
/// `universe_capacity` most frequent names.
///
/// Pairs come from draws of a source from the universe, weighted by
/// `frequency ^ source_exponent`, and one channel pass over it. A draw counts only when the result differs from the
/// source and is itself in the universe, so every target is derivable from its source.
/// Drawing stops at `pair_count` distinct pairs or after `DRAW_BUDGET * pair_count` draws.
pub fn generate_corpus(base: &[Name], channel: &NoiseChannel, config: &SynthConfig) -> Result<SynthCorpus> {
    if base.is_empty() {
        return Err(Error::InvalidArgument("base name list is empty".into()));
    }
    if !(config.zipf_exponent >= 0.0 && config.zipf_exponent.is_finite()) {
        return Err(Error::InvalidArgument("zipf exponent must be finite and non-negative".into()));
    }
    let weights = zipf_weights(base.len(), config.zipf_exponent);
    let mut freq: BTreeMap<Name, u64> = BTreeMap::new();
    for (name, w) in base.iter().zip(&weights) {
        *freq.entry(name.clone()).or_insert(0) += ((config.population as f64 * w).round() as u64).max(1);
    }
    // Variants per base name from its own stream, so names do not perturb each other.
    let mut variants: Vec<(Name, u64)> = Vec::new();
    for (i, name) in base.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64 + 1);
        let share = ((config.variant_share * freq[name] as f64).round() as u64).max(1);
        for _ in 0..config.variant_draws {
            if let Ok(v) = Name::new(channel.apply(name.as_str(), &mut rng)) {
                if &v != name {
                    variants.push((v, share));
                }
            }
        }
    }
    for (v, c) in variants {
        *freq.entry(v).or_insert(0) += c;
    }
    let universe = build_universe(freq, config.universe_capacity);

    let entries = universe.entries();
    let sampler = WeightedIndex::new(entries.iter().map(|(_, c)| (*c as f64).powf(config.source_exponent)))
        .map_err(|_| Error::InvalidArgument("source exponent gives unusable draw weights".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let users = config.users.max(1);
    let mut pairs: BTreeMap<(usize, Name), u64> = BTreeMap::new();
    let mut source_draws: HashMap<usize, u64> = HashMap::new();
    let mut target_draws: HashMap<Name, u64> = HashMap::new();
    let mut source_users: HashMap<usize, BTreeSet<String>> = HashMap::new();
    let mut target_users: HashMap<Name, BTreeSet<String>> = HashMap::new();
    let budget = DRAW_BUDGET * config.pair_count;
    let mut draws = 0;
    while pairs.len() < config.pair_count && draws < budget {
        draws += 1;
        let s = sampler.sample(&mut rng);
        let user = format!("u{}", rng.gen_range(0..users));
        let source = &entries[s].0;
        let noisy = channel.apply(source.as_str(), &mut rng);
        if noisy == source.as_str() || !universe.contains(&noisy) {
            continue;
        }
        let t = Name::new(noisy).expect("universe members are valid names");
        *pairs.entry((s, t.clone())).or_insert(0) += 1;
        *source_draws.entry(s).or_insert(0) += 1;
        *target_draws.entry(t.clone()).or_insert(0) += 1;
        source_users.entry(s).or_default().insert(user.clone());
        target_users.entry(t).or_default().insert(user);
    }
    if pairs.len() < config.pair_count {
        log::warn!(
            "draw budget exhausted: {} of {} pairs after {draws} draws",
            pairs.len(),
            config.pair_count
        );
    }
    let mut records: Vec<NamePairRecord> = pairs
        .into_iter()
        .map(|((s, t), c)| NamePairRecord {
            source: entries[s].0.clone(),
            source_count: source_draws[&s],
            target_count: target_draws[&t],
            source_users: source_users[&s].clone(),
            target_users: target_users[&t].clone(),
            target: t,
            cooccurrence: c,
        })
        .collect();
    records.sort_by(|a, b| (&a.source, &a.target).cmp(&(&b.source, &b.target)));
    Ok(SynthCorpus {
        records,
        universe,
        draws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataprep::corpus_statistics;
    use proptest::prelude::*;

    fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    fn small(pair_count: usize) -> SynthConfig {
        SynthConfig {
            pair_count,
            users: 50,
            ..SynthConfig::default()
        }
    }

    /// Every string one left-to-right pass can produce, by exhaustive branching.
    fn reachable(channel: &NoiseChannel, rest: &str, budget: usize) -> BTreeSet<String> {
        if rest.is_empty() {
            return BTreeSet::from([String::new()]);
        }
        let mut out: BTreeSet<String> = reachable(channel, &rest[1..], budget)
            .into_iter()
            .map(|t| format!("{}{t}", &rest[..1]))
            .collect();
        if budget > 0 {
            for r in &channel.rules {
                if let Some(tail) = rest.strip_prefix(r.from.as_str()) {
                    out.extend(reachable(channel, tail, budget - 1).into_iter().map(|t| format!("{}{t}", r.to)));
                }
            }
        }
        out
    }

    #[test]
    fn deterministic_rule() {
        let channel = NoiseChannel::new(rules(&[("ph", "f", 1.0)]), 1).unwrap();
        let out = generate_corpus(&[n("philip")], &channel, &small(5)).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!((out.records[0].source.as_str(), out.records[0].target.as_str()), ("philip", "filip"));
        assert!(out.universe.contains("filip"));
    }

    #[test]
    fn empty_channel_yields_nothing() {
        let channel = NoiseChannel::new(Vec::new(), 2).unwrap();
        let out = generate_corpus(&[n("smith"), n("jones")], &channel, &small(10)).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.draws, DRAW_BUDGET * 10);
    }

    #[test]
    fn single_edit_channel_splits_evenly() {
        let channel = NoiseChannel::new(rules(&[("a", "aq", 0.05), ("a", "", 0.05), ("a", "o", 0.05)]), 1).unwrap();
        let base = base_names(12_000, 11);
        let config = SynthConfig {
            zipf_exponent: 0.5,
            ..small(10_000)
        };
        let out = generate_corpus(&base, &channel, &config).unwrap();
        assert!(out.records.len() > 3000, "{}", out.records.len());
        let ops = corpus_statistics(&out.records).distance_one_ops.unwrap();
        for share in [ops.deletes, ops.inserts, ops.replaces] {
            assert!((share - 100.0 / 3.0).abs() < 3.0, "{ops:?}");
        }
    }

    #[test]
    fn bundles_parse_and_round_trip() {
        for b in NoiseChannel::BUNDLES {
            let c: NoiseChannel = b.parse().unwrap();
            let text = c.to_string();
            assert_eq!(NoiseChannel::parse(text.as_bytes(), "mem").unwrap(), c);
        }
        assert!(NoiseChannel::bundle("nope").is_err());
        assert!(NoiseChannel::new(rules(&[("a", "b", 0.0)]), 1).is_err());
    }

    #[test]
    fn same_seed_same_corpus() {
        let base = base_names(200, 3);
        let channel = NoiseChannel::bundle("phonetic-drift").unwrap();
        let a = generate_corpus(&base, &channel, &small(300)).unwrap();
        let b = generate_corpus(&base, &channel, &small(300)).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.universe.entries(), b.universe.entries());
        for r in &a.records {
            assert!(r.cooccurrence <= r.source_count.min(r.target_count));
        }
    }

    #[test]
    fn base_names_are_distinct() {
        let names = base_names(5000, 1);
        assert_eq!(names.len(), 5000);
        assert_eq!(names.iter().collect::<BTreeSet<_>>().len(), 5000);
        assert_eq!(names[0].as_str(), "smith");
    }

    #[test]
    fn zipf_sampling_fits() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let k = 20;
        let w = zipf_weights(k, 1.1);
        let sampler = WeightedIndex::new(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 20_000;
        let mut counts = vec![0f64; k];
        for _ in 0..draws {
            counts[sampler.sample(&mut rng)] += 1.0;
        }
        let stat: f64 = counts
            .iter()
            .zip(&w)
            .map(|(o, p)| (o - p * draws as f64).powi(2) / (p * draws as f64))
            .sum();
        let p_value = 1.0 - ChiSquared::new((k - 1) as f64).unwrap().cdf(stat);
        assert!(p_value > 0.001, "chi2 {stat}, p {p_value}");
        // Universe frequencies of the base names keep the Zipf ratios.
        let base = base_names(k, 2);
        let channel = NoiseChannel::new(rules(&[("a", "e", 0.5)]), 1).unwrap();
        let out = generate_corpus(&base, &channel, &small(10)).unwrap();
        let f1 = out.universe.freq(base[0].as_str()).unwrap() as f64;
        let f4 = out.universe.freq(base[3].as_str()).unwrap() as f64;
        assert!((f1 / f4 - 4f64.powf(1.0)).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn targets_are_derivable(
            names in proptest::collection::vec("[a-z]{2,7}", 1..6),
            bundle in 0usize..3,
            seed in 0u64..1000,
        ) {
            let base: Vec<Name> = names.iter().map(|s| n(s)).collect();
            let channel = NoiseChannel::bundle(NoiseChannel::BUNDLES[bundle]).unwrap();
            let config = SynthConfig { seed, ..small(20) };
            let out = generate_corpus(&base, &channel, &config).unwrap();
            for r in &out.records {
                let options = reachable(&channel, r.source.as_str(), channel.max_applications);
                prop_assert!(options.contains(r.target.as_str()), "{} -> {}", r.source, r.target);
            }
        }
    }
}
