//! Shared domain types: cleaned names, directed name-pair records, the
//! frequency universe and cross-validation folds, plus their text formats.
//!
//! Corpus lines are tab separated:
//!
//! ```text
//! source  target  cooccurrence  source_count  target_count  [source_users_csv  target_users_csv]
//! ```
//!
//! Universe lines are `name<TAB>count`.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A cleaned surname: nonempty, ASCII `a`–`z` only.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(String);

impl Name {
    /// Wraps an already clean string. Fails unless `text` is nonempty lowercase ASCII letters.
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if !text.is_empty() && text.bytes().all(|b| b.is_ascii_lowercase()) {
            Ok(Name(text))
        } else {
            Err(Error::InvalidArgument(format!("{text:?} is not a clean name")))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Name {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl std::str::FromStr for Name {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        normalize(s)
    }
}

/// Lowercases `raw` and drops every character outside `a`–`z`.
///
/// Non-ASCII letters are dropped rather than transliterated.
pub fn normalize(raw: &str) -> Result<Name> {
    let cleaned: String = raw
        .chars()
        .map(|c| c.to_ascii_lowercase())
        .filter(|c| c.is_ascii_lowercase())
        .collect();
    if cleaned.is_empty() {
        Err(Error::EmptyAfterCleaning {
            raw: raw.to_string(),
        })
    } else {
        Ok(Name(cleaned))
    }
}

/// One directed corpus row. `(a, b)` and `(b, a)` are distinct records.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamePairRecord {
    pub source: Name,
    pub target: Name,
    pub cooccurrence: u64,
    pub source_count: u64,
    pub target_count: u64,
    pub source_users: BTreeSet<String>,
    pub target_users: BTreeSet<String>,
}

impl NamePairRecord {
    /// A record whose marginal counts equal its co-occurrence and whose user sets are empty.
    pub fn simple(source: Name, target: Name, cooccurrence: u64) -> Self {
        NamePairRecord {
            source,
            target,
            cooccurrence,
            source_count: cooccurrence,
            target_count: cooccurrence,
            source_users: BTreeSet::new(),
            target_users: BTreeSet::new(),
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.cooccurrence == 0 {
            return Err("cooccurrence must be at least 1".into());
        }
        if self.cooccurrence > self.source_count.min(self.target_count) {
            return Err(format!(
                "cooccurrence {} exceeds marginal counts {}/{}",
                self.cooccurrence, self.source_count, self.target_count
            ));
        }
        Ok(())
    }
}

/// The `capacity` most frequent names, ordered by count descending then name ascending.
#[derive(Clone, Debug, Default)]
pub struct FrequencyUniverse {
    entries: Vec<(Name, u64)>,
    index: HashMap<Name, u64>,
    capacity: usize,
}

impl FrequencyUniverse {
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn freq(&self, name: &str) -> Option<u64> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Entries in retention order.
    pub fn entries(&self) -> &[(Name, u64)] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> + '_ {
        self.entries.iter().map(|(n, _)| n)
    }
}

/// Keeps the `capacity` highest-count names. Repeated names have their counts summed and
/// zero counts are ignored. Ties are broken by ascending name.
pub fn build_universe<I>(name_counts: I, capacity: usize) -> FrequencyUniverse
where
    I: IntoIterator<Item = (Name, u64)>,
{
    let mut totals: HashMap<Name, u64> = HashMap::new();
    for (name, count) in name_counts {
        if count > 0 {
            *totals.entry(name).or_default() += count;
        }
    }
    let mut entries: Vec<(Name, u64)> = totals.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(capacity);
    let index = entries.iter().cloned().collect();
    FrequencyUniverse {
        entries,
        index,
        capacity,
    }
}

/// One cross-validation fold.
#[derive(Clone, Debug)]
pub struct Fold {
    pub index: usize,
    pub train_pairs: Vec<NamePairRecord>,
    pub test_pairs: Vec<NamePairRecord>,
}

/// Splits the corpus into `k` folds by source name, so that a source never appears in
/// both the train and test side of one fold. Group order is a seeded permutation; the
/// group at permuted position `p` lands in fold `p % k`.
pub fn split_folds(corpus: &[NamePairRecord], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    let mut groups: BTreeMap<&Name, Vec<usize>> = BTreeMap::new();
    for (i, rec) in corpus.iter().enumerate() {
        groups.entry(&rec.source).or_default().push(i);
    }
    if groups.len() < k {
        return Err(Error::TooFewGroups {
            groups: groups.len(),
            folds: k,
        });
    }
    let mut order: Vec<Vec<usize>> = groups.into_values().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut fold_of = vec![0usize; corpus.len()];
    let mut test_idx: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (pos, members) in order.iter().enumerate() {
        let fold = pos % k;
        for &i in members {
            fold_of[i] = fold;
            test_idx[fold].push(i);
        }
    }
    Ok(test_idx
        .into_iter()
        .enumerate()
        .map(|(index, test)| Fold {
            index,
            test_pairs: test.iter().map(|&i| corpus[i].clone()).collect(),
            train_pairs: corpus
                .iter()
                .zip(&fold_of)
                .filter(|(_, &f)| f != index)
                .map(|(r, _)| r.clone())
                .collect(),
        })
        .collect())
}

/// One entry of a ranked candidate list. Rank is 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedCandidate {
    pub candidate: Name,
    pub score: f64,
    pub rank: usize,
}

/// Assigns ranks 1..=n in the current order.
pub(crate) fn with_ranks(items: impl IntoIterator<Item = (Name, f64)>) -> Vec<RankedCandidate> {
    items
        .into_iter()
        .enumerate()
        .map(|(i, (candidate, score))| RankedCandidate {
            candidate,
            score,
            rank: i + 1,
        })
        .collect()
}

fn split_users(field: &str) -> BTreeSet<String> {
    field
        .split(',')
        .filter(|u| !u.is_empty())
        .map(str::to_string)
        .collect()
}

fn join_users(users: &BTreeSet<String>) -> String {
    users.iter().map(String::as_str).collect::<Vec<_>>().join(",")
}

fn parse_clean(field: &str, label: &str, line: usize) -> Result<Name> {
    Name::new(field).map_err(|_| Error::parse(label, line, format!("{field:?} is not a clean name")))
}

fn parse_count(field: &str, label: &str, line: usize) -> Result<u64> {
    field
        .parse()
        .map_err(|_| Error::parse(label, line, format!("{field:?} is not a count")))
}

/// Reads corpus lines. `label` names the input in error messages.
pub fn parse_corpus<R: BufRead>(reader: R, label: &str) -> Result<Vec<NamePairRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(label, e))?;
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 && fields.len() != 7 {
            return Err(Error::parse(
                label,
                lineno,
                format!("expected 5 or 7 fields, found {}", fields.len()),
            ));
        }
        let mut rec = NamePairRecord {
            source: parse_clean(fields[0], label, lineno)?,
            target: parse_clean(fields[1], label, lineno)?,
            cooccurrence: parse_count(fields[2], label, lineno)?,
            source_count: parse_count(fields[3], label, lineno)?,
            target_count: parse_count(fields[4], label, lineno)?,
            source_users: BTreeSet::new(),
            target_users: BTreeSet::new(),
        };
        if fields.len() == 7 {
            rec.source_users = split_users(fields[5]);
            rec.target_users = split_users(fields[6]);
        }
        rec.check().map_err(|m| Error::parse(label, lineno, m))?;
        out.push(rec);
    }
    Ok(out)
}

/// Writes corpus lines. User columns are written only when some record carries users.
pub fn write_corpus<W: Write>(mut w: W, records: &[NamePairRecord]) -> std::io::Result<()> {
    let with_users = records
        .iter()
        .any(|r| !r.source_users.is_empty() || !r.target_users.is_empty());
    for r in records {
        write!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            r.source, r.target, r.cooccurrence, r.source_count, r.target_count
        )?;
        if with_users {
            write!(w, "\t{}\t{}", join_users(&r.source_users), join_users(&r.target_users))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn parse_universe<R: BufRead>(reader: R, label: &str, capacity: usize) -> Result<FrequencyUniverse> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(label, e))?;
        if line.is_empty() {
            continue;
        }
        let (name, count) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(label, i + 1, "expected name<TAB>count"))?;
        rows.push((parse_clean(name, label, i + 1)?, parse_count(count, label, i + 1)?));
    }
    Ok(build_universe(rows, capacity))
}

pub fn write_universe<W: Write>(mut w: W, universe: &FrequencyUniverse) -> std::io::Result<()> {
    for (name, count) in universe.entries() {
        writeln!(w, "{name}\t{count}")?;
    }
    Ok(())
}

/// Reads one raw name per line, normalizing each. Lines that clean to nothing are skipped.
pub fn parse_names<R: BufRead>(reader: R, label: &str) -> Result<Vec<Name>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(label, e))?;
        if let Ok(name) = normalize(&line) {
            out.push(name);
        }
    }
    Ok(out)
}

pub fn read_corpus(path: &Path) -> Result<Vec<NamePairRecord>> {
    parse_corpus(crate::io::open(path)?, &path.display().to_string())
}

pub fn read_universe(path: &Path, capacity: usize) -> Result<FrequencyUniverse> {
    parse_universe(crate::io::open(path)?, &path.display().to_string(), capacity)
}

pub fn read_names(path: &Path) -> Result<Vec<Name>> {
    parse_names(crate::io::open(path)?, &path.display().to_string())
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn normalize_idempotent(raw in "\\PC{0,20}") {
            if let Ok(once) = normalize(&raw) {
                let twice = normalize(once.as_str()).unwrap();
                prop_assert_eq!(once, twice);
            }
        }

        #[test]
        fn universe_size(names in proptest::collection::vec(("[a-e]{1,3}", 1u64..50), 0..40), cap in 1usize..30) {
            let distinct: BTreeSet<&String> = names.iter().map(|(s, _)| s).collect();
            let u = build_universe(names.iter().map(|(s, c)| (Name::new(s.clone()).unwrap(), *c)), cap);
            prop_assert_eq!(u.len(), cap.min(distinct.len()));
        }

        #[test]
        fn folds_partition_by_source(
            pairs in proptest::collection::vec(("[a-f]{1,2}", "[a-f]{1,2}"), 4..60),
            k in 2usize..5,
            seed in any::<u64>(),
        ) {
            let corpus: Vec<NamePairRecord> = pairs
                .iter()
                .map(|(s, t)| NamePairRecord::simple(Name::new(s.clone()).unwrap(), Name::new(t.clone()).unwrap(), 1))
                .collect();
            let folds = match split_folds(&corpus, k, seed) {
                Ok(f) => f,
                Err(Error::TooFewGroups { .. }) => return Ok(()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            let mut all_test = Vec::new();
            for f in &folds {
                let train: BTreeSet<&Name> = f.train_pairs.iter().map(|r| &r.source).collect();
                for r in &f.test_pairs {
                    prop_assert!(!train.contains(&r.source));
                }
                prop_assert_eq!(f.train_pairs.len() + f.test_pairs.len(), corpus.len());
                all_test.extend(f.test_pairs.iter().map(|r| (r.source.clone(), r.target.clone())));
            }
            let mut expected: Vec<_> = corpus.iter().map(|r| (r.source.clone(), r.target.clone())).collect();
            all_test.sort();
            expected.sort();
            prop_assert_eq!(all_test, expected);
        }
    }
}
