//! Candidate ranking for the three method families.
//!
//! Ordering everywhere: score descending, then universe frequency descending, then
//! spelling ascending.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::corpus::{with_ranks, FrequencyUniverse, Name, RankedCandidate};
use crate::error::{Error, Result};
use crate::phonetic::{encode, PhoneticCode, PhoneticMethod};
use crate::similarity::SimilarityMeasure;

pub const DEFAULT_GAMMA: f64 = 0.001;
pub const DEFAULT_CUTOFF: usize = 1000;

/// A method family with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RankingRule {
    MachineTranslation,
    Phonetic(PhoneticMethod),
    Similarity { measure: SimilarityMeasure, gamma: f64 },
}

impl RankingRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            RankingRule::Similarity { gamma, .. } if !(*gamma > 0.0 && gamma.is_finite()) => {
                Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for RankingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankingRule::MachineTranslation => f.write_str("mt"),
            RankingRule::Phonetic(m) => write!(f, "{m}"),
            RankingRule::Similarity { measure, .. } => write!(f, "{measure}"),
        }
    }
}

impl FromStr for RankingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "mt" {
            return Ok(RankingRule::MachineTranslation);
        }
        if let Ok(m) = s.parse::<PhoneticMethod>() {
            return Ok(RankingRule::Phonetic(m));
        }
        s.parse::<SimilarityMeasure>()
            .map(|measure| RankingRule::Similarity {
                measure,
                gamma: DEFAULT_GAMMA,
            })
            .map_err(|_| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

fn order(universe: &FrequencyUniverse, mut scored: Vec<(Name, f64)>) -> Vec<(Name, f64)> {
    let freq = |n: &Name| universe.freq(n.as_str()).unwrap_or(0);
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| freq(&b.0).cmp(&freq(&a.0)))
            .then_with(|| a.0.cmp(&b.0))
    });
    scored
}

/// Decoder output used as is; only ranks are renumbered.
pub fn rank_mt(decoded: Vec<RankedCandidate>) -> Vec<RankedCandidate> {
    with_ranks(decoded.into_iter().map(|c| (c.candidate, c.score)))
}

/// Universe names sharing a code with the source, scored by frequency.
pub fn rank_phonetic(source: &Name, method: PhoneticMethod, universe: &FrequencyUniverse) -> Vec<RankedCandidate> {
    PhoneticIndex::new(method, universe).rank(source, universe)
}

/// Universe names bucketed by every code they carry.
#[derive(Clone, Debug)]
pub struct PhoneticIndex {
    method: PhoneticMethod,
    buckets: HashMap<String, Vec<usize>>,
}

impl PhoneticIndex {
    pub fn new(method: PhoneticMethod, universe: &FrequencyUniverse) -> Self {
        let mut buckets: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, (name, _)) in universe.entries().iter().enumerate() {
            let code = encode(method, name);
            for c in code.codes() {
                let bucket = buckets.entry(c.to_string()).or_default();
                if bucket.last() != Some(&i) {
                    bucket.push(i);
                }
            }
        }
        PhoneticIndex { method, buckets }
    }

    pub fn method(&self) -> PhoneticMethod {
        self.method
    }

    /// Same result as [`rank_phonetic`] for the universe this index was built from.
    pub fn rank(&self, source: &Name, universe: &FrequencyUniverse) -> Vec<RankedCandidate> {
        let code: PhoneticCode = encode(self.method, source);
        let mut hits: Vec<usize> = code
            .codes()
            .filter_map(|c| self.buckets.get(c))
            .flatten()
            .copied()
            .collect();
        hits.sort_unstable();
        hits.dedup();
        let entries = universe.entries();
        let scored = hits
            .into_iter()
            .map(|i| (entries[i].0.clone(), entries[i].1 as f64))
            .collect();
        with_ranks(order(universe, scored))
    }
}

/// Every universe name scored `sim(s, t) * freq(t)^gamma`; the best `cutoff` returned.
pub fn rank_similarity(
    source: &Name,
    measure: SimilarityMeasure,
    gamma: f64,
    universe: &FrequencyUniverse,
    cutoff: usize,
) -> Vec<RankedCandidate> {
    let scored: Vec<(Name, f64)> = universe
        .entries()
        .iter()
        .map(|(t, f)| {
            let sim = measure.similarity(source.as_str(), t.as_str());
            (t.clone(), sim * (*f as f64).powf(gamma))
        })
        .collect();
    let mut ordered = order(universe, scored);
    ordered.truncate(cutoff);
    with_ranks(ordered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_universe;

    fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    fn universe(v: &[(&str, u64)]) -> FrequencyUniverse {
        build_universe(v.iter().map(|(s, c)| (n(s), *c)), 100)
    }

    fn names(v: &[RankedCandidate]) -> Vec<&str> {
        v.iter().map(|c| c.candidate.as_str()).collect()
    }

    #[test]
    fn phonetic_example() {
        let u = universe(&[("shephard", 100), ("shepard", 50), ("smith", 999)]);
        let out = rank_phonetic(&n("shepard"), PhoneticMethod::Soundex, &u);
        assert_eq!(names(&out), vec!["shephard", "shepard"]);
        assert_eq!(out[0].score, 100.0);
        assert_eq!(out.iter().map(|c| c.rank).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn phonetic_no_match_and_ties() {
        let u = universe(&[("smith", 5)]);
        assert!(rank_phonetic(&n("jones"), PhoneticMethod::Soundex, &u).is_empty());
        let u = universe(&[("shepperd", 7), ("shephard", 7)]);
        let out = rank_phonetic(&n("shepard"), PhoneticMethod::Soundex, &u);
        assert_eq!(names(&out), vec!["shephard", "shepperd"]);
    }

    #[test]
    fn similarity_score_formula() {
        let score = 0.9 * 1000f64.powf(DEFAULT_GAMMA);
        assert!((score - 0.90624).abs() < 1e-5);
        let u = universe(&[("clarke", 1000), ("smith", 1000)]);
        let out = rank_similarity(&n("clark"), SimilarityMeasure::Levenshtein, DEFAULT_GAMMA, &u, 10);
        assert_eq!(names(&out), vec!["clarke", "smith"]);
        let expected = (1.0 - 1.0 / 6.0) * 1000f64.powf(DEFAULT_GAMMA);
        assert!((out[0].score - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_similarity_uses_tie_break() {
        let u = universe(&[("xy", 3), ("zz", 9), ("qq", 3)]);
        let out = rank_similarity(&n("ab"), SimilarityMeasure::Levenshtein, DEFAULT_GAMMA, &u, 10);
        assert_eq!(names(&out), vec!["zz", "qq", "xy"]);
        assert!(out.iter().all(|c| c.score == 0.0));
    }

    #[test]
    fn mt_pass_through() {
        let list = vec![
            RankedCandidate {
                candidate: n("b"),
                score: -1.0,
                rank: 1,
            },
            RankedCandidate {
                candidate: n("a"),
                score: -2.0,
                rank: 2,
            },
        ];
        assert_eq!(rank_mt(list.clone()), list);
        assert!(rank_mt(Vec::new()).is_empty());
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("mt".parse::<RankingRule>().unwrap(), RankingRule::MachineTranslation);
        assert_eq!(
            "nysiis".parse::<RankingRule>().unwrap(),
            RankingRule::Phonetic(PhoneticMethod::Nysiis)
        );
        assert!(RankingRule::Similarity {
            measure: SimilarityMeasure::Jaro,
            gamma: 0.0
        }
        .validate()
        .is_err());
    }
}
