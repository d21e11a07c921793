//! String similarity measures over cleaned names, plus set Jaccard and
//! edit-operation accounting.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Winkler prefix scale.
pub const WINKLER_PREFIX_WEIGHT: f64 = 0.1;
/// Longest common prefix credited by Jaro-Winkler.
pub const WINKLER_PREFIX_CAP: usize = 4;

/// Unit-cost edit distance.
pub fn levenshtein_distance(s: &str, t: &str) -> usize {
    let s = s.as_bytes();
    let t = t.as_bytes();
    if s.is_empty() {
        return t.len();
    }
    let mut prev: Vec<usize> = (0..=t.len()).collect();
    let mut cur = vec![0usize; t.len() + 1];
    for (i, &a) in s.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &b) in t.iter().enumerate() {
            let sub = prev[j] + usize::from(a != b);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[t.len()]
}

/// `1 - distance / max(len)`.
pub fn levenshtein_similarity(s: &str, t: &str) -> f64 {
    let longest = s.len().max(t.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein_distance(s, t) as f64 / longest as f64
}

pub fn jaro(s: &str, t: &str) -> f64 {
    let s = s.as_bytes();
    let t = t.as_bytes();
    if s.is_empty() && t.is_empty() {
        return 1.0;
    }
    if s.is_empty() || t.is_empty() {
        return 0.0;
    }
    let window = (s.len().max(t.len()) / 2).saturating_sub(1);
    let mut t_used = vec![false; t.len()];
    let mut s_matched = Vec::with_capacity(s.len());
    for (i, &a) in s.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(t.len());
        for j in lo..hi {
            if !t_used[j] && t[j] == a {
                t_used[j] = true;
                s_matched.push(a);
                break;
            }
        }
    }
    let m = s_matched.len();
    if m == 0 {
        return 0.0;
    }
    let t_matched = t.iter().zip(&t_used).filter(|(_, &u)| u).map(|(&c, _)| c);
    let half_transpositions = s_matched
        .iter()
        .zip(t_matched)
        .filter(|(a, b)| **a != *b)
        .count();
    let transpositions = (half_transpositions / 2) as f64;
    let m = m as f64;
    (m / s.len() as f64 + m / t.len() as f64 + (m - transpositions) / m) / 3.0
}

pub fn jaro_winkler(s: &str, t: &str) -> f64 {
    let base = jaro(s, t);
    let prefix = s
        .bytes()
        .zip(t.bytes())
        .take(WINKLER_PREFIX_CAP)
        .take_while(|(a, b)| a == b)
        .count();
    base + prefix as f64 * WINKLER_PREFIX_WEIGHT * (1.0 - base)
}

/// `|a ∩ b| / |a ∪ b|`, and 0 when both are empty.
pub fn jaccard_index<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Operation counts along one optimal unit-cost alignment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EditOpsBreakdown {
    pub deletes: usize,
    pub inserts: usize,
    pub replaces: usize,
}

impl EditOpsBreakdown {
    pub fn total(&self) -> usize {
        self.deletes + self.inserts + self.replaces
    }
}

/// Backtraces the full DP table from the bottom-right corner. Free matches are taken
/// first; among costed steps the preference is replace, then delete, then insert.
pub fn edit_ops_breakdown(s: &str, t: &str) -> EditOpsBreakdown {
    let s = s.as_bytes();
    let t = t.as_bytes();
    let cols = t.len() + 1;
    let mut d = vec![0usize; (s.len() + 1) * cols];
    for i in 0..=s.len() {
        d[i * cols] = i;
    }
    for (j, cell) in d.iter_mut().take(t.len() + 1).enumerate() {
        *cell = j;
    }
    for i in 1..=s.len() {
        for j in 1..=t.len() {
            let sub = d[(i - 1) * cols + j - 1] + usize::from(s[i - 1] != t[j - 1]);
            d[i * cols + j] = sub
                .min(d[(i - 1) * cols + j] + 1)
                .min(d[i * cols + j - 1] + 1);
        }
    }
    let mut ops = EditOpsBreakdown::default();
    let (mut i, mut j) = (s.len(), t.len());
    while i > 0 || j > 0 {
        let here = d[i * cols + j];
        if i > 0 && j > 0 {
            let diag = d[(i - 1) * cols + j - 1];
            if s[i - 1] == t[j - 1] && here == diag {
                i -= 1;
                j -= 1;
                continue;
            }
            if here == diag + 1 {
                ops.replaces += 1;
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == d[(i - 1) * cols + j] + 1 {
            ops.deletes += 1;
            i -= 1;
        } else {
            ops.inserts += 1;
            j -= 1;
        }
    }
    ops
}

/// The static similarity measures usable for ranking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimilarityMeasure {
    Levenshtein,
    Jaro,
    JaroWinkler,
}

impl SimilarityMeasure {
    pub const ALL: [SimilarityMeasure; 3] = [
        SimilarityMeasure::Levenshtein,
        SimilarityMeasure::Jaro,
        SimilarityMeasure::JaroWinkler,
    ];

    /// Similarity in `[0, 1]`.
    pub fn similarity(self, s: &str, t: &str) -> f64 {
        match self {
            SimilarityMeasure::Levenshtein => levenshtein_similarity(s, t),
            SimilarityMeasure::Jaro => jaro(s, t),
            SimilarityMeasure::JaroWinkler => jaro_winkler(s, t),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            SimilarityMeasure::Levenshtein => "levenshtein",
            SimilarityMeasure::Jaro => "jaro",
            SimilarityMeasure::JaroWinkler => "jaro-winkler",
        }
    }
}

impl fmt::Display for SimilarityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SimilarityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "levenshtein" => Ok(SimilarityMeasure::Levenshtein),
            "jaro" => Ok(SimilarityMeasure::Jaro),
            "jaro-winkler" | "jaro_winkler" | "winkler" => Ok(SimilarityMeasure::JaroWinkler),
            other => Err(Error::InvalidArgument(format!("unknown measure {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-5
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein_distance("johnson", "johnston"), 1);
        assert_eq!(levenshtein_distance("clark", "clark"), 0);
        assert_eq!(levenshtein_distance("kitten", "sitting"), 3);
        assert!(close(levenshtein_similarity("johnson", "johnston"), 0.875));
        assert_eq!(levenshtein_similarity("clark", "clark"), 1.0);
        assert_eq!(levenshtein_similarity("ab", "cd"), 0.0);
    }

    #[test]
    fn jaro_examples() {
        assert!(close(jaro("martha", "marhta"), 0.94444));
        assert!(close(jaro("dixon", "dicksonx"), 0.76667));
        assert_eq!(jaro("clark", "clark"), 1.0);
        assert_eq!(jaro("abc", "xyz"), 0.0);
        assert!(close(jaro_winkler("martha", "marhta"), 0.96111));
        assert!(close(jaro_winkler("dixon", "dicksonx"), 0.81333));
        assert_eq!(jaro_winkler("clark", "clark"), 1.0);
    }

    #[test]
    fn canonical_jaro_for_clark_clarke() {
        // Canonical formula, not the 0.889 some libraries report for this pair.
        assert!(close(jaro("clark", "clarke"), 0.94444));
    }

    #[test]
    fn jaccard_examples() {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        assert_eq!(jaccard_index(&set(&["u1", "u2", "u3"]), &set(&["u2", "u3", "u4"])), 0.5);
        assert_eq!(jaccard_index(&set(&["u1"]), &set(&["u1"])), 1.0);
        assert_eq!(jaccard_index(&set(&["u1"]), &set(&["u2"])), 0.0);
        assert_eq!(jaccard_index(&set(&[]), &set(&[])), 0.0);
    }

    #[test]
    fn breakdown_examples() {
        let ops = |a, b| edit_ops_breakdown(a, b);
        assert_eq!(ops("clark", "clarke"), EditOpsBreakdown { deletes: 0, inserts: 1, replaces: 0 });
        assert_eq!(ops("bailey", "baily"), EditOpsBreakdown { deletes: 1, inserts: 0, replaces: 0 });
        assert_eq!(ops("smith", "smyth"), EditOpsBreakdown { deletes: 0, inserts: 0, replaces: 1 });
        assert_eq!(ops("", "ab").inserts, 2);
        assert_eq!(ops("ab", "").deletes, 2);
    }

    #[test]
    fn measure_ids_parse() {
        for m in SimilarityMeasure::ALL {
            assert_eq!(m.id().parse::<SimilarityMeasure>().unwrap(), m);
        }
        assert!("cosine".parse::<SimilarityMeasure>().is_err());
    }
}
