//! Character alignment and segment extraction: the channel model.
//!
//! EM estimates `t(e | f)`, the probability that conditioning character `f` (or
//! NULL) emits character `e`, over weighted `(f-side, e-side)` name pairs. Each
//! emitted position picks one conditioning position or NULL. The positional prior
//! is either uniform (classical Model 1) or diagonal: NULL gets `null_prob` and the
//! rest is spread in proportion to `exp(-tension * |i/m - j/n|)` over 1-based
//! positions. The prior is fixed; only `t` is re-estimated, so each EM step cannot
//! lower the corpus likelihood.
//!
//! Alignments from both directions are merged with grow-diag-final-and, and every
//! consistent block of at most `max_len` characters per side becomes a segment pair.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::corpus::Name;
use crate::error::{Error, Result};

const LETTERS: usize = 26;
/// Row index of NULL in the table.
const NULL: usize = 26;
/// Pairs per E-step work unit; fixed so that sums are independent of thread count.
const CHUNK: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Prior {
    /// `1/(m+1)` for every conditioning position and NULL.
    Uniform,
    Diagonal { tension: f64, null_prob: f64 },
}

impl Default for Prior {
    fn default() -> Self {
        Prior::Diagonal {
            tension: 4.0,
            null_prob: 0.08,
        }
    }
}

impl Prior {
    /// Prior over NULL followed by conditioning positions `0..m`, for emitted position `j` of `n`.
    fn weights(self, j: usize, n: usize, m: usize, out: &mut Vec<f64>) {
        out.clear();
        match self {
            Prior::Uniform => {
                let p = 1.0 / (m + 1) as f64;
                out.resize(m + 1, p);
            }
            Prior::Diagonal { tension, null_prob } => {
                out.push(null_prob);
                let jf = (j + 1) as f64 / n as f64;
                let mut z = 0.0;
                for i in 0..m {
                    let w = (-tension * ((i + 1) as f64 / m as f64 - jf).abs()).exp();
                    out.push(w);
                    z += w;
                }
                for w in &mut out[1..] {
                    *w *= (1.0 - null_prob) / z;
                }
            }
        }
    }
}

/// `t(emitted | conditioning)` with a NULL row. Rows sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationTable {
    rows: Vec<[f64; LETTERS]>,
    prior: Prior,
}

fn idx(c: u8) -> usize {
    (c - b'a') as usize
}

impl TranslationTable {
    pub fn uniform(prior: Prior) -> Self {
        TranslationTable {
            rows: vec![[1.0 / LETTERS as f64; LETTERS]; LETTERS + 1],
            prior,
        }
    }

    /// A table where every letter emits itself with probability one; NULL is uniform.
    pub fn identity(prior: Prior) -> Self {
        let mut t = Self::uniform(prior);
        for (c, row) in t.rows.iter_mut().take(LETTERS).enumerate() {
            *row = [0.0; LETTERS];
            row[c] = 1.0;
        }
        t
    }

    pub fn prior(&self) -> Prior {
        self.prior
    }

    /// `t(emitted | conditioning)`; `None` conditions on NULL.
    pub fn prob(&self, emitted: char, conditioning: Option<char>) -> f64 {
        let row = conditioning.map_or(NULL, |c| idx(c as u8));
        self.rows[row][idx(emitted as u8)]
    }

    pub fn set_row(&mut self, conditioning: Option<char>, probs: &[(char, f64)]) {
        let row = conditioning.map_or(NULL, |c| idx(c as u8));
        self.rows[row] = [0.0; LETTERS];
        for &(e, p) in probs {
            self.rows[row][idx(e as u8)] = p;
        }
    }

    /// Sum of each row, NULL last.
    pub fn row_sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }
}

/// A set of `(f_position, e_position)` links for one pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlignmentMatrix {
    pub source_len: usize,
    pub target_len: usize,
    pub links: BTreeSet<(usize, usize)>,
}

impl AlignmentMatrix {
    pub fn new(source_len: usize, target_len: usize, links: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let links: BTreeSet<_> = links.into_iter().collect();
        debug_assert!(links.iter().all(|&(i, j)| i < source_len && j < target_len));
        AlignmentMatrix {
            source_len,
            target_len,
            links,
        }
    }

    pub fn diagonal(len: usize) -> Self {
        Self::new(len, len, (0..len).map(|i| (i, i)))
    }

    /// Swaps the roles of the two sides.
    pub fn transposed(&self) -> Self {
        Self::new(self.target_len, self.source_len, self.links.iter().map(|&(i, j)| (j, i)))
    }
}

#[derive(Clone, Debug)]
pub struct EmConfig {
    pub iterations: usize,
    /// Stop once the per-pair likelihood gain drops below this; `None` runs every iteration.
    pub min_gain_per_pair: Option<f64>,
    pub prior: Prior,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig {
            iterations: 10,
            min_gain_per_pair: Some(1e-6),
            prior: Prior::default(),
        }
    }
}

/// A trained table and the corpus log-likelihood seen at each E-step.
#[derive(Clone, Debug)]
pub struct EmRun {
    pub table: TranslationTable,
    pub log_likelihoods: Vec<f64>,
}

type Counts = Vec<[f64; LETTERS]>;

fn e_step(table: &TranslationTable, pairs: &[(&[u8], &[u8], f64)]) -> (Counts, f64) {
    let mut counts: Counts = vec![[0.0; LETTERS]; LETTERS + 1];
    let mut ll = 0.0;
    let mut prior = Vec::new();
    let mut post = Vec::new();
    for &(f, e, w) in pairs {
        for (j, &ec) in e.iter().enumerate() {
            let ej = idx(ec);
            table.prior.weights(j, e.len(), f.len(), &mut prior);
            post.clear();
            post.push(prior[0] * table.rows[NULL][ej]);
            for (i, &fc) in f.iter().enumerate() {
                post.push(prior[i + 1] * table.rows[idx(fc)][ej]);
            }
            let z: f64 = post.iter().sum();
            if z <= 0.0 {
                continue;
            }
            ll += w * z.ln();
            counts[NULL][ej] += w * post[0] / z;
            for (i, &fc) in f.iter().enumerate() {
                counts[idx(fc)][ej] += w * post[i + 1] / z;
            }
        }
    }
    (counts, ll)
}

/// EM over `(conditioning, emitted, weight)` triples.
pub fn train_em(pairs: &[(Name, Name, f64)], config: &EmConfig) -> Result<EmRun> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("alignment needs at least one pair".into()));
    }
    if config.iterations == 0 {
        return Err(Error::InvalidArgument("alignment needs at least one iteration".into()));
    }
    let data: Vec<(&[u8], &[u8], f64)> = pairs
        .iter()
        .map(|(f, e, w)| (f.as_bytes(), e.as_bytes(), *w))
        .collect();
    let total_weight: f64 = data.iter().map(|p| p.2).sum::<f64>().max(f64::MIN_POSITIVE);

    let mut table = TranslationTable::uniform(config.prior);
    let mut lls: Vec<f64> = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        let partial: Vec<(Counts, f64)> = data.par_chunks(CHUNK).map(|c| e_step(&table, c)).collect();
        let mut counts: Counts = vec![[0.0; LETTERS]; LETTERS + 1];
        let mut ll = 0.0;
        for (c, l) in partial {
            for (row, add) in counts.iter_mut().zip(&c) {
                for (x, a) in row.iter_mut().zip(add) {
                    *x += a;
                }
            }
            ll += l;
        }
        let stop = match (config.min_gain_per_pair, lls.last()) {
            (Some(min), Some(&prev)) => (ll - prev) / total_weight < min,
            _ => false,
        };
        lls.push(ll);
        for (r, row) in counts.iter().enumerate() {
            let z: f64 = row.iter().sum();
            if z > 0.0 {
                for (t, c) in table.rows[r].iter_mut().zip(row) {
                    *t = c / z;
                }
            }
        }
        if stop {
            break;
        }
    }
    Ok(EmRun {
        table,
        log_likelihoods: lls,
    })
}

/// EM with the default prior and no early stop, for exactly `iterations` steps.
pub fn train_model1(pairs: &[(Name, Name, f64)], iterations: usize) -> Result<TranslationTable> {
    let config = EmConfig {
        iterations,
        min_gain_per_pair: None,
        ..EmConfig::default()
    };
    Ok(train_em(pairs, &config)?.table)
}

/// Best conditioning position for every emitted position; links are `(f_pos, e_pos)`.
/// Ties prefer the smallest position, and NULL only wins outright.
pub fn viterbi_align(table: &TranslationTable, f: &Name, e: &Name) -> AlignmentMatrix {
    let (fb, eb) = (f.as_bytes(), e.as_bytes());
    let mut prior = Vec::new();
    let mut links = Vec::with_capacity(eb.len());
    for (j, &ec) in eb.iter().enumerate() {
        let ej = idx(ec);
        table.prior.weights(j, eb.len(), fb.len(), &mut prior);
        let mut best: Option<usize> = None;
        let mut best_score = prior[0] * table.rows[NULL][ej];
        for (i, &fc) in fb.iter().enumerate() {
            let s = prior[i + 1] * table.rows[idx(fc)][ej];
            if s > best_score || (best.is_none() && s == best_score) {
                best = Some(i);
                best_score = s;
            }
        }
        if let Some(i) = best {
            links.push((i, j));
        }
    }
    AlignmentMatrix::new(fb.len(), eb.len(), links)
}

const NEIGHBOURS: [(isize, isize); 8] = [(-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)];

/// grow-diag-final-and over two alignments of the same pair.
pub fn symmetrize(forward: &AlignmentMatrix, backward: &AlignmentMatrix) -> AlignmentMatrix {
    let (n, m) = (forward.source_len, forward.target_len);
    let union: BTreeSet<(usize, usize)> = forward.links.union(&backward.links).copied().collect();
    let mut a: BTreeSet<(usize, usize)> = forward.links.intersection(&backward.links).copied().collect();
    let mut src_aligned = vec![false; n];
    let mut tgt_aligned = vec![false; m];
    for &(i, j) in &a {
        src_aligned[i] = true;
        tgt_aligned[j] = true;
    }

    loop {
        let mut added = false;
        for i in 0..n {
            for j in 0..m {
                if !a.contains(&(i, j)) {
                    continue;
                }
                for (di, dj) in NEIGHBOURS {
                    let (ni, nj) = (i as isize + di, j as isize + dj);
                    if ni < 0 || nj < 0 || ni >= n as isize || nj >= m as isize {
                        continue;
                    }
                    let p = (ni as usize, nj as usize);
                    if (!src_aligned[p.0] || !tgt_aligned[p.1]) && union.contains(&p) && a.insert(p) {
                        src_aligned[p.0] = true;
                        tgt_aligned[p.1] = true;
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }

    for side in [forward, backward] {
        for &(i, j) in &side.links {
            if !src_aligned[i] && !tgt_aligned[j] {
                a.insert((i, j));
                src_aligned[i] = true;
                tgt_aligned[j] = true;
            }
        }
    }
    AlignmentMatrix::new(n, m, a)
}

/// Segment pairs with their forward `P(target | source)` and backward `P(source | target)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SegmentTable {
    entries: BTreeMap<(String, String), (f64, f64)>,
    by_source: HashMap<String, Vec<(String, f64, f64)>>,
}

impl SegmentTable {
    pub fn from_entries(entries: impl IntoIterator<Item = ((String, String), (f64, f64))>) -> Self {
        let entries: BTreeMap<_, _> = entries.into_iter().collect();
        let mut by_source: HashMap<String, Vec<(String, f64, f64)>> = HashMap::new();
        for ((s, t), &(pf, pb)) in &entries {
            by_source.entry(s.clone()).or_default().push((t.clone(), pf, pb));
        }
        SegmentTable { entries, by_source }
    }

    /// Each letter maps to itself with both probabilities one.
    pub fn identity() -> Self {
        Self::from_entries((b'a'..=b'z').map(|c| {
            let s = (c as char).to_string();
            ((s.clone(), s), (1.0, 1.0))
        }))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, source: &str, target: &str) -> Option<(f64, f64)> {
        self.entries.get(&(source.to_string(), target.to_string())).copied()
    }

    /// Target options for one source segment, in lexicographic target order.
    pub fn options(&self, source: &str) -> &[(String, f64, f64)] {
        self.by_source.get(source).map_or(&[], Vec::as_slice)
    }

    pub fn max_source_len(&self) -> usize {
        self.by_source.keys().map(String::len).max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64, f64)> + '_ {
        self.entries
            .iter()
            .map(|((s, t), &(pf, pb))| (s.as_str(), t.as_str(), pf, pb))
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (s, t, pf, pb) in self.iter() {
            writeln!(w, "{s}\t{t}\t{pf}\t{pb}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R, label: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(label, e))?;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let bad = |m: &str| Error::parse(label, i + 1, m);
            if f.len() != 4 {
                return Err(bad("expected four tab-separated fields"));
            }
            let seg_ok = |s: &str| s.bytes().all(|b| b.is_ascii_lowercase());
            if !seg_ok(f[0]) || !seg_ok(f[1]) || f[0].is_empty() {
                return Err(bad("segments must be lowercase letters"));
            }
            let prob = |s: &str| -> Result<f64> {
                match s.parse::<f64>() {
                    Ok(p) if p > 0.0 && p <= 1.0 => Ok(p),
                    _ => Err(bad("probability outside (0, 1]")),
                }
            };
            entries.push(((f[0].to_string(), f[1].to_string()), (prob(f[2])?, prob(f[3])?)));
        }
        Ok(Self::from_entries(entries))
    }
}

/// All consistent blocks of one aligned pair, as `(f_range, e_range)` half-open spans.
pub fn consistent_blocks(alignment: &AlignmentMatrix, max_len: usize) -> Vec<((usize, usize), (usize, usize))> {
    let (n, m) = (alignment.source_len, alignment.target_len);
    let mut tgt_aligned = vec![false; m];
    for &(_, j) in &alignment.links {
        tgt_aligned[j] = true;
    }
    let mut out = Vec::new();
    for s0 in 0..n {
        for s1 in s0..n.min(s0 + max_len) {
            let mut lo = usize::MAX;
            let mut hi = 0;
            for &(i, j) in &alignment.links {
                if (s0..=s1).contains(&i) {
                    lo = lo.min(j);
                    hi = hi.max(j);
                }
            }
            if lo == usize::MAX || hi - lo + 1 > max_len {
                continue;
            }
            let consistent = alignment
                .links
                .iter()
                .all(|&(i, j)| !(lo..=hi).contains(&j) || (s0..=s1).contains(&i));
            if !consistent {
                continue;
            }
            let mut t0 = lo;
            loop {
                let mut t1 = hi;
                loop {
                    if t1 + 1 - t0 <= max_len {
                        out.push(((s0, s1 + 1), (t0, t1 + 1)));
                    }
                    t1 += 1;
                    if t1 >= m || tgt_aligned[t1] || t1 + 1 - t0 > max_len {
                        break;
                    }
                }
                if t0 == 0 || tgt_aligned[t0 - 1] || hi + 1 - (t0 - 1) > max_len {
                    break;
                }
                t0 -= 1;
            }
        }
    }
    out
}

/// Relative-frequency segment table from weighted, aligned pairs.
pub fn extract_segments(aligned: &[(Name, Name, f64, AlignmentMatrix)], max_len: usize) -> SegmentTable {
    let mut joint: BTreeMap<(String, String), f64> = BTreeMap::new();
    for (f, e, w, a) in aligned {
        let (fs, es) = (f.as_str(), e.as_str());
        for ((s0, s1), (t0, t1)) in consistent_blocks(a, max_len) {
            *joint.entry((fs[s0..s1].to_string(), es[t0..t1].to_string())).or_insert(0.0) += w;
        }
    }
    let mut src_total: HashMap<&str, f64> = HashMap::new();
    let mut tgt_total: HashMap<&str, f64> = HashMap::new();
    for ((s, t), &c) in &joint {
        *src_total.entry(s).or_insert(0.0) += c;
        *tgt_total.entry(t).or_insert(0.0) += c;
    }
    let entries: Vec<_> = joint
        .iter()
        .filter(|(_, &c)| c > 0.0)
        .map(|((s, t), &c)| ((s.clone(), t.clone()), (c / src_total[s.as_str()], c / tgt_total[t.as_str()])))
        .collect();
    SegmentTable::from_entries(entries)
}

#[derive(Clone, Debug)]
pub struct SegmentConfig {
    pub em: EmConfig,
    pub max_len: usize,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            em: EmConfig::default(),
            max_len: 3,
        }
    }
}

/// Both alignment directions, symmetrization and extraction in one pass.
pub fn train_segments(pairs: &[(Name, Name, f64)], config: &SegmentConfig) -> Result<SegmentTable> {
    let forward = train_em(pairs, &config.em)?.table;
    let swapped: Vec<(Name, Name, f64)> = pairs.iter().map(|(s, t, w)| (t.clone(), s.clone(), *w)).collect();
    let backward = train_em(&swapped, &config.em)?.table;
    let aligned: Vec<(Name, Name, f64, AlignmentMatrix)> = pairs
        .par_iter()
        .map(|(s, t, w)| {
            let fwd = viterbi_align(&forward, s, t);
            let bwd = viterbi_align(&backward, t, s).transposed();
            (s.clone(), t.clone(), *w, symmetrize(&fwd, &bwd))
        })
        .collect();
    Ok(extract_segments(&aligned, config.max_len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    fn links(v: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        v.iter().copied().collect()
    }

    #[test]
    fn identity_corpus_converges() {
        let pairs = vec![(n("ab"), n("ab"), 5.0)];
        let t = train_model1(&pairs, 20).unwrap();
        assert!(t.prob('a', Some('a')) > 0.99);
        assert!(t.prob('b', Some('b')) > 0.99);
    }

    #[test]
    fn second_pair_disambiguates() {
        let pairs = vec![(n("bc"), n("xy"), 1.0), (n("b"), n("x"), 1.0)];
        let t = train_model1(&pairs, 5).unwrap();
        assert!(t.prob('x', Some('b')) > 0.99);
        assert!(t.prob('y', Some('c')) > 0.99);
    }

    #[test]
    fn uniform_prior_is_classical_model1() {
        // Classical Model 1 also prefers the right pairing, only more slowly.
        let pairs = vec![(n("bc"), n("xy"), 1.0), (n("b"), n("x"), 1.0)];
        let config = EmConfig {
            iterations: 5,
            min_gain_per_pair: None,
            prior: Prior::Uniform,
        };
        let run = train_em(&pairs, &config).unwrap();
        let p = run.table.prob('x', Some('b'));
        assert!(p > 0.8 && p < 0.99, "{p}");
    }

    #[test]
    fn rows_normalize() {
        let pairs = vec![(n("shepard"), n("shephard"), 2.0), (n("smith"), n("smyth"), 1.0)];
        let t = train_model1(&pairs, 4).unwrap();
        for s in t.row_sums() {
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn viterbi_examples() {
        let id = TranslationTable::identity(Prior::default());
        assert_eq!(viterbi_align(&id, &n("abc"), &n("abc")).links, links(&[(0, 0), (1, 1), (2, 2)]));
        let mut t = TranslationTable::uniform(Prior::default());
        t.set_row(Some('b'), &[('x', 1.0)]);
        assert_eq!(viterbi_align(&t, &n("b"), &n("x")).links, links(&[(0, 0)]));
    }

    #[test]
    fn symmetrize_examples() {
        let a = AlignmentMatrix::new(3, 3, [(0, 0), (1, 2), (2, 1)]);
        assert_eq!(symmetrize(&a, &a), a);
        // Empty intersection: only the final-and step contributes.
        let f = AlignmentMatrix::new(2, 2, [(0, 1)]);
        let b = AlignmentMatrix::new(2, 2, [(1, 0)]);
        assert_eq!(symmetrize(&f, &b).links, links(&[(0, 1), (1, 0)]));
        // Grow reaches a diagonal neighbour whose column is still free.
        let f = AlignmentMatrix::new(2, 2, [(0, 0), (1, 1)]);
        let b = AlignmentMatrix::new(2, 2, [(0, 0), (1, 0)]);
        assert_eq!(symmetrize(&f, &b).links, links(&[(0, 0), (1, 0), (1, 1)]));
        // Final-and skips a point whose column is already taken.
        let f = AlignmentMatrix::new(3, 3, [(0, 0), (2, 0)]);
        let b = AlignmentMatrix::new(3, 3, [(0, 0)]);
        assert_eq!(symmetrize(&f, &b).links, links(&[(0, 0)]));
    }

    #[test]
    fn grow_follows_union_diagonally() {
        let f = AlignmentMatrix::new(3, 4, [(0, 0), (1, 1), (1, 2), (2, 3)]);
        let b = AlignmentMatrix::new(3, 4, [(0, 0), (1, 1), (2, 3)]);
        assert_eq!(symmetrize(&f, &b).links, f.links);
    }

    #[test]
    fn diagonal_pair_segments() {
        let aligned = vec![(n("ab"), n("ab"), 1.0, AlignmentMatrix::diagonal(2))];
        let table = extract_segments(&aligned, 2);
        let got: Vec<_> = table.iter().map(|(s, t, pf, pb)| (s.to_string(), t.to_string(), pf, pb)).collect();
        assert_eq!(
            got,
            vec![
                ("a".into(), "a".into(), 1.0, 1.0),
                ("ab".into(), "ab".into(), 1.0, 1.0),
                ("b".into(), "b".into(), 1.0, 1.0)
            ]
        );
    }

    #[test]
    fn unaligned_target_only_inside_blocks() {
        // "tog" -> "thog" with 'h' unaligned.
        let a = AlignmentMatrix::new(3, 4, [(0, 0), (1, 2), (2, 3)]);
        let mut blocks = consistent_blocks(&a, 3);
        blocks.sort();
        let expected = vec![
            ((0, 1), (0, 1)),
            ((0, 1), (0, 2)),
            ((0, 2), (0, 3)),
            ((1, 2), (1, 3)),
            ((1, 2), (2, 3)),
            ((1, 3), (1, 4)),
            ((1, 3), (2, 4)),
            ((2, 3), (3, 4)),
        ];
        assert_eq!(blocks, expected);
        // 'h' never forms a segment alone.
        assert!(blocks.iter().all(|&(_, (t0, t1))| (t0, t1) != (1, 2)));
    }

    #[test]
    fn segment_file_round_trip() {
        let aligned = vec![(n("tog"), n("thog"), 2.0, AlignmentMatrix::new(3, 4, [(0, 0), (1, 2), (2, 3)]))];
        let table = extract_segments(&aligned, 3);
        let mut buf = Vec::new();
        table.write(&mut buf).unwrap();
        let back = SegmentTable::read(buf.as_slice(), "mem").unwrap();
        assert_eq!(back, table);
    }

    fn brute_blocks(a: &AlignmentMatrix, l: usize) -> BTreeSet<((usize, usize), (usize, usize))> {
        let mut out = BTreeSet::new();
        for s0 in 0..a.source_len {
            for s1 in s0 + 1..=a.source_len.min(s0 + l) {
                for t0 in 0..a.target_len {
                    for t1 in t0 + 1..=a.target_len.min(t0 + l) {
                        let inside = a.links.iter().filter(|&&(i, j)| (s0..s1).contains(&i) && (t0..t1).contains(&j)).count();
                        let crossing = a.links.iter().any(|&(i, j)| (s0..s1).contains(&i) != (t0..t1).contains(&j));
                        if inside > 0 && !crossing {
                            out.insert(((s0, s1), (t0, t1)));
                        }
                    }
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn em_likelihood_non_decreasing(
            pairs in proptest::collection::vec(("[a-f]{1,6}", "[a-f]{1,6}", 1u32..4), 1..12),
            uniform in any::<bool>(),
        ) {
            let pairs: Vec<(Name, Name, f64)> = pairs.into_iter().map(|(s, t, w)| (n(&s), n(&t), w as f64)).collect();
            let config = EmConfig {
                iterations: 10,
                min_gain_per_pair: None,
                prior: if uniform { Prior::Uniform } else { Prior::default() },
            };
            let run = train_em(&pairs, &config).unwrap();
            for w in run.log_likelihoods.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-9, "{:?}", run.log_likelihoods);
            }
            for s in run.table.row_sums() {
                prop_assert!((s - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn symmetrize_within_union(
            f in proptest::collection::btree_set((0usize..4, 0usize..4), 0..8),
            b in proptest::collection::btree_set((0usize..4, 0usize..4), 0..8),
        ) {
            let fa = AlignmentMatrix::new(4, 4, f);
            let ba = AlignmentMatrix::new(4, 4, b);
            let out = symmetrize(&fa, &ba);
            prop_assert!(out.links.iter().all(|p| fa.links.contains(p) || ba.links.contains(p)));
            prop_assert_eq!(symmetrize(&fa, &fa), fa.clone());
        }

        #[test]
        fn blocks_match_brute_force(
            len in 1usize..=4,
            raw in proptest::collection::btree_set((0usize..4, 0usize..4), 0..8),
            l in 1usize..=4,
        ) {
            let a = AlignmentMatrix::new(len, len, raw.into_iter().filter(|&(i, j)| i < len && j < len));
            let got: BTreeSet<_> = consistent_blocks(&a, l).into_iter().collect();
            prop_assert_eq!(got, brute_blocks(&a, l));
        }

        #[test]
        fn diagonal_blocks_are_aligned_sub_blocks(len in 1usize..=4, l in 1usize..=4) {
            let a = AlignmentMatrix::diagonal(len);
            let got: BTreeSet<_> = consistent_blocks(&a, l).into_iter().collect();
            let want: BTreeSet<_> = (0..len)
                .flat_map(|s| (s + 1..=len.min(s + l)).map(move |e| ((s, e), (s, e))))
                .collect();
            prop_assert_eq!(got, want);
        }
    }
}
