//! Character n-gram name model.
//!
//! A name `c1..cm` is scored as the sequence `<s> c1 .. cm </s>` with one begin
//! and one end symbol; contexts near the start are simply shorter. Smoothing is
//! interpolated modified Kneser-Ney per order, with Witten-Bell used for any
//! order whose count-of-counts cannot support the discount estimates.
//!
//! The trained model is held in backoff form: every observed n-gram keeps its
//! interpolated log10 probability and the log10 backoff weight it has as a
//! context. An unobserved `(h, w)` costs `backoff(h) + logp(w | h')`. This is
//! exactly the interpolated distribution, and it is also the text format written
//! by [`CharLanguageModel::write_arpa`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::corpus::Name;
use crate::error::{Error, Result};

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 6;

/// Symbols: `0..26` letters, then end, unknown and begin.
pub type Sym = u8;
pub const EOS: Sym = 26;
pub const UNK: Sym = 27;
pub const BOS: Sym = 28;
/// Symbols that can follow a context.
const PREDICTED: Sym = 28;
/// Unigram floor reserved for the unknown symbol.
pub const UNK_PROB: f64 = 1e-7;
const LOG10_ZERO: f64 = -99.0;

pub fn symbol_of(c: char) -> Sym {
    if c.is_ascii_lowercase() {
        c as u8 - b'a'
    } else {
        UNK
    }
}

fn symbol_text(s: Sym) -> &'static str {
    const LETTERS: [&str; 26] = [
        "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o", "p", "q",
        "r", "s", "t", "u", "v", "w", "x", "y", "z",
    ];
    match s {
        EOS => "</s>",
        UNK => "<unk>",
        BOS => "<s>",
        _ => LETTERS[s as usize],
    }
}

fn parse_symbol(t: &str) -> Option<Sym> {
    match t {
        "</s>" => Some(EOS),
        "<unk>" => Some(UNK),
        "<s>" => Some(BOS),
        _ => {
            let mut cs = t.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => Some(c as u8 - b'a'),
                _ => None,
            }
        }
    }
}

/// `<s> c1 .. cm </s>`.
fn wrap(name: &str) -> Vec<Sym> {
    let mut seq = Vec::with_capacity(name.len() + 2);
    seq.push(BOS);
    seq.extend(name.chars().map(symbol_of));
    seq.push(EOS);
    seq
}

/// Up to six symbols packed five bits apiece, length in the top bits.
type Key = u64;

fn key(syms: &[Sym]) -> Key {
    debug_assert!(syms.len() <= MAX_ORDER);
    let mut k = (syms.len() as u64) << 40;
    for (i, &s) in syms.iter().enumerate() {
        k |= (s as u64) << (5 * i);
    }
    k
}

fn unkey(k: Key) -> Vec<Sym> {
    let len = (k >> 40) as usize;
    (0..len).map(|i| ((k >> (5 * i)) & 31) as Sym).collect()
}

fn key_len(k: Key) -> usize {
    (k >> 40) as usize
}

/// Drops the first symbol.
fn key_tail(k: Key) -> Key {
    let len = key_len(k);
    debug_assert!(len >= 1);
    (((k & ((1 << 40) - 1)) >> 5) & ((1u64 << (5 * (len - 1))) - 1)) | (((len - 1) as u64) << 40)
}

/// Appends `s`, dropping the first symbol when the result would exceed `max_len`.
fn key_push(k: Key, s: Sym, max_len: usize) -> Key {
    let len = key_len(k);
    let body = k & ((1 << 40) - 1);
    let grown = body | ((s as u64) << (5 * len)) | (((len + 1) as u64) << 40);
    if len + 1 > max_len {
        key_tail(grown)
    } else {
        grown
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Weighting {
    /// Each distinct name counts once.
    #[default]
    Forms,
    /// Each name counts as often as it is supplied (or by its frequency).
    Frequency,
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forms" => Ok(Weighting::Forms),
            "frequency" => Ok(Weighting::Frequency),
            _ => Err(Error::InvalidArgument(format!("unknown weighting {s:?}"))),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Forms => "forms",
            Weighting::Frequency => "frequency",
        })
    }
}

pub fn check_order(order: usize) -> Result<()> {
    if (MIN_ORDER..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(Error::OrderRange(order))
    }
}

/// Raw n-gram counts of orders `1..=order` over boundary-wrapped names.
#[derive(Clone, Debug)]
pub struct NgramCounts {
    order: usize,
    counts: Vec<HashMap<Key, u64>>,
}

impl NgramCounts {
    pub fn new<'a, I>(weighted_names: I, order: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        check_order(order)?;
        let mut counts = vec![HashMap::new(); order];
        for (name, weight) in weighted_names {
            if weight == 0 {
                continue;
            }
            let seq = wrap(name);
            for end in 1..seq.len() {
                for k in 1..=order.min(end + 1) {
                    *counts[k - 1].entry(key(&seq[end + 1 - k..=end])).or_insert(0) += weight;
                }
            }
        }
        if counts[order - 1].is_empty() {
            return Err(Error::OrderTooLargeForData { order });
        }
        Ok(NgramCounts { order, counts })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Raw count of a symbol sequence of length `1..=order`.
    pub fn count(&self, ngram: &[Sym]) -> u64 {
        match ngram.len() {
            0 => 0,
            n if n > self.order => 0,
            n => self.counts[n - 1].get(&key(ngram)).copied().unwrap_or(0),
        }
    }

    /// Unsmoothed relative frequency of `next` after `context`, or `None` when the
    /// context was never followed by anything.
    pub fn mle(&self, context: &[Sym], next: Sym) -> Option<f64> {
        let k = context.len() + 1;
        if k > self.order {
            return None;
        }
        let ctx = key(context);
        let total: u64 = self.counts[k - 1]
            .iter()
            .filter(|(g, _)| key_tail_inv(**g) == ctx)
            .map(|(_, c)| c)
            .sum();
        if total == 0 {
            return None;
        }
        let mut g = context.to_vec();
        g.push(next);
        Some(self.count(&g) as f64 / total as f64)
    }

    /// Unsmoothed natural-log score of a name, using the longest available context.
    pub fn mle_score(&self, name: &str) -> f64 {
        let seq = wrap(name);
        (1..seq.len())
            .map(|i| {
                let lo = (i + 1).saturating_sub(self.order);
                self.mle(&seq[lo..i], seq[i]).map_or(f64::NEG_INFINITY, f64::ln)
            })
            .sum()
    }
}

/// Drops the last symbol.
fn key_tail_inv(k: Key) -> Key {
    let len = key_len(k);
    let body = k & ((1u64 << (5 * (len - 1))) - 1);
    body | (((len - 1) as u64) << 40)
}

/// Discounts for counts 1, 2 and 3+.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Smoothing {
    KneserNey([f64; 3]),
    WittenBell,
}

fn estimate_discounts<'a>(counts: impl Iterator<Item = &'a u64>) -> Smoothing {
    let mut n = [0u64; 5];
    for &c in counts {
        if (1..=4).contains(&c) {
            n[c as usize] += 1;
        }
    }
    if n[1..].contains(&0) {
        return Smoothing::WittenBell;
    }
    let [_, n1, n2, n3, n4] = n.map(|x| x as f64);
    let y = n1 / (n1 + 2.0 * n2);
    let mut d = [1.0 - 2.0 * y * n2 / n1, 2.0 - 3.0 * y * n3 / n2, 3.0 - 4.0 * y * n4 / n3];
    if !d.iter().enumerate().all(|(i, &x)| x > 0.0 && x <= (i + 1) as f64) {
        return Smoothing::WittenBell;
    }
    // D(c) / c must not grow with c, otherwise one more occurrence of an n-gram can
    // lower its own probability.
    d[1] = d[1].min(2.0 * d[0]);
    d[2] = d[2].min(1.5 * d[1]);
    Smoothing::KneserNey(d)
}

/// Counts driving each order: raw at the top order and for n-grams that start
/// with <s>, distinct left extensions otherwise.
fn used_counts(counts: &NgramCounts) -> Vec<HashMap<Key, u64>> {
    let order = counts.order;
    let mut used: Vec<HashMap<Key, u64>> = Vec::with_capacity(order);
    for k in 1..=order {
        let mut m: HashMap<Key, u64> = HashMap::new();
        if k == order {
            m = counts.counts[k - 1].clone();
        } else {
            for (&g, &c) in &counts.counts[k - 1] {
                if unkey(g)[0] == BOS {
                    m.insert(g, c);
                }
            }
            for &g in counts.counts[k].keys() {
                let tail = key_tail(g);
                if unkey(tail)[0] != BOS {
                    *m.entry(tail).or_insert(0) += 1;
                }
            }
        }
        used.push(m);
    }
    used
}

/// Per-context sufficient statistics.
#[derive(Default, Clone, Copy)]
struct ContextStats {
    total: u64,
    n: [u64; 3],
}

/// Trained, smoothed character model. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct CharLanguageModel {
    order: usize,
    /// log10 p and log10 backoff for each stored n-gram.
    entries: HashMap<Key, (f64, f64)>,
}

/// Scoring state: the longest suffix of the history that the model stores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LmState(Key);

impl CharLanguageModel {
    /// Trains on names; under `Frequency` weighting repeated names count repeatedly.
    pub fn train(names: &[Name], order: usize, weighting: Weighting) -> Result<Self> {
        let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
        for n in names {
            *freq.entry(n.as_str()).or_insert(0) += 1;
        }
        Self::train_weighted(freq, order, weighting)
    }

    /// Trains on `(name, frequency)`; `Forms` weighting ignores the frequency.
    pub fn train_weighted<'a, I>(names: I, order: usize, weighting: Weighting) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let weighted = names.into_iter().map(|(n, c)| match weighting {
            Weighting::Forms => (n, c.min(1)),
            Weighting::Frequency => (n, c),
        });
        let mut seen = HashSet::new();
        let deduped: Vec<(&str, u64)> = match weighting {
            Weighting::Forms => weighted.filter(|(n, _)| seen.insert(*n)).collect(),
            Weighting::Frequency => weighted.collect(),
        };
        // Discounts come from the distinct forms, so repeating a name shifts counts
        // but never the discounts.
        let forms: Vec<(&str, u64)> = deduped.iter().map(|&(n, c)| (n, c.min(1))).collect();
        let form_counts = NgramCounts::new(forms, order)?;
        match weighting {
            Weighting::Forms => Ok(Self::from_counts(&form_counts)),
            Weighting::Frequency => Ok(Self::from_counts_with(&NgramCounts::new(deduped, order)?, &form_counts)),
        }
    }

    /// Applies interpolated smoothing to raw counts, estimating discounts from the same counts.
    pub fn from_counts(counts: &NgramCounts) -> Self {
        Self::from_counts_with(counts, counts)
    }

    fn from_counts_with(counts: &NgramCounts, discount_source: &NgramCounts) -> Self {
        let order = counts.order;
        let used = used_counts(counts);
        let dused = used_counts(discount_source);

        let mut model = CharLanguageModel {
            order,
            entries: HashMap::new(),
        };

        for k in 1..=order {
            let level = &used[k - 1];
            let smoothing = estimate_discounts(dused[k - 1].values());
            let mut stats: HashMap<Key, ContextStats> = HashMap::new();
            for (&g, &c) in level {
                let st = stats.entry(key_tail_inv(g)).or_default();
                st.total += c;
                st.n[(c.min(3) - 1) as usize] += 1;
            }
            let weights = |st: &ContextStats, c: u64| -> (f64, f64) {
                // (discounted relative frequency, mass given to the lower order)
                let total = st.total as f64;
                match smoothing {
                    Smoothing::KneserNey(d) => {
                        let disc = if c == 0 { 0.0 } else { d[(c.min(3) - 1) as usize] };
                        let gamma = (d[0] * st.n[0] as f64
                            + d[1] * st.n[1] as f64
                            + d[2] * st.n[2] as f64)
                            / total;
                        (((c as f64) - disc).max(0.0) / total, gamma)
                    }
                    Smoothing::WittenBell => {
                        let types = (st.n[0] + st.n[1] + st.n[2]) as f64;
                        (c as f64 / (total + types), types / (total + types))
                    }
                }
            };

            if k == 1 {
                let st = stats[&key(&[])];
                let (_, gamma) = weights(&st, 0);
                for s in 0..PREDICTED {
                    let g = key(&[s]);
                    let p = if s == UNK {
                        UNK_PROB
                    } else {
                        let (rel, _) = weights(&st, level.get(&g).copied().unwrap_or(0));
                        (1.0 - UNK_PROB) * (rel + gamma / f64::from(PREDICTED - 1))
                    };
                    model.entries.insert(g, (p.log10(), 0.0));
                }
                model.entries.insert(key(&[BOS]), (LOG10_ZERO, 0.0));
            } else {
                // Backoff weights of this order's contexts first, so that lower-order
                // lookups below see complete lower levels.
                let mut fresh: Vec<(Key, f64)> = Vec::with_capacity(level.len());
                for (&g, &c) in level {
                    let ctx = key_tail_inv(g);
                    let st = &stats[&ctx];
                    let (rel, gamma) = weights(st, c);
                    let lower = model.log10_prob_key(key_tail(ctx), unkey(g)[k - 1]);
                    let p = rel + gamma * 10f64.powf(lower);
                    fresh.push((g, p.log10()));
                }
                for (&ctx, st) in &stats {
                    let (_, gamma) = weights(st, 0);
                    model
                        .entries
                        .get_mut(&ctx)
                        .expect("every context is itself a stored n-gram")
                        .1 = gamma.log10();
                }
                for (g, lp) in fresh {
                    model.entries.insert(g, (lp, 0.0));
                }
            }
        }
        model
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored n-grams of each order, lowest first.
    pub fn ngram_counts(&self) -> Vec<usize> {
        let mut n = vec![0; self.order];
        for &k in self.entries.keys() {
            n[key_len(k) - 1] += 1;
        }
        n
    }

    /// log10 P(next | ctx) where `ctx` has at most `order - 1` symbols.
    fn log10_prob_key(&self, ctx: Key, next: Sym) -> f64 {
        let mut ctx = ctx;
        let mut acc = 0.0;
        loop {
            let g = key_push(ctx, next, MAX_ORDER + 1);
            if let Some(&(lp, _)) = self.entries.get(&g) {
                return acc + lp;
            }
            if let Some(&(_, bo)) = self.entries.get(&ctx) {
                acc += bo;
            }
            if key_len(ctx) == 0 {
                // Unigrams cover every predicted symbol.
                unreachable!("symbol {next} missing from the unigram level");
            }
            ctx = key_tail(ctx);
        }
    }

    /// Natural-log P(next | context); the context is cut to its last `order - 1` symbols.
    pub fn log_prob(&self, context: &[Sym], next: Sym) -> f64 {
        let lo = context.len().saturating_sub(self.order - 1);
        self.log10_prob_key(key(&context[lo..]), next) * std::f64::consts::LN_10
    }

    pub fn prob(&self, context: &[Sym], next: Sym) -> f64 {
        self.log_prob(context, next).exp()
    }

    /// Every symbol that can be predicted, unknown included.
    pub fn predicted_symbols() -> impl Iterator<Item = Sym> {
        0..PREDICTED
    }

    /// Every stored history the model conditions on, as symbol sequences.
    pub fn contexts(&self) -> Vec<Vec<Sym>> {
        let mut out: Vec<Vec<Sym>> = self
            .entries
            .keys()
            .filter(|&&k| key_len(k) < self.order)
            .map(|&k| unkey(k))
            .filter(|s| !s.contains(&EOS) && !s.contains(&UNK))
            .collect();
        out.push(Vec::new());
        out.sort();
        out
    }

    pub fn begin(&self) -> LmState {
        LmState(key(&[BOS]))
    }

    /// Consumes one symbol: returns the next state and the natural-log probability.
    pub fn advance(&self, state: LmState, next: Sym) -> (LmState, f64) {
        let lp = self.log10_prob_key(state.0, next) * std::f64::consts::LN_10;
        let mut k = key_push(state.0, next, self.order - 1);
        while key_len(k) > 0 && !self.entries.contains_key(&k) {
            k = key_tail(k);
        }
        (LmState(k), lp)
    }

    /// Natural-log probability of ending here.
    pub fn finish(&self, state: LmState) -> f64 {
        self.log10_prob_key(state.0, EOS) * std::f64::consts::LN_10
    }

    /// Natural-log probability of `<s> name </s>`.
    pub fn score(&self, name: &Name) -> f64 {
        self.score_text(name.as_str())
    }

    /// Like [`score`](Self::score); characters outside `a`-`z` score as the unknown symbol.
    pub fn score_text(&self, text: &str) -> f64 {
        let mut state = self.begin();
        let mut total = 0.0;
        for c in text.chars() {
            let (next, lp) = self.advance(state, symbol_of(c));
            state = next;
            total += lp;
        }
        total + self.finish(state)
    }

    pub fn write_arpa<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let counts = self.ngram_counts();
        writeln!(w, "\\data\\")?;
        for (i, n) in counts.iter().enumerate() {
            writeln!(w, "ngram {}={}", i + 1, n)?;
        }
        let mut grams: Vec<(Vec<Sym>, (f64, f64))> =
            self.entries.iter().map(|(&k, &v)| (unkey(k), v)).collect();
        grams.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        let mut current = 0;
        for (g, (lp, bo)) in grams {
            if g.len() != current {
                current = g.len();
                writeln!(w, "\n\\{current}-grams:")?;
            }
            let text: Vec<&str> = g.iter().map(|&s| symbol_text(s)).collect();
            writeln!(w, "{lp}\t{}\t{bo}", text.join(" "))?;
        }
        writeln!(w, "\n\\end\\")
    }

    pub fn to_arpa_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_arpa(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read_arpa<R: BufRead>(reader: R, label: &str) -> Result<Self> {
        let mut declared: Vec<usize> = Vec::new();
        let mut entries = HashMap::new();
        let mut section: Option<usize> = None;
        let mut ended = false;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::io(label, e))?;
            let line = line.trim_end();
            if line.is_empty() || line == "\\data\\" {
                continue;
            }
            if line == "\\end\\" {
                ended = true;
                break;
            }
            if let Some(rest) = line.strip_prefix("ngram ") {
                let (k, n) = rest
                    .split_once('=')
                    .and_then(|(k, n)| Some((k.parse::<usize>().ok()?, n.parse::<usize>().ok()?)))
                    .ok_or_else(|| Error::parse(label, lineno, "bad ngram count line"))?;
                if k != declared.len() + 1 {
                    return Err(Error::parse(label, lineno, "ngram counts out of order"));
                }
                declared.push(n);
                continue;
            }
            if let Some(k) = line
                .strip_prefix('\\')
                .and_then(|r| r.strip_suffix("-grams:"))
            {
                let k = k
                    .parse::<usize>()
                    .map_err(|_| Error::parse(label, lineno, "bad section header"))?;
                section = Some(k);
                continue;
            }
            let k = section.ok_or_else(|| Error::parse(label, lineno, "entry outside a section"))?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(label, lineno, "expected logprob, ngram and backoff"));
            }
            let lp: f64 = fields[0]
                .parse()
                .map_err(|_| Error::parse(label, lineno, "bad log probability"))?;
            let bo: f64 = fields[2]
                .parse()
                .map_err(|_| Error::parse(label, lineno, "bad backoff"))?;
            let syms: Option<Vec<Sym>> = fields[1].split(' ').map(parse_symbol).collect();
            let syms = syms.ok_or_else(|| Error::parse(label, lineno, "unknown symbol"))?;
            if syms.len() != k {
                return Err(Error::parse(label, lineno, "n-gram length does not match section"));
            }
            entries.insert(key(&syms), (lp, bo));
        }
        if !ended {
            return Err(Error::parse(label, 0, "missing \\end\\ marker"));
        }
        let order = declared.len();
        check_order(order).map_err(|_| Error::parse(label, 0, format!("unsupported order {order}")))?;
        let model = CharLanguageModel { order, entries };
        if model.ngram_counts() != declared {
            return Err(Error::parse(label, 0, "entry counts do not match the header"));
        }
        if (0..PREDICTED).any(|s| !model.entries.contains_key(&key(&[s]))) {
            return Err(Error::parse(label, 0, "unigram level is incomplete"));
        }
        Ok(model)
    }
}

/// Convenience wrapper over [`CharLanguageModel::train`].
pub fn train_lm(names: &[Name], order: usize, weighting: Weighting) -> Result<CharLanguageModel> {
    CharLanguageModel::train(names, order, weighting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<Name> {
        v.iter().map(|s| Name::new(*s).unwrap()).collect()
    }

    fn syms(s: &str) -> Vec<Sym> {
        s.chars().map(symbol_of).collect()
    }

    fn assert_normalized(m: &CharLanguageModel) {
        for ctx in m.contexts() {
            let total: f64 = CharLanguageModel::predicted_symbols()
                .map(|s| m.prob(&ctx, s))
                .sum();
            assert!((total - 1.0).abs() < 1e-9, "context {ctx:?} sums to {total}");
        }
    }

    #[test]
    fn keys_pack_and_shift() {
        let k = key(&[1, 2, 3]);
        assert_eq!(unkey(k), vec![1, 2, 3]);
        assert_eq!(unkey(key_tail(k)), vec![2, 3]);
        assert_eq!(unkey(key_tail_inv(k)), vec![1, 2]);
        assert_eq!(unkey(key_push(k, 4, 3)), vec![2, 3, 4]);
        assert_eq!(unkey(key_push(k, 4, 6)), vec![1, 2, 3, 4]);
        assert_eq!(unkey(key_tail(key(&[BOS]))), Vec::<Sym>::new());
    }

    #[test]
    fn mle_single_name() {
        let c = NgramCounts::new([("ab", 1)], 2).unwrap();
        assert_eq!(c.mle(&[BOS], symbol_of('a')), Some(1.0));
        assert_eq!(c.mle(&syms("a"), symbol_of('b')), Some(1.0));
        assert_eq!(c.mle(&syms("b"), EOS), Some(1.0));
        assert_eq!(c.mle_score("ab"), 0.0);
    }

    #[test]
    fn mle_symmetric_pair() {
        let c = NgramCounts::new([("ab", 1), ("ac", 1)], 2).unwrap();
        assert_eq!(c.mle(&syms("a"), symbol_of('b')), Some(0.5));
        assert_eq!(c.mle(&syms("a"), symbol_of('c')), Some(0.5));
        assert_eq!(c.mle_score("ab"), 0.5f64.ln());
        assert_eq!(c.mle_score("ab"), c.mle_score("ac"));
    }

    #[test]
    fn order_too_large() {
        // "ab" wraps to 4 symbols.
        assert!(matches!(
            NgramCounts::new([("ab", 1)], 5),
            Err(Error::OrderTooLargeForData { order: 5 })
        ));
        assert!(NgramCounts::new([("ab", 1)], 4).is_ok());
        assert!(matches!(NgramCounts::new([("ab", 1)], 7), Err(Error::OrderRange(7))));
    }

    #[test]
    fn tiny_models_normalize() {
        for order in 2..=4 {
            let m = train_lm(&names(&["ab", "ac", "abc"]), order, Weighting::Forms).unwrap();
            assert_normalized(&m);
        }
    }

    #[test]
    fn smoothed_symmetry_and_positivity() {
        let m = train_lm(&names(&["ab", "ac"]), 2, Weighting::Forms).unwrap();
        assert!((m.score(&Name::new("ab").unwrap()) - m.score(&Name::new("ac").unwrap())).abs() < 1e-12);
        assert!(m.prob(&syms("a"), symbol_of('z')) > 0.0);
        assert!(m.prob(&syms("a"), symbol_of('b')) > m.prob(&syms("a"), symbol_of('z')));
        assert!((m.prob(&[], UNK) - UNK_PROB).abs() < 1e-18);
    }

    #[test]
    fn arpa_round_trip_is_exact() {
        let m = train_lm(
            &names(&["shepard", "shephard", "sheppard", "shepperd", "smith", "smyth"]),
            3,
            Weighting::Forms,
        )
        .unwrap();
        let text = m.to_arpa_string();
        let back = CharLanguageModel::read_arpa(text.as_bytes(), "mem").unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_arpa_string(), text);
    }

    #[test]
    fn state_minimization_preserves_scores() {
        let m = train_lm(&names(&["shepard", "smith", "jones"]), 4, Weighting::Forms).unwrap();
        for w in ["shepard", "zzq", "jonesmith", "s"] {
            let seq = wrap(w);
            let direct: f64 = (1..seq.len()).map(|i| m.log_prob(&seq[..i], seq[i])).sum();
            assert!((direct - m.score_text(w)).abs() < 1e-12, "{w}");
        }
    }

    #[test]
    fn discount_estimation_falls_back() {
        assert_eq!(estimate_discounts([1u64, 1, 2].iter()), Smoothing::WittenBell);
        // Raw estimates 1/3, 1, 5/3 are capped to 1/3, 2/3, 1.
        let Smoothing::KneserNey(d) = estimate_discounts([1u64, 2, 3, 4].iter()) else {
            panic!("expected Kneser-Ney");
        };
        for (x, want) in d.iter().zip([1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((x - want).abs() < 1e-12);
        }
        let counts: Vec<u64> = [vec![1; 10], vec![2; 5], vec![3; 3], vec![4; 2]].concat();
        assert!(matches!(estimate_discounts(counts.iter()), Smoothing::KneserNey(_)));
    }

    proptest! {
        #[test]
        fn random_models_normalize(
            words in proptest::collection::vec("[a-e]{1,6}", 1..20),
            order in 2usize..=5,
        ) {
            let ns: Vec<Name> = words.iter().map(|w| Name::new(w.clone()).unwrap()).collect();
            if let Ok(m) = train_lm(&ns, order, Weighting::Frequency) {
                for ctx in m.contexts() {
                    let total: f64 = CharLanguageModel::predicted_symbols().map(|s| m.prob(&ctx, s)).sum();
                    prop_assert!((total - 1.0).abs() < 1e-9);
                }
                for w in &ns {
                    prop_assert!(m.score(w) <= 0.0);
                }
            }
        }

        #[test]
        fn more_copies_never_lower_own_score(
            word in "[a-d]{1,5}",
            others in proptest::collection::vec("[a-d]{1,5}", 1..40),
            order in 2usize..5,
        ) {
            let mut ns: Vec<Name> = others.iter().map(|w| Name::new(w.clone()).unwrap()).collect();
            let target = Name::new(word).unwrap();
            ns.push(target.clone());
            let before = train_lm(&ns, order, Weighting::Frequency);
            ns.push(target.clone());
            let after = train_lm(&ns, order, Weighting::Frequency);
            if let (Ok(b), Ok(a)) = (before, after) {
                prop_assert!(a.score(&target) >= b.score(&target) - 1e-9);
            }
        }
    }
}
