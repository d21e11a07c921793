//! Monotone n-best decoding of a source name into candidate spellings.
//!
//! The source is covered left to right by segments from the table. Search runs
//! over a lattice whose nodes are `(covered prefix length, LM state)`; nodes at
//! each prefix length are pruned to the best `beam_width` by Viterbi score. The
//! n-best list is then read off the pruned lattice lazily, best derivation first,
//! and derivations that spell an already listed string are skipped. With no beam
//! limit the result is exact.
//!
//! Score of a derivation:
//! `tm_weight * sum(log p_seg) + lm_weight * ln P_lm(t </s>) + length_penalty * |t|`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::str::FromStr;

use crate::alignment::SegmentTable;
use crate::corpus::{with_ranks, Name, RankedCandidate};
use crate::error::{Error, Result};
use crate::langmodel::{symbol_of, CharLanguageModel, LmState};

/// Which segment probability feeds the channel term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Channel {
    /// `P(source segment | target segment)`, the noisy-channel direction.
    #[default]
    Backward,
    /// `P(target segment | source segment)`.
    Forward,
    /// Both log probabilities summed.
    Both,
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "backward" => Ok(Channel::Backward),
            "forward" => Ok(Channel::Forward),
            "both" => Ok(Channel::Both),
            _ => Err(Error::InvalidArgument(format!("unknown channel direction {s:?}"))),
        }
    }
}

impl Channel {
    pub fn id(self) -> &'static str {
        match self {
            Channel::Backward => "backward",
            Channel::Forward => "forward",
            Channel::Both => "both",
        }
    }

    pub fn log_prob(self, p_forward: f64, p_backward: f64) -> f64 {
        match self {
            Channel::Backward => p_backward.ln(),
            Channel::Forward => p_forward.ln(),
            Channel::Both => p_forward.ln() + p_backward.ln(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoderConfig {
    /// Nodes kept per prefix length; `None` keeps all.
    pub beam_width: Option<usize>,
    pub nbest: usize,
    pub lm_weight: f64,
    pub tm_weight: f64,
    pub length_penalty: f64,
    pub channel: Channel,
    /// Probability of the implicit `c -> c` segment for letters the table cannot copy;
    /// `None` disables it.
    pub identity_floor: Option<f64>,
    /// Upper bound on derivations read off the lattice; `None` reads until `nbest`
    /// distinct strings or exhaustion.
    pub max_derivations: Option<usize>,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            beam_width: Some(100),
            nbest: 1000,
            lm_weight: 1.0,
            tm_weight: 1.0,
            length_penalty: 0.0,
            channel: Channel::Backward,
            identity_floor: Some(1e-6),
            max_derivations: Some(50_000),
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.lm_weight, self.tm_weight, self.length_penalty]
            .iter()
            .all(|w| w.is_finite());
        if self.beam_width == Some(0) || self.nbest == 0 || !finite {
            return Err(Error::InvalidArgument(
                "beam width and nbest must be positive and weights finite".into(),
            ));
        }
        if let Some(p) = self.identity_floor {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidArgument("identity floor must lie in (0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// One way to rewrite `source[start..start + len]`.
#[derive(Clone, Debug)]
pub struct SegmentOption<'a> {
    pub len: usize,
    pub target: &'a str,
    /// Channel log probability before weighting.
    pub channel: f64,
}

/// Everything that can rewrite a prefix starting at `start`, implicit identity included.
pub fn segment_options<'a>(
    table: &'a SegmentTable,
    source: &'a str,
    start: usize,
    config: &DecoderConfig,
) -> Vec<SegmentOption<'a>> {
    let max_len = table.max_source_len().max(1);
    let mut out = Vec::new();
    for len in 1..=max_len.min(source.len() - start) {
        let piece = &source[start..start + len];
        for (t, pf, pb) in table.options(piece) {
            out.push(SegmentOption {
                len,
                target: t.as_str(),
                channel: config.channel.log_prob(*pf, *pb),
            });
        }
        if len == 1 {
            if let Some(floor) = config.identity_floor {
                if table.get(piece, piece).is_none() {
                    out.push(SegmentOption {
                        len,
                        target: piece,
                        channel: config.channel.log_prob(floor, floor),
                    });
                }
            }
        }
    }
    out
}

/// Weighted cost of emitting `target` from `state`; returns the new state too.
pub fn arc_score(
    lm: &CharLanguageModel,
    state: LmState,
    option: &SegmentOption,
    config: &DecoderConfig,
) -> (LmState, f64) {
    let mut state = state;
    let mut lm_total = 0.0;
    for c in option.target.chars() {
        let (next, lp) = lm.advance(state, symbol_of(c));
        state = next;
        lm_total += lp;
    }
    let w = config.tm_weight * option.channel
        + config.lm_weight * lm_total
        + config.length_penalty * option.target.len() as f64;
    (state, w)
}

struct Arc<'a> {
    from: usize,
    weight: f64,
    target: &'a str,
}

#[derive(Clone, Copy)]
struct Deriv {
    score: f64,
    arc: Option<usize>,
    /// Rank of the derivation used at the arc's tail.
    j: usize,
}

#[derive(Clone, Copy)]
struct Cand {
    score: f64,
    arc: usize,
    j: usize,
}

impl PartialEq for Cand {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cand {}

impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.arc.cmp(&self.arc))
            .then_with(|| other.j.cmp(&self.j))
    }
}

/// Pruned lattice plus lazily extended k-best lists per node.
struct Lattice<'a> {
    arcs: Vec<Arc<'a>>,
    incoming: Vec<Vec<usize>>,
    derivs: Vec<Vec<Deriv>>,
    cands: Vec<BinaryHeap<Cand>>,
    started: Vec<bool>,
}

impl<'a> Lattice<'a> {
    fn new() -> Self {
        Lattice {
            arcs: Vec::new(),
            incoming: Vec::new(),
            derivs: Vec::new(),
            cands: Vec::new(),
            started: Vec::new(),
        }
    }

    fn add_node(&mut self) -> usize {
        self.incoming.push(Vec::new());
        self.derivs.push(Vec::new());
        self.cands.push(BinaryHeap::new());
        self.started.push(false);
        self.incoming.len() - 1
    }

    fn add_arc(&mut self, from: usize, to: usize, weight: f64, target: &'a str) {
        self.arcs.push(Arc { from, weight, target });
        self.incoming[to].push(self.arcs.len() - 1);
    }

    /// Makes the `k`-th best derivation into `v` available; false when there is none.
    fn ensure(&mut self, v: usize, k: usize) -> bool {
        if k < self.derivs[v].len() {
            return true;
        }
        if !self.started[v] {
            self.started[v] = true;
            for ai in 0..self.incoming[v].len() {
                let e = self.incoming[v][ai];
                let u = self.arcs[e].from;
                if self.ensure(u, 0) {
                    let score = self.derivs[u][0].score + self.arcs[e].weight;
                    self.cands[v].push(Cand { score, arc: e, j: 0 });
                }
            }
        }
        while self.derivs[v].len() <= k {
            if let Some(last) = self.derivs[v].last().copied() {
                if let Some(e) = last.arc {
                    let u = self.arcs[e].from;
                    if self.ensure(u, last.j + 1) {
                        let score = self.derivs[u][last.j + 1].score + self.arcs[e].weight;
                        self.cands[v].push(Cand { score, arc: e, j: last.j + 1 });
                    }
                }
            }
            match self.cands[v].pop() {
                Some(c) => self.derivs[v].push(Deriv {
                    score: c.score,
                    arc: Some(c.arc),
                    j: c.j,
                }),
                None => return false,
            }
        }
        true
    }

    fn text(&self, v: usize, k: usize, out: &mut String) {
        let d = self.derivs[v][k];
        if let Some(e) = d.arc {
            self.text(self.arcs[e].from, d.j, out);
            out.push_str(self.arcs[e].target);
        }
    }
}

/// Decodes one source name into at most `config.nbest` distinct candidates,
/// sorted by score descending then spelling ascending.
pub fn decode(
    source: &Name,
    segments: &SegmentTable,
    lm: &CharLanguageModel,
    config: &DecoderConfig,
) -> Result<Vec<RankedCandidate>> {
    config.validate()?;
    let src = source.as_str();
    let n = src.len();
    let options: Vec<Vec<SegmentOption>> = (0..n).map(|p| segment_options(segments, src, p, config)).collect();
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for p in 0..n {
        if reach[p] {
            for o in &options[p] {
                reach[p + o.len] = true;
            }
        }
    }
    if !reach[n] {
        let p = (0..n).rev().find(|&p| reach[p]).unwrap_or(0);
        return Err(Error::NoDerivation {
            ch: src.as_bytes()[p] as char,
            position: p,
        });
    }

    let mut lat = Lattice::new();
    let start = lat.add_node();
    lat.derivs[start].push(Deriv {
        score: 0.0,
        arc: None,
        j: 0,
    });
    lat.started[start] = true;

    // Per prefix length: node ids keyed by LM state, with their Viterbi scores.
    let mut layers: Vec<HashMap<LmState, (usize, f64)>> = vec![HashMap::new(); n + 1];
    layers[0].insert(lm.begin(), (start, 0.0));
    let sink = lat.add_node();

    for pos in 0..=n {
        let mut nodes: Vec<(LmState, usize, f64)> = layers[pos].iter().map(|(s, &(v, b))| (*s, v, b)).collect();
        nodes.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
        if let Some(width) = config.beam_width {
            nodes.truncate(width);
        }
        for (state, v, best) in nodes {
            if pos == n {
                lat.add_arc(v, sink, config.lm_weight * lm.finish(state), "");
                continue;
            }
            for opt in &options[pos] {
                let (next, w) = arc_score(lm, state, opt, config);
                let to_pos = pos + opt.len;
                let entry = layers[to_pos].entry(next);
                let slot = match entry {
                    std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
                    std::collections::hash_map::Entry::Vacant(vac) => {
                        let id = lat.add_node();
                        vac.insert((id, f64::NEG_INFINITY))
                    }
                };
                slot.1 = slot.1.max(best + w);
                let to = slot.0;
                lat.add_arc(v, to, w, opt.target);
            }
        }
    }

    let mut seen: HashSet<String> = HashSet::new();
    let mut found: Vec<(Name, f64)> = Vec::new();
    let mut k = 0;
    while found.len() < config.nbest && config.max_derivations.is_none_or(|m| k < m) {
        if !lat.ensure(sink, k) {
            break;
        }
        let mut text = String::new();
        lat.text(sink, k, &mut text);
        let score = lat.derivs[sink][k].score;
        k += 1;
        if seen.insert(text.clone()) {
            if let Ok(name) = Name::new(text) {
                found.push((name, score));
            }
        }
    }
    found.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(with_ranks(found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langmodel::{train_lm, Weighting};

    fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    fn lm(names: &[&str]) -> CharLanguageModel {
        let ns: Vec<Name> = names.iter().map(|s| n(s)).collect();
        train_lm(&ns, 3, Weighting::Forms).unwrap()
    }

    #[test]
    fn identity_channel_returns_source() {
        let m = lm(&["clark", "clarke", "smith"]);
        let config = DecoderConfig {
            nbest: 1,
            ..DecoderConfig::default()
        };
        let out = decode(&n("clark"), &SegmentTable::identity(), &m, &config).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].candidate.as_str(), "clark");
        assert_eq!(out[0].rank, 1);
    }

    #[test]
    fn exhaustion_returns_everything() {
        let m = lm(&["ab", "ba"]);
        let table = SegmentTable::from_entries([
            (("a".into(), "a".into()), (0.5, 0.9)),
            (("a".into(), "e".into()), (0.5, 0.8)),
            (("b".into(), "b".into()), (1.0, 1.0)),
        ]);
        let config = DecoderConfig {
            beam_width: None,
            max_derivations: None,
            ..DecoderConfig::default()
        };
        let out = decode(&n("ab"), &table, &m, &config).unwrap();
        let mut got: Vec<&str> = out.iter().map(|c| c.candidate.as_str()).collect();
        got.sort();
        assert_eq!(got, vec!["ab", "eb"]);
        assert!(out.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn missing_coverage_without_floor() {
        let m = lm(&["ab"]);
        let table = SegmentTable::from_entries([(("a".into(), "a".into()), (1.0, 1.0))]);
        let config = DecoderConfig {
            identity_floor: None,
            ..DecoderConfig::default()
        };
        assert!(matches!(
            decode(&n("ab"), &table, &m, &config),
            Err(Error::NoDerivation { ch: 'b', position: 1 })
        ));
    }

    #[test]
    fn rejects_bad_config() {
        let m = lm(&["ab"]);
        let config = DecoderConfig {
            nbest: 0,
            ..DecoderConfig::default()
        };
        assert!(decode(&n("ab"), &SegmentTable::identity(), &m, &config).is_err());
    }
}
