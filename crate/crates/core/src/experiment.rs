//! k-fold comparison of candidate generators on one corpus and universe.
//!
//! Each method proposes a ranked list of universe names for every test source. The
//! source itself is never proposed. The machine-translation method trains its
//! segment table on the fold's training pairs and its name model on the universe.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::alignment::{train_segments, SegmentConfig, SegmentTable};
use crate::corpus::{split_folds, FrequencyUniverse, Name, NamePairRecord, RankedCandidate};
use crate::decoder::{decode, DecoderConfig};
use crate::error::{Error, Result};
use crate::eval::{compute_pr_curve, confidence_band, max_f1, ConfidenceBand, PRCurve, PRPoint};
use crate::langmodel::{CharLanguageModel, Weighting};
use crate::phonetic::PhoneticMethod;
use crate::ranking::{rank_similarity, PhoneticIndex, DEFAULT_CUTOFF, DEFAULT_GAMMA};
use crate::similarity::SimilarityMeasure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Noisy-channel decoding with a name model of this order.
    Mt(usize),
    Phonetic(PhoneticMethod),
    Similarity(SimilarityMeasure),
}

impl Method {
    /// Seven phonetic methods, three similarity measures, then one MT method per order.
    pub fn default_grid(mt_orders: &[usize]) -> Vec<Method> {
        PhoneticMethod::ALL
            .iter()
            .map(|&m| Method::Phonetic(m))
            .chain(SimilarityMeasure::ALL.iter().map(|&m| Method::Similarity(m)))
            .chain(mt_orders.iter().map(|&o| Method::Mt(o)))
            .collect()
    }

    /// Parses a comma-separated list; `all` expands to [`Method::default_grid`],
    /// `phonetic` and `similarity` to their families, and bare `mt` to every order.
    pub fn parse_list(spec: &str, mt_orders: &[usize]) -> Result<Vec<Method>> {
        let mut out: Vec<Method> = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "all" => out.extend(Method::default_grid(mt_orders)),
                "phonetic" => out.extend(PhoneticMethod::ALL.iter().map(|&m| Method::Phonetic(m))),
                "similarity" => out.extend(SimilarityMeasure::ALL.iter().map(|&m| Method::Similarity(m))),
                "mt" => out.extend(mt_orders.iter().map(|&o| Method::Mt(o))),
                other => out.push(other.parse()?),
            }
        }
        let mut seen = BTreeSet::new();
        out.retain(|m| seen.insert(*m));
        if out.is_empty() {
            return Err(Error::InvalidArgument("no methods selected".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Mt(order) => write!(f, "mt-{order}"),
            Method::Phonetic(m) => write!(f, "{m}"),
            Method::Similarity(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(order) = s.strip_prefix("mt-") {
            return order
                .parse()
                .map(Method::Mt)
                .map_err(|_| Error::InvalidArgument(format!("bad MT order in {s:?}")));
        }
        if let Ok(m) = s.parse() {
            return Ok(Method::Phonetic(m));
        }
        s.parse()
            .map(Method::Similarity)
            .map_err(|_| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub folds: usize,
    pub seed: u64,
    /// Curves cover positions `1..=max_position`.
    pub max_position: usize,
    pub gamma: f64,
    pub similarity_cutoff: usize,
    pub decoder: DecoderConfig,
    pub segments: SegmentConfig,
    pub lm_weighting: Weighting,
    /// Train segments on co-occurrence weights rather than one per pair.
    pub weight_by_cooccurrence: bool,
    pub confidence: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            folds: 10,
            seed: 7,
            max_position: DEFAULT_CUTOFF,
            gamma: DEFAULT_GAMMA,
            similarity_cutoff: DEFAULT_CUTOFF,
            decoder: DecoderConfig::default(),
            segments: SegmentConfig::default(),
            lm_weighting: Weighting::Forms,
            weight_by_cooccurrence: false,
            confidence: 0.95,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodResult {
    pub method: String,
    pub curves: Vec<PRCurve>,
    pub band: ConfidenceBand,
    /// Max-F1 of the centroid curve.
    pub centroid_max_f1: f64,
    pub mean_fold_max_f1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub results: Vec<MethodResult>,
}

impl ExperimentReport {
    pub fn get(&self, method: &str) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.method == method)
    }

    pub fn curves(&self) -> Vec<PRCurve> {
        self.results.iter().flat_map(|r| r.curves.iter().cloned()).collect()
    }

    pub fn bands(&self) -> Vec<ConfidenceBand> {
        self.results.iter().map(|r| r.band.clone()).collect()
    }
}

/// Max-F1 of the pointwise-mean curve of a band.
pub fn centroid_max_f1(band: &ConfidenceBand) -> f64 {
    band.centroid
        .iter()
        .enumerate()
        .map(|(i, &(precision, recall))| {
            PRPoint {
                position: i + 1,
                precision,
                recall,
            }
            .f1()
        })
        .fold(0.0, f64::max)
}

/// Name models keyed by order, trained on the universe.
pub fn train_name_models(
    universe: &FrequencyUniverse,
    orders: &[usize],
    weighting: Weighting,
) -> Result<BTreeMap<usize, CharLanguageModel>> {
    orders
        .par_iter()
        .map(|&o| {
            let names = universe.entries().iter().map(|(n, c)| (n.as_str(), *c));
            CharLanguageModel::train_weighted(names, o, weighting).map(|m| (o, m))
        })
        .collect()
}

pub fn segment_training_pairs(records: &[NamePairRecord], by_cooccurrence: bool) -> Vec<(Name, Name, f64)> {
    records
        .iter()
        .map(|r| {
            let w = if by_cooccurrence { r.cooccurrence as f64 } else { 1.0 };
            (r.source.clone(), r.target.clone(), w)
        })
        .collect()
}

/// Decoder output restricted to the universe, without the source.
pub fn mt_candidates(
    source: &Name,
    table: &SegmentTable,
    lm: &CharLanguageModel,
    decoder: &DecoderConfig,
    universe: &FrequencyUniverse,
) -> Vec<Name> {
    match decode(source, table, lm, decoder) {
        Ok(list) => list
            .into_iter()
            .map(|c: RankedCandidate| c.candidate)
            .filter(|c| c != source && universe.contains(c.as_str()))
            .collect(),
        // Letters the table cannot rewrite leave the source without candidates.
        Err(_) => Vec::new(),
    }
}

/// Runs every method on every fold. `lms` must hold each order the MT methods use.
pub fn run_experiment(
    corpus: &[NamePairRecord],
    universe: &FrequencyUniverse,
    methods: &[Method],
    lms: &BTreeMap<usize, CharLanguageModel>,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if config.folds < 2 {
        return Err(Error::InvalidArgument(format!(
            "a confidence band needs at least 2 folds, got {}",
            config.folds
        )));
    }
    config.decoder.validate()?;
    for m in methods {
        if let Method::Mt(order) = m {
            if !lms.contains_key(order) {
                return Err(Error::InvalidArgument(format!("no name model of order {order}")));
            }
        }
    }
    let folds = split_folds(corpus, config.folds, config.seed)?;
    let needs_mt = methods.iter().any(|m| matches!(m, Method::Mt(_)));
    let tables: Vec<Option<SegmentTable>> = folds
        .iter()
        .map(|f| {
            needs_mt
                .then(|| {
                    let pairs = segment_training_pairs(&f.train_pairs, config.weight_by_cooccurrence);
                    train_segments(&pairs, &config.segments)
                })
                .transpose()
        })
        .collect::<Result<_>>()?;
    let truths: Vec<BTreeMap<Name, BTreeSet<Name>>> = folds
        .iter()
        .map(|f| {
            let mut t: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
            for r in &f.test_pairs {
                t.entry(r.source.clone()).or_default().insert(r.target.clone());
            }
            t
        })
        .collect();

    let mut results = Vec::with_capacity(methods.len());
    for &method in methods {
        let index = match method {
            Method::Phonetic(m) => Some(PhoneticIndex::new(m, universe)),
            _ => None,
        };
        let mut curves = Vec::with_capacity(folds.len());
        for (fold, truth) in truths.iter().enumerate() {
            let sources: Vec<&Name> = truth.keys().collect();
            let lists: Vec<Vec<Name>> = sources
                .par_iter()
                .map(|&s| {
                    let mut list: Vec<Name> = match method {
                        Method::Phonetic(_) => names_of(index.as_ref().expect("built above").rank(s, universe)),
                        Method::Similarity(m) => {
                            names_of(rank_similarity(s, m, config.gamma, universe, config.similarity_cutoff + 1))
                        }
                        Method::Mt(order) => {
                            let table = tables[fold].as_ref().expect("trained when MT is requested");
                            mt_candidates(s, table, &lms[&order], &config.decoder, universe)
                        }
                    };
                    list.retain(|c| c != s);
                    list.truncate(config.max_position);
                    list
                })
                .collect();
            let predictions: BTreeMap<Name, Vec<Name>> = sources.into_iter().cloned().zip(lists).collect();
            curves.push(compute_pr_curve(
                &method.to_string(),
                fold,
                &predictions,
                truth,
                config.max_position,
            )?);
        }
        let band = confidence_band(&curves, config.confidence)?;
        let mean_fold_max_f1 = curves.iter().map(max_f1).sum::<f64>() / curves.len() as f64;
        log::info!("{method}: centroid max-F1 {:.4}", centroid_max_f1(&band));
        results.push(MethodResult {
            method: method.to_string(),
            centroid_max_f1: centroid_max_f1(&band),
            mean_fold_max_f1,
            curves,
            band,
        });
    }
    Ok(ExperimentReport { results })
}

fn names_of(list: Vec<RankedCandidate>) -> Vec<Name> {
    list.into_iter().map(|c| c.candidate).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_universe;

    fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    #[test]
    fn grid_shape_and_ids() {
        let grid = Method::default_grid(&[2, 5]);
        assert_eq!(grid.len(), 7 + 3 + 2);
        let ids: Vec<String> = grid.iter().map(|m| m.to_string()).collect();
        for id in &ids {
            assert_eq!(id.parse::<Method>().unwrap().to_string(), *id);
        }
        assert!(ids.contains(&"mt-5".to_string()));
        assert_eq!(Method::parse_list("nysiis,nysiis", &[5]).unwrap(), vec![Method::Phonetic(PhoneticMethod::Nysiis)]);
        assert_eq!(Method::parse_list("phonetic", &[5]).unwrap().len(), 7);
        assert!(Method::parse_list("bogus", &[5]).is_err());
    }

    #[test]
    fn tiny_experiment_runs() {
        let pairs = [
            ("shepard", "shephard"),
            ("shepard", "sheppard"),
            ("smith", "smyth"),
            ("smyth", "smith"),
            ("jonson", "johnson"),
            ("johnson", "jonson"),
            ("clark", "clarke"),
            ("clarke", "clark"),
        ];
        let corpus: Vec<NamePairRecord> = pairs.iter().map(|(s, t)| NamePairRecord::simple(n(s), n(t), 1)).collect();
        let universe = build_universe(
            ["shepard", "shephard", "sheppard", "smith", "smyth", "jonson", "johnson", "clark", "clarke", "jones"]
                .iter()
                .enumerate()
                .map(|(i, s)| (n(s), 100 - i as u64)),
            100,
        );
        let lms = train_name_models(&universe, &[2], Weighting::Forms).unwrap();
        let config = ExperimentConfig {
            folds: 2,
            max_position: 5,
            ..ExperimentConfig::default()
        };
        let methods = Method::parse_list("soundex,levenshtein,mt-2", &[2]).unwrap();
        let report = run_experiment(&corpus, &universe, &methods, &lms, &config).unwrap();
        assert_eq!(report.results.len(), 3);
        for r in &report.results {
            assert_eq!(r.curves.len(), 2);
            assert!((0.0..=1.0).contains(&r.centroid_max_f1));
        }
        let again = run_experiment(&corpus, &universe, &methods, &lms, &config).unwrap();
        assert_eq!(again.curves(), report.curves());
        let one_fold = ExperimentConfig { folds: 1, ..config };
        assert!(run_experiment(&corpus, &universe, &methods, &lms, &one_fold).is_err());
    }
}
