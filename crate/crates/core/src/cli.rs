//! Command-line surface: prepare, train, generate, evaluate, report, encode, sim, synth.
//!
//! Every file-producing stage writes its outputs atomically and then records a
//! [`RunManifest`] under its stage name in `<out>/manifest.json`. Errors surface as one
//! line, `error[CODE]: message`, with the exit code fixed by the code.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::alignment::{train_segments, SegmentConfig, SegmentTable};
use crate::corpus::{
    build_universe, read_corpus, read_names, read_universe, write_corpus, write_universe, Name, RankedCandidate,
};
use crate::dataprep::{
    aggregate_attachments, corpus_statistics, false_positive_sample, filter_cascade, pair_sessions,
    parse_attachments, parse_query_log, Prepared, SampleManifest, SessionConfig, DEFAULT_TOPK_RECORDS,
    DEFAULT_TOPK_SEARCH,
};
use crate::decoder::{decode, Channel, DecoderConfig};
use crate::error::Error;
use crate::eval::{confidence_band, max_f1, read_pr_csv, render_svg, write_band_csv, write_pr_csv, ConfidenceBand, PRCurve};
use crate::experiment::{centroid_max_f1, segment_training_pairs, train_name_models, ExperimentConfig, Method};
use crate::io::{file_digest, sha256_hex, write_atomic, write_with};
use crate::langmodel::{check_order, CharLanguageModel, Weighting};
use crate::phonetic::{encode, PhoneticMethod};
use crate::ranking::{rank_similarity, PhoneticIndex, DEFAULT_CUTOFF, DEFAULT_GAMMA};
use crate::similarity::{levenshtein_distance, SimilarityMeasure};
use crate::synthbench::{base_names, generate_corpus, NoiseChannel, SynthConfig};

const DEFAULT_UNIVERSE_SIZE: usize = 250_000;

/// One-line, machine-parseable failure.
#[derive(Debug, thiserror::Error)]
#[error("error[{code}]: {message}")]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    /// 2 for input problems, 3 for configuration, 4 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self.code {
            "E_INPUT_MISSING" | "E_INPUT_PARSE" | "E_INPUT_DEGENERATE" | "E_NO_MODEL" | "E_IO" => 2,
            "E_ORDER_RANGE" | "E_FOLDS" | "E_CONFIG" | "E_USAGE" => 3,
            _ => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => "E_INPUT_MISSING",
            Error::Io { .. } => "E_IO",
            Error::Parse { .. } | Error::EmptyAfterCleaning { .. } => "E_INPUT_PARSE",
            Error::OrderRange(_) | Error::OrderTooLargeForData { .. } => "E_ORDER_RANGE",
            Error::TooFewGroups { .. } => "E_FOLDS",
            Error::InvalidArgument(_) => "E_CONFIG",
            Error::EmptyTruth | Error::DegenerateInput(_) | Error::NoDerivation { .. } => "E_INPUT_DEGENERATE",
        };
        CliError::new(code, e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "namevar", version, about = "Surname spelling variants: corpus building, training, generation and evaluation")]
pub struct Cli {
    /// Worker threads for parallel stages; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `key = value` file supplying defaults for long flags; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a pair corpus, universe, filter report and statistics from raw input.
    Prepare(PrepareArgs),
    /// Train name models and the segment table.
    Train(TrainArgs),
    /// Propose ranked alternatives for names.
    Generate(GenerateArgs),
    /// k-fold precision/recall comparison of methods.
    Evaluate(EvaluateArgs),
    /// Rebuild bands, plot and summary from a PR curve file.
    Report(ReportArgs),
    /// Print phonetic codes.
    Encode(EncodeArgs),
    /// Print string similarities.
    Sim(SimArgs),
    /// Generate a synthetic universe and pair corpus.
    Synth(SynthArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Prepare(_) => "prepare",
            Command::Train(_) => "train",
            Command::Generate(_) => "generate",
            Command::Evaluate(_) => "evaluate",
            Command::Report(_) => "report",
            Command::Encode(_) => "encode",
            Command::Sim(_) => "sim",
            Command::Synth(_) => "synth",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputMode {
    /// Query log, `user<TAB>timestamp<TAB>name`.
    Search,
    /// Attachments, `tree_name<TAB>record_name<TAB>user`.
    Records,
}

#[derive(Debug, Args, Serialize)]
pub struct PrepareArgs {
    #[arg(long, value_enum)]
    pub mode: InputMode,
    #[arg(long)]
    pub input: PathBuf,
    /// `name<TAB>count` file; derived from the input when absent.
    #[arg(long)]
    pub universe: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_UNIVERSE_SIZE)]
    pub universe_size: usize,
    /// Session window in minutes (search mode).
    #[arg(long, default_value_t = 30)]
    pub window_min: u64,
    /// Pair every ordered couple inside the window, not only neighbours.
    #[arg(long)]
    pub all_pairs: bool,
    /// Pairs kept by co-occurrence; 250000 for search, 500000 for records by default.
    #[arg(long)]
    pub topk: Option<usize>,
    #[arg(long, default_value_t = crate::dataprep::DEFAULT_JACCARD_MIN)]
    pub jaccard_min: f64,
    /// Comma-separated edit distances to sample for false-positive review.
    #[arg(long, default_value = "1,2,3")]
    pub sample_strata: String,
    /// Pairs drawn per stratum; 0 skips the sample.
    #[arg(long, default_value_t = 0)]
    pub sample_size: usize,
    /// A labeled sample file whose false-positive rate goes into the filter report.
    #[arg(long)]
    pub labeled: Option<PathBuf>,
    #[arg(long, env = "NAMEVAR_SEED", default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub universe: PathBuf,
    #[arg(long, default_value_t = DEFAULT_UNIVERSE_SIZE)]
    pub universe_size: usize,
    /// Name model orders: `5`, `2-6` or `2,4`.
    #[arg(long, default_value = "2-6")]
    pub orders: String,
    /// `forms` or `frequency`.
    #[arg(long, default_value = "forms")]
    pub weighting: String,
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    /// Longest segment side in characters.
    #[arg(long, default_value_t = 3)]
    pub max_segment: usize,
    /// Weight alignment pairs by co-occurrence.
    #[arg(long)]
    pub cooc_weights: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    /// `mt` or any phonetic or similarity method id.
    #[arg(long, default_value = "mt")]
    pub method: String,
    /// Model directory written by `train` (MT only).
    #[arg(long, visible_alias = "model-dir")]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub order: usize,
    /// Restricts MT output to these names; required by the other methods.
    #[arg(long)]
    pub universe: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_UNIVERSE_SIZE)]
    pub universe_size: usize,
    /// File with one name per line, read after the positional names.
    #[arg(long, visible_alias = "input")]
    pub names: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub nbest: usize,
    #[arg(long, default_value_t = 100)]
    pub beam: usize,
    /// `backward`, `forward` or `both`.
    #[arg(long, default_value = "backward")]
    pub channel: String,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// `source<TAB>rank<TAB>candidate<TAB>score` lines; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    pub name: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub universe: PathBuf,
    #[arg(long, default_value_t = DEFAULT_UNIVERSE_SIZE)]
    pub universe_size: usize,
    /// Model directory; its `lm.<n>.arpa` files define the MT methods.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Comma-separated methods, or the families `all`, `phonetic`, `similarity`, `mt`.
    #[arg(long, default_value = "all")]
    pub methods: String,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Candidate list length and curve length.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub nbest: usize,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    #[arg(long, default_value_t = 100)]
    pub beam: usize,
    #[arg(long, default_value = "backward")]
    pub channel: String,
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    #[arg(long, default_value_t = 3)]
    pub max_segment: usize,
    #[arg(long)]
    pub cooc_weights: bool,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, env = "NAMEVAR_SEED", default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// A `pr_curves.csv` file or the directory holding one.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    /// Defaults to the input directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EncodeArgs {
    /// A phonetic method id, or `all`.
    #[arg(long, default_value = "all")]
    pub method: String,
    #[arg(long)]
    pub names: Option<PathBuf>,
    /// A name to encode; repeatable, and read before the positional names.
    #[arg(long = "name", value_name = "NAME")]
    pub name_flag: Vec<String>,
    pub name: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimArgs {
    /// A similarity measure id, or `all`.
    #[arg(long, default_value = "all")]
    pub measure: String,
    /// `a<TAB>b` lines scored after the flagged and positional pairs.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// First name of a pair; same as the first positional name.
    #[arg(long, requires = "b")]
    pub a: Option<String>,
    #[arg(long, requires = "a")]
    pub b: Option<String>,
    pub name: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Base names, one per line; generated syllable names when absent.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Generated base names when `--base` is absent.
    #[arg(long, default_value_t = 800)]
    pub base_count: usize,
    /// A bundle name (`ocr`, `phonetic-drift`, `suffix`) or a rule file.
    #[arg(long, default_value = "phonetic-drift")]
    pub channel: String,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 1.0)]
    pub zipf: f64,
    #[arg(long, default_value_t = 18)]
    pub variant_draws: usize,
    #[arg(long, default_value_t = 0.5)]
    pub source_exponent: f64,
    #[arg(long, default_value_t = 2_000)]
    pub users: usize,
    #[arg(long, default_value_t = DEFAULT_UNIVERSE_SIZE)]
    pub universe_size: usize,
    #[arg(long, env = "NAMEVAR_SEED", default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// What one stage ran on and produced. Outputs are a function of everything here
/// except `timings`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// SHA-256 of the resolved arguments as JSON.
    pub config_hash: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    /// Input path to SHA-256.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    /// Seconds per step.
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    fn start<A: Serialize>(args: &A, seed: Option<u64>) -> CliResult<Self> {
        let config = serde_json::to_value(args).map_err(|e| CliError::new("E_INTERNAL", e.to_string()))?;
        Ok(RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: sha256_hex(config.to_string().as_bytes()),
            config,
            seed,
            ..RunManifest::default()
        })
    }

    fn input(&mut self, path: &Path) -> CliResult<()> {
        let digest = file_digest(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    fn output(&mut self, path: &Path) -> CliResult<()> {
        let digest = file_digest(path)?;
        let key = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.outputs.insert(key, digest);
        Ok(())
    }

    fn time<T>(&mut self, step: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.insert(step.to_string(), t.elapsed().as_secs_f64());
        out
    }

    /// Merges this run under `stage` into `<dir>/manifest.json`.
    fn commit(self, dir: &Path, stage: &str) -> CliResult<()> {
        let path = dir.join("manifest.json");
        let mut all: BTreeMap<String, RunManifest> = match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).unwrap_or_default(),
            Err(_) => BTreeMap::new(),
        };
        all.insert(stage.to_string(), self);
        let json = serde_json::to_vec_pretty(&all).map_err(|e| CliError::new("E_INTERNAL", e.to_string()))?;
        write_atomic(&path, &json)?;
        Ok(())
    }
}

/// Reads the manifest a stage left in `dir`.
pub fn read_manifest(dir: &Path) -> CliResult<BTreeMap<String, RunManifest>> {
    let path = dir.join("manifest.json");
    let bytes = fs::read(&path).map_err(|e| CliError::from(Error::Io { path: path.clone(), source: e }))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::new("E_INPUT_PARSE", format!("{}: {e}", path.display())))
}

/// Parses `argv` after folding in `--config` defaults. Help and version requests
/// come back as `Err(Ok(text))`.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<Cli, std::result::Result<String, CliError>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = apply_config(argv).map_err(Err)?;
    Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp
        | clap::error::ErrorKind::DisplayVersion
        | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Ok(e.to_string()),
        _ => {
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            Err(CliError::new("E_USAGE", first))
        }
    })
}

/// Appends `--key value` for each config entry the chosen subcommand accepts and the
/// command line does not already set. Keys no subcommand knows are rejected.
fn apply_config(mut argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let strs: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let path = strs.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            strs.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else { return Ok(argv) };
    let text = fs::read_to_string(&path).map_err(|e| {
        let code = if e.kind() == std::io::ErrorKind::NotFound { "E_INPUT_MISSING" } else { "E_IO" };
        CliError::new(code, format!("{path}: {e}"))
    })?;
    let cmd = Cli::command();
    let Some(sub) = strs.iter().skip(1).find_map(|a| cmd.find_subcommand(a)) else {
        return Ok(argv);
    };
    let known: BTreeSet<String> = cmd
        .get_subcommands()
        .flat_map(|s| s.get_arguments().filter_map(|a| a.get_long().map(str::to_string)))
        .collect();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim().replace('_', "-"), v.trim().to_string()))
            .ok_or_else(|| CliError::new("E_CONFIG", format!("{path}:{}: expected key = value", lineno + 1)))?;
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            if known.contains(&key) {
                continue;
            }
            return Err(CliError::new("E_CONFIG", format!("{path}:{}: unknown key {key:?}", lineno + 1)));
        };
        let flag = format!("--{key}");
        let already = strs.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if already {
            continue;
        }
        if arg.get_action().takes_values() {
            argv.push(flag.into());
            argv.push(value.into());
        } else if matches!(value.as_str(), "true" | "yes" | "1") {
            argv.push(flag.into());
        }
    }
    Ok(argv)
}

/// Runs one parsed command. Thread pool setup is left to the caller.
pub fn execute(cli: Cli) -> CliResult<()> {
    let stage = cli.command.name();
    log::info!("{stage}: starting");
    match cli.command {
        Command::Prepare(a) => cmd_prepare(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Report(a) => cmd_report(&a),
        Command::Encode(a) => cmd_encode(&a),
        Command::Sim(a) => cmd_sim(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

fn require(path: &Path) -> CliResult<&Path> {
    if path.exists() {
        Ok(path)
    } else {
        Err(CliError::new("E_INPUT_MISSING", format!("{} does not exist", path.display())))
    }
}

fn parse_value<T: std::str::FromStr<Err = Error>>(s: &str) -> CliResult<T> {
    s.parse().map_err(CliError::from)
}

/// `5`, `2-6` or `2,4,6`. Every order must lie in 2..=6.
pub fn parse_orders(spec: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::new("E_CONFIG", format!("bad order list {spec:?}"));
    let mut out = BTreeSet::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once('-') {
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.insert(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    for &o in &out {
        check_order(o)?;
    }
    Ok(out.into_iter().collect())
}

fn write_file<F>(manifest: &mut RunManifest, path: &Path, render: F) -> CliResult<()>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    write_with(path, render)?;
    manifest.output(path)
}

fn cmd_prepare(a: &PrepareArgs) -> CliResult<()> {
    let mut manifest = RunManifest::start(a, Some(a.seed))?;
    let input = require(&a.input)?;
    manifest.input(input)?;
    let label = input.display().to_string();
    let reader = crate::io::open(input)?;
    let (prepared, name_counts): (Prepared, BTreeMap<Name, u64>) = match a.mode {
        InputMode::Search => {
            let events = parse_query_log(reader, &label)?;
            let mut counts = BTreeMap::new();
            for e in &events {
                if let Ok(n) = crate::corpus::normalize(&e.raw_name) {
                    *counts.entry(n).or_insert(0) += 1;
                }
            }
            let config = SessionConfig {
                window_seconds: a.window_min * 60,
                all_pairs: a.all_pairs,
            };
            (manifest.time("pair", || pair_sessions(events, &config)), counts)
        }
        InputMode::Records => {
            let rows = parse_attachments(reader, &label)?;
            let mut counts = BTreeMap::new();
            for (tree, record, _) in &rows {
                for raw in [tree, record] {
                    if let Ok(n) = crate::corpus::normalize(raw) {
                        *counts.entry(n).or_insert(0) += 1;
                    }
                }
            }
            (manifest.time("pair", || aggregate_attachments(rows)), counts)
        }
    };
    if prepared.dropped_names > 0 {
        log::warn!("{} inputs had no usable name", prepared.dropped_names);
    }
    let universe = match &a.universe {
        Some(path) => {
            manifest.input(require(path)?)?;
            read_universe(path, a.universe_size)?
        }
        None => build_universe(name_counts, a.universe_size),
    };
    let topk = a.topk.unwrap_or(match a.mode {
        InputMode::Search => DEFAULT_TOPK_SEARCH,
        InputMode::Records => DEFAULT_TOPK_RECORDS,
    });
    let (pairs, mut report) =
        manifest.time("filter", || filter_cascade(prepared.records, &universe, topk, a.jaccard_min))?;
    if let Some(path) = &a.labeled {
        manifest.input(require(path)?)?;
        let labeled = SampleManifest::read(crate::io::open(path)?, &path.display().to_string())?;
        report.sampled_false_positive_rate = labeled.false_positive_rate();
    }
    let stats = corpus_statistics(&pairs);
    write_file(&mut manifest, &a.out.join("corpus.tsv"), |w| write_corpus(w, &pairs))?;
    write_file(&mut manifest, &a.out.join("universe.tsv"), |w| write_universe(w, &universe))?;
    write_file(&mut manifest, &a.out.join("statistics.tsv"), |w| stats.write(w))?;
    write_file(&mut manifest, &a.out.join("filter_report.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &report).map_err(std::io::Error::other)?;
        writeln!(w)
    })?;
    if a.sample_size > 0 && !pairs.is_empty() {
        let strata = a
            .sample_strata
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| CliError::new("E_CONFIG", format!("bad strata {:?}", a.sample_strata)))?;
        let sample = false_positive_sample(&pairs, &strata, a.sample_size, a.seed)?;
        write_file(&mut manifest, &a.out.join("fp_sample.tsv"), |w| sample.write(w))?;
    }
    println!(
        "pairs\t{}\tuniverse\t{}\tinput_pairs\t{}",
        pairs.len(),
        universe.len(),
        report.input_pairs
    );
    manifest.commit(&a.out, "prepare")
}

fn lm_path(dir: &Path, order: usize) -> PathBuf {
    dir.join(format!("lm.{order}.arpa"))
}

fn cmd_train(a: &TrainArgs) -> CliResult<()> {
    let orders = parse_orders(&a.orders)?;
    let weighting: Weighting = parse_value(&a.weighting)?;
    let mut manifest = RunManifest::start(a, None)?;
    manifest.input(require(&a.corpus)?)?;
    manifest.input(require(&a.universe)?)?;
    let corpus = read_corpus(&a.corpus)?;
    let universe = read_universe(&a.universe, a.universe_size)?;
    let lms = manifest.time("name_models", || train_name_models(&universe, &orders, weighting))?;
    for (order, lm) in &lms {
        write_file(&mut manifest, &lm_path(&a.out, *order), |w| lm.write_arpa(w))?;
    }
    let config = segment_config(a.iterations, a.max_segment);
    let pairs = segment_training_pairs(&corpus, a.cooc_weights);
    let table = if pairs.is_empty() {
        log::warn!("empty corpus; the segment table is empty");
        SegmentTable::from_entries(std::iter::empty())
    } else {
        manifest.time("segments", || train_segments(&pairs, &config))?
    };
    write_file(&mut manifest, &a.out.join("segments.tsv"), |w| table.write(w))?;
    println!("orders\t{:?}\tsegments\t{}", orders, table.len());
    manifest.commit(&a.out, "train")
}

fn segment_config(iterations: usize, max_segment: usize) -> SegmentConfig {
    let mut config = SegmentConfig::default();
    config.em.iterations = iterations;
    config.max_len = max_segment;
    config
}

fn load_lm(dir: &Path, order: usize) -> CliResult<CharLanguageModel> {
    let path = lm_path(dir, order);
    if !path.exists() {
        return Err(CliError::new("E_NO_MODEL", format!("{} does not exist; run train first", path.display())));
    }
    Ok(CharLanguageModel::read_arpa(crate::io::open(&path)?, &path.display().to_string())?)
}

fn load_segments(dir: &Path) -> CliResult<SegmentTable> {
    let path = dir.join("segments.tsv");
    if !path.exists() {
        return Err(CliError::new("E_NO_MODEL", format!("{} does not exist; run train first", path.display())));
    }
    Ok(SegmentTable::read(crate::io::open(&path)?, &path.display().to_string())?)
}

/// Orders with an `lm.<n>.arpa` file in `dir`.
fn model_orders(dir: Option<&Path>) -> Vec<usize> {
    let Some(dir) = dir else { return Vec::new() };
    (crate::langmodel::MIN_ORDER..=crate::langmodel::MAX_ORDER)
        .filter(|&o| lm_path(dir, o).exists())
        .collect()
}

fn gather_names(positional: &[String], file: Option<&Path>) -> CliResult<Vec<Name>> {
    let mut names = Vec::new();
    for raw in positional {
        names.push(crate::corpus::normalize(raw)?);
    }
    if let Some(path) = file {
        names.extend(read_names(require(path)?)?);
    }
    if names.is_empty() {
        return Err(CliError::new("E_USAGE", "no names given"));
    }
    Ok(names)
}

fn decoder_config(nbest: usize, beam: usize, channel: &str) -> CliResult<DecoderConfig> {
    let channel: Channel = parse_value(channel)?;
    Ok(DecoderConfig {
        nbest,
        beam_width: Some(beam),
        channel,
        ..DecoderConfig::default()
    })
}

fn cmd_generate(a: &GenerateArgs) -> CliResult<()> {
    let names = gather_names(&a.name, a.names.as_deref())?;
    let universe = match &a.universe {
        Some(p) => Some(read_universe(require(p)?, a.universe_size)?),
        None => None,
    };
    let lists: Vec<(Name, Vec<RankedCandidate>)> = if a.method == "mt" {
        let dir = a
            .model
            .as_deref()
            .ok_or_else(|| CliError::new("E_NO_MODEL", "MT generation needs --model"))?;
        check_order(a.order)?;
        let lm = load_lm(dir, a.order)?;
        let table = load_segments(dir)?;
        let config = decoder_config(a.nbest, a.beam, &a.channel)?;
        names
            .iter()
            .map(|n| {
                let list = match decode(n, &table, &lm, &config) {
                    Ok(list) => list,
                    Err(Error::NoDerivation { .. }) => Vec::new(),
                    Err(e) => return Err(e.into()),
                };
                let kept = list
                    .into_iter()
                    .filter(|c| universe.as_ref().is_none_or(|u| u.contains(c.candidate.as_str())))
                    .collect();
                Ok((n.clone(), kept))
            })
            .collect::<CliResult<_>>()?
    } else {
        let universe = universe
            .as_ref()
            .ok_or_else(|| CliError::new("E_USAGE", format!("--method {} needs --universe", a.method)))?;
        match a.method.parse::<Method>()? {
            Method::Phonetic(m) => {
                let index = PhoneticIndex::new(m, universe);
                names.iter().map(|n| (n.clone(), index.rank(n, universe))).collect()
            }
            Method::Similarity(m) => names
                .iter()
                .map(|n| (n.clone(), rank_similarity(n, m, a.gamma, universe, a.nbest)))
                .collect(),
            Method::Mt(_) => return Err(CliError::new("E_USAGE", "use --method mt with --order")),
        }
    };
    // The source is never its own alternative.
    let lists: Vec<(Name, Vec<RankedCandidate>)> = lists
        .into_iter()
        .map(|(source, list)| {
            let kept = list
                .into_iter()
                .filter(|c| c.candidate != source)
                .map(|c| (c.candidate, c.score));
            let ranked = crate::corpus::with_ranks(kept);
            (source, ranked)
        })
        .collect();
    let render = |w: &mut dyn Write| -> std::io::Result<()> {
        for (source, list) in &lists {
            for c in list.iter().take(a.nbest) {
                writeln!(w, "{}\t{}\t{}\t{}", source, c.rank, c.candidate, c.score)?;
            }
        }
        Ok(())
    };
    match &a.out {
        Some(path) => write_with(path, |w| render(w))?,
        None => render(&mut std::io::stdout().lock()).map_err(|e| CliError::new("E_IO", e.to_string()))?,
    }
    Ok(())
}

fn cmd_evaluate(a: &EvaluateArgs) -> CliResult<()> {
    if a.folds < 2 {
        return Err(CliError::new(
            "E_FOLDS",
            format!("--folds {} is below 2; a confidence band needs at least two curves", a.folds),
        ));
    }
    let available = model_orders(a.model.as_deref());
    for item in a.methods.split(',').map(str::trim) {
        let wanted: Option<Vec<usize>> = match item {
            "mt" => Some(Vec::new()),
            _ => item.strip_prefix("mt-").and_then(|o| o.parse().ok()).map(|o| vec![o]),
        };
        match wanted {
            Some(orders) if orders.is_empty() && available.is_empty() => {
                return Err(CliError::new("E_NO_MODEL", "MT requested but no trained name models were found"))
            }
            Some(orders) if orders.iter().any(|o| !available.contains(o)) => {
                return Err(CliError::new("E_NO_MODEL", format!("no trained name model for {item}")))
            }
            _ => {}
        }
    }
    let methods = Method::parse_list(&a.methods, &available)?;
    let mut manifest = RunManifest::start(a, Some(a.seed))?;
    manifest.input(require(&a.corpus)?)?;
    manifest.input(require(&a.universe)?)?;
    let corpus = read_corpus(&a.corpus)?;
    let universe = read_universe(&a.universe, a.universe_size)?;
    let mut lms = BTreeMap::new();
    for m in &methods {
        if let Method::Mt(order) = m {
            let dir = a.model.as_deref().expect("MT orders come from the model directory");
            manifest.input(&lm_path(dir, *order))?;
            lms.insert(*order, load_lm(dir, *order)?);
        }
    }
    let config = ExperimentConfig {
        folds: a.folds,
        seed: a.seed,
        max_position: a.nbest,
        gamma: a.gamma,
        similarity_cutoff: a.nbest,
        decoder: decoder_config(a.nbest, a.beam, &a.channel)?,
        segments: segment_config(a.iterations, a.max_segment),
        weight_by_cooccurrence: a.cooc_weights,
        confidence: a.confidence,
        ..ExperimentConfig::default()
    };
    let report = manifest.time("experiment", || {
        crate::experiment::run_experiment(&corpus, &universe, &methods, &lms, &config)
    })?;
    write_report(&mut manifest, &a.out, &report.curves(), &report.bands())?;
    manifest.commit(&a.out, "evaluate")
}

fn cmd_report(a: &ReportArgs) -> CliResult<()> {
    let input = if a.input.is_dir() { a.input.join("pr_curves.csv") } else { a.input.clone() };
    let input = require(&input)?.to_path_buf();
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| input.parent().map(Path::to_path_buf).unwrap_or_default());
    let mut manifest = RunManifest::start(a, None)?;
    manifest.input(&input)?;
    let curves = read_pr_csv(crate::io::open(&input)?, &input.display().to_string())?;
    let mut by_method: BTreeMap<&str, Vec<PRCurve>> = BTreeMap::new();
    for c in &curves {
        by_method.entry(c.method.as_str()).or_default().push(c.clone());
    }
    // Keep the file's method order, not the alphabetical one.
    let mut order: Vec<&str> = Vec::new();
    for c in &curves {
        if !order.contains(&c.method.as_str()) {
            order.push(&c.method);
        }
    }
    let bands = order
        .iter()
        .map(|m| confidence_band(&by_method[m], a.confidence))
        .collect::<crate::Result<Vec<_>>>()?;
    if out.join("pr_curves.csv") != input {
        write_file(&mut manifest, &out.join("pr_curves.csv"), |w| write_pr_csv(w, &curves))?;
    }
    write_report_files(&mut manifest, &out, &curves, &bands)?;
    manifest.commit(&out, "report")
}

fn write_report(manifest: &mut RunManifest, out: &Path, curves: &[PRCurve], bands: &[ConfidenceBand]) -> CliResult<()> {
    write_file(manifest, &out.join("pr_curves.csv"), |w| write_pr_csv(w, curves))?;
    write_report_files(manifest, out, curves, bands)
}

/// Band CSV, SVG plot and a per-method summary; the summary is also printed.
fn write_report_files(
    manifest: &mut RunManifest,
    out: &Path,
    curves: &[PRCurve],
    bands: &[ConfidenceBand],
) -> CliResult<()> {
    write_file(manifest, &out.join("bands.csv"), |w| write_band_csv(w, bands))?;
    let svg = render_svg(bands);
    write_file(manifest, &out.join("pr.svg"), |w| w.write_all(svg.as_bytes()))?;
    let mut summary = String::from("method\tcurves\tcentroid_max_f1\tmean_fold_max_f1\n");
    for band in bands {
        let own: Vec<&PRCurve> = curves.iter().filter(|c| c.method == band.method).collect();
        let mean = own.iter().map(|c| max_f1(c)).sum::<f64>() / own.len().max(1) as f64;
        summary.push_str(&format!(
            "{}\t{}\t{:.6}\t{:.6}\n",
            band.method,
            own.len(),
            centroid_max_f1(band),
            mean
        ));
    }
    write_file(manifest, &out.join("summary.tsv"), |w| w.write_all(summary.as_bytes()))?;
    print!("{summary}");
    Ok(())
}

fn cmd_encode(a: &EncodeArgs) -> CliResult<()> {
    let given: Vec<String> = a.name_flag.iter().chain(&a.name).cloned().collect();
    let names = gather_names(&given, a.names.as_deref())?;
    let methods: Vec<PhoneticMethod> = if a.method == "all" {
        PhoneticMethod::ALL.to_vec()
    } else {
        vec![parse_value(&a.method)?]
    };
    let mut out = std::io::stdout().lock();
    for n in &names {
        for &m in &methods {
            writeln!(out, "{n}\t{m}\t{}", encode(m, n)).map_err(|e| CliError::new("E_IO", e.to_string()))?;
        }
    }
    Ok(())
}

fn cmd_sim(a: &SimArgs) -> CliResult<()> {
    let measures: Vec<SimilarityMeasure> = if a.measure == "all" {
        SimilarityMeasure::ALL.to_vec()
    } else {
        vec![parse_value(&a.measure)?]
    };
    let mut pairs = Vec::new();
    if let (Some(x), Some(y)) = (&a.a, &a.b) {
        pairs.push((crate::corpus::normalize(x)?, crate::corpus::normalize(y)?));
    }
    match a.name.as_slice() {
        [] => {}
        [x, y] => pairs.push((crate::corpus::normalize(x)?, crate::corpus::normalize(y)?)),
        _ => return Err(CliError::new("E_USAGE", "sim takes exactly two names")),
    }
    if let Some(path) = &a.pairs {
        let text = fs::read_to_string(require(path)?).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let (x, y) = line.split_once('\t').ok_or_else(|| {
                CliError::new("E_INPUT_PARSE", format!("{}:{}: expected a<TAB>b", path.display(), i + 1))
            })?;
            pairs.push((crate::corpus::normalize(x)?, crate::corpus::normalize(y)?));
        }
    }
    if pairs.is_empty() {
        return Err(CliError::new("E_USAGE", "no pairs given"));
    }
    let mut out = std::io::stdout().lock();
    let mut emit = |line: String| writeln!(out, "{line}").map_err(|e| CliError::new("E_IO", e.to_string()));
    for (x, y) in &pairs {
        emit(format!("{x}\t{y}\tlevenshtein_distance\t{}", levenshtein_distance(x.as_str(), y.as_str())))?;
        for m in &measures {
            emit(format!("{x}\t{y}\t{m}\t{:.6}", m.similarity(x.as_str(), y.as_str())))?;
        }
    }
    Ok(())
}

fn load_channel(spec: &str, manifest: &mut RunManifest) -> CliResult<NoiseChannel> {
    if NoiseChannel::BUNDLES.contains(&spec) {
        return Ok(NoiseChannel::bundle(spec)?);
    }
    let path = require(Path::new(spec)).map_err(|_| {
        CliError::new(
            "E_INPUT_MISSING",
            format!("{spec:?} is neither a channel bundle {:?} nor a rule file", NoiseChannel::BUNDLES),
        )
    })?;
    manifest.input(path)?;
    Ok(NoiseChannel::parse(crate::io::open(path)?, spec)?)
}

fn cmd_synth(a: &SynthArgs) -> CliResult<()> {
    let mut manifest = RunManifest::start(a, Some(a.seed))?;
    let channel = load_channel(&a.channel, &mut manifest)?;
    let base = match &a.base {
        Some(path) => {
            manifest.input(require(path)?)?;
            read_names(path)?
        }
        None => base_names(a.base_count, a.seed),
    };
    if base.is_empty() {
        return Err(CliError::new("E_INPUT_DEGENERATE", "no base names"));
    }
    let config = SynthConfig {
        pair_count: a.pairs,
        zipf_exponent: a.zipf,
        variant_draws: a.variant_draws,
        source_exponent: a.source_exponent,
        users: a.users,
        universe_capacity: a.universe_size,
        seed: a.seed,
        ..SynthConfig::default()
    };
    let synth = manifest.time("generate", || generate_corpus(&base, &channel, &config))?;
    write_file(&mut manifest, &a.out.join("corpus.tsv"), |w| write_corpus(w, &synth.records))?;
    write_file(&mut manifest, &a.out.join("universe.tsv"), |w| write_universe(w, &synth.universe))?;
    write_file(&mut manifest, &a.out.join("channel.tsv"), |w| write!(w, "{channel}"))?;
    println!(
        "pairs\t{}\tuniverse\t{}\tdraws\t{}",
        synth.records.len(),
        synth.universe.len(),
        synth.draws
    );
    manifest.commit(&a.out, "synth")
}
