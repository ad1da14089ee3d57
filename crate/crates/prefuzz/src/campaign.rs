//! Budgeted fuzzing campaigns: repeated generation attempts feeding a
//! deduplicated on-disk corpus, summary metrics over the unique accepted
//! inputs, and a pure-random baseline mode for head-to-head comparisons.
//!
//! With a fixed seed and a validation budget (not wall-clock) as the
//! stopping rule, a campaign is bit-reproducible: identical corpus files
//! and identical reports.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::explorer::{generate_with, ExplorerConfig, ExplorerError, GenerateHooks};
use crate::feedback::{FeedbackError, Validator};
use crate::trace;

/// Report format version written into report files.
pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Default maximum length for random-baseline draws.
pub const DEFAULT_BASELINE_MAX_LEN: usize = 16;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("corpus i/o failed at {path}: {source}")]
    CorpusIo {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Explorer(#[from] ExplorerError),
    #[error(transparent)]
    Feedback(#[from] FeedbackError),
}

/// How a campaign produces candidate inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignMode {
    /// Failure-feedback search: grow valid prefixes with the explorer.
    FailureFeedback,
    /// Uniform random byte strings of random length, validated blindly.
    RandomBaseline,
}

impl std::fmt::Display for CampaignMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CampaignMode::FailureFeedback => write!(f, "failure-feedback"),
            CampaignMode::RandomBaseline => write!(f, "random-baseline"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub explorer: ExplorerConfig,
    pub mode: CampaignMode,
    /// Stop once this many validations were issued.
    pub budget_validations: Option<u64>,
    /// Stop once this much wall-clock time elapsed. Non-reproducible runs.
    pub budget_seconds: Option<f64>,
    pub corpus_dir: PathBuf,
    /// Length bound for random-baseline draws, uniform over 1..=max.
    pub baseline_max_len: usize,
    /// Optional known-incomplete prefix every attempt starts from.
    pub start_prefix: Vec<u8>,
}

impl CampaignConfig {
    pub fn new(explorer: ExplorerConfig, corpus_dir: impl Into<PathBuf>) -> Self {
        CampaignConfig {
            explorer,
            mode: CampaignMode::FailureFeedback,
            budget_validations: None,
            budget_seconds: None,
            corpus_dir: corpus_dir.into(),
            baseline_max_len: DEFAULT_BASELINE_MAX_LEN,
            start_prefix: Vec::new(),
        }
    }
}

/// Campaign metrics, computed over the unique accepted inputs stored in the
/// corpus directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub format_version: u32,
    pub subject: String,
    pub mode: CampaignMode,
    pub seed: u64,
    /// Distinct complete inputs, equal to the corpus files written.
    pub unique_valid: u64,
    /// Longest unique accepted input, in bytes.
    pub max_len: u64,
    /// Mean length of the unique accepted inputs, in bytes.
    pub mean_len: f64,
    pub total_validations: u64,
    pub crashes: u64,
    pub timeouts: u64,
    pub restarts: u64,
    pub search_exhausted: u64,
    /// Wall-clock duration. Deliberately excluded from the serialized
    /// report files so that equal-seed runs stay byte-identical; the CLI
    /// prints it instead.
    #[serde(skip)]
    pub elapsed_seconds: f64,
}

impl CampaignReport {
    fn new(subject: &str, mode: CampaignMode, seed: u64) -> Self {
        CampaignReport {
            format_version: REPORT_FORMAT_VERSION,
            subject: subject.to_string(),
            mode,
            seed,
            unique_valid: 0,
            max_len: 0,
            mean_len: 0.0,
            total_validations: 0,
            crashes: 0,
            timeouts: 0,
            restarts: 0,
            search_exhausted: 0,
            elapsed_seconds: 0.0,
        }
    }

    /// The stable key-value rendering written to `report.txt`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "campaign-report-version: {}", self.format_version);
        let _ = writeln!(out, "subject: {}", self.subject);
        let _ = writeln!(out, "mode: {}", self.mode);
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(out, "unique_valid: {}", self.unique_valid);
        let _ = writeln!(out, "max_len: {}", self.max_len);
        let _ = writeln!(out, "mean_len: {:.3}", self.mean_len);
        let _ = writeln!(out, "total_validations: {}", self.total_validations);
        let _ = writeln!(out, "crashes: {}", self.crashes);
        let _ = writeln!(out, "timeouts: {}", self.timeouts);
        let _ = writeln!(out, "restarts: {}", self.restarts);
        let _ = writeln!(out, "search_exhausted: {}", self.search_exhausted);
        out
    }
}

/// Store one accepted input under its content hash. Returns whether a new
/// file was written; an identical input already on disk is left alone.
pub fn dedup_and_store(corpus_dir: &Path, input: &[u8]) -> Result<bool, CampaignError> {
    fs::create_dir_all(corpus_dir).map_err(|source| CampaignError::CorpusIo {
        path: corpus_dir.to_path_buf(),
        source,
    })?;
    let name = hex::encode(Sha256::digest(input));
    let path = corpus_dir.join(name);
    if path.exists() {
        return Ok(false);
    }
    fs::write(&path, input).map_err(|source| CampaignError::CorpusIo { path, source })?;
    Ok(true)
}

/// Recompute the corpus-derived report fields from directory contents.
pub fn corpus_stats(corpus_dir: &Path) -> Result<(u64, u64, f64), CampaignError> {
    let mut count = 0u64;
    let mut max_len = 0u64;
    let mut total_len = 0u64;
    if corpus_dir.exists() {
        let entries = fs::read_dir(corpus_dir).map_err(|source| CampaignError::CorpusIo {
            path: corpus_dir.to_path_buf(),
            source,
        })?;
        for entry in entries {
            let entry = entry.map_err(|source| CampaignError::CorpusIo {
                path: corpus_dir.to_path_buf(),
                source,
            })?;
            let meta = entry.metadata().map_err(|source| CampaignError::CorpusIo {
                path: entry.path(),
                source,
            })?;
            if meta.is_file() {
                count += 1;
                max_len = max_len.max(meta.len());
                total_len += meta.len();
            }
        }
    }
    let mean = if count == 0 {
        0.0
    } else {
        total_len as f64 / count as f64
    };
    Ok((count, max_len, mean))
}

/// Derive the per-attempt seed from the campaign seed and the attempt
/// index (splitmix64 over their combination).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut x = base ^ (index.wrapping_add(1)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

/// Run one campaign to its budget, storing every new distinct accepted
/// input in the corpus directory.
pub fn run_campaign(
    validator: &mut dyn Validator,
    config: &CampaignConfig,
) -> Result<CampaignReport, CampaignError> {
    run_campaign_with(validator, config, None)
}

/// [`run_campaign`] with an optional trace sink receiving every attempt.
pub fn run_campaign_with(
    validator: &mut dyn Validator,
    config: &CampaignConfig,
    mut trace_sink: Option<&mut dyn std::io::Write>,
) -> Result<CampaignReport, CampaignError> {
    config.explorer.check().map_err(ExplorerError::Config)?;
    fs::create_dir_all(&config.corpus_dir).map_err(|source| CampaignError::CorpusIo {
        path: config.corpus_dir.clone(),
        source,
    })?;

    let started = Instant::now();
    let deadline = config
        .budget_seconds
        .map(|s| started + std::time::Duration::from_secs_f64(s));
    let tally_start = validator.tally();
    let mut report = CampaignReport::new(validator.name(), config.mode, config.explorer.rng_seed);

    let spent = |v: &dyn Validator| v.tally().executions - tally_start.executions;

    match config.mode {
        CampaignMode::FailureFeedback => {
            let mut attempt: u64 = 0;
            loop {
                let used = spent(validator);
                let remaining = match config.budget_validations {
                    Some(budget) => {
                        if used >= budget {
                            break;
                        }
                        budget - used
                    }
                    None => u64::MAX,
                };
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        break;
                    }
                }

                let mut attempt_config = config.explorer.clone();
                attempt_config.rng_seed = derive_seed(config.explorer.rng_seed, attempt);
                attempt_config.max_validations = config.explorer.max_validations.min(remaining);
                if let Some(w) = trace_sink.as_deref_mut() {
                    trace::attempt_header(w, attempt, attempt_config.rng_seed)
                        .map_err(ExplorerError::Io)?;
                }
                let hooks = GenerateHooks {
                    trace: trace_sink.as_deref_mut().map(|w| w as _),
                    deadline,
                };
                match generate_with(validator, &attempt_config, &config.start_prefix, hooks) {
                    Ok(generated) => {
                        report.restarts += generated.restarts;
                        dedup_and_store(&config.corpus_dir, &generated.input)?;
                    }
                    Err(ExplorerError::SearchExhausted { restarts, .. }) => {
                        // The alphabet is consumed for this seed; reseed and
                        // keep going.
                        report.search_exhausted += 1;
                        report.restarts += restarts;
                        log::debug!(
                            "attempt {attempt} exhausted the search space, reseeding"
                        );
                    }
                    Err(ExplorerError::AttemptBudgetExhausted { restarts, .. }) => {
                        report.restarts += restarts;
                        // Either the campaign budget tripped mid-attempt or
                        // the attempt hit its own cap; the loop condition
                        // sorts it out.
                    }
                    Err(other) => return Err(other.into()),
                }
                attempt += 1;
            }
        }
        CampaignMode::RandomBaseline => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.explorer.rng_seed);
            let alphabet = &config.explorer.alphabet;
            let max_len = config.baseline_max_len.max(1);
            loop {
                if let Some(budget) = config.budget_validations {
                    if spent(validator) >= budget {
                        break;
                    }
                }
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        break;
                    }
                }
                let len = rng.gen_range(1..=max_len);
                let input: Vec<u8> = (0..len)
                    .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                    .collect();
                if validator.validate(&input)?.is_complete() {
                    dedup_and_store(&config.corpus_dir, &input)?;
                }
            }
        }
    }

    let tally_end = validator.tally();
    report.total_validations = tally_end.executions - tally_start.executions;
    report.crashes = tally_end.crashes - tally_start.crashes;
    report.timeouts = tally_end.timeouts - tally_start.timeouts;
    let (unique, max_len, mean_len) = corpus_stats(&config.corpus_dir)?;
    report.unique_valid = unique;
    report.max_len = max_len;
    report.mean_len = mean_len;
    report.elapsed_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

/// Both campaign reports of a mode comparison plus the headline ratio.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub failure_feedback: CampaignReport,
    pub random_baseline: CampaignReport,
    /// unique_valid(failure-feedback) / max(1, unique_valid(baseline)).
    pub unique_valid_ratio: f64,
}

impl Comparison {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("== failure-feedback ==\n");
        out.push_str(&self.failure_feedback.to_text());
        out.push_str("== random-baseline ==\n");
        out.push_str(&self.random_baseline.to_text());
        let _ = writeln!(out, "unique_valid_ratio: {:.3}", self.unique_valid_ratio);
        out
    }
}

/// Run both modes with identical budgets and alphabet against fresh
/// validator instances, corpora under `ff/` and `random/` of the configured
/// corpus directory.
pub fn compare_modes(
    make_validator: &dyn Fn() -> Box<dyn Validator>,
    config: &CampaignConfig,
) -> Result<Comparison, CampaignError> {
    let mut ff_config = config.clone();
    ff_config.mode = CampaignMode::FailureFeedback;
    ff_config.corpus_dir = config.corpus_dir.join("ff");
    let mut ff_validator = make_validator();
    let failure_feedback = run_campaign(ff_validator.as_mut(), &ff_config)?;

    let mut rb_config = config.clone();
    rb_config.mode = CampaignMode::RandomBaseline;
    rb_config.corpus_dir = config.corpus_dir.join("random");
    let mut rb_validator = make_validator();
    let random_baseline = run_campaign(rb_validator.as_mut(), &rb_config)?;

    let unique_valid_ratio =
        failure_feedback.unique_valid as f64 / random_baseline.unique_valid.max(1) as f64;
    Ok(Comparison {
        failure_feedback,
        random_baseline,
        unique_valid_ratio,
    })
}

/// Re-validate every corpus file; returns the paths that failed to answer
/// complete.
pub fn replay_corpus(
    validator: &mut dyn Validator,
    corpus_dir: &Path,
) -> Result<Vec<PathBuf>, CampaignError> {
    let mut failures = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(corpus_dir)
        .map_err(|source| CampaignError::CorpusIo {
            path: corpus_dir.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    entries.sort();
    for path in entries {
        let input = fs::read(&path).map_err(|source| CampaignError::CorpusIo {
            path: path.clone(),
            source,
        })?;
        if !validator.validate(&input)?.is_complete() {
            failures.push(path);
        }
    }
    Ok(failures)
}

/// Write both report renderings (`report.txt`, `report.json`) next to the
/// corpus.
pub fn write_report_files(report: &CampaignReport, dir: &Path) -> Result<(), CampaignError> {
    let io_err = |path: &Path, source| CampaignError::CorpusIo {
        path: path.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let txt = dir.join("report.txt");
    let mut f = fs::File::create(&txt).map_err(|e| io_err(&txt, e))?;
    f.write_all(report.to_text().as_bytes())
        .map_err(|e| io_err(&txt, e))?;
    let json = dir.join("report.json");
    let body = serde_json::to_vec_pretty(report).expect("report serializes");
    fs::write(&json, body).map_err(|e| io_err(&json, e))?;
    Ok(())
}
