//! Command-line entry point: fuzzing campaigns, mode comparisons,
//! conformance checks, and corpus replay.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet;
use crate::campaign::{self, CampaignConfig, Comparison, DEFAULT_BASELINE_MAX_LEN};
use crate::explorer::ExplorerConfig;
use crate::feedback::{check_conformance, SubprocessCommand, SubprocessValidator, Validator};
use crate::subjects;

#[derive(Parser)]
#[command(
    name = "prefuzz",
    version,
    about = "Black-box fuzzer that grows valid inputs from parser failure feedback"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a failure-feedback campaign and store the corpus it finds
    Fuzz(FuzzArgs),
    /// Run failure-feedback and pure-random campaigns with equal budgets
    Compare(CompareArgs),
    /// Check a subject's prefix-consistency contract
    Conformance(ConformanceArgs),
    /// List the built-in subjects
    ListSubjects,
    /// Re-validate every file in a corpus directory
    Replay(ReplayArgs),
}

#[derive(Args)]
struct TargetArgs {
    /// Built-in subject name (see list-subjects)
    #[arg(long, conflicts_with = "command")]
    subject: Option<String>,
    /// External validator executable speaking the exit-code protocol;
    /// extra arguments go after `--`
    #[arg(long, value_name = "PROGRAM")]
    command: Option<PathBuf>,
    /// Arguments for the external validator
    #[arg(last = true)]
    command_args: Vec<String>,
    /// Wall-clock limit per external validator execution
    #[arg(long, default_value_t = 500)]
    timeout_ms: u64,
}

impl TargetArgs {
    fn factory(&self) -> Result<Box<dyn Fn() -> Box<dyn Validator> + '_>> {
        if let Some(name) = &self.subject {
            let subject = subjects::find_subject(name)
                .ok_or_else(|| anyhow!("unknown subject {name:?}; try list-subjects"))?;
            Ok(Box::new(move || Box::new(subject.validator())))
        } else if let Some(program) = &self.command {
            let program = program.clone();
            let args = self.command_args.clone();
            let timeout = Duration::from_millis(self.timeout_ms);
            Ok(Box::new(move || {
                let mut command = SubprocessCommand::new(program.clone());
                for a in &args {
                    command = command.arg(a);
                }
                Box::new(SubprocessValidator::new(command).with_timeout(timeout))
            }))
        } else {
            bail!("one of --subject or --command is required");
        }
    }

}

#[derive(Args)]
struct SearchArgs {
    /// Candidate alphabet: bytes, printable, or file:PATH (raw bytes,
    /// duplicates ignored)
    #[arg(long, default_value = "bytes")]
    alphabet: String,
    /// Maximum repair-sequence length for reported failure indices (1 or 2)
    #[arg(long, default_value_t = 1)]
    oapprox: u8,
    /// Byte budget per generated input
    #[arg(long, default_value_t = 1000)]
    max_len: usize,
    /// Stop after this many validator executions
    #[arg(long)]
    budget_validations: Option<u64>,
    /// Stop after this much wall-clock time (runs are then not reproducible)
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// RNG seed; omitted, a fresh one is drawn and printed
    #[arg(long)]
    seed: Option<u64>,
}

impl SearchArgs {
    fn explorer_config(&self, seed: u64) -> Result<ExplorerConfig> {
        let config = ExplorerConfig {
            alphabet: parse_alphabet(&self.alphabet)?,
            oapprox: self.oapprox,
            max_len: self.max_len,
            rng_seed: seed,
            ..ExplorerConfig::default()
        };
        config.check()?;
        Ok(config)
    }

    fn require_budget(&self) -> Result<()> {
        if self.budget_validations.is_none() && self.budget_seconds.is_none() {
            bail!("one of --budget-validations or --budget-seconds is required");
        }
        Ok(())
    }
}

#[derive(Args)]
struct FuzzArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory: corpus under <out>/corpus, reports next to it
    #[arg(long)]
    out: PathBuf,
    /// Append the exploration trace to this file
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory: corpora under <out>/ff and <out>/random
    #[arg(long)]
    out: PathBuf,
    /// Maximum length of random-baseline draws
    #[arg(long, default_value_t = DEFAULT_BASELINE_MAX_LEN)]
    baseline_max_len: usize,
}

#[derive(Args)]
struct ConformanceArgs {
    /// Built-in subject name
    #[arg(long)]
    subject: String,
    /// Random golden prefixes to sample in addition to the goldens
    #[arg(long, default_value_t = 1000)]
    random_prefixes: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReplayArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Corpus directory to re-validate
    #[arg(long)]
    dir: PathBuf,
}

pub fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Fuzz(args) => fuzz(args),
        Command::Compare(args) => compare(args),
        Command::Conformance(args) => conformance(args),
        Command::ListSubjects => list_subjects(),
        Command::Replay(args) => replay(args),
    }
}

fn effective_seed(requested: Option<u64>) -> u64 {
    match requested {
        Some(seed) => seed,
        None => rand::thread_rng().gen(),
    }
}

fn parse_alphabet(choice: &str) -> Result<Vec<u8>> {
    match choice {
        "bytes" => Ok(alphabet::all_bytes()),
        "printable" => Ok(alphabet::PRINTABLE.to_vec()),
        other => {
            let path = other
                .strip_prefix("file:")
                .ok_or_else(|| anyhow!("--alphabet must be bytes, printable or file:PATH"))?;
            let raw = fs::read(path).with_context(|| format!("reading alphabet {path}"))?;
            let mut seen = [false; 256];
            let mut out = Vec::new();
            for b in raw {
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    out.push(b);
                }
            }
            if out.is_empty() {
                bail!("alphabet file {path} holds no bytes");
            }
            Ok(out)
        }
    }
}

fn fuzz(args: FuzzArgs) -> Result<ExitCode> {
    args.search.require_budget()?;
    let seed = effective_seed(args.search.seed);
    println!("seed: {seed}");
    let explorer = args.search.explorer_config(seed)?;

    let corpus_dir = args.out.join("corpus");
    let mut config = CampaignConfig::new(explorer, &corpus_dir);
    config.budget_validations = args.search.budget_validations;
    config.budget_seconds = args.search.budget_seconds;

    let factory = args.target.factory()?;
    let mut validator = factory();

    let mut trace_file = match &args.trace {
        Some(path) => {
            let file = fs::File::options()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening trace file {}", path.display()))?;
            Some(std::io::BufWriter::new(file))
        }
        None => None,
    };
    let report = campaign::run_campaign_with(
        validator.as_mut(),
        &config,
        trace_file.as_mut().map(|f| f as &mut dyn Write),
    )?;
    if let Some(mut f) = trace_file {
        f.flush().context("flushing trace file")?;
    }

    campaign::write_report_files(&report, &args.out)?;
    print!("{}", report.to_text());
    println!("elapsed_seconds: {:.3}", report.elapsed_seconds);

    // Never exit 0 with a corpus that does not re-validate.
    verify_corpus(factory().as_mut(), &corpus_dir)?;
    Ok(ExitCode::SUCCESS)
}

fn compare(args: CompareArgs) -> Result<ExitCode> {
    args.search.require_budget()?;
    let seed = effective_seed(args.search.seed);
    println!("seed: {seed}");
    let explorer = args.search.explorer_config(seed)?;

    let mut config = CampaignConfig::new(explorer, &args.out);
    config.budget_validations = args.search.budget_validations;
    config.budget_seconds = args.search.budget_seconds;
    config.baseline_max_len = args.baseline_max_len;

    let factory = args.target.factory()?;
    let comparison = campaign::compare_modes(&factory, &config)?;

    write_comparison_files(&comparison, &args.out)?;
    print!("{}", comparison.to_text());
    println!(
        "elapsed_seconds: {:.3}",
        comparison.failure_feedback.elapsed_seconds + comparison.random_baseline.elapsed_seconds
    );

    verify_corpus(factory().as_mut(), &args.out.join("ff"))?;
    verify_corpus(factory().as_mut(), &args.out.join("random"))?;
    Ok(ExitCode::SUCCESS)
}

fn write_comparison_files(comparison: &Comparison, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("compare.txt"), comparison.to_text())?;
    fs::write(
        dir.join("compare.json"),
        serde_json::to_vec_pretty(comparison)?,
    )?;
    Ok(())
}

fn verify_corpus(validator: &mut dyn Validator, corpus_dir: &Path) -> Result<()> {
    if !corpus_dir.exists() {
        return Ok(());
    }
    let failures = campaign::replay_corpus(validator, corpus_dir)?;
    if failures.is_empty() {
        Ok(())
    } else {
        bail!(
            "{} corpus file(s) failed re-validation, first: {}",
            failures.len(),
            failures[0].display()
        );
    }
}

fn conformance(args: ConformanceArgs) -> Result<ExitCode> {
    let subject = subjects::find_subject(&args.subject)
        .ok_or_else(|| anyhow!("unknown subject {:?}; try list-subjects", args.subject))?;
    let seed = effective_seed(args.seed);
    println!("seed: {seed}");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<Vec<u8>> = subject.goldens.iter().map(|g| g.to_vec()).collect();
    for _ in 0..args.random_prefixes {
        let golden = subject.goldens[rng.gen_range(0..subject.goldens.len())];
        let cut = rng.gen_range(0..=golden.len());
        samples.push(golden[..cut].to_vec());
    }

    let mut validator = subject.validator();
    let report = check_conformance(&mut validator, &samples)?;
    println!(
        "samples: {}  prefixes: {}  violations: {}",
        report.samples_checked,
        report.prefixes_checked,
        report.violations.len()
    );
    if report.is_clean() {
        Ok(ExitCode::SUCCESS)
    } else {
        for v in report.violations.iter().take(10) {
            println!(
                "violation: sample {:?} ({}) has prefix of length {} judged {}",
                String::from_utf8_lossy(&v.sample),
                v.sample_verdict,
                v.prefix_len,
                v.prefix_verdict
            );
        }
        Err(anyhow!("prefix-consistency violations found"))
    }
}

fn list_subjects() -> Result<ExitCode> {
    for subject in subjects::SUBJECTS {
        println!("{:<20} {}", subject.name, subject.summary);
    }
    Ok(ExitCode::SUCCESS)
}

fn replay(args: ReplayArgs) -> Result<ExitCode> {
    if !args.dir.is_dir() {
        bail!("{} is not a directory", args.dir.display());
    }
    let factory = args.target.factory()?;
    let mut validator = factory();
    let failures = campaign::replay_corpus(validator.as_mut(), &args.dir)?;
    let total = fs::read_dir(&args.dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .count();
    println!("replayed: {total}  failures: {}", failures.len());
    if failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for path in failures.iter().take(10) {
            println!("not complete: {}", path.display());
        }
        Err(anyhow!("{} corpus file(s) failed re-validation", failures.len()))
    }
}
