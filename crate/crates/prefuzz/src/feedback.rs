//! The verdict protocol spoken by every fuzzing subject, and the adapters
//! that obtain verdicts from in-process validators and external executables.
//!
//! A subject answers one of three things for an input: it is complete (a
//! valid, accepted input), incomplete (a valid prefix of some accepted
//! input), or incorrect (no suffix can ever make it valid). Incorrect
//! answers may carry a failure index marking where the maximal valid
//! prefix ends; the index may overapproximate (point earlier than the true
//! divergence).

use std::fmt;
use std::io::{Read, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

/// A subject's three-valued reply. `Incorrect` optionally carries the byte
/// offset where the failure was reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// The input is valid and accepted as-is.
    Complete,
    /// The input is a valid prefix: some suffix would make it accepted.
    Incomplete,
    /// No suffix can make the input valid. The optional index marks the
    /// (possibly overapproximated) end of the maximal valid prefix.
    Incorrect(Option<usize>),
}

impl Verdict {
    pub fn incorrect() -> Self {
        Verdict::Incorrect(None)
    }

    pub fn incorrect_at(index: usize) -> Self {
        Verdict::Incorrect(Some(index))
    }

    pub fn is_complete(self) -> bool {
        matches!(self, Verdict::Complete)
    }

    pub fn is_incomplete(self) -> bool {
        matches!(self, Verdict::Incomplete)
    }

    pub fn is_incorrect(self) -> bool {
        matches!(self, Verdict::Incorrect(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Complete => write!(f, "complete"),
            Verdict::Incomplete => write!(f, "incomplete"),
            Verdict::Incorrect(None) => write!(f, "incorrect"),
            Verdict::Incorrect(Some(n)) => write!(f, "incorrect@{n}"),
        }
    }
}

/// Execution bookkeeping kept by validator adapters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExecTally {
    /// Number of validate calls issued.
    pub executions: u64,
    /// Abnormal terminations: subject panics in-process, signals for children.
    /// Crashes are findings, not protocol answers; they decode to
    /// `Incorrect` without an index.
    pub crashes: u64,
    /// Child executions that exceeded the wall-clock limit (also decoded to
    /// `Incorrect` without an index, but counted on their own).
    pub timeouts: u64,
}

/// Errors raised while obtaining a verdict.
#[derive(Debug, Error)]
pub enum FeedbackError {
    #[error("failed to spawn {command}: {source}")]
    SpawnFailure {
        command: String,
        source: std::io::Error,
    },
    #[error("subject broke the exit-code protocol: {0}")]
    ProtocolViolation(String),
    #[error("i/o error talking to subject: {0}")]
    Io(#[from] std::io::Error),
}

/// Anything that can render verdicts. Implementations must be deterministic
/// within one campaign: identical input, identical verdict.
///
/// Confined to a single exploration thread at a time; run parallel
/// campaigns with distinct instances.
pub trait Validator {
    fn name(&self) -> &str;

    /// Validate one input. In-process subjects never fail; subprocess
    /// adapters can surface spawn failures and protocol violations.
    fn validate(&mut self, input: &[u8]) -> Result<Verdict, FeedbackError>;

    /// Declared alphabet hint: the byte subset the subject's language is
    /// built from, when the subject cares to say.
    fn alphabet_hint(&self) -> Option<&[u8]> {
        None
    }

    /// Execution counters accumulated so far.
    fn tally(&self) -> ExecTally;
}

/// Adapter running a plain `fn(&[u8]) -> Verdict` as a [`Validator`].
///
/// A panicking subject is recorded as a crash and answered as `Incorrect`
/// without an index: a crash is a finding about the subject, not a parse
/// answer.
pub struct InProcessValidator<F> {
    name: String,
    check: F,
    alphabet_hint: Option<Vec<u8>>,
    tally: ExecTally,
}

impl<F: Fn(&[u8]) -> Verdict> InProcessValidator<F> {
    pub fn new(name: impl Into<String>, check: F) -> Self {
        InProcessValidator {
            name: name.into(),
            check,
            alphabet_hint: None,
            tally: ExecTally::default(),
        }
    }

    pub fn with_alphabet_hint(mut self, hint: Vec<u8>) -> Self {
        self.alphabet_hint = Some(hint);
        self
    }
}

impl<F: Fn(&[u8]) -> Verdict> Validator for InProcessValidator<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn validate(&mut self, input: &[u8]) -> Result<Verdict, FeedbackError> {
        self.tally.executions += 1;
        match panic::catch_unwind(AssertUnwindSafe(|| (self.check)(input))) {
            Ok(verdict) => Ok(verdict),
            Err(_) => {
                self.tally.crashes += 1;
                log::warn!(
                    "subject {} panicked on a {}-byte input (potential subject bug)",
                    self.name,
                    input.len()
                );
                Ok(Verdict::incorrect())
            }
        }
    }

    fn alphabet_hint(&self) -> Option<&[u8]> {
        self.alphabet_hint.as_deref()
    }

    fn tally(&self) -> ExecTally {
        self.tally
    }
}

/// Mapping between child process exit status and [`Verdict`].
///
/// * exit 0: complete
/// * exit 1: incomplete
/// * exit 2: incorrect, no index
/// * exit 3: incorrect, index on the first line of stderr as a decimal
///
/// The index rides on stderr because failure offsets routinely exceed what
/// an 8-bit exit status can carry.
pub struct ExitCodeProtocol;

impl ExitCodeProtocol {
    pub const COMPLETE: i32 = 0;
    pub const INCOMPLETE: i32 = 1;
    pub const INCORRECT: i32 = 2;
    pub const INCORRECT_WITH_INDEX: i32 = 3;

    /// Encode a verdict as (exit status, stderr first line).
    pub fn encode(verdict: Verdict) -> (i32, Option<String>) {
        match verdict {
            Verdict::Complete => (Self::COMPLETE, None),
            Verdict::Incomplete => (Self::INCOMPLETE, None),
            Verdict::Incorrect(None) => (Self::INCORRECT, None),
            Verdict::Incorrect(Some(n)) => (Self::INCORRECT_WITH_INDEX, Some(n.to_string())),
        }
    }

    /// Decode an exit status plus the first stderr line back to a verdict.
    pub fn decode(status: i32, stderr_first_line: Option<&str>) -> Result<Verdict, FeedbackError> {
        match status {
            Self::COMPLETE => Ok(Verdict::Complete),
            Self::INCOMPLETE => Ok(Verdict::Incomplete),
            Self::INCORRECT => Ok(Verdict::incorrect()),
            Self::INCORRECT_WITH_INDEX => {
                let line = stderr_first_line.ok_or_else(|| {
                    FeedbackError::ProtocolViolation(
                        "exit status 3 but no index line on stderr".into(),
                    )
                })?;
                let index: usize = line.trim().parse().map_err(|_| {
                    FeedbackError::ProtocolViolation(format!(
                        "exit status 3 but unparseable index line {line:?}"
                    ))
                })?;
                Ok(Verdict::incorrect_at(index))
            }
            other => Err(FeedbackError::ProtocolViolation(format!(
                "exit status {other} is outside the defined mapping"
            ))),
        }
    }
}

/// How to run an external validator: program, arguments, and the
/// per-execution wall-clock limit.
#[derive(Debug, Clone)]
pub struct SubprocessCommand {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl SubprocessCommand {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        SubprocessCommand {
            program: program.into(),
            args: Vec::new(),
        }
    }

    pub fn arg(mut self, arg: impl Into<String>) -> Self {
        self.args.push(arg.into());
        self
    }

    fn display(&self) -> String {
        let mut s = self.program.display().to_string();
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s
    }
}

/// Default per-execution wall-clock limit for child validators.
pub const DEFAULT_SUBPROCESS_TIMEOUT: Duration = Duration::from_millis(500);

/// Extra time allowed for reaping a killed child before giving up on it.
const REAP_GRACE: Duration = Duration::from_millis(500);

/// Runs an external executable per the exit-code protocol: input on stdin
/// as raw bytes, verdict in the exit status, failure index (when present)
/// as a decimal on the first line of stderr.
pub struct SubprocessValidator {
    command: SubprocessCommand,
    timeout: Duration,
    name: String,
    tally: ExecTally,
}

impl SubprocessValidator {
    pub fn new(command: SubprocessCommand) -> Self {
        let name = command.display();
        SubprocessValidator {
            command,
            timeout: DEFAULT_SUBPROCESS_TIMEOUT,
            name,
            tally: ExecTally::default(),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn run_child(&mut self, input: &[u8]) -> Result<Verdict, FeedbackError> {
        let mut child = Command::new(&self.command.program)
            .args(&self.command.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| FeedbackError::SpawnFailure {
                command: self.name.clone(),
                source,
            })?;

        // A child that exits before draining stdin yields a broken pipe;
        // that is a normal verdict path, not an error.
        if let Some(mut stdin) = child.stdin.take() {
            match stdin.write_all(input) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                Err(e) => return Err(e.into()),
            }
        }

        let status = match wait_with_deadline(&mut child, self.timeout)? {
            Some(status) => status,
            None => {
                // Timed out: kill, reap, answer incorrect.
                self.tally.timeouts += 1;
                child.kill().ok();
                if wait_with_deadline(&mut child, REAP_GRACE)?.is_none() {
                    log::warn!("child {} survived SIGKILL past the reap grace", self.name);
                }
                return Ok(Verdict::incorrect());
            }
        };

        let mut stderr = String::new();
        if let Some(mut pipe) = child.stderr.take() {
            pipe.read_to_string(&mut stderr).ok();
        }
        let first_line = stderr.lines().next();

        let code = match status.code() {
            Some(code) => code,
            None => {
                // Killed by a signal: a crash finding, not a protocol answer.
                self.tally.crashes += 1;
                return Ok(Verdict::incorrect());
            }
        };

        let verdict = ExitCodeProtocol::decode(code, first_line)?;
        if let Verdict::Incorrect(Some(n)) = verdict {
            if n > input.len() {
                return Err(FeedbackError::ProtocolViolation(format!(
                    "failure index {n} exceeds input length {}",
                    input.len()
                )));
            }
        }
        Ok(verdict)
    }
}

impl Validator for SubprocessValidator {
    fn name(&self) -> &str {
        &self.name
    }

    fn validate(&mut self, input: &[u8]) -> Result<Verdict, FeedbackError> {
        self.tally.executions += 1;
        self.run_child(input)
    }

    fn tally(&self) -> ExecTally {
        self.tally
    }
}

fn wait_with_deadline(
    child: &mut Child,
    limit: Duration,
) -> std::io::Result<Option<std::process::ExitStatus>> {
    let deadline = Instant::now() + limit;
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(Some(status));
        }
        if Instant::now() >= deadline {
            return Ok(None);
        }
        std::thread::sleep(Duration::from_millis(1));
    }
}

/// One prefix-consistency violation: a sample judged complete or incomplete
/// whose proper prefix was judged incorrect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformanceViolation {
    pub sample: Vec<u8>,
    pub sample_verdict: Verdict,
    pub prefix_len: usize,
    pub prefix_verdict: Verdict,
}

/// Outcome of [`check_conformance`].
#[derive(Debug, Default)]
pub struct ConformanceReport {
    pub samples_checked: usize,
    pub prefixes_checked: u64,
    pub violations: Vec<ConformanceViolation>,
}

impl ConformanceReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the prefix-consistency contract: if a sample validates complete or
/// incomplete, every proper prefix must validate incomplete or complete.
/// Violations are data, not errors.
pub fn check_conformance(
    validator: &mut dyn Validator,
    samples: &[Vec<u8>],
) -> Result<ConformanceReport, FeedbackError> {
    let mut report = ConformanceReport::default();
    for sample in samples {
        report.samples_checked += 1;
        let sample_verdict = validator.validate(sample)?;
        if sample_verdict.is_incorrect() {
            continue;
        }
        for prefix_len in 0..sample.len() {
            report.prefixes_checked += 1;
            let prefix_verdict = validator.validate(&sample[..prefix_len])?;
            if prefix_verdict.is_incorrect() {
                report.violations.push(ConformanceViolation {
                    sample: sample.clone(),
                    sample_verdict,
                    prefix_len,
                    prefix_verdict,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subjects;
    use proptest::prelude::*;

    #[test]
    fn hello_examples_through_in_process_adapter() {
        let mut v = InProcessValidator::new("hello", subjects::hello_validate);
        assert_eq!(v.validate(b"HELLO").unwrap(), Verdict::Complete);
        assert_eq!(v.validate(b"").unwrap(), Verdict::Incomplete);
        assert_eq!(v.validate(b"X").unwrap(), Verdict::incorrect());
        assert_eq!(v.tally().executions, 3);
        assert_eq!(v.tally().crashes, 0);
    }

    #[test]
    fn panicking_subject_is_a_crash_not_an_error() {
        let mut v = InProcessValidator::new("boom", |input: &[u8]| {
            if input == b"!" {
                panic!("subject bug");
            }
            Verdict::Incomplete
        });
        assert_eq!(v.validate(b"ok").unwrap(), Verdict::Incomplete);
        assert_eq!(v.validate(b"!").unwrap(), Verdict::incorrect());
        let tally = v.tally();
        assert_eq!(tally.executions, 2);
        assert_eq!(tally.crashes, 1);
    }

    #[test]
    fn exit_code_mapping_matches_protocol_definition() {
        assert_eq!(
            ExitCodeProtocol::decode(0, None).unwrap(),
            Verdict::Complete
        );
        assert_eq!(
            ExitCodeProtocol::decode(1, None).unwrap(),
            Verdict::Incomplete
        );
        assert_eq!(
            ExitCodeProtocol::decode(2, None).unwrap(),
            Verdict::incorrect()
        );
        assert_eq!(
            ExitCodeProtocol::decode(3, Some("7")).unwrap(),
            Verdict::incorrect_at(7)
        );
    }

    #[test]
    fn decode_rejects_unmapped_statuses_and_bad_index_lines() {
        assert!(matches!(
            ExitCodeProtocol::decode(4, None),
            Err(FeedbackError::ProtocolViolation(_))
        ));
        assert!(matches!(
            ExitCodeProtocol::decode(3, None),
            Err(FeedbackError::ProtocolViolation(_))
        ));
        assert!(matches!(
            ExitCodeProtocol::decode(3, Some("not a number")),
            Err(FeedbackError::ProtocolViolation(_))
        ));
    }

    proptest! {
        // encode∘decode is the identity over the representable verdict space.
        #[test]
        fn exit_code_protocol_round_trips(verdict in verdict_strategy()) {
            let (status, line) = ExitCodeProtocol::encode(verdict);
            let decoded = ExitCodeProtocol::decode(status, line.as_deref()).unwrap();
            prop_assert_eq!(decoded, verdict);
            let (status2, line2) = ExitCodeProtocol::encode(decoded);
            prop_assert_eq!(status2, status);
            prop_assert_eq!(line2, line);
        }
    }

    fn verdict_strategy() -> impl Strategy<Value = Verdict> {
        prop_oneof![
            Just(Verdict::Complete),
            Just(Verdict::Incomplete),
            Just(Verdict::incorrect()),
            (0usize..100_000).prop_map(Verdict::incorrect_at),
        ]
    }

    #[test]
    fn conformance_clean_on_hello_golden() {
        // Oracle: enumerate all five prefixes of HELLO by hand; each is a
        // length shortfall, so each must be incomplete.
        let mut v = InProcessValidator::new("hello", subjects::hello_validate);
        for len in 0..5 {
            assert_eq!(v.validate(&b"HELLO"[..len]).unwrap(), Verdict::Incomplete);
        }
        let report = check_conformance(&mut v, &[b"HELLO".to_vec()]).unwrap();
        assert!(report.is_clean());
        assert_eq!(report.prefixes_checked, 5);
    }

    #[test]
    fn conformance_empty_sample_is_vacuous() {
        // Complete for "" and incorrect for "A": the empty string has no
        // proper prefixes, so nothing to flag.
        let mut v = InProcessValidator::new("odd", |input: &[u8]| {
            if input.is_empty() {
                Verdict::Complete
            } else {
                Verdict::incorrect()
            }
        });
        let report = check_conformance(&mut v, &[Vec::new()]).unwrap();
        assert!(report.is_clean());
        assert_eq!(report.prefixes_checked, 0);
    }

    #[test]
    fn conformance_flags_incorrect_prefix_of_incomplete_sample() {
        let mut v = InProcessValidator::new("broken", |input: &[u8]| match input {
            b"AB" => Verdict::Incomplete,
            b"A" => Verdict::incorrect(),
            _ => Verdict::Incomplete,
        });
        let report = check_conformance(&mut v, &[b"AB".to_vec()]).unwrap();
        assert_eq!(report.violations.len(), 1);
        let v0 = &report.violations[0];
        assert_eq!(v0.prefix_len, 1);
        assert_eq!(v0.prefix_verdict, Verdict::incorrect());
    }
}
