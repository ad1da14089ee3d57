//! The core search loop: grow a valid prefix one symbol at a time until the
//! subject answers complete.
//!
//! The engine keeps, per accepted symbol, the set of symbols already tried
//! and rejected at that position (the seen-set). A frontier whose choices
//! are exhausted triggers backtracking: the most recent symbol is popped
//! and its position's memory restored. An incorrect verdict carrying a
//! failure index rewinds the prefix to that index and widens the candidate
//! alphabet to multi-byte repair sequences, bounded by `oapprox`, since
//! reported indices may overapproximate the true divergence point.

use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;
use thiserror::Error;

use crate::feedback::{FeedbackError, Validator, Verdict};
use crate::trace;

/// Hard upper bound on `oapprox`: repair sequences never exceed two bytes,
/// which keeps the expanded alphabet within `|α| + |α|²`.
pub const OAPPROX_CAP: u8 = 2;

/// Default cap on how many symbols [`symbols`] may enumerate.
pub const DEFAULT_SYMBOL_BUDGET: u64 = 1 << 20;

/// Default per-attempt validation budget.
pub const DEFAULT_MAX_VALIDATIONS: u64 = 5_000_000;

/// Default cap on max-length restarts within one `generate` call.
pub const DEFAULT_MAX_RESTARTS: u64 = 1_000;

/// Default byte budget per generated input.
pub const DEFAULT_MAX_LEN: usize = 1_000;

/// A byte sequence appended in one exploration step. Single bytes normally;
/// up to `oapprox` bytes while repairing an overapproximated failure index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    bytes: SmallVec<[u8; 2]>,
}

impl Symbol {
    pub fn byte(b: u8) -> Self {
        Symbol {
            bytes: SmallVec::from_slice(&[b]),
        }
    }

    pub fn pair(a: u8, b: u8) -> Self {
        Symbol {
            bytes: SmallVec::from_slice(&[a, b]),
        }
    }

    /// Build a symbol from raw bytes; `None` if empty.
    pub fn from_bytes(bytes: &[u8]) -> Option<Self> {
        if bytes.is_empty() {
            return None;
        }
        Some(Symbol {
            bytes: SmallVec::from_slice(bytes),
        })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bytes {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({self})")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("alphabet contains duplicate byte 0x{0:02x}")]
    DuplicateAlphabetByte(u8),
    #[error("oapprox {0} out of range 1..={OAPPROX_CAP}")]
    OapproxOutOfRange(u8),
    #[error("max_len must be at least 1")]
    ZeroMaxLen,
}

/// Which budget an attempt ran out of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKind {
    Validations,
    Restarts,
    Deadline,
}

#[derive(Debug, Error)]
pub enum ExplorerError {
    /// Backtracking was requested at the start prefix: the whole reachable
    /// space under the current alphabet is consumed.
    #[error("search space exhausted after {validations} validations and {restarts} restarts")]
    SearchExhausted { validations: u64, restarts: u64 },
    #[error("attempt budget exhausted ({kind:?}) after {validations} validations and {restarts} restarts")]
    AttemptBudgetExhausted {
        kind: BudgetKind,
        validations: u64,
        restarts: u64,
    },
    #[error("start prefix validated as {verdict}, expected incomplete")]
    InvalidStartPrefix { verdict: Verdict },
    /// The subject reported a failure index beyond the validated input.
    #[error("failure index {index} exceeds validated input length {input_len}")]
    IndexOutOfRange { index: usize, input_len: usize },
    #[error("symbol enumeration would produce {count} symbols, over the budget of {budget}")]
    SymbolBudgetExceeded { count: u128, budget: u64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Feedback(#[from] FeedbackError),
    #[error("trace write failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Exploration parameters. All randomness flows from `rng_seed`.
#[derive(Debug, Clone)]
pub struct ExplorerConfig {
    /// Ordered candidate bytes; must be duplicate-free.
    pub alphabet: Vec<u8>,
    /// Maximum repair-sequence length applied to reported failure indices.
    /// 1 means the index is trusted as exact.
    pub oapprox: u8,
    /// Byte budget per attempt; longer prefixes restart the attempt.
    pub max_len: usize,
    pub rng_seed: u64,
    /// Validation budget per `generate` call.
    pub max_validations: u64,
    /// Restart budget per `generate` call.
    pub max_restarts: u64,
}

impl Default for ExplorerConfig {
    fn default() -> Self {
        ExplorerConfig {
            alphabet: crate::alphabet::all_bytes(),
            oapprox: 1,
            max_len: DEFAULT_MAX_LEN,
            rng_seed: 0,
            max_validations: DEFAULT_MAX_VALIDATIONS,
            max_restarts: DEFAULT_MAX_RESTARTS,
        }
    }
}

impl ExplorerConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        if self.alphabet.is_empty() {
            return Err(ConfigError::EmptyAlphabet);
        }
        let mut present = [false; 256];
        for &b in &self.alphabet {
            if present[b as usize] {
                return Err(ConfigError::DuplicateAlphabetByte(b));
            }
            present[b as usize] = true;
        }
        if self.oapprox < 1 || self.oapprox > OAPPROX_CAP {
            return Err(ConfigError::OapproxOutOfRange(self.oapprox));
        }
        if self.max_len == 0 {
            return Err(ConfigError::ZeroMaxLen);
        }
        Ok(())
    }
}

/// Enumerate every byte sequence of length 1..=`max_len` over `base`, in
/// length-major order, lexicographic by `base` order within each length.
/// Count is Σ |base|^r for r in 1..=max_len.
pub fn symbols(base: &[u8], max_len: u32) -> Result<Vec<Symbol>, ExplorerError> {
    symbols_within(base, max_len, DEFAULT_SYMBOL_BUDGET)
}

/// [`symbols`] with an explicit enumeration budget.
pub fn symbols_within(
    base: &[u8],
    max_len: u32,
    budget: u64,
) -> Result<Vec<Symbol>, ExplorerError> {
    let count = symbol_count(base.len(), max_len);
    if count > budget as u128 {
        return Err(ExplorerError::SymbolBudgetExceeded { count, budget });
    }
    let mut out = Vec::with_capacity(count as usize);
    for r in 1..=max_len as usize {
        // Odometer over indices into `base`; the last position advances
        // fastest, giving lexicographic order.
        let mut indices = vec![0usize; r];
        'level: loop {
            let mut bytes = SmallVec::with_capacity(r);
            for &i in &indices {
                bytes.push(base[i]);
            }
            out.push(Symbol { bytes });
            let mut pos = r;
            loop {
                if pos == 0 {
                    break 'level;
                }
                pos -= 1;
                indices[pos] += 1;
                if indices[pos] < base.len() {
                    break;
                }
                indices[pos] = 0;
            }
        }
    }
    Ok(out)
}

fn symbol_count(base_len: usize, max_len: u32) -> u128 {
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..max_len {
        power = power.saturating_mul(base_len as u128);
        total = total.saturating_add(power);
    }
    total
}

/// Uniformly random pick from a nonempty candidate list. Identical seed and
/// call sequence give identical selections.
pub fn choose_symbol<'a, R: Rng + ?Sized>(choices: &'a [Symbol], rng: &mut R) -> &'a Symbol {
    assert!(!choices.is_empty(), "choose_symbol requires choices");
    &choices[rng.gen_range(0..choices.len())]
}

/// One accepted extension: the symbol appended and the set of symbols that
/// were tried and rejected at that position before it.
#[derive(Debug, Clone)]
struct Step {
    symbol: Symbol,
    seen: HashSet<Symbol>,
}

/// State transition produced by applying a verdict at the frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    /// The tried extension completed an accepted input.
    Done,
    /// The tried extension is a valid prefix; the frontier advanced.
    Extended,
    /// The tried extension was rejected with no index information.
    Rejected,
    /// The prefix was cut back to `cut` and the candidate alphabet widened
    /// to repair sequences of up to `repair_len` bytes.
    Rewound { cut: usize, repair_len: u8 },
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::Done => write!(f, "done"),
            Transition::Extended => write!(f, "extended"),
            Transition::Rejected => write!(f, "rejected"),
            Transition::Rewound { cut, repair_len } => write!(f, "rewound@{cut}+{repair_len}"),
        }
    }
}

/// The exploration frontier: current prefix, one seen-set per accepted
/// symbol, the pending seen-set at the frontier, and the active candidate
/// alphabet.
pub struct ExplorationState {
    alphabet: Vec<u8>,
    oapprox: u8,
    start_len: usize,
    prefix: Vec<u8>,
    steps: Vec<Step>,
    pending: HashSet<Symbol>,
    active: Vec<Symbol>,
    active_repair_len: u8,
    choices: Vec<Symbol>,
    last_pick: Option<usize>,
    // Enumerated candidate sets per repair length, built once per state.
    singles: Vec<Symbol>,
    repair_cache: Option<Vec<Symbol>>,
}

impl ExplorationState {
    pub fn new(config: &ExplorerConfig) -> Result<Self, ExplorerError> {
        Self::with_start(config, &[])
    }

    pub fn with_start(config: &ExplorerConfig, start_prefix: &[u8]) -> Result<Self, ExplorerError> {
        config.check()?;
        let singles: Vec<Symbol> = config.alphabet.iter().copied().map(Symbol::byte).collect();
        Ok(ExplorationState {
            alphabet: config.alphabet.clone(),
            oapprox: config.oapprox,
            start_len: start_prefix.len(),
            prefix: start_prefix.to_vec(),
            steps: Vec::new(),
            pending: HashSet::new(),
            choices: singles.clone(),
            active: singles.clone(),
            active_repair_len: 1,
            last_pick: None,
            singles,
            repair_cache: None,
        })
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    /// Candidates still available at the frontier.
    pub fn choices_left(&self) -> usize {
        self.choices.len()
    }

    /// Size of the active candidate alphabet (before seen-set filtering).
    pub fn active_alphabet_len(&self) -> usize {
        self.active.len()
    }

    pub fn pending_contains(&self, symbol: &Symbol) -> bool {
        self.pending.contains(symbol)
    }

    /// Pick a uniformly random remaining candidate, or `None` when the
    /// frontier is exhausted and backtracking is due.
    pub fn pick_symbol<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Symbol> {
        if self.choices.is_empty() {
            return None;
        }
        let idx = rng.gen_range(0..self.choices.len());
        self.last_pick = Some(idx);
        Some(self.choices[idx].clone())
    }

    /// Apply the subject's verdict for `prefix + tried`.
    pub fn apply_verdict(
        &mut self,
        tried: &Symbol,
        verdict: Verdict,
    ) -> Result<Transition, ExplorerError> {
        debug_assert!(!self.pending.contains(tried));
        let transition = match verdict {
            Verdict::Complete => Transition::Done,
            Verdict::Incomplete => {
                self.prefix.extend_from_slice(tried.as_bytes());
                self.steps.push(Step {
                    symbol: tried.clone(),
                    seen: std::mem::take(&mut self.pending),
                });
                // Back to single bytes: repair alphabets apply only at the
                // position the failure index named.
                self.reset_active_to_singles();
                Transition::Extended
            }
            Verdict::Incorrect(None) => {
                self.remove_choice(tried);
                self.pending.insert(tried.clone());
                Transition::Rejected
            }
            Verdict::Incorrect(Some(index)) => {
                let tried_len = self.prefix.len() + tried.len();
                if index > tried_len {
                    return Err(ExplorerError::IndexOutOfRange {
                        index,
                        input_len: tried_len,
                    });
                }
                let repair = (tried_len - index).min(self.oapprox as usize) as u8;
                if index >= self.prefix.len() {
                    // Cut at or inside the tried symbol: the frontier stays
                    // where it is and keeps its memory.
                    if repair == self.active_repair_len {
                        self.remove_choice(tried);
                        self.pending.insert(tried.clone());
                    } else {
                        self.pending.insert(tried.clone());
                        self.set_active(repair)?;
                    }
                    Transition::Rewound {
                        cut: self.prefix.len(),
                        repair_len: repair,
                    }
                } else {
                    // Never cut into the caller-supplied start prefix.
                    let cut = index.max(self.start_len);
                    self.truncate_to(cut);
                    self.pending.insert(tried.clone());
                    self.set_active(repair)?;
                    Transition::Rewound {
                        cut,
                        repair_len: repair,
                    }
                }
            }
        };
        self.last_pick = None;
        Ok(transition)
    }

    /// Pop the most recent step, restoring its seen-set with the popped
    /// symbol added, and keep popping while no choices remain. Errors with
    /// `SearchExhausted` once there is nothing left to pop.
    pub fn backtrack(&mut self) -> Result<Vec<Symbol>, ExplorerError> {
        let mut popped = Vec::new();
        loop {
            let step = match self.steps.pop() {
                Some(step) => step,
                None => {
                    return Err(ExplorerError::SearchExhausted {
                        validations: 0,
                        restarts: 0,
                    })
                }
            };
            self.prefix.truncate(self.prefix.len() - step.symbol.len());
            self.pending = step.seen;
            self.pending.insert(step.symbol.clone());
            popped.push(step.symbol);
            self.rebuild_choices();
            if !self.choices.is_empty() {
                return Ok(popped);
            }
        }
    }

    fn reset_active_to_singles(&mut self) {
        self.active = self.singles.clone();
        self.active_repair_len = 1;
        self.rebuild_choices();
    }

    fn set_active(&mut self, repair_len: u8) -> Result<(), ExplorerError> {
        self.active = match repair_len {
            0 => Vec::new(),
            1 => self.singles.clone(),
            r => {
                debug_assert_eq!(r, OAPPROX_CAP, "repair length is capped at {OAPPROX_CAP}");
                if self.repair_cache.is_none() {
                    self.repair_cache = Some(symbols(&self.alphabet, r as u32)?);
                }
                self.repair_cache.clone().expect("just filled")
            }
        };
        self.active_repair_len = repair_len;
        self.rebuild_choices();
        Ok(())
    }

    fn rebuild_choices(&mut self) {
        self.choices = self
            .active
            .iter()
            .filter(|s| !self.pending.contains(s))
            .cloned()
            .collect();
        self.last_pick = None;
    }

    fn remove_choice(&mut self, tried: &Symbol) {
        if let Some(idx) = self.last_pick.take() {
            if self.choices.get(idx) == Some(tried) {
                self.choices.swap_remove(idx);
                return;
            }
        }
        if let Some(idx) = self.choices.iter().position(|s| s == tried) {
            self.choices.swap_remove(idx);
        }
    }

    /// Cut the prefix back to `cut` bytes, dropping the steps beyond it.
    /// A step boundary restores that step's seen-set; a cut through the
    /// middle of a symbol truncates it and discards its seen-set, since
    /// whole-symbol rejections say nothing about the fragment.
    fn truncate_to(&mut self, cut: usize) {
        debug_assert!(cut >= self.start_len && cut < self.prefix.len());
        let mut pos = self.start_len;
        let mut k = 0;
        while k < self.steps.len() {
            let end = pos + self.steps[k].symbol.len();
            if cut < end {
                break;
            }
            pos = end;
            k += 1;
        }
        if cut == pos {
            let dropped = std::mem::replace(
                &mut self.steps[k],
                Step {
                    symbol: Symbol::byte(0),
                    seen: HashSet::new(),
                },
            );
            self.steps.truncate(k);
            self.pending = dropped.seen;
            self.pending.insert(dropped.symbol);
        } else {
            let keep = cut - pos;
            let fragment = Symbol::from_bytes(&self.steps[k].symbol.as_bytes()[..keep])
                .expect("fragment is nonempty");
            self.steps[k] = Step {
                symbol: fragment,
                seen: HashSet::new(),
            };
            self.steps.truncate(k + 1);
            self.pending = HashSet::new();
        }
        self.prefix.truncate(cut);
    }

    #[cfg(test)]
    fn steps_concat(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for step in &self.steps {
            out.extend_from_slice(step.symbol.as_bytes());
        }
        out
    }
}

/// Optional instrumentation for one `generate` call.
#[derive(Default)]
pub struct GenerateHooks<'a> {
    /// Receives the trace lines described in [`crate::trace`].
    pub trace: Option<&'a mut dyn std::io::Write>,
    /// Wall-clock cutoff; checked between validations.
    pub deadline: Option<Instant>,
}

/// Outcome of a successful `generate` call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    /// Input the subject answered `Complete` for.
    pub input: Vec<u8>,
    /// Validate calls issued, including the one that completed.
    pub validations: u64,
    /// Attempt restarts forced by the byte budget.
    pub restarts: u64,
    /// Individual backtrack pops.
    pub backtracks: u64,
}

struct Counters {
    validations: u64,
    restarts: u64,
    backtracks: u64,
}

/// Search for an input the validator accepts as complete.
///
/// All randomness flows from `config.rng_seed`; identical validator, config
/// and seed give an identical result and validation count. A prefix that
/// would exceed `config.max_len` abandons the attempt and restarts from
/// `start_prefix` with fresh state.
pub fn generate(
    validator: &mut dyn Validator,
    config: &ExplorerConfig,
    start_prefix: &[u8],
) -> Result<Generated, ExplorerError> {
    generate_with(validator, config, start_prefix, GenerateHooks::default())
}

/// [`generate`] with tracing and deadline hooks.
pub fn generate_with(
    validator: &mut dyn Validator,
    config: &ExplorerConfig,
    start_prefix: &[u8],
    mut hooks: GenerateHooks<'_>,
) -> Result<Generated, ExplorerError> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut counters = Counters {
        validations: 0,
        restarts: 0,
        backtracks: 0,
    };

    // A nonempty start prefix must itself elicit incomplete. An empty start
    // that is already complete is returned as-is: that validation doubles
    // as the soundness check.
    let verdict = run_validate(validator, start_prefix, config, &mut counters)?;
    if let Some(w) = hooks.trace.as_deref_mut() {
        trace::initial(w, verdict)?;
    }
    match verdict {
        Verdict::Complete if start_prefix.is_empty() => {
            return Ok(Generated {
                input: Vec::new(),
                validations: counters.validations,
                restarts: 0,
                backtracks: 0,
            })
        }
        Verdict::Incomplete => {}
        // An empty start judged incorrect leaves nothing to trust, but
        // extensions may still succeed on non-conforming subjects.
        Verdict::Incorrect(_) if start_prefix.is_empty() => {}
        _ => return Err(ExplorerError::InvalidStartPrefix { verdict }),
    }

    let mut state = ExplorationState::with_start(config, start_prefix)?;
    loop {
        let symbol = loop {
            match state.pick_symbol(&mut rng) {
                Some(symbol) => break symbol,
                None => {
                    let from_len = state.prefix().len();
                    let popped = state.backtrack().map_err(|e| match e {
                        ExplorerError::SearchExhausted { .. } => ExplorerError::SearchExhausted {
                            validations: counters.validations,
                            restarts: counters.restarts,
                        },
                        other => other,
                    })?;
                    counters.backtracks += popped.len() as u64;
                    if let Some(w) = hooks.trace.as_deref_mut() {
                        let mut at = from_len;
                        for sym in &popped {
                            trace::backtrack(w, at, at - sym.len(), sym)?;
                            at -= sym.len();
                        }
                    }
                }
            }
        };

        if state.prefix().len() + symbol.len() > config.max_len {
            counters.restarts += 1;
            if counters.restarts > config.max_restarts {
                return Err(ExplorerError::AttemptBudgetExhausted {
                    kind: BudgetKind::Restarts,
                    validations: counters.validations,
                    restarts: counters.restarts,
                });
            }
            if let Some(w) = hooks.trace.as_deref_mut() {
                trace::restart(w, counters.restarts, state.prefix().len())?;
            }
            state = ExplorationState::with_start(config, start_prefix)?;
            continue;
        }

        if let Some(deadline) = hooks.deadline {
            if Instant::now() >= deadline {
                return Err(ExplorerError::AttemptBudgetExhausted {
                    kind: BudgetKind::Deadline,
                    validations: counters.validations,
                    restarts: counters.restarts,
                });
            }
        }

        let frontier_len = state.prefix.len();
        state.prefix.extend_from_slice(symbol.as_bytes());
        let verdict = run_validate(validator, &state.prefix, config, &mut counters)?;
        state.prefix.truncate(frontier_len);

        let transition = state.apply_verdict(&symbol, verdict)?;
        if let Some(w) = hooks.trace.as_deref_mut() {
            trace::validation(w, frontier_len, &symbol, verdict, &transition)?;
        }
        if transition == Transition::Done {
            let mut input = state.prefix;
            input.extend_from_slice(symbol.as_bytes());
            return Ok(Generated {
                input,
                validations: counters.validations,
                restarts: counters.restarts,
                backtracks: counters.backtracks,
            });
        }
    }
}

fn run_validate(
    validator: &mut dyn Validator,
    input: &[u8],
    config: &ExplorerConfig,
    counters: &mut Counters,
) -> Result<Verdict, ExplorerError> {
    if counters.validations >= config.max_validations {
        return Err(ExplorerError::AttemptBudgetExhausted {
            kind: BudgetKind::Validations,
            validations: counters.validations,
            restarts: counters.restarts,
        });
    }
    counters.validations += 1;
    Ok(validator.validate(input)?)
}
