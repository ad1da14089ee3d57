//! prefuzz: a black-box fuzzer that synthesizes valid inputs for parsers
//! using nothing but failure feedback.
//!
//! A subject answers each candidate input with one of three verdicts:
//! complete, incomplete, or incorrect (optionally with the byte offset
//! where parsing failed). The engine enumerates candidate symbols position
//! by position, remembers what each position has already rejected,
//! backtracks when a frontier is exhausted, and applies bounded multi-byte
//! repair when failure indices overapproximate. No instrumentation, no
//! coverage, no grammar: only verdicts.
//!
//! The crate ships the engine ([`explorer`]), the verdict protocol and
//! subprocess adapter ([`feedback`]), token-trie lexer diagnostics
//! ([`trie`]), a corpus of miniature subjects ([`subjects`]), and a
//! campaign harness with corpus deduplication and a pure-random baseline
//! ([`campaign`]).
//!
//! ```
//! use prefuzz::explorer::{generate, ExplorerConfig};
//! use prefuzz::feedback::{InProcessValidator, Verdict};
//!
//! let mut validator = InProcessValidator::new("ab", |input: &[u8]| match input {
//!     b"ab" => Verdict::Complete,
//!     b"" | b"a" => Verdict::Incomplete,
//!     _ => Verdict::incorrect(),
//! });
//! let config = ExplorerConfig { rng_seed: 1, ..ExplorerConfig::default() };
//! let found = generate(&mut validator, &config, b"").unwrap();
//! assert_eq!(found.input, b"ab");
//! ```

pub mod alphabet;
pub mod campaign;
pub mod cli;
pub mod explorer;
pub mod feedback;
pub mod subjects;
pub mod trace;
pub mod trie;

pub use explorer::{generate, generate_with, ExplorerConfig, Generated};
pub use feedback::{Validator, Verdict};
