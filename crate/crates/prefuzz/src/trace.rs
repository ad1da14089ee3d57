//! Line-oriented exploration trace, format v1.
//!
//! One record per line, first field is the record kind:
//!
//! ```text
//! a <attempt-index> <seed>                     campaign attempt header
//! i <verdict>                                  start-prefix validation
//! v <prefix-len> <symbol-hex> <verdict> <transition>
//! b <from-len> <to-len> <popped-symbol-hex>    one backtrack pop
//! r <restart-index> <abandoned-len>            max-length restart
//! ```
//!
//! Verdicts print as `complete`, `incomplete`, `incorrect` or
//! `incorrect@N`; transitions as `done`, `extended`, `rejected` or
//! `rewound@N+K` (cut position N, repair symbol length K). The format is
//! stable so traces can be diffed across runs.

use std::io::{self, Write};

use crate::explorer::{Symbol, Transition};
use crate::feedback::Verdict;

pub fn attempt_header(w: &mut dyn Write, index: u64, seed: u64) -> io::Result<()> {
    writeln!(w, "a {index} {seed}")
}

pub fn initial(w: &mut dyn Write, verdict: Verdict) -> io::Result<()> {
    writeln!(w, "i {verdict}")
}

pub fn validation(
    w: &mut dyn Write,
    prefix_len: usize,
    symbol: &Symbol,
    verdict: Verdict,
    transition: &Transition,
) -> io::Result<()> {
    writeln!(w, "v {prefix_len} {symbol} {verdict} {transition}")
}

pub fn backtrack(
    w: &mut dyn Write,
    from_len: usize,
    to_len: usize,
    popped: &Symbol,
) -> io::Result<()> {
    writeln!(w, "b {from_len} {to_len} {popped}")
}

pub fn restart(w: &mut dyn Write, restart_index: u64, abandoned_len: usize) -> io::Result<()> {
    writeln!(w, "r {restart_index} {abandoned_len}")
}
