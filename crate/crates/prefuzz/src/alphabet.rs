//! Candidate-byte alphabets for exploration.

/// Every byte value, 0x00..=0xff, in ascending order.
pub fn all_bytes() -> Vec<u8> {
    (0u8..=255).collect()
}

/// The printable preset: exactly 100 bytes.
///
/// Whitespace 0x09..=0x0d (tab, newline, vertical tab, form feed, carriage
/// return) plus the visible ASCII range 0x20..=0x7e including space. This
/// is the classic 100-character printable set of textual fuzzing targets.
pub const PRINTABLE: [u8; 100] = build_printable();

const fn build_printable() -> [u8; 100] {
    let mut out = [0u8; 100];
    let mut i = 0;
    let mut b = 0x09u8;
    while b <= 0x0d {
        out[i] = b;
        i += 1;
        b += 1;
    }
    let mut b = 0x20u8;
    while b <= 0x7e {
        out[i] = b;
        i += 1;
        b += 1;
    }
    out
}

/// Named alphabet presets used by the built-in subjects and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphabetPreset {
    /// All 256 byte values.
    Bytes,
    /// The 100-byte printable set.
    Printable,
}

impl AlphabetPreset {
    pub fn bytes(self) -> Vec<u8> {
        match self {
            AlphabetPreset::Bytes => all_bytes(),
            AlphabetPreset::Printable => PRINTABLE.to_vec(),
        }
    }
}
