//! Built-in validators, each a miniature of one failure-feedback pattern:
//! immediate per-byte checks, chunked reads, failure-index reporting,
//! length-delimited fields, line-oriented formats, and trie-backed lexers
//! in front of recursive-descent parsers.
//!
//! The grammars are documented in `docs/subjects.md`. Every subject is a
//! pure function of its input and is also runnable as a standalone
//! executable speaking the exit-code protocol (see the `prefuzz-subject`
//! binary).

mod csv;
mod exact;
mod hello;
mod ini;
mod jpeg;
mod json;
mod length_field;
mod tinyc;

pub use csv::csv_validate;
pub use exact::{ExactString, SingleTokenLexer};
pub use hello::hello_validate;
pub use ini::ini_validate;
pub use jpeg::{jpeg_marker_validate, jpeg_marker_validate_indexed};
pub use json::json_subset_validate;
pub use length_field::length_field_validate;
pub use tinyc::tinyc_subset_validate;

use crate::alphabet::AlphabetPreset;
use crate::feedback::{InProcessValidator, Verdict};

/// One registry entry: a named validator plus its preferred alphabet and a
/// few known-accepted inputs used by conformance checks.
pub struct BuiltinSubject {
    pub name: &'static str,
    pub summary: &'static str,
    pub validate: fn(&[u8]) -> Verdict,
    pub alphabet: AlphabetPreset,
    pub goldens: &'static [&'static [u8]],
}

impl BuiltinSubject {
    pub fn validator(&self) -> InProcessValidator<fn(&[u8]) -> Verdict> {
        InProcessValidator::new(self.name, self.validate)
            .with_alphabet_hint(self.alphabet.bytes())
    }
}

/// The subject registry. Names are unique; order is presentation order.
pub const SUBJECTS: &[BuiltinSubject] = &[
    BuiltinSubject {
        name: "hello",
        summary: "accepts exactly HELLO; bytes 3-4 compared as one chunk",
        validate: hello_validate,
        alphabet: AlphabetPreset::Printable,
        goldens: &[b"HELLO"],
    },
    BuiltinSubject {
        name: "jpeg_marker",
        summary: "two-byte marker chunks, SOI APP0 EOI framing, no failure index",
        validate: jpeg_marker_validate,
        alphabet: AlphabetPreset::Bytes,
        goldens: &[&[0xff, 0xd8, 0xff, 0xe0, 0xff, 0xd9]],
    },
    BuiltinSubject {
        name: "jpeg_marker_indexed",
        summary: "marker chunks with the failure index of the offending chunk",
        validate: jpeg_marker_validate_indexed,
        alphabet: AlphabetPreset::Bytes,
        goldens: &[&[0xff, 0xd8, 0xff, 0xe0, 0xff, 0xd9]],
    },
    BuiltinSubject {
        name: "length_field",
        summary: "big-endian length prefix followed by exactly that many bytes",
        validate: length_field_validate,
        alphabet: AlphabetPreset::Bytes,
        goldens: &[&[0x00, 0x00], &[0x00, 0x02, 0xaa, 0xbb], &[0x00, 0x01, 0xff]],
    },
    BuiltinSubject {
        name: "ini",
        summary: "line-oriented [section] headers and free-form lines",
        validate: ini_validate,
        alphabet: AlphabetPreset::Printable,
        goldens: &[b"a=1\n", b"[sec]\nkey=value\n", b"\n"],
    },
    BuiltinSubject {
        name: "csv",
        summary: "any byte lines; complete once newline-terminated, never incorrect",
        validate: csv_validate,
        alphabet: AlphabetPreset::Printable,
        goldens: &[b"a,b,c\n", b"\n", b"x\ny\n"],
    },
    BuiltinSubject {
        name: "json_subset",
        summary: "object/array/keyword documents; trie-lexed true/false/null; no index",
        validate: json_subset_validate,
        alphabet: AlphabetPreset::Printable,
        goldens: &[
            b"[{}]",
            b"true",
            b"[]",
            b"{\"a\":1}",
            b"[1,2,[\"x\"],null]",
            b"{\"k\":\"v\",\"n\":-3.5}",
        ],
    },
    BuiltinSubject {
        name: "tinyc_subset",
        summary: "trie-lexed statements; failure index at the offending token",
        validate: tinyc_subset_validate,
        alphabet: AlphabetPreset::Printable,
        goldens: &[
            b"do ; while (a<1) ;",
            b";",
            b"a=1;",
            b"{ }",
            b"if (a<b) x=x+1; else ;",
            b"while (1) { a=a-1; }",
        ],
    },
];

pub fn find_subject(name: &str) -> Option<&'static BuiltinSubject> {
    SUBJECTS.iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::check_conformance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<_> = SUBJECTS.iter().map(|s| s.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), SUBJECTS.len());
    }

    #[test]
    fn every_golden_validates_complete() {
        for subject in SUBJECTS {
            for golden in subject.goldens {
                assert_eq!(
                    (subject.validate)(golden),
                    Verdict::Complete,
                    "subject {} rejected golden {:?}",
                    subject.name,
                    String::from_utf8_lossy(golden)
                );
            }
        }
    }

    #[test]
    fn every_subject_is_prefix_consistent_on_goldens_and_random_prefixes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
        for subject in SUBJECTS {
            let mut samples: Vec<Vec<u8>> =
                subject.goldens.iter().map(|g| g.to_vec()).collect();
            for _ in 0..1_000 {
                let golden = subject.goldens[rng.gen_range(0..subject.goldens.len())];
                let cut = rng.gen_range(0..=golden.len());
                samples.push(golden[..cut].to_vec());
            }
            let mut validator = subject.validator();
            let report = check_conformance(&mut validator, &samples).unwrap();
            assert!(
                report.is_clean(),
                "subject {} violations: {:?}",
                subject.name,
                report.violations
            );
        }
    }

    #[test]
    fn find_subject_resolves_known_names_only() {
        assert!(find_subject("hello").is_some());
        assert!(find_subject("nosuch").is_none());
    }
}
