//! Parameterized test subjects: exact-string matchers with per-byte
//! feedback, and single-token lexers backed by a trie.

use crate::feedback::{InProcessValidator, Verdict};
use crate::trie::{TokenTrie, TrieError, TrieMatch};

/// Accepts exactly one target string with immediate per-byte feedback:
/// every wrong byte is rejected the moment it appears.
#[derive(Debug, Clone)]
pub struct ExactString {
    target: Vec<u8>,
}

impl ExactString {
    pub fn new(target: impl Into<Vec<u8>>) -> Self {
        ExactString {
            target: target.into(),
        }
    }

    pub fn verdict(&self, input: &[u8]) -> Verdict {
        for (i, &b) in input.iter().enumerate() {
            match self.target.get(i) {
                Some(&want) if want == b => {}
                _ => return Verdict::incorrect(),
            }
        }
        if input.len() == self.target.len() {
            Verdict::Complete
        } else {
            Verdict::Incomplete
        }
    }

    pub fn into_validator(self) -> InProcessValidator<impl Fn(&[u8]) -> Verdict> {
        InProcessValidator::new(
            format!("exact:{}", String::from_utf8_lossy(&self.target)),
            move |input: &[u8]| self.verdict(input),
        )
    }
}

/// Accepts exactly one token from a token set, with trie-precise failure
/// indices: a diverging byte reports its own offset.
#[derive(Debug, Clone)]
pub struct SingleTokenLexer {
    trie: TokenTrie,
}

impl SingleTokenLexer {
    pub fn new<I, T>(tokens: I) -> Result<Self, TrieError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        Ok(SingleTokenLexer {
            trie: TokenTrie::from_tokens(tokens)?,
        })
    }

    pub fn verdict(&self, input: &[u8]) -> Verdict {
        match self.trie.match_prefix(input) {
            TrieMatch::CompleteToken { token_len } if token_len == input.len() => Verdict::Complete,
            TrieMatch::CompleteToken { token_len } => Verdict::incorrect_at(token_len),
            TrieMatch::ValidPrefix => Verdict::Incomplete,
            TrieMatch::FailedAt { position } => Verdict::incorrect_at(position),
        }
    }

    pub fn into_validator(self) -> InProcessValidator<impl Fn(&[u8]) -> Verdict> {
        InProcessValidator::new("single-token", move |input: &[u8]| self.verdict(input))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_string_gives_per_byte_feedback() {
        let subject = ExactString::new(&b"abc"[..]);
        assert_eq!(subject.verdict(b""), Verdict::Incomplete);
        assert_eq!(subject.verdict(b"a"), Verdict::Incomplete);
        assert_eq!(subject.verdict(b"ab"), Verdict::Incomplete);
        assert_eq!(subject.verdict(b"abc"), Verdict::Complete);
        assert_eq!(subject.verdict(b"x"), Verdict::incorrect());
        assert_eq!(subject.verdict(b"ax"), Verdict::incorrect());
        assert_eq!(subject.verdict(b"abcd"), Verdict::incorrect());
    }

    #[test]
    fn single_token_lexer_reports_divergence_offsets() {
        let lexer = SingleTokenLexer::new([b"while".as_slice(), b"if".as_slice()]).unwrap();
        assert_eq!(lexer.verdict(b""), Verdict::Incomplete);
        assert_eq!(lexer.verdict(b"whi"), Verdict::Incomplete);
        assert_eq!(lexer.verdict(b"while"), Verdict::Complete);
        assert_eq!(lexer.verdict(b"whale"), Verdict::incorrect_at(2));
        assert_eq!(lexer.verdict(b"whilee"), Verdict::incorrect_at(5));
        assert_eq!(lexer.verdict(b"q"), Verdict::incorrect_at(0));
    }
}
