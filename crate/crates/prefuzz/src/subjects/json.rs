//! Miniature JSON: documents are objects, arrays, or the bare keywords
//! true/false/null; strings and numbers appear nested inside containers.
//! Keywords are matched through a token trie, so a wrong byte inside
//! `true`/`false`/`null` is rejected the moment it appears, and the trie is
//! consulted only at positions where those tokens are legal. Incorrect
//! answers carry no failure index.

use std::sync::OnceLock;

use crate::feedback::Verdict;
use crate::trie::{TokenTrie, TrieMatch};

pub fn json_subset_validate(input: &[u8]) -> Verdict {
    let mut p = Parser { s: input, i: 0 };
    match p.document() {
        Ok(()) => Verdict::Complete,
        Err(Stop::Incomplete) => Verdict::Incomplete,
        Err(Stop::Fail) => Verdict::incorrect(),
    }
}

enum Stop {
    Incomplete,
    Fail,
}

fn keyword_trie() -> &'static TokenTrie {
    static TRIE: OnceLock<TokenTrie> = OnceLock::new();
    TRIE.get_or_init(|| {
        TokenTrie::from_tokens([b"true".as_slice(), b"false".as_slice(), b"null".as_slice()])
            .expect("keywords are nonempty")
    })
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn document(&mut self) -> Result<(), Stop> {
        self.ws();
        match self.peek() {
            None => return Err(Stop::Incomplete),
            Some(b'{') => self.object()?,
            Some(b'[') => self.array()?,
            Some(b't') | Some(b'f') | Some(b'n') => self.keyword()?,
            Some(_) => return Err(Stop::Fail),
        }
        self.ws();
        if self.i == self.s.len() {
            Ok(())
        } else {
            Err(Stop::Fail)
        }
    }

    fn value(&mut self) -> Result<(), Stop> {
        match self.peek() {
            None => Err(Stop::Incomplete),
            Some(b'{') => self.object(),
            Some(b'[') => self.array(),
            Some(b'"') => self.string(),
            Some(b'-') => self.number(),
            Some(b) if b.is_ascii_digit() => self.number(),
            Some(b't') | Some(b'f') | Some(b'n') => self.keyword(),
            Some(_) => Err(Stop::Fail),
        }
    }

    fn keyword(&mut self) -> Result<(), Stop> {
        match keyword_trie().match_prefix(&self.s[self.i..]) {
            TrieMatch::CompleteToken { token_len } => {
                self.i += token_len;
                Ok(())
            }
            TrieMatch::ValidPrefix => Err(Stop::Incomplete),
            TrieMatch::FailedAt { .. } => Err(Stop::Fail),
        }
    }

    fn object(&mut self) -> Result<(), Stop> {
        self.bump();
        self.ws();
        match self.peek() {
            None => return Err(Stop::Incomplete),
            Some(b'}') => {
                self.bump();
                return Ok(());
            }
            Some(b'"') => {}
            Some(_) => return Err(Stop::Fail),
        }
        loop {
            self.string()?;
            self.ws();
            match self.peek() {
                None => return Err(Stop::Incomplete),
                Some(b':') => self.bump(),
                Some(_) => return Err(Stop::Fail),
            }
            self.ws();
            self.value()?;
            self.ws();
            match self.peek() {
                None => return Err(Stop::Incomplete),
                Some(b',') => {
                    self.bump();
                    self.ws();
                    match self.peek() {
                        None => return Err(Stop::Incomplete),
                        Some(b'"') => {}
                        Some(_) => return Err(Stop::Fail),
                    }
                }
                Some(b'}') => {
                    self.bump();
                    return Ok(());
                }
                Some(_) => return Err(Stop::Fail),
            }
        }
    }

    fn array(&mut self) -> Result<(), Stop> {
        self.bump();
        self.ws();
        match self.peek() {
            None => return Err(Stop::Incomplete),
            Some(b']') => {
                self.bump();
                return Ok(());
            }
            Some(_) => {}
        }
        loop {
            self.value()?;
            self.ws();
            match self.peek() {
                None => return Err(Stop::Incomplete),
                Some(b',') => {
                    self.bump();
                    self.ws();
                }
                Some(b']') => {
                    self.bump();
                    return Ok(());
                }
                Some(_) => return Err(Stop::Fail),
            }
        }
    }

    fn string(&mut self) -> Result<(), Stop> {
        self.bump();
        loop {
            match self.peek() {
                None => return Err(Stop::Incomplete),
                Some(b'"') => {
                    self.bump();
                    return Ok(());
                }
                // Printable bytes except the quote and backslash; no escapes
                // in the miniature.
                Some(b) if (0x20..=0x7e).contains(&b) && b != b'\\' => self.bump(),
                Some(_) => return Err(Stop::Fail),
            }
        }
    }

    fn number(&mut self) -> Result<(), Stop> {
        if self.peek() == Some(b'-') {
            self.bump();
        }
        self.digits()?;
        if self.peek() == Some(b'.') {
            self.bump();
            self.digits()?;
        }
        Ok(())
    }

    fn digits(&mut self) -> Result<(), Stop> {
        let mut count = 0;
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() {
                self.bump();
                count += 1;
            } else {
                break;
            }
        }
        if count == 0 {
            if self.i == self.s.len() {
                Err(Stop::Incomplete)
            } else {
                Err(Stop::Fail)
            }
        } else {
            Ok(())
        }
    }

    fn ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')) {
            self.bump();
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn bump(&mut self) {
        self.i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn simple_documents_are_complete() {
        assert_eq!(json_subset_validate(b"[{}]"), Verdict::Complete);
        assert_eq!(json_subset_validate(b"{}"), Verdict::Complete);
        assert_eq!(json_subset_validate(b"true"), Verdict::Complete);
        assert_eq!(json_subset_validate(b" [ 1 , 2 ] "), Verdict::Complete);
        assert_eq!(
            json_subset_validate(b"{\"a\":[-1.5,\"x\",null]}"),
            Verdict::Complete
        );
    }

    #[test]
    fn keyword_prefixes_follow_the_trie() {
        // Oracle: longest common prefix against {true,false,null}.
        assert_eq!(json_subset_validate(b"tru"), Verdict::Incomplete);
        assert_eq!(json_subset_validate(b"trx"), Verdict::incorrect());
        assert_eq!(json_subset_validate(b"[fals"), Verdict::Incomplete);
        assert_eq!(json_subset_validate(b"[falze]"), Verdict::incorrect());
    }

    #[test]
    fn top_level_accepts_only_containers_and_keywords() {
        assert_eq!(json_subset_validate(b"5"), Verdict::incorrect());
        assert_eq!(json_subset_validate(b"\"s\""), Verdict::incorrect());
        assert_eq!(json_subset_validate(b"[5]"), Verdict::Complete);
        assert_eq!(json_subset_validate(b"[\"s\"]"), Verdict::Complete);
    }

    #[test]
    fn incorrect_never_carries_an_index() {
        for bad in [&b"{]"[..], b"[1,]", b"[1 2]", b"truex", b"{\"a\" 1}"] {
            assert_eq!(json_subset_validate(bad), Verdict::incorrect(), "{bad:?}");
        }
    }

    #[test]
    fn structural_incompletes() {
        for partial in [
            &b""[..],
            b"[",
            b"[1,",
            b"{\"a\"",
            b"{\"a\":",
            b"[\"unterminated",
            b"[-",
            b"[1.",
            b" ",
        ] {
            assert_eq!(
                json_subset_validate(partial),
                Verdict::Incomplete,
                "{partial:?}"
            );
        }
    }

    // Independent reference recognizer: a brute-force recursive matcher
    // over the same grammar, written as plain position functions. Used only
    // to cross-check the verdict parser.
    mod reference {
        fn ws(s: &[u8], mut i: usize) -> usize {
            while i < s.len() && matches!(s[i], b' ' | b'\t' | b'\n' | b'\r') {
                i += 1;
            }
            i
        }

        fn literal(s: &[u8], i: usize, lit: &[u8]) -> Option<usize> {
            if s.len() >= i + lit.len() && &s[i..i + lit.len()] == lit {
                Some(i + lit.len())
            } else {
                None
            }
        }

        fn string(s: &[u8], i: usize) -> Option<usize> {
            let mut j = literal(s, i, b"\"")?;
            while j < s.len() && s[j] != b'"' {
                if !(0x20..=0x7e).contains(&s[j]) || s[j] == b'\\' {
                    return None;
                }
                j += 1;
            }
            literal(s, j, b"\"")
        }

        fn number(s: &[u8], i: usize) -> Option<usize> {
            let mut j = i;
            if j < s.len() && s[j] == b'-' {
                j += 1;
            }
            let d0 = j;
            while j < s.len() && s[j].is_ascii_digit() {
                j += 1;
            }
            if j == d0 {
                return None;
            }
            if j < s.len() && s[j] == b'.' {
                j += 1;
                let d1 = j;
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                if j == d1 {
                    return None;
                }
            }
            Some(j)
        }

        fn value(s: &[u8], i: usize) -> Option<usize> {
            container(s, i)
                .or_else(|| string(s, i))
                .or_else(|| number(s, i))
                .or_else(|| literal(s, i, b"true"))
                .or_else(|| literal(s, i, b"false"))
                .or_else(|| literal(s, i, b"null"))
        }

        fn container(s: &[u8], i: usize) -> Option<usize> {
            object(s, i).or_else(|| array(s, i))
        }

        fn object(s: &[u8], i: usize) -> Option<usize> {
            let mut j = ws(s, literal(s, i, b"{")?);
            if let Some(end) = literal(s, j, b"}") {
                return Some(end);
            }
            loop {
                j = ws(s, string(s, j)?);
                j = ws(s, literal(s, j, b":")?);
                j = ws(s, value(s, j)?);
                if let Some(next) = literal(s, j, b",") {
                    j = ws(s, next);
                } else {
                    return literal(s, j, b"}");
                }
            }
        }

        fn array(s: &[u8], i: usize) -> Option<usize> {
            let mut j = ws(s, literal(s, i, b"[")?);
            if let Some(end) = literal(s, j, b"]") {
                return Some(end);
            }
            loop {
                j = ws(s, value(s, j)?);
                if let Some(next) = literal(s, j, b",") {
                    j = ws(s, next);
                } else {
                    return literal(s, j, b"]");
                }
            }
        }

        pub fn accepts(s: &[u8]) -> bool {
            let i = ws(s, 0);
            let doc = container(s, i)
                .or_else(|| literal(s, i, b"true"))
                .or_else(|| literal(s, i, b"false"))
                .or_else(|| literal(s, i, b"null"));
            match doc {
                Some(j) => ws(s, j) == s.len(),
                None => false,
            }
        }
    }

    #[test]
    fn complete_verdicts_agree_with_the_reference_recognizer() {
        // Token-level pieces keep the accept rate high enough to exercise
        // both sides of the comparison.
        let pieces: &[&[u8]] = &[
            b"{", b"}", b"[", b"]", b":", b",", b"\"a\"", b"\"\"", b"1", b"23", b"-4.5", b"true",
            b"false", b"null", b" ", b"\t", b"x", b".",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked_complete = 0;
        for _ in 0..20_000 {
            let count = rng.gen_range(0..8);
            let mut input = Vec::new();
            for _ in 0..count {
                input.extend_from_slice(pieces[rng.gen_range(0..pieces.len())]);
            }
            let verdict = json_subset_validate(&input);
            let accepted = reference::accepts(&input);
            assert_eq!(
                verdict == Verdict::Complete,
                accepted,
                "disagreement on {:?}",
                String::from_utf8_lossy(&input)
            );
            if accepted {
                checked_complete += 1;
            }
        }
        assert!(checked_complete > 50, "vocabulary too weak to exercise accepts");
    }
}
