//! Miniature C-like statement language: a trie-backed lexer feeding a
//! recursive-descent parser.
//!
//! ```text
//! program    = statement
//! statement  = "do" statement "while" paren_expr ";"
//!            | "while" paren_expr statement
//!            | "if" paren_expr statement [ "else" statement ]
//!            | "{" { statement } "}"
//!            | expr ";"
//!            | ";"
//! paren_expr = "(" expr ")"
//! expr       = ident "=" expr | test
//! test       = sum [ "<" sum ]
//! sum        = term { ("+" | "-") term }
//! term       = ident | integer | paren_expr
//! ```
//!
//! Identifiers are single letters a-z; integers are digit runs. Every
//! incorrect verdict carries a failure index: the byte where a token match
//! diverged from the keyword trie (byte-precise inside keywords), or the
//! start of the token the parser could not place.

use std::sync::OnceLock;

use crate::feedback::Verdict;
use crate::trie::{TokenTrie, TrieMatch};

pub fn tinyc_subset_validate(input: &[u8]) -> Verdict {
    let mut parser = Parser::new(input);
    match parser.program() {
        Ok(()) => Verdict::Complete,
        Err(Stop::Incomplete) => Verdict::Incomplete,
        Err(Stop::Fail(at)) => Verdict::incorrect_at(at),
    }
}

enum Stop {
    Incomplete,
    Fail(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Do,
    While,
    If,
    Else,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Assign,
    Less,
    Plus,
    Minus,
    Ident,
    Int,
}

#[derive(Debug, Clone, Copy)]
struct Spanned {
    tok: Tok,
    start: usize,
}

fn keyword_trie() -> &'static TokenTrie {
    static TRIE: OnceLock<TokenTrie> = OnceLock::new();
    TRIE.get_or_init(|| {
        TokenTrie::from_tokens([b"do".as_slice(), b"while".as_slice(), b"if".as_slice(), b"else".as_slice()])
            .expect("keywords are nonempty")
    })
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Lexer<'_> {
    fn next_token(&mut self) -> Result<Option<Spanned>, Stop> {
        while self.pos < self.s.len() && matches!(self.s[self.pos], b' ' | b'\t' | b'\n' | b'\r') {
            self.pos += 1;
        }
        if self.pos == self.s.len() {
            return Ok(None);
        }
        let start = self.pos;
        let tok = match self.s[start] {
            b'(' => self.single(Tok::LParen),
            b')' => self.single(Tok::RParen),
            b'{' => self.single(Tok::LBrace),
            b'}' => self.single(Tok::RBrace),
            b';' => self.single(Tok::Semi),
            b'=' => self.single(Tok::Assign),
            b'<' => self.single(Tok::Less),
            b'+' => self.single(Tok::Plus),
            b'-' => self.single(Tok::Minus),
            b'0'..=b'9' => {
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                Tok::Int
            }
            b'a'..=b'z' => return self.letter_run(start).map(Some),
            _ => return Err(Stop::Fail(start)),
        };
        Ok(Some(Spanned { tok, start }))
    }

    fn single(&mut self, tok: Tok) -> Tok {
        self.pos += 1;
        tok
    }

    /// A maximal run of letters is one token: a single letter is an
    /// identifier, anything longer must be a whole keyword. The trie pins
    /// the exact byte where a would-be keyword diverges; a single letter is
    /// always a legal identifier, so the divergence is never before the
    /// second byte of the run.
    fn letter_run(&mut self, start: usize) -> Result<Spanned, Stop> {
        let mut end = start;
        while end < self.s.len() && self.s[end].is_ascii_lowercase() {
            end += 1;
        }
        if end - start == 1 {
            // A lone keyword-opening letter at the end of input is still
            // ambiguous: more input may grow it into the keyword.
            if end == self.s.len()
                && matches!(
                    keyword_trie().match_prefix(&self.s[start..end]),
                    TrieMatch::ValidPrefix
                )
            {
                return Err(Stop::Incomplete);
            }
            self.pos = end;
            return Ok(Spanned {
                tok: Tok::Ident,
                start,
            });
        }
        let run = &self.s[start..end];
        match keyword_trie().match_prefix(run) {
            TrieMatch::CompleteToken { token_len } if token_len == run.len() => {
                self.pos = end;
                let tok = match run {
                    b"do" => Tok::Do,
                    b"while" => Tok::While,
                    b"if" => Tok::If,
                    b"else" => Tok::Else,
                    _ => unreachable!("trie only holds the four keywords"),
                };
                Ok(Spanned { tok, start })
            }
            TrieMatch::ValidPrefix => {
                if end == self.s.len() {
                    Err(Stop::Incomplete)
                } else {
                    // A terminator broke the keyword where a keyword byte
                    // was due.
                    Err(Stop::Fail(end))
                }
            }
            TrieMatch::CompleteToken { token_len } => Err(Stop::Fail(start + token_len.max(1))),
            TrieMatch::FailedAt { position } => Err(Stop::Fail(start + position.max(1))),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Vec<Spanned>,
    hit_eof: bool,
}

impl<'a> Parser<'a> {
    fn new(input: &'a [u8]) -> Self {
        Parser {
            lexer: Lexer { s: input, pos: 0 },
            lookahead: Vec::new(),
            hit_eof: false,
        }
    }

    fn peek(&mut self, k: usize) -> Result<Option<Spanned>, Stop> {
        while self.lookahead.len() <= k && !self.hit_eof {
            match self.lexer.next_token()? {
                Some(t) => self.lookahead.push(t),
                None => self.hit_eof = true,
            }
        }
        Ok(self.lookahead.get(k).copied())
    }

    fn bump(&mut self) -> Result<Spanned, Stop> {
        match self.peek(0)? {
            Some(t) => {
                self.lookahead.remove(0);
                Ok(t)
            }
            None => Err(Stop::Incomplete),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), Stop> {
        match self.peek(0)? {
            None => Err(Stop::Incomplete),
            Some(t) if t.tok == tok => {
                self.bump()?;
                Ok(())
            }
            Some(t) => Err(Stop::Fail(t.start)),
        }
    }

    fn program(&mut self) -> Result<(), Stop> {
        self.statement()?;
        match self.peek(0)? {
            None => Ok(()),
            Some(t) => Err(Stop::Fail(t.start)),
        }
    }

    fn statement(&mut self) -> Result<(), Stop> {
        let t = match self.peek(0)? {
            None => return Err(Stop::Incomplete),
            Some(t) => t,
        };
        match t.tok {
            Tok::Do => {
                self.bump()?;
                self.statement()?;
                self.expect(Tok::While)?;
                self.paren_expr()?;
                self.expect(Tok::Semi)
            }
            Tok::While => {
                self.bump()?;
                self.paren_expr()?;
                self.statement()
            }
            Tok::If => {
                self.bump()?;
                self.paren_expr()?;
                self.statement()?;
                if let Some(next) = self.peek(0)? {
                    if next.tok == Tok::Else {
                        self.bump()?;
                        return self.statement();
                    }
                }
                Ok(())
            }
            Tok::LBrace => {
                self.bump()?;
                loop {
                    match self.peek(0)? {
                        None => return Err(Stop::Incomplete),
                        Some(next) if next.tok == Tok::RBrace => {
                            self.bump()?;
                            return Ok(());
                        }
                        Some(_) => self.statement()?,
                    }
                }
            }
            Tok::Semi => {
                self.bump()?;
                Ok(())
            }
            Tok::Ident | Tok::Int | Tok::LParen => {
                self.expr()?;
                self.expect(Tok::Semi)
            }
            _ => Err(Stop::Fail(t.start)),
        }
    }

    fn paren_expr(&mut self) -> Result<(), Stop> {
        self.expect(Tok::LParen)?;
        self.expr()?;
        self.expect(Tok::RParen)
    }

    fn expr(&mut self) -> Result<(), Stop> {
        if let Some(t0) = self.peek(0)? {
            if t0.tok == Tok::Ident {
                if let Some(t1) = self.peek(1)? {
                    if t1.tok == Tok::Assign {
                        self.bump()?;
                        self.bump()?;
                        return self.expr();
                    }
                }
            }
        }
        self.test()
    }

    fn test(&mut self) -> Result<(), Stop> {
        self.sum()?;
        if let Some(t) = self.peek(0)? {
            if t.tok == Tok::Less {
                self.bump()?;
                return self.sum();
            }
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<(), Stop> {
        self.term()?;
        while let Some(t) = self.peek(0)? {
            if t.tok == Tok::Plus || t.tok == Tok::Minus {
                self.bump()?;
                self.term()?;
            } else {
                break;
            }
        }
        Ok(())
    }

    fn term(&mut self) -> Result<(), Stop> {
        let t = match self.peek(0)? {
            None => return Err(Stop::Incomplete),
            Some(t) => t,
        };
        match t.tok {
            Tok::Ident | Tok::Int => {
                self.bump()?;
                Ok(())
            }
            Tok::LParen => self.paren_expr(),
            _ => Err(Stop::Fail(t.start)),
        }
    }
}
