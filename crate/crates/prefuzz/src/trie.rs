//! Prefix tree over lexer tokens, giving byte-precise failure positions
//! inside tokens.
//!
//! A lexer backed by [`TokenTrie`] can tell a fuzzer exactly which byte
//! broke a token match instead of rejecting the whole token, which turns
//! token construction from an exponential search into a linear one.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrieError {
    #[error("tokens must be nonempty")]
    EmptyToken,
}

#[derive(Debug, Default, Clone)]
struct Node {
    children: BTreeMap<u8, Node>,
    terminal: bool,
}

/// Prefix tree over a token set. Immutable after construction; freely
/// shareable across threads for reads.
#[derive(Debug, Default, Clone)]
pub struct TokenTrie {
    root: Node,
    token_count: usize,
}

/// Result of walking an input against the trie.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrieMatch {
    /// The longest token that is a prefix of the input, maximal-munch style.
    /// `token_len` bytes were consumed; the trie never inspects what follows.
    CompleteToken { token_len: usize },
    /// The whole input lies on a live path: some token extends it.
    ValidPrefix,
    /// No token matches. `position` is the offset of the first byte with no
    /// edge, i.e. the longest common prefix length with the token set.
    FailedAt { position: usize },
}

impl TokenTrie {
    pub fn new() -> Self {
        TokenTrie::default()
    }

    pub fn from_tokens<I, T>(tokens: I) -> Result<Self, TrieError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        let mut trie = TokenTrie::new();
        for token in tokens {
            trie.insert(token.as_ref())?;
        }
        Ok(trie)
    }

    /// Insert one token. Idempotent; prefix tokens coexist ("do" next to
    /// "double").
    pub fn insert(&mut self, token: &[u8]) -> Result<(), TrieError> {
        if token.is_empty() {
            return Err(TrieError::EmptyToken);
        }
        let mut node = &mut self.root;
        for &byte in token {
            node = node.children.entry(byte).or_default();
        }
        if !node.terminal {
            node.terminal = true;
            self.token_count += 1;
        }
        Ok(())
    }

    /// Number of distinct tokens inserted.
    pub fn token_count(&self) -> usize {
        self.token_count
    }

    pub fn is_empty(&self) -> bool {
        self.token_count == 0
    }

    /// Walk the input byte by byte from the root.
    ///
    /// Prefers the longest full token (maximal munch). Runs of input beyond
    /// the last terminal are the caller's business: the match reports how
    /// many bytes the token consumed and nothing else.
    pub fn match_prefix(&self, input: &[u8]) -> TrieMatch {
        let mut node = &self.root;
        let mut longest_terminal: Option<usize> = None;
        for (depth, &byte) in input.iter().enumerate() {
            if node.terminal {
                longest_terminal = Some(depth);
            }
            match node.children.get(&byte) {
                Some(child) => node = child,
                None => {
                    return match longest_terminal {
                        Some(token_len) => TrieMatch::CompleteToken { token_len },
                        None => TrieMatch::FailedAt { position: depth },
                    };
                }
            }
        }
        if node.terminal {
            TrieMatch::CompleteToken {
                token_len: input.len(),
            }
        } else if !node.children.is_empty() {
            TrieMatch::ValidPrefix
        } else {
            // Only reachable at the root of an empty trie: nothing matches.
            match longest_terminal {
                Some(token_len) => TrieMatch::CompleteToken { token_len },
                None => TrieMatch::FailedAt {
                    position: input.len(),
                },
            }
        }
    }
}
