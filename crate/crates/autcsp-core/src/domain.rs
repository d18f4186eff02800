//! Finite CSP domains and words over them.
//!
//! A domain is an ordered alphabet of at least two distinct symbols. Words
//! are stored as vectors of symbol indices into their domain; the textual
//! form of a word is the concatenation of its symbols when every symbol is
//! a single character, and a space-separated list otherwise.

use std::fmt;

use thiserror::Error;

/// Index of a symbol within its [`Domain`].
pub type Sym = u16;

/// A word (equivalently, a tuple) over a domain, as symbol indices.
pub type Word = Vec<Sym>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("domain must have at least two symbols, got {0}")]
    TooSmall(usize),
    #[error("domain has more than {max} symbols", max = Sym::MAX)]
    TooLarge,
    #[error("duplicate domain symbol `{0}`")]
    Duplicate(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
}

/// An ordered finite alphabet of pairwise distinct symbols.
///
/// Iteration order is the declaration order and is used everywhere a
/// deterministic tie-break over symbols is needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    symbols: Vec<String>,
    single_char: bool,
}

impl Domain {
    pub fn new(symbols: Vec<String>) -> Result<Self, DomainError> {
        if symbols.len() < 2 {
            return Err(DomainError::TooSmall(symbols.len()));
        }
        if symbols.len() > Sym::MAX as usize {
            return Err(DomainError::TooLarge);
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(DomainError::Duplicate(s.clone()));
            }
        }
        let single_char = symbols.iter().all(|s| s.chars().count() == 1);
        Ok(Domain { symbols, single_char })
    }

    /// The Boolean domain `{0, 1}`.
    pub fn boolean() -> Self {
        Domain::new(vec!["0".into(), "1".into()]).unwrap()
    }

    /// The domain `{0, 1, ..., q-1}` identified with the elements of GF(q).
    pub fn gf(q: u16) -> Result<Self, DomainError> {
        Domain::new((0..q).map(|d| d.to_string()).collect())
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, s: Sym) -> &str {
        &self.symbols[s as usize]
    }

    pub fn index_of(&self, token: &str) -> Option<Sym> {
        self.symbols.iter().position(|s| s == token).map(|i| i as Sym)
    }

    pub fn syms(&self) -> impl Iterator<Item = Sym> + '_ {
        0..self.size() as Sym
    }

    /// True when the domain is exactly {"0","1"} in that order.
    pub fn is_boolean(&self) -> bool {
        self.symbols.len() == 2 && self.symbols[0] == "0" && self.symbols[1] == "1"
    }

    /// If the symbols are exactly "0".."q-1" in order, returns q.
    pub fn as_numeric(&self) -> Option<u16> {
        for (i, s) in self.symbols.iter().enumerate() {
            if s != &i.to_string() {
                return None;
            }
        }
        Some(self.symbols.len() as u16)
    }

    pub fn format_word(&self, w: &[Sym]) -> String {
        if self.single_char {
            w.iter().map(|&s| self.symbol(s)).collect()
        } else {
            w.iter().map(|&s| self.symbol(s)).collect::<Vec<_>>().join(" ")
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, DomainError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        if self.single_char {
            text.chars()
                .map(|c| {
                    let t = c.to_string();
                    self.index_of(&t).ok_or(DomainError::UnknownSymbol(t))
                })
                .collect()
        } else {
            text.split_whitespace()
                .map(|t| self.index_of(t).ok_or_else(|| DomainError::UnknownSymbol(t.into())))
                .collect()
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.symbols.join(", "))
    }
}

/// Enumerates all words of length `n` over a domain of size `d` in
/// lexicographic order. Used by brute-force oracles and table iteration.
pub fn words_of_length(d: usize, n: usize) -> impl Iterator<Item = Word> {
    WordIter { d: d as Sym, cur: None, n }
}

struct WordIter {
    d: Sym,
    cur: Option<Word>,
    n: usize,
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        match &mut self.cur {
            None => {
                self.cur = Some(vec![0; self.n]);
                self.cur.clone()
            }
            Some(w) => {
                for i in (0..self.n).rev() {
                    if w[i] + 1 < self.d {
                        w[i] += 1;
                        for x in &mut w[i + 1..] {
                            *x = 0;
                        }
                        return Some(w.clone());
                    }
                }
                None
            }
        }
    }
}
