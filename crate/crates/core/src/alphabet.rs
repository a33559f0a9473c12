//! Alphabets, symbols and words.

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Index of a symbol in its [`Alphabet`].
pub type Symbol = usize;

/// Characters that cannot appear in alphabet tokens or state names because
/// they are structural in the text formats.
pub(crate) const RESERVED: &[char] = &[',', ';', '=', '#', ':'];

pub(crate) fn check_token(token: &str) -> Result<(), String> {
    if token.is_empty() {
        return Err("empty token".into());
    }
    if token == "-" {
        return Err("`-` is reserved for the empty word".into());
    }
    if let Some(c) = token
        .chars()
        .find(|c| c.is_whitespace() || c.is_control() || RESERVED.contains(c))
    {
        return Err(format!("token `{token}` contains reserved character {c:?}"));
    }
    Ok(())
}

/// An ordered, nonempty list of distinct printable tokens. The position of a
/// token is its symbol id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::KindViolation("alphabet must be nonempty".into()));
        }
        for (i, name) in names.iter().enumerate() {
            check_token(name).map_err(Error::KindViolation)?;
            if names[..i].contains(name) {
                return Err(Error::KindViolation(format!(
                    "duplicate alphabet symbol `{name}`"
                )));
            }
        }
        Ok(Alphabet { names })
    }

    /// Alphabet whose symbols are the given characters, in order.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(String::from))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> std::ops::Range<Symbol> {
        0..self.names.len()
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.names[symbol]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name)
    }

    fn single_chars(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Parses a word. Alphabets made of single characters accept a compact
    /// string such as `aba`; otherwise tokens are whitespace-separated.
    /// `-` and the empty string denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "-" {
            return Ok(Word::empty());
        }
        let lookup = |tok: &str| {
            self.symbol(tok)
                .ok_or_else(|| Error::UnknownSymbol(tok.to_string()))
        };
        if self.single_chars() && !text.contains(char::is_whitespace) {
            let mut buf = [0u8; 4];
            text.chars()
                .map(|c| lookup(c.encode_utf8(&mut buf)))
                .collect()
        } else {
            text.split_whitespace().map(lookup).collect()
        }
    }

    /// Inverse of [`Alphabet::parse_word`]; the empty word renders as `-`.
    pub fn format_word(&self, word: &[Symbol]) -> String {
        if word.is_empty() {
            return "-".to_string();
        }
        let sep = if self.single_chars() { "" } else { " " };
        word.iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(" "))
    }
}

/// A finite word over some alphabet; may be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn into_inner(self) -> Vec<Symbol> {
        self.0
    }

    pub fn push(&mut self, symbol: Symbol) {
        self.0.push(symbol);
    }

    pub fn extend_from(&mut self, other: &[Symbol]) {
        self.0.extend_from_slice(other);
    }

    /// `self` repeated `n` times.
    pub fn pow(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }

    pub fn concat(&self, other: &[Symbol]) -> Word {
        let mut out = self.0.clone();
        out.extend_from_slice(other);
        Word(out)
    }

    /// Whether `factor` occurs contiguously in `self`.
    pub fn contains_factor(&self, factor: &[Symbol]) -> bool {
        factor.is_empty() || self.0.windows(factor.len()).any(|w| w == factor)
    }
}

impl Deref for Word {
    type Target = [Symbol];
    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Symbol;
    type IntoIter = std::slice::Iter<'a, Symbol>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// All words over `k` symbols of length at most `max_len`, in shortlex order.
pub fn words_up_to(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * k);
        for w in &layer {
            for s in 0..k {
                let mut w = w.clone();
                w.push(s);
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
