//! Alphabets, words and explicit finite code sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Internal symbol index. Display names live on the [`Alphabet`].
pub type Symbol = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::BadAlphabet("alphabet is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::BadAlphabet(format!("bad symbol name {name:?}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::BadAlphabet(format!("duplicate symbol {name}")));
            }
        }
        Ok(Self { names })
    }

    /// Symbols named `0`, `1`, ..., `size - 1`.
    pub fn indexed(size: usize) -> Self {
        assert!(size > 0, "alphabet must be non-empty");
        Self {
            names: (0..size).map(|i| i.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.names[symbol as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name).map(|i| i as Symbol)
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        (symbol as usize) < self.names.len()
    }

    /// Renders a word with display names. Single-character names are
    /// concatenated, longer ones are space separated.
    pub fn render(&self, symbols: &[Symbol]) -> String {
        let compact = self.names.iter().all(|n| n.chars().count() == 1);
        let parts = symbols.iter().map(|&s| self.name(s));
        if compact {
            parts.collect()
        } else {
            parts.collect::<Vec<_>>().join(" ")
        }
    }
}

/// A non-empty finite word of symbol indices.
///
/// Ordered shortest first, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Self(symbols))
    }

    pub fn from_digits(digits: &str) -> Result<Self> {
        let symbols = digits
            .chars()
            .enumerate()
            .map(|(position, c)| {
                c.to_digit(10)
                    .map(|d| d as Symbol)
                    .ok_or(Error::BadSymbol { position })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self.0.iter().all(|&s| s < 10);
        for (i, s) in self.0.iter().enumerate() {
            if !compact && i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A validated finite code set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitCodeSet {
    alphabet: Alphabet,
    words: BTreeSet<Word>,
}

impl ExplicitCodeSet {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    /// `|C_n|`.
    pub fn count(&self, n: usize) -> usize {
        self.words.iter().filter(|w| w.len() == n).count()
    }

    pub fn contains(&self, symbols: &[Symbol]) -> bool {
        // Word ordering is by length first, so a probe word works for lookup.
        self.words.contains(&Word(symbols.to_vec()))
    }
}

/// Validates a list of code words over `alphabet`.
pub fn validate_code_set(
    words: impl IntoIterator<Item = Vec<Symbol>>,
    alphabet: Alphabet,
) -> Result<ExplicitCodeSet> {
    let mut set = BTreeSet::new();
    for symbols in words {
        if let Some(position) = symbols.iter().position(|&s| !alphabet.contains(s)) {
            return Err(Error::BadSymbol { position });
        }
        let word = Word::new(symbols)?;
        if set.contains(&word) {
            return Err(Error::DuplicateWord(word));
        }
        set.insert(word);
    }
    if set.is_empty() {
        return Err(Error::EmptyCodeSet);
    }
    Ok(ExplicitCodeSet {
        alphabet,
        words: set,
    })
}
