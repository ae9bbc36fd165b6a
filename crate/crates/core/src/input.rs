//! Code-set text format and source resolution.
//!
//! ```text
//! # golden mean code
//! alphabet: 0 1
//! word: 0
//! word: 0 1
//! ```
//!
//! or a single `builtin: <id> [key=value ...]` line. When every symbol name
//! is one character, `word: 01` is accepted as shorthand.

use std::path::Path;

use crate::catalog::{builtin, BuiltinSpec};
use crate::error::{Error, Result};
use crate::family::CodeFamily;
use crate::word::{validate_code_set, Alphabet, Symbol};

pub fn parse_code_file(text: &str) -> Result<CodeFamily> {
    let mut alphabet: Option<Alphabet> = None;
    let mut words: Vec<Vec<Symbol>> = Vec::new();
    let mut spec: Option<BuiltinSpec> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err(format!("expected `key: value`, got {line:?}")))?;
        let rest = rest.trim();
        match key.trim() {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(err("alphabet given twice".into()));
                }
                alphabet = Some(Alphabet::new(rest.split_whitespace()).map_err(|e| err(e.to_string()))?);
            }
            "word" => {
                let ab = alphabet.as_ref().ok_or_else(|| err("word before alphabet".into()))?;
                words.push(parse_word(ab, rest).map_err(&err)?);
            }
            "builtin" => {
                if spec.is_some() {
                    return Err(err("builtin given twice".into()));
                }
                spec = Some(BuiltinSpec::parse(rest)?);
            }
            other => return Err(err(format!("unknown directive {other:?}"))),
        }
    }
    match (spec, alphabet) {
        (Some(_), Some(_)) => Err(Error::Parse {
            line: 0,
            message: "a file holds either a builtin or an explicit code, not both".into(),
        }),
        (Some(spec), None) => builtin(&spec),
        (None, Some(ab)) => Ok(CodeFamily::from_explicit(validate_code_set(words, ab)?)),
        (None, None) => Err(Error::Parse {
            line: 0,
            message: "missing alphabet or builtin line".into(),
        }),
    }
}

fn parse_word(ab: &Alphabet, text: &str) -> std::result::Result<Vec<Symbol>, String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err("empty word".into());
    }
    let compact = ab.names().iter().all(|n| n.chars().count() == 1);
    let tokens: Vec<String> = if tokens.len() == 1 && compact && ab.lookup(tokens[0]).is_none() {
        tokens[0].chars().map(String::from).collect()
    } else {
        tokens.iter().map(|t| t.to_string()).collect()
    };
    tokens
        .iter()
        .map(|t| ab.lookup(t).ok_or_else(|| format!("unknown symbol {t:?}")))
        .collect()
}

/// Resolves `builtin:<spec>` or a path to a code-set file.
pub fn load_source(source: &str) -> Result<CodeFamily> {
    if let Some(spec) = source.strip_prefix("builtin:") {
        return builtin(&BuiltinSpec::parse(spec)?);
    }
    let text = std::fs::read_to_string(Path::new(source))
        .map_err(|e| Error::BadParams(format!("cannot read {source}: {e}")))?;
    parse_code_file(&text)
}
