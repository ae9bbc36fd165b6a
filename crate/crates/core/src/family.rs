//! Code families: a count series plus an optional word enumerator and the
//! structural facts known about the code.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genfun::{CountSeries, TableCounts};
use crate::word::{Alphabet, ExplicitCodeSet, Symbol, Word};

/// Produces every code word up to a length bound. Must be deterministic.
pub trait WordSource: Send + Sync {
    fn for_each_word(&self, max_len: usize, visit: &mut dyn FnMut(&[Symbol]));
}

impl WordSource for ExplicitCodeSet {
    fn for_each_word(&self, max_len: usize, visit: &mut dyn FnMut(&[Symbol])) {
        for w in self.words().iter().filter(|w| w.len() <= max_len) {
            visit(w.symbols());
        }
    }
}

/// Where a structural claim about a code comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Stated with proof in the literature the builtin reproduces.
    Asserted,
    /// Decided by a complete procedure (finite codes).
    Decided,
    /// Machine-checked sufficient condition.
    Certified,
    /// No counterexample up to a length bound.
    VerifiedBounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum Flag {
    Holds { provenance: Provenance },
    Fails { provenance: Provenance },
    Unknown,
}

impl Flag {
    pub fn holds(provenance: Provenance) -> Self {
        Flag::Holds { provenance }
    }

    pub fn is_established(&self) -> bool {
        matches!(self, Flag::Holds { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeFlags {
    pub unique_decipherability: Flag,
    pub unique_decomposition: Flag,
    pub b_disjoint_from_l: Flag,
    /// Why no proper prefix of a code word is a proper suffix of one, for
    /// every length. Only builtins carry this.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix_suffix_proof: Option<String>,
}

impl Default for CodeFlags {
    fn default() -> Self {
        Self {
            unique_decipherability: Flag::Unknown,
            unique_decomposition: Flag::Unknown,
            b_disjoint_from_l: Flag::Unknown,
            prefix_suffix_proof: None,
        }
    }
}

impl CodeFlags {
    /// Unique decomposition, directly or through unique decipherability.
    pub fn decomposition_established(&self) -> bool {
        self.unique_decomposition.is_established() || self.unique_decipherability.is_established()
    }
}

#[derive(Clone)]
pub struct CodeFamily {
    pub name: String,
    alphabet: Alphabet,
    series: CountSeries,
    source: Option<Arc<dyn WordSource>>,
    explicit: Option<ExplicitCodeSet>,
    pub flags: CodeFlags,
    /// Exact `h(L_C)`; `-inf` for finite codes.
    pub exact_hl: Option<f64>,
    /// Closed-form value of `f(h(L_C))`, when one is known exactly.
    pub closed_form_f_at_hl: Option<f64>,
}

impl fmt::Debug for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodeFamily")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .field("series", &self.series)
            .field("flags", &self.flags)
            .field("exact_hl", &self.exact_hl)
            .finish_non_exhaustive()
    }
}

impl CodeFamily {
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        series: CountSeries,
        source: Option<Arc<dyn WordSource>>,
    ) -> Self {
        Self {
            name: name.into(),
            alphabet,
            series,
            source,
            explicit: None,
            flags: CodeFlags::default(),
            exact_hl: None,
            closed_form_f_at_hl: None,
        }
    }

    /// Family of a finite code set; `h(L_C) = -inf`.
    pub fn from_explicit(code: ExplicitCodeSet) -> Self {
        let series = CountSeries::finite(TableCounts::from_lengths(code.words().iter().map(Word::len)));
        let name = code
            .words()
            .iter()
            .map(|w| code.alphabet().render(w.symbols()))
            .collect::<Vec<_>>()
            .join(",");
        let mut family = Self::new(
            format!("{{{name}}}"),
            code.alphabet().clone(),
            series,
            Some(Arc::new(code.clone())),
        );
        family.explicit = Some(code);
        family.exact_hl = Some(f64::NEG_INFINITY);
        family
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn series(&self) -> &CountSeries {
        &self.series
    }

    pub fn explicit(&self) -> Option<&ExplicitCodeSet> {
        self.explicit.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.series.is_finite()
    }

    /// `|C_n|`.
    pub fn counts_of(&self, n: usize) -> BigUint {
        self.series.count(n)
    }

    pub fn has_enumerator(&self) -> bool {
        self.source.is_some()
    }

    pub fn for_each_word(&self, max_len: usize, visit: &mut dyn FnMut(&[Symbol])) -> Result<()> {
        let source = self.source.as_ref().ok_or(Error::EnumeratorUnavailable)?;
        source.for_each_word(max_len, visit);
        Ok(())
    }

    /// Every code word of length at most `max_len`.
    pub fn enumerate_code_words(&self, max_len: usize) -> Result<BTreeSet<Word>> {
        let mut out = BTreeSet::new();
        self.for_each_word(max_len, &mut |w| {
            out.insert(Word::new(w.to_vec()).expect("code words are non-empty"));
        })?;
        Ok(out)
    }

    /// Code words up to `max_len` as plain symbol vectors, shortest first.
    pub fn word_list(&self, max_len: usize) -> Result<Vec<Vec<Symbol>>> {
        Ok(self
            .enumerate_code_words(max_len)?
            .into_iter()
            .map(Word::into_symbols)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::validate_code_set;

    #[test]
    fn explicit_family_counts_and_words() {
        let code = validate_code_set([vec![0], vec![0, 1]], Alphabet::indexed(2)).unwrap();
        let family = CodeFamily::from_explicit(code);
        assert_eq!(family.counts_of(1), BigUint::from(1u32));
        assert_eq!(family.counts_of(2), BigUint::from(1u32));
        assert_eq!(family.counts_of(3), BigUint::from(0u32));
        let words = family.enumerate_code_words(5).unwrap();
        let rendered: Vec<String> = words.iter().map(ToString::to_string).collect();
        assert_eq!(rendered, ["0", "01"]);
        assert_eq!(family.enumerate_code_words(1).unwrap().len(), 1);
        assert_eq!(family.exact_hl, Some(f64::NEG_INFINITY));
        assert_eq!(family.name, "{0,01}");
    }
}
