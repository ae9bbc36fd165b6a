//! Builtin code families with exact counts, exact `h(L_C)`, growth
//! certificates and structural flags.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::classify::{Regime, VereJonesClass};
use crate::error::{Error, Result};
use crate::family::{CodeFamily, Flag, Provenance, WordSource};
use crate::genfun::{CertificateProvenance, CountFn, CountSeries, GrowthCertificate};
use crate::word::{validate_code_set, Alphabet, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinId {
    Dyck,
    ExPositiveRecurrent,
    ExNullRecurrent,
    NonuniformSpec,
    FullShift,
    GoldenMeanCode,
    SingleWord,
}

impl BuiltinId {
    pub const ALL: [BuiltinId; 7] = [
        BuiltinId::Dyck,
        BuiltinId::ExPositiveRecurrent,
        BuiltinId::ExNullRecurrent,
        BuiltinId::NonuniformSpec,
        BuiltinId::FullShift,
        BuiltinId::GoldenMeanCode,
        BuiltinId::SingleWord,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinId::Dyck => "dyck",
            BuiltinId::ExPositiveRecurrent => "ex_positive_recurrent",
            BuiltinId::ExNullRecurrent => "ex_null_recurrent",
            BuiltinId::NonuniformSpec => "nonuniform_spec",
            BuiltinId::FullShift => "full_shift",
            BuiltinId::GoldenMeanCode => "golden_mean_code",
            BuiltinId::SingleWord => "single_word",
        }
    }
}

impl fmt::Display for BuiltinId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuiltinId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown builtin {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuiltinSpec {
    pub id: BuiltinId,
    pub params: BTreeMap<String, i64>,
}

impl BuiltinSpec {
    pub fn new(id: BuiltinId) -> Self {
        Self {
            id,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: i64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Parses `dyck`, `full_shift k=3`, `full_shift:k=3` or `full_shift,k=3`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text
            .split(|c: char| c.is_whitespace() || c == ':' || c == ',')
            .filter(|p| !p.is_empty());
        let id: BuiltinId = parts
            .next()
            .ok_or_else(|| Error::BadParams("missing builtin id".into()))?
            .parse()?;
        let mut spec = Self::new(id);
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::BadParams(format!("expected key=value, got {part:?}")))?;
            let value: i64 = value
                .parse()
                .map_err(|_| Error::BadParams(format!("parameter {key} is not an integer")))?;
            spec.params.insert(key.to_string(), value);
        }
        Ok(spec)
    }

    fn param(&self, key: &str, default: i64, min: i64, max: i64) -> Result<i64> {
        let value = self.params.get(key).copied().unwrap_or(default);
        if value < min || value > max {
            return Err(Error::BadParams(format!(
                "{} requires {min} <= {key} <= {max}, got {value}",
                self.id
            )));
        }
        Ok(value)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::BadParams(format!("{} takes no parameter {k}", self.id))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for BuiltinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Catalan numbers `Cat(0), Cat(1), ...` up to `Cat(n)`.
pub fn catalan_numbers(n: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = BigUint::one();
    out.push(c.clone());
    for m in 1..=n {
        // Cat(m) = Cat(m-1) * 2(2m-1) / (m+1)
        c = c * BigUint::from(2 * (2 * m - 1)) / BigUint::from(m + 1);
        out.push(c.clone());
    }
    out
}

struct DyckCounts;

impl CountFn for DyckCounts {
    fn count(&self, j: usize) -> BigUint {
        if j == 0 || j % 2 == 1 {
            return BigUint::zero();
        }
        let n = j / 2;
        catalan_numbers(n - 1)[n - 1].clone() << n
    }

    fn for_each(&self, upto: usize, visit: &mut dyn FnMut(usize, &BigUint)) {
        let zero = BigUint::zero();
        let mut cat = BigUint::one();
        for j in 1..=upto {
            if j % 2 == 1 {
                visit(j, &zero);
                continue;
            }
            let n = j / 2;
            if n > 1 {
                let m = n - 1;
                cat = cat * BigUint::from(2 * (2 * m - 1)) / BigUint::from(m + 1);
            }
            visit(j, &(&cat << n));
        }
    }
}

const OPEN: [Symbol; 2] = [0, 1];

/// Minimal balanced words over `( [ ) ]`: the bracket depth returns to zero
/// only at the last letter.
struct DyckWords;

impl WordSource for DyckWords {
    fn for_each_word(&self, max_len: usize, visit: &mut dyn FnMut(&[Symbol])) {
        fn extend(word: &mut Vec<Symbol>, stack: &mut Vec<Symbol>, max_len: usize, visit: &mut dyn FnMut(&[Symbol])) {
            if let Some(&top) = stack.last() {
                // close
                stack.pop();
                word.push(top + 2);
                if stack.is_empty() {
                    visit(word);
                } else {
                    extend(word, stack, max_len, visit);
                }
                word.pop();
                stack.push(top);
                // open
                if word.len() + stack.len() + 2 <= max_len {
                    for t in OPEN {
                        word.push(t);
                        stack.push(t);
                        extend(word, stack, max_len, visit);
                        stack.pop();
                        word.pop();
                    }
                }
            }
        }
        if max_len < 2 {
            return;
        }
        for t in OPEN {
            let mut word = vec![t];
            let mut stack = vec![t];
            extend(&mut word, &mut stack, max_len, visit);
        }
    }
}

/// Words `a_1..a_n 0^{g(n)}` with `a_i` drawn from `letters`, for every `n`
/// in `n_min..` with `n + g(n) <= max_len`.
struct PaddedBlocks {
    letters: Vec<Symbol>,
    pad_symbol: Symbol,
    n_min: usize,
    pad: fn(usize) -> usize,
}

impl PaddedBlocks {
    fn length(&self, n: usize) -> usize {
        n + (self.pad)(n)
    }
}

impl WordSource for PaddedBlocks {
    fn for_each_word(&self, max_len: usize, visit: &mut dyn FnMut(&[Symbol])) {
        let mut n = self.n_min;
        while self.length(n) <= max_len {
            let pad = (self.pad)(n);
            let mut digits = vec![0usize; n];
            loop {
                let mut word: Vec<Symbol> = digits.iter().map(|&d| self.letters[d]).collect();
                word.extend(std::iter::repeat_n(self.pad_symbol, pad));
                visit(&word);
                // odometer
                let mut i = n;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < self.letters.len() {
                        break;
                    }
                    digits[i] = 0;
                    if i == 0 {
                        i = usize::MAX;
                        break;
                    }
                }
                if i == usize::MAX {
                    break;
                }
            }
            n += 1;
        }
    }
}

/// `|C_j| = letters^n` at `j = n + pad(n)`, plus optional extra counts at
/// fixed lengths.
struct PaddedCounts {
    letters: u32,
    multiplier: u32,
    n_min: usize,
    pad: fn(usize) -> usize,
    extra: Vec<(usize, u32)>,
}

impl CountFn for PaddedCounts {
    fn count(&self, j: usize) -> BigUint {
        let mut total = BigUint::zero();
        let mut n = self.n_min;
        while n + (self.pad)(n) <= j {
            if n + (self.pad)(n) == j {
                total += BigUint::from(self.letters).pow(n as u32) * self.multiplier;
            }
            n += 1;
        }
        for &(len, c) in &self.extra {
            if len == j {
                total += c;
            }
        }
        total
    }

    fn for_each(&self, upto: usize, visit: &mut dyn FnMut(usize, &BigUint)) {
        let mut n = self.n_min;
        let mut power = BigUint::from(self.letters).pow(n as u32);
        for j in 1..=upto {
            let mut total = BigUint::zero();
            if n + (self.pad)(n) == j {
                total += &power * self.multiplier;
                n += 1;
                power *= self.letters;
            }
            for &(len, c) in &self.extra {
                if len == j {
                    total += c;
                }
            }
            visit(j, &total);
        }
    }
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

fn pad_same(n: usize) -> usize {
    n
}

fn pad_log2(n: usize) -> usize {
    floor_log2(n)
}

fn pad_ln(n: usize) -> usize {
    1 + (n as f64).ln().floor() as usize
}

struct UnionSource(Vec<Box<dyn WordSource>>);

impl WordSource for UnionSource {
    fn for_each_word(&self, max_len: usize, visit: &mut dyn FnMut(&[Symbol])) {
        for s in &self.0 {
            s.for_each_word(max_len, visit);
        }
    }
}

struct FixedWords(Vec<Vec<Symbol>>);

impl WordSource for FixedWords {
    fn for_each_word(&self, max_len: usize, visit: &mut dyn FnMut(&[Symbol])) {
        for w in self.0.iter().filter(|w| w.len() <= max_len) {
            visit(w);
        }
    }
}

fn builtin_certificate(m: f64, beta: f64, poly: f64, period: usize) -> GrowthCertificate {
    GrowthCertificate {
        m,
        beta,
        poly,
        period,
        tight: true,
        provenance: CertificateProvenance::ProvedForBuiltin,
    }
}

fn asserted() -> Flag {
    Flag::holds(Provenance::Asserted)
}

/// Builds the family for a builtin spec.
pub fn builtin(spec: &BuiltinSpec) -> Result<CodeFamily> {
    let name = spec.to_string();
    let family = match spec.id {
        BuiltinId::Dyck => {
            spec.check_keys(&[])?;
            // |C_j| e^{-j beta} j^{3/2} is maximal at j = 2, where it is 2^{-1/2}
            let cert = builtin_certificate(std::f64::consts::FRAC_1_SQRT_2 * (1.0 + 1e-12), 1.5 * std::f64::consts::LN_2, 1.5, 2);
            let series = CountSeries::new(Arc::new(DyckCounts), None, Some(cert))?;
            let alphabet = Alphabet::new(["(", "[", ")", "]"])?;
            let mut f = CodeFamily::new(name, alphabet, series, Some(Arc::new(DyckWords)));
            f.flags.unique_decipherability = asserted();
            f.flags.unique_decomposition = asserted();
            // L_C is the whole Dyck shift
            f.flags.b_disjoint_from_l = Flag::Fails {
                provenance: Provenance::Asserted,
            };
            f.flags.prefix_suffix_proof = Some(
                "every proper prefix has more opening than closing brackets, every proper suffix more closing than opening".into(),
            );
            f.exact_hl = Some(3f64.ln());
            f.closed_form_f_at_hl = Some(1.0 / 3.0);
            f
        }
        BuiltinId::ExPositiveRecurrent => {
            spec.check_keys(&[])?;
            let counts = PaddedCounts {
                letters: 2,
                multiplier: 1,
                n_min: 1,
                pad: pad_same,
                extra: Vec::new(),
            };
            let cert = builtin_certificate(1.0, std::f64::consts::LN_2 / 2.0, 0.0, 2);
            let series = CountSeries::new(Arc::new(counts), None, Some(cert))?;
            let source = PaddedBlocks {
                letters: vec![1, 2],
                pad_symbol: 0,
                n_min: 1,
                pad: pad_same,
            };
            let mut f = CodeFamily::new(name, Alphabet::indexed(3), series, Some(Arc::new(source)));
            f.flags.unique_decipherability = asserted();
            f.flags.unique_decomposition = asserted();
            f.flags.b_disjoint_from_l = asserted();
            f.flags.prefix_suffix_proof = Some(
                "a proper prefix has fewer zeros than nonzero letters, a proper suffix more zeros than nonzero letters".into(),
            );
            f.exact_hl = Some(std::f64::consts::LN_2);
            f.closed_form_f_at_hl = Some(1.0);
            f
        }
        BuiltinId::ExNullRecurrent => {
            spec.check_keys(&[])?;
            let counts = PaddedCounts {
                letters: 4,
                multiplier: 1,
                n_min: 2,
                pad: pad_log2,
                extra: Vec::new(),
            };
            let cert = builtin_certificate(1.0, 4f64.ln(), 0.0, 1);
            let series = CountSeries::new(Arc::new(counts), None, Some(cert))?;
            let source = PaddedBlocks {
                letters: vec![1, 2, 3, 4],
                pad_symbol: 0,
                n_min: 2,
                pad: pad_log2,
            };
            let mut f = CodeFamily::new(name, Alphabet::indexed(5), series, Some(Arc::new(source)));
            f.flags.unique_decipherability = asserted();
            f.flags.unique_decomposition = asserted();
            f.flags.b_disjoint_from_l = asserted();
            f.flags.prefix_suffix_proof = Some(
                "a proper prefix with n nonzero letters has fewer than floor(log2 n) zeros, a proper suffix with m nonzero letters has at least floor(log2 m) zeros and ends in 0".into(),
            );
            f.exact_hl = Some(4f64.ln());
            f.closed_form_f_at_hl = Some(1.0);
            f
        }
        BuiltinId::NonuniformSpec => {
            spec.check_keys(&["N"])?;
            let n_letters = spec.param("N", 404, 1, 1 << 20)? as u32;
            let big_n = f64::from(n_letters);
            let counts = PaddedCounts {
                letters: n_letters,
                multiplier: 2,
                n_min: 1,
                pad: pad_ln,
                extra: vec![(1, 1)],
            };
            // |C_j| N^{-j} = 2 N^{-1-floor(ln n)} <= 2 n^{-ln N} and j <= 2n
            let ln_n = big_n.ln();
            let cert = builtin_certificate(2.0 * 2f64.powf(ln_n) * (1.0 + 1e-12), ln_n, ln_n, 1);
            let series = CountSeries::new(Arc::new(counts), None, Some(cert))?;
            // symbol i stands for the integer i - N
            let names: Vec<String> = (-(n_letters as i64)..=n_letters as i64).map(|v| v.to_string()).collect();
            let alphabet = Alphabet::new(names)?;
            let zero = n_letters;
            let positive: Vec<Symbol> = (zero + 1..=2 * zero).collect();
            let negative: Vec<Symbol> = (0..zero).collect();
            let blocks = |letters: Vec<Symbol>| -> Box<dyn WordSource> {
                Box::new(PaddedBlocks {
                    letters,
                    pad_symbol: zero,
                    n_min: 1,
                    pad: pad_ln,
                })
            };
            let source = UnionSource(vec![
                Box::new(FixedWords(vec![vec![zero]])),
                blocks(positive),
                blocks(negative),
            ]);
            let mut f = CodeFamily::new(name, alphabet, series, Some(Arc::new(source)));
            f.flags.prefix_suffix_proof = Some(
                "a proper prefix w 0^j has j < 1 + floor(ln |w|) zeros, a proper suffix with m nonzero letters has 1 + floor(ln n) >= 1 + floor(ln m) zeros, and pure-zero suffixes are never prefixes".into(),
            );
            f.exact_hl = Some(ln_n);
            f
        }
        BuiltinId::FullShift => {
            spec.check_keys(&["k"])?;
            let k = spec.param("k", 2, 1, 64)? as usize;
            let code = validate_code_set((0..k as Symbol).map(|s| vec![s]), Alphabet::indexed(k))?;
            let mut f = CodeFamily::from_explicit(code);
            f.name = name;
            f.flags.unique_decipherability = Flag::holds(Provenance::Decided);
            f.flags.unique_decomposition = Flag::holds(Provenance::Decided);
            f
        }
        BuiltinId::GoldenMeanCode => {
            spec.check_keys(&[])?;
            let code = validate_code_set([vec![0], vec![0, 1]], Alphabet::indexed(2))?;
            let mut f = CodeFamily::from_explicit(code);
            f.name = name;
            f.flags.unique_decomposition = Flag::holds(Provenance::Decided);
            f
        }
        BuiltinId::SingleWord => {
            spec.check_keys(&["len"])?;
            let len = spec.param("len", 1, 1, 64)? as usize;
            let mut word = vec![0; len - 1];
            word.push(1);
            let code = validate_code_set([word], Alphabet::indexed(2))?;
            let mut f = CodeFamily::from_explicit(code);
            f.name = name;
            f.flags.unique_decomposition = Flag::holds(Provenance::Decided);
            f
        }
    };
    Ok(family)
}

/// Expected values for a builtin, used by `verify-paper`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expectation {
    pub id: BuiltinId,
    pub source: &'static str,
    #[serde(serialize_with = "crate::report::real")]
    pub hl: f64,
    #[serde(serialize_with = "crate::report::opt_real")]
    pub f_at_hl: Option<f64>,
    pub regime: Option<Regime>,
    #[serde(serialize_with = "crate::report::opt_real")]
    pub hx: Option<f64>,
    #[serde(serialize_with = "crate::report::opt_real")]
    pub moment: Option<f64>,
    pub vere_jones: Option<VereJonesClass>,
    pub mme_beyond_l: Option<bool>,
}

pub fn paper_expectations(id: BuiltinId) -> Option<Expectation> {
    let ln = f64::ln;
    let base = Expectation {
        id,
        source: "",
        hl: 0.0,
        f_at_hl: None,
        regime: None,
        hx: None,
        moment: None,
        vere_jones: None,
        mme_beyond_l: None,
    };
    let e = match id {
        BuiltinId::Dyck => Expectation {
            source: "Dyck shift: f(ln 3) = 1/3, h(X) = ln 3",
            hl: ln(3.0),
            f_at_hl: Some(1.0 / 3.0),
            regime: Some(Regime::BelowOne),
            hx: Some(ln(3.0)),
            ..base
        },
        BuiltinId::ExPositiveRecurrent => Expectation {
            source: "positive recurrent loop graph: f(ln 2) = 1, moment 4, MME off L",
            hl: ln(2.0),
            f_at_hl: Some(1.0),
            regime: Some(Regime::EqualOne),
            hx: Some(ln(2.0)),
            moment: Some(4.0),
            vere_jones: Some(VereJonesClass::PositiveRecurrent),
            mme_beyond_l: Some(true),
            ..base
        },
        BuiltinId::ExNullRecurrent => Expectation {
            source: "null recurrent loop graph: f(ln 4) = 1, divergent moment, no MME off L",
            hl: ln(4.0),
            f_at_hl: Some(1.0),
            regime: Some(Regime::EqualOne),
            hx: Some(ln(4.0)),
            vere_jones: Some(VereJonesClass::NullRecurrent),
            mme_beyond_l: Some(false),
            ..base
        },
        BuiltinId::NonuniformSpec => Expectation {
            source: "non-uniform specification, N > e^6: f(ln N) < 1, h(X) = ln N",
            hl: ln(404.0),
            regime: Some(Regime::BelowOne),
            hx: Some(ln(404.0)),
            ..base
        },
        BuiltinId::GoldenMeanCode => Expectation {
            source: "finite code {0, 01}: h(X) = ln of the golden ratio",
            hl: f64::NEG_INFINITY,
            regime: Some(Regime::AboveOne),
            hx: Some(ln((1.0 + 5f64.sqrt()) / 2.0)),
            ..base
        },
        BuiltinId::FullShift | BuiltinId::SingleWord => return None,
    };
    Some(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(text: &str) -> CodeFamily {
        builtin(&BuiltinSpec::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn dyck_counts() {
        let f = family("dyck");
        let counts: Vec<u64> = (1..=8).map(|n| f.counts_of(n).try_into().unwrap()).collect();
        assert_eq!(counts, [0, 2, 0, 4, 0, 16, 0, 80]);
        let words: Vec<String> = f
            .enumerate_code_words(2)
            .unwrap()
            .iter()
            .map(|w| f.alphabet().render(w.symbols()))
            .collect();
        assert_eq!(words, ["()", "[]"]);
    }

    #[test]
    fn positive_recurrent_words() {
        let f = family("ex_positive_recurrent");
        assert_eq!(f.counts_of(6), BigUint::from(8u32));
        let words: Vec<String> = f.enumerate_code_words(4).unwrap().iter().map(ToString::to_string).collect();
        assert_eq!(words, ["10", "20", "1100", "1200", "2100", "2200"]);
    }

    #[test]
    fn null_recurrent_lengths() {
        let f = family("ex_null_recurrent");
        // n = 2 -> length 3, n = 3 -> 4, n = 4 -> 6
        assert_eq!(f.counts_of(3), BigUint::from(16u32));
        assert_eq!(f.counts_of(4), BigUint::from(64u32));
        assert_eq!(f.counts_of(5), BigUint::zero());
        assert_eq!(f.counts_of(6), BigUint::from(256u32));
    }

    #[test]
    fn nonuniform_small_n() {
        let f = family("nonuniform_spec N=2");
        assert_eq!(f.counts_of(1), BigUint::one());
        assert_eq!(f.counts_of(2), BigUint::from(4u32));
        let words = f.enumerate_code_words(3).unwrap();
        let rendered: Vec<String> = words.iter().map(|w| f.alphabet().render(w.symbols())).collect();
        assert!(rendered.contains(&"0".to_string()));
        assert!(rendered.contains(&"-2 0".to_string()));
        assert!(rendered.contains(&"1 2 0".to_string()));
        assert!(!rendered.contains(&"1 -2 0".to_string()));
    }

    #[test]
    fn parse_specs() {
        let s = BuiltinSpec::parse("full_shift k=3").unwrap();
        assert_eq!(s.params["k"], 3);
        assert_eq!(BuiltinSpec::parse("full_shift:k=3").unwrap(), s);
        assert!(BuiltinSpec::parse("nope").is_err());
        assert!(builtin(&BuiltinSpec::parse("full_shift k=0").unwrap()).is_err());
        assert!(builtin(&BuiltinSpec::parse("dyck k=2").unwrap()).is_err());
        let f = family("full_shift k=2");
        assert_eq!(f.exact_hl, Some(f64::NEG_INFINITY));
        assert_eq!(f.enumerate_code_words(3).unwrap().len(), 2);
    }

    #[test]
    fn catalan_recurrence() {
        let c: Vec<u64> = catalan_numbers(6).into_iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(c, [1, 1, 2, 5, 14, 42, 132]);
    }
}
