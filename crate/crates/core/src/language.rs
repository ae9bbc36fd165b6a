//! Brute-force language oracle for coded subshifts, `h(L)` estimation and
//! the counting inequalities checked at runtime.
//!
//! Words of one length are packed big-endian into `u128` keys in base
//! `|A|`, so sorted keys are in lexicographic order.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::classify::DEFAULT_TRUNC;
use crate::codecheck::{sardinas_patterson, Verdict};
use crate::error::{Error, Result};
use crate::family::CodeFamily;
use crate::genfun::ln_biguint;
use crate::word::{Symbol, Word};

pub const DEFAULT_BUDGET: usize = 10_000_000;
pub const BUDGET_ENV: &str = "CODED_SHIFT_BUDGET";

/// State budget: `CODED_SHIFT_BUDGET` if set and valid, else the default.
pub fn budget() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

const DENSE_LIMIT: u128 = 1 << 24;

enum KeySet {
    Dense { bits: Vec<u64>, len: usize },
    Sparse(HashSet<u128>),
}

impl KeySet {
    fn new(space: Option<u128>) -> Self {
        match space {
            Some(s) if s <= DENSE_LIMIT => KeySet::Dense {
                bits: vec![0; (s as usize).div_ceil(64)],
                len: 0,
            },
            _ => KeySet::Sparse(HashSet::new()),
        }
    }

    fn insert(&mut self, key: u128) -> bool {
        match self {
            KeySet::Dense { bits, len } => {
                let (i, b) = ((key >> 6) as usize, key & 63);
                let fresh = bits[i] >> b & 1 == 0;
                if fresh {
                    bits[i] |= 1 << b;
                    *len += 1;
                }
                fresh
            }
            KeySet::Sparse(set) => set.insert(key),
        }
    }

    fn len(&self) -> usize {
        match self {
            KeySet::Dense { len, .. } => *len,
            KeySet::Sparse(set) => set.len(),
        }
    }

    fn into_sorted(self) -> Vec<u128> {
        match self {
            KeySet::Dense { bits, .. } => {
                let mut out = Vec::new();
                for (i, &w) in bits.iter().enumerate() {
                    let mut w = w;
                    while w != 0 {
                        let b = w.trailing_zeros();
                        out.push(((i as u128) << 6) | u128::from(b));
                        w &= w - 1;
                    }
                }
                out
            }
            KeySet::Sparse(set) => {
                let mut out: Vec<u128> = set.into_iter().collect();
                out.sort_unstable();
                out
            }
        }
    }
}

/// A set of words of one length, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSet {
    n: usize,
    base: u128,
    keys: Vec<u128>,
}

impl WordSet {
    pub fn length(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, symbols: &[Symbol]) -> bool {
        symbols.len() == self.n && self.keys.binary_search(&encode(symbols, self.base)).is_ok()
    }

    pub fn is_subset(&self, other: &WordSet) -> bool {
        self.n == other.n && self.keys.iter().all(|k| other.keys.binary_search(k).is_ok())
    }

    pub fn symbols(&self) -> impl Iterator<Item = Vec<Symbol>> + '_ {
        self.keys.iter().map(|&k| decode(k, self.n, self.base))
    }

    pub fn words(&self) -> Vec<Word> {
        self.symbols().map(|s| Word::new(s).expect("n >= 1")).collect()
    }
}

fn encode(symbols: &[Symbol], base: u128) -> u128 {
    symbols.iter().fold(0, |k, &s| k * base + u128::from(s))
}

fn decode(mut key: u128, n: usize, base: u128) -> Vec<Symbol> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = (key % base) as Symbol;
        key /= base;
    }
    out
}

/// `base^n`, or `None` past `u128`.
fn space(base: u128, n: usize) -> Option<u128> {
    (0..n).try_fold(1u128, |acc, _| acc.checked_mul(base))
}

/// Prefixes, suffixes, subwords and whole code words of every length up to
/// `n_max`, from the code words of length at most `cap`.
struct Pieces {
    base: u128,
    /// index k holds words of length k; index 0 unused
    w: Vec<Vec<u128>>,
    p: Vec<Vec<u128>>,
    s: Vec<Vec<u128>>,
    c: Vec<Vec<u128>>,
}

impl Pieces {
    fn collect(code: &CodeFamily, n_max: usize, cap: usize) -> Result<Self> {
        let base = code.alphabet().len() as u128;
        if space(base, n_max).is_none_or(|s| s > u128::MAX / base) {
            return Err(Error::BadParams(format!(
                "words of length {n_max} over {base} letters exceed the oracle's key width"
            )));
        }
        let fresh = || (0..=n_max).map(|k| KeySet::new(space(base, k))).collect::<Vec<_>>();
        let (mut w, mut p, mut s, mut c) = (fresh(), fresh(), fresh(), fresh());
        code.for_each_word(cap, &mut |word| {
            let len = word.len();
            if len <= n_max {
                c[len].insert(encode(word, base));
            }
            for start in 0..len {
                let mut key = 0u128;
                for k in 1..=n_max.min(len - start) {
                    key = key * base + u128::from(word[start + k - 1]);
                    w[k].insert(key);
                    if start == 0 {
                        p[k].insert(key);
                    }
                    if start + k == len {
                        s[k].insert(key);
                    }
                }
            }
        })?;
        let seal = |v: Vec<KeySet>| v.into_iter().map(KeySet::into_sorted).collect();
        Ok(Self {
            base,
            w: seal(w),
            p: seal(p),
            s: seal(s),
            c: seal(c),
        })
    }

    fn set(&self, keys: &[Vec<u128>], n: usize) -> WordSet {
        WordSet {
            n,
            base: self.base,
            keys: keys[n].clone(),
        }
    }

    /// All length-`n` windows of concatenations of the collected code words.
    ///
    /// A window starts inside some code word: either it fits in that word
    /// (a subword) or it begins with a suffix and continues across whole
    /// words, ending in a prefix. Partial windows are deduplicated.
    fn language(&self, n: usize, budget: usize) -> Result<WordSet> {
        let base = self.base;
        let mut out = KeySet::new(space(base, n));
        for &k in &self.w[n] {
            out.insert(k);
        }
        // partial[k]: continuable windows of length k that end on a word boundary
        let mut partial: Vec<KeySet> = (0..n).map(|k| KeySet::new(space(base, k))).collect();
        for k in 1..n {
            for &key in &self.s[k] {
                partial[k].insert(key);
            }
        }
        let mut states = 0usize;
        for k in 1..n {
            let current = std::mem::replace(&mut partial[k], KeySet::new(Some(0))).into_sorted();
            states += current.len();
            if states > budget {
                return Err(Error::BudgetExceeded(budget));
            }
            let r = n - k;
            for &key in &current {
                for j in 1..r {
                    let shift = space(base, j).expect("fits");
                    for &cw in &self.c[j] {
                        partial[k + j].insert(key * shift + cw);
                    }
                }
                let shift = space(base, r).expect("fits");
                for &pre in &self.p[r] {
                    out.insert(key * shift + pre);
                }
            }
            if out.len() > budget {
                return Err(Error::BudgetExceeded(budget));
            }
        }
        Ok(WordSet {
            n,
            base,
            keys: out.into_sorted(),
        })
    }
}

/// `L_n`, `W_n`, `P_n` and `S_n` under a code-length cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSample {
    pub n: usize,
    pub cap: usize,
    pub l_n: WordSet,
    pub w_n: WordSet,
    pub p_n: WordSet,
    pub s_n: WordSet,
}

pub fn sample_language(code: &CodeFamily, n: usize, cap: usize) -> Result<LanguageSample> {
    sample_language_with_budget(code, n, cap, budget())
}

pub fn sample_language_with_budget(code: &CodeFamily, n: usize, cap: usize, budget: usize) -> Result<LanguageSample> {
    if n == 0 {
        return Err(Error::BadParams("n must be positive".into()));
    }
    let pieces = Pieces::collect(code, n, cap)?;
    Ok(LanguageSample {
        n,
        cap,
        l_n: pieces.language(n, budget)?,
        w_n: pieces.set(&pieces.w, n),
        p_n: pieces.set(&pieces.p, n),
        s_n: pieces.set(&pieces.s, n),
    })
}

/// `|L_n|` for `n = 1..=n_max`, from one pass over the code words.
pub fn language_counts(code: &CodeFamily, n_max: usize, cap: usize) -> Result<Vec<usize>> {
    let pieces = Pieces::collect(code, n_max, cap)?;
    let budget = budget();
    (1..=n_max).map(|n| pieces.language(n, budget).map(|l| l.len())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubwordCounts {
    pub n: usize,
    pub w: usize,
    pub p: usize,
    pub s: usize,
}

fn subword_counts(code: &CodeFamily, n_max: usize, cap: usize) -> Result<Vec<SubwordCounts>> {
    let pieces = Pieces::collect(code, n_max, cap)?;
    Ok((1..=n_max)
        .map(|n| SubwordCounts {
            n,
            w: pieces.w[n].len(),
            p: pieces.p[n].len(),
            s: pieces.s[n].len(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HlEstimate {
    pub n_max: usize,
    pub cap: usize,
    /// `(n, ln|W_n| / n)`; `-inf` when `W_n` is empty.
    pub values: Vec<(usize, f64)>,
    #[serde(serialize_with = "crate::report::real")]
    pub estimate: f64,
    #[serde(serialize_with = "crate::report::opt_real")]
    pub exact: Option<f64>,
    #[serde(serialize_with = "crate::report::opt_real")]
    pub deviation: Option<f64>,
}

/// Estimates `h(L)` as the largest `ln|W_n|/n` over the trailing quarter
/// `n` in `[ceil(3 n_max / 4), n_max]`.
///
/// The values typically approach `h(L)` from above like `ln(n)/n`, so a
/// wider window biases the estimate upwards.
#[allow(non_snake_case)]
pub fn estimate_hL(code: &CodeFamily, n_max: usize, cap: usize) -> Result<HlEstimate> {
    let counts = subword_counts(code, n_max, cap)?;
    let values: Vec<(usize, f64)> = counts
        .iter()
        .map(|c| {
            let v = if c.w == 0 {
                f64::NEG_INFINITY
            } else {
                (c.w as f64).ln() / c.n as f64
            };
            (c.n, v)
        })
        .collect();
    let estimate = values
        .iter()
        .filter(|(n, _)| 4 * n >= 3 * n_max)
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let exact = code.exact_hl;
    let deviation = exact.filter(|e| e.is_finite()).map(|e| (estimate - e).abs());
    Ok(HlEstimate {
        n_max,
        cap,
        values,
        estimate,
        exact,
        deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WordcountRow {
    pub n: usize,
    pub l_n: usize,
    /// `ln|L_n| - n h`
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordcountReport {
    pub h: f64,
    pub cap: usize,
    pub rows: Vec<WordcountRow>,
    pub holds: bool,
}

/// Checks `|L_n| >= e^{n h}` for `n <= n_max`.
pub fn verify_wordcount(code: &CodeFamily, h: f64, n_max: usize, cap: usize) -> Result<WordcountReport> {
    let counts = language_counts(code, n_max, cap)?;
    let rows: Vec<WordcountRow> = counts
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let n = i + 1;
            let margin = (l as f64).ln() - n as f64 * h;
            // allow rounding in n*h when the bound is attained
            let holds = margin >= -1e-12 * (1.0 + n as f64 * h.abs());
            WordcountRow { n, l_n: l, margin, holds }
        })
        .collect();
    let holds = rows.iter().all(|r| r.holds);
    Ok(WordcountReport { h, cap, rows, holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aux1Row {
    pub n: usize,
    pub l_n: usize,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aux1Report {
    pub alpha: f64,
    pub m: f64,
    pub f_upper: f64,
    pub cap: usize,
    pub subwords: Vec<SubwordCounts>,
    pub rows: Vec<Aux1Row>,
    pub holds: bool,
}

/// Checks `|L_n| < e^{n alpha} (M + n M^2 / (1 - f(alpha)))`.
///
/// Without an explicit `m`, takes one more than the largest
/// `max(|P_n|, |S_n|, |W_n|) e^{-n alpha}` over the sampled range.
pub fn verify_aux1_bound(
    code: &CodeFamily,
    alpha: f64,
    m: Option<f64>,
    n_max: usize,
    cap: usize,
) -> Result<Aux1Report> {
    let f_upper = code.series().eval_f(alpha, DEFAULT_TRUNC).upper;
    if !(f_upper < 1.0) {
        return Err(Error::PreconditionFailed(format!(
            "f({alpha}) is not certified below 1 (upper bound {f_upper})"
        )));
    }
    let subwords = subword_counts(code, n_max, cap)?;
    let scaled = |c: &SubwordCounts| c.w.max(c.p).max(c.s) as f64 * (-(c.n as f64) * alpha).exp();
    let m = m.unwrap_or_else(|| subwords.iter().map(scaled).fold(0.0, f64::max) + 1.0);
    if let Some(c) = subwords.iter().find(|c| scaled(c) >= m) {
        return Err(Error::PreconditionFailed(format!(
            "M = {m} does not bound the prefix, suffix and subword counts at n = {}",
            c.n
        )));
    }
    let counts = language_counts(code, n_max, cap)?;
    let rows: Vec<Aux1Row> = counts
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let n = (i + 1) as f64;
            let bound = (n * alpha).exp() * (m + n * m * m / (1.0 - f_upper));
            Aux1Row {
                n: i + 1,
                l_n: l,
                bound,
                holds: (l as f64) < bound,
            }
        })
        .collect();
    let holds = rows.iter().all(|r| r.holds);
    Ok(Aux1Report {
        alpha,
        m,
        f_upper,
        cap,
        subwords,
        rows,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aux2Row {
    pub k: usize,
    /// Length maximizing `D_k(N) e^{-N alpha}`.
    pub n: usize,
    /// Number of `k`-tuples of code words of length at most `t` with total length `n`.
    pub tuples: String,
    pub ln_tuples: f64,
    pub ln_bound: f64,
    pub holds: bool,
    /// `|L_n|` from the oracle when `n` is small enough to enumerate.
    pub oracle_l_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aux2Report {
    pub alpha: f64,
    pub t: usize,
    pub eta: f64,
    pub rows: Vec<Aux2Row>,
    pub holds: bool,
}

/// Checks the composition lower bound
/// `D_k(N_k) >= e^{N_k alpha} eta^k / (t k)` for `k <= k_max`, where
/// `eta = sum_{j <= t} |C_j| e^{-j alpha}`.
///
/// `D_k(N)` counts `k`-tuples of code words; with unique decomposition
/// distinct tuples give distinct words of `L_N`, which the oracle confirms
/// for `N <= oracle_n`.
pub fn verify_aux2_growth(
    code: &CodeFamily,
    alpha: f64,
    t: usize,
    k_max: usize,
    oracle_n: usize,
) -> Result<Aux2Report> {
    if t == 0 {
        return Err(Error::BadParams("t must be positive".into()));
    }
    let eta = code.series().eval_f(alpha, t);
    // only the first t lengths enter; drop the tail
    let eta_value = eta.lower;
    if !(eta_value > 1.0) {
        return Err(Error::EtaNotAboveOne(eta_value));
    }
    let mut decomposes = code.flags.decomposition_established();
    if !decomposes {
        if let Some(explicit) = code.explicit() {
            decomposes = sardinas_patterson(explicit).verdict == Verdict::Holds;
        }
    }
    if !decomposes {
        return Err(Error::UniqueDecompositionUnknown);
    }
    let counts: Vec<BigUint> = (1..=t).map(|j| code.counts_of(j)).collect();
    let oracle = if oracle_n > 0 {
        language_counts(code, oracle_n, t)?
    } else {
        Vec::new()
    };
    let ln_eta = eta_value.ln();
    // d[N] = number of k-tuples with total length N
    let mut d: Vec<BigUint> = vec![BigUint::from(1u32)];
    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut next = vec![BigUint::zero(); d.len() + t];
        for (n0, v) in d.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, c) in counts.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                next[n0 + j + 1] += v * c;
            }
        }
        d = next;
        let (n, ln_tuples) = d
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(n, v)| (n, ln_biguint(v)))
            .max_by(|a, b| {
                (a.1 - a.0 as f64 * alpha)
                    .total_cmp(&(b.1 - b.0 as f64 * alpha))
                    .then(b.0.cmp(&a.0))
            })
            .expect("some tuple exists");
        let ln_bound = n as f64 * alpha + k as f64 * ln_eta - ((t * k) as f64).ln();
        // the bound is attained when only one total length is possible
        let holds = ln_tuples >= ln_bound - 1e-12 * (1.0 + ln_bound.abs());
        rows.push(Aux2Row {
            k,
            n,
            tuples: d[n].to_string(),
            ln_tuples,
            ln_bound,
            holds,
            oracle_l_n: oracle.get(n.wrapping_sub(1)).copied(),
        });
    }
    let consistent = rows.iter().all(|r| {
        r.oracle_l_n
            .is_none_or(|l| r.tuples.parse::<BigUint>().is_ok_and(|d| d <= BigUint::from(l)))
    });
    let holds = consistent && rows.iter().all(|r| r.holds);
    Ok(Aux2Report {
        alpha,
        t,
        eta: eta_value,
        rows,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin, BuiltinSpec};
    use crate::word::{validate_code_set, Alphabet};

    fn explicit(words: &[&str], k: usize) -> CodeFamily {
        let words = words.iter().map(|w| Word::from_digits(w).unwrap().into_symbols());
        CodeFamily::from_explicit(validate_code_set(words, Alphabet::indexed(k)).unwrap())
    }

    fn family(text: &str) -> CodeFamily {
        builtin(&BuiltinSpec::parse(text).unwrap()).unwrap()
    }

    fn strings(set: &WordSet) -> Vec<String> {
        set.words().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn golden_mean_language() {
        let code = explicit(&["0", "01"], 2);
        let s = sample_language(&code, 3, 2).unwrap();
        assert_eq!(strings(&s.l_n), ["000", "001", "010", "100", "101"]);
        assert!(s.w_n.is_empty());
        assert_eq!(strings(&sample_language(&code, 1, 2).unwrap().l_n), ["0", "1"]);
        assert_eq!(language_counts(&code, 6, 2).unwrap(), [2, 3, 5, 8, 13, 21]);
    }

    #[test]
    fn positive_recurrent_two_letter_language() {
        let s = sample_language(&family("ex_positive_recurrent"), 2, 8).unwrap();
        assert_eq!(strings(&s.w_n), ["00", "10", "11", "12", "20", "21", "22"]);
        assert_eq!(strings(&s.l_n), ["00", "01", "02", "10", "11", "12", "20", "21", "22"]);
    }

    #[test]
    fn budget_is_enforced() {
        let code = family("dyck");
        assert_eq!(
            sample_language_with_budget(&code, 6, 6, 10).unwrap_err(),
            Error::BudgetExceeded(10)
        );
    }

    #[test]
    fn hl_estimates() {
        let e = estimate_hL(&family("ex_positive_recurrent"), 12, 24).unwrap();
        assert!(e.deviation.unwrap() < 0.08, "{e:?}");
        let e = estimate_hL(&family("dyck"), 10, 20).unwrap();
        assert!(e.deviation.unwrap() < 0.15, "{e:?}");
        let e = estimate_hL(&explicit(&["0", "01"], 2), 6, 6).unwrap();
        assert_eq!(e.estimate, f64::NEG_INFINITY);
    }

    #[test]
    fn wordcount_on_full_shift() {
        let r = verify_wordcount(&explicit(&["0", "1"], 2), 2f64.ln(), 10, 1).unwrap();
        assert!(r.holds);
        assert!(r.rows.iter().all(|row| row.margin.abs() < 1e-9));
    }

    #[test]
    fn aux_bounds_on_golden_mean() {
        let code = explicit(&["0", "01"], 2);
        assert!(verify_aux1_bound(&code, 0.5, None, 10, 2).unwrap().holds);
        let r = verify_aux2_growth(&code, 0.4, 2, 12, 10).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(
            verify_aux2_growth(&code, 2.0, 2, 3, 0).unwrap_err(),
            Error::EtaNotAboveOne(code.series().eval_f(2.0, 2).lower)
        );
        let ambiguous = explicit(&["1", "10", "01"], 2);
        assert_eq!(
            verify_aux2_growth(&ambiguous, 0.1, 2, 3, 0).unwrap_err(),
            Error::UniqueDecompositionUnknown
        );
    }
}
