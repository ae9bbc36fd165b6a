//! Nearest-neighbour shifts of finite type: first-return loop counts at a
//! distinguished letter, entropy from the loop equation
//! `sum_i T_i / x^{i+1} = 1`, and the Perron eigenvalue as an independent
//! check.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{CodeFamily, Flag, Provenance, WordSource};
use crate::genfun::{CertificateProvenance, CountFn, CountSeries, GrowthCertificate, SolveOptions, TableCounts};
use crate::scalar::Real;
use crate::word::{Alphabet, Symbol};
use crate::Interval;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftSpec {
    alphabet: Alphabet,
    allowed: Vec<Vec<bool>>,
    distinguished: Symbol,
}

impl SftSpec {
    /// Validates irreducibility; the distinguished letter then lies on a
    /// cycle.
    pub fn new(alphabet: Alphabet, allowed: Vec<Vec<bool>>, distinguished: Symbol) -> Result<Self> {
        let k = alphabet.len();
        if allowed.len() != k || allowed.iter().any(|row| row.len() != k) {
            return Err(Error::BadParams(format!("adjacency must be {k} x {k}")));
        }
        if !alphabet.contains(distinguished) {
            return Err(Error::BadParams(format!("letter {distinguished} is not in the alphabet")));
        }
        if !is_irreducible(&allowed) {
            return Err(Error::NotIrreducible);
        }
        Ok(Self {
            alphabet,
            allowed,
            distinguished,
        })
    }

    /// Parses `letters: ...` followed by `forbid: x y` lines; `#` starts a
    /// comment. The distinguished letter is given by name.
    pub fn parse(text: &str, letter: Option<&str>) -> Result<Self> {
        let mut alphabet: Option<Alphabet> = None;
        let mut forbidden = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| parse_err(format!("expected `key: value`, got {line:?}")))?;
            let names: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "letters" => {
                    if alphabet.is_some() {
                        return Err(parse_err("letters given twice".into()));
                    }
                    alphabet = Some(Alphabet::new(names).map_err(|e| parse_err(e.to_string()))?);
                }
                "forbid" => {
                    let ab = alphabet.as_ref().ok_or_else(|| parse_err("forbid before letters".into()))?;
                    let [x, y] = names[..] else {
                        return Err(parse_err("forbid takes exactly two letters".into()));
                    };
                    let look = |n: &str| ab.lookup(n).ok_or_else(|| parse_err(format!("unknown letter {n:?}")));
                    forbidden.push((look(x)?, look(y)?));
                }
                other => return Err(parse_err(format!("unknown directive {other:?}"))),
            }
        }
        let alphabet = alphabet.ok_or(Error::Parse {
            line: 0,
            message: "missing letters line".into(),
        })?;
        let k = alphabet.len();
        let mut allowed = vec![vec![true; k]; k];
        for (x, y) in forbidden {
            allowed[x as usize][y as usize] = false;
        }
        let a = match letter {
            Some(name) => alphabet
                .lookup(name)
                .ok_or_else(|| Error::BadParams(format!("unknown letter {name:?}")))?,
            None => 0,
        };
        Self::new(alphabet, allowed, a)
    }

    pub fn full_shift(k: usize) -> Self {
        Self::new(Alphabet::indexed(k), vec![vec![true; k]; k], 0).expect("full shift is irreducible")
    }

    pub fn with_letter(&self, a: Symbol) -> Result<Self> {
        Self::new(self.alphabet.clone(), self.allowed.clone(), a)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn allowed(&self) -> &[Vec<bool>] {
        &self.allowed
    }

    pub fn distinguished(&self) -> Symbol {
        self.distinguished
    }

    fn others(&self) -> Vec<usize> {
        (0..self.alphabet.len()).filter(|&s| s != self.distinguished as usize).collect()
    }

    /// Adjacency restricted to the letters other than `a`.
    fn restricted(&self) -> Vec<Vec<bool>> {
        let others = self.others();
        others
            .iter()
            .map(|&s| others.iter().map(|&t| self.allowed[s][t]).collect())
            .collect()
    }
}

fn is_irreducible(allowed: &[Vec<bool>]) -> bool {
    let sccs = tarjan_scc(&graph(allowed));
    sccs.len() == 1 && allowed.iter().flatten().any(|&b| b)
}

fn graph(allowed: &[Vec<bool>]) -> DiGraph<(), ()> {
    let mut g = DiGraph::new();
    let nodes: Vec<_> = (0..allowed.len()).map(|_| g.add_node(())).collect();
    for (s, row) in allowed.iter().enumerate() {
        for (t, &ok) in row.iter().enumerate() {
            if ok {
                g.add_edge(nodes[s], nodes[t], ());
            }
        }
    }
    g
}

/// Strongly connected pieces of `allowed` that carry a cycle.
fn cyclic_components(allowed: &[Vec<bool>]) -> Vec<Vec<usize>> {
    tarjan_scc(&graph(allowed))
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .filter(|c| c.len() > 1 || allowed[c[0]][c[0]])
        .collect()
}

/// Collatz–Wielandt bounds on the spectral radius of an irreducible 0-1
/// matrix, with the final positive test vector.
#[derive(Debug, Clone)]
pub struct PerronBounds<S> {
    pub lower: S,
    pub upper: S,
    pub vector: Vec<S>,
    pub iterations: usize,
}

/// Power iteration on `A + I` from the all-ones vector. Adding the identity
/// makes the iteration converge for periodic matrices too.
pub fn perron_bounds<S: Real>(allowed: &[Vec<bool>], tol: S) -> PerronBounds<S> {
    let k = allowed.len();
    let mut x = vec![S::one(); k];
    let mut bounds = (S::zero(), S::infinity());
    let max_iter = 200_000;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let y: Vec<S> = (0..k)
            .map(|s| {
                (0..k)
                    .filter(|&t| allowed[s][t])
                    .fold(x[s], |acc, t| acc + x[t])
            })
            .collect();
        let ratios = (0..k).map(|s| y[s] / x[s]);
        let (lo, hi) = ratios.fold((S::infinity(), S::zero()), |(lo, hi), r| (lo.min(r), hi.max(r)));
        bounds = (lo - S::one(), hi - S::one());
        let norm = y.iter().fold(S::zero(), |m, &v| m.max(v));
        x = y.into_iter().map(|v| v / norm).collect();
        if hi - lo <= tol * hi {
            break;
        }
    }
    PerronBounds {
        lower: bounds.0,
        upper: bounds.1,
        vector: x,
        iterations,
    }
}

/// `ln` of the spectral radius of the adjacency matrix.
pub fn perron_entropy<S: Real>(sft: &SftSpec) -> S {
    let tol = S::of(1e-13).max(S::epsilon() * S::of(16.0));
    let b = perron_bounds::<S>(&sft.allowed, tol);
    (b.lower + (b.upper - b.lower) / S::of(2.0)).ln()
}

/// `h(Y^(a))`: entropy of the points avoiding `a`; `-inf` when no
/// bi-infinite path avoids it.
pub fn restricted_entropy(sft: &SftSpec) -> f64 {
    let b = sft.restricted();
    cyclic_components(&b)
        .iter()
        .map(|c| {
            let sub: Vec<Vec<bool>> = c.iter().map(|&s| c.iter().map(|&t| b[s][t]).collect()).collect();
            let pb = perron_bounds::<f64>(&sub, 1e-13);
            ((pb.lower + pb.upper) / 2.0).ln()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exact `T_i` for `i = 0, 1, ...`: paths `a -> a` of length `i + 1` whose
/// interior avoids `a`.
struct LoopCounts {
    a: usize,
    others: Vec<usize>,
    allowed: Vec<Vec<bool>>,
}

impl LoopCounts {
    fn new(sft: &SftSpec) -> Self {
        Self {
            a: sft.distinguished as usize,
            others: sft.others(),
            allowed: sft.allowed.clone(),
        }
    }

    /// Visits `(i, T_i)` for `i = 0..count`.
    fn each(&self, count: usize, visit: &mut dyn FnMut(usize, &BigUint)) {
        let one = BigUint::from(1u32);
        let zero = BigUint::zero();
        if count == 0 {
            return;
        }
        visit(0, if self.allowed[self.a][self.a] { &one } else { &zero });
        // v[s]: paths a -> s of the current length avoiding a after the start
        let mut v: Vec<BigUint> = self
            .others
            .iter()
            .map(|&s| if self.allowed[self.a][s] { one.clone() } else { zero.clone() })
            .collect();
        for i in 1..count {
            let t: BigUint = self
                .others
                .iter()
                .zip(&v)
                .filter(|(&s, _)| self.allowed[s][self.a])
                .map(|(_, c)| c)
                .sum();
            visit(i, &t);
            v = self
                .others
                .iter()
                .map(|&t| {
                    self.others
                        .iter()
                        .zip(&v)
                        .filter(|(&s, _)| self.allowed[s][t])
                        .map(|(_, c)| c)
                        .sum()
                })
                .collect();
        }
    }
}

impl CountFn for LoopCounts {
    fn count(&self, n: usize) -> BigUint {
        let mut out = BigUint::zero();
        self.for_each(n, &mut |j, c| {
            if j == n {
                out = c.clone();
            }
        });
        out
    }

    /// Code word counts `|C_n| = T_{n-1}`.
    fn for_each(&self, upto: usize, visit: &mut dyn FnMut(usize, &BigUint)) {
        self.each(upto, &mut |i, t| visit(i + 1, t));
    }
}

/// First-return counts `T_0, ..., T_{i_max}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopSpectrum {
    pub t: Vec<String>,
    pub i_max: usize,
    #[serde(skip)]
    certificate: Option<GrowthCertificate>,
    #[serde(skip)]
    counts: Vec<BigUint>,
}

impl LoopSpectrum {
    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// `(M, beta)` with `T_i <= M e^{(i+1) beta}` for all `i`; absent when
    /// the loop code is finite.
    pub fn certificate(&self) -> Option<(f64, f64)> {
        self.certificate.map(|c| (c.m, c.beta))
    }
}

pub fn first_return_counts(sft: &SftSpec, i_max: usize) -> LoopSpectrum {
    let mut counts = Vec::with_capacity(i_max + 1);
    LoopCounts::new(sft).each(i_max + 1, &mut |_, t| counts.push(t.clone()));
    LoopSpectrum {
        t: counts.iter().map(ToString::to_string).collect(),
        i_max,
        certificate: loop_certificate(sft),
        counts,
    }
}

/// Growth certificate for `|C_n| = T_{n-1}` from a Collatz–Wielandt
/// super-eigenvector of the restricted matrix `B`: with `B x <= lambda x`
/// and `x > 0`, `T_i = r^T B^{i-1} c <= (r . x) max_s(c_s / x_s) lambda^{i-1}`.
fn loop_certificate(sft: &SftSpec) -> Option<GrowthCertificate> {
    let b = sft.restricted();
    if cyclic_components(&b).is_empty() {
        return None;
    }
    let k = b.len();
    // perturb towards positivity so the test vector has no zero entries
    let pb = perron_bounds::<f64>(&b, 1e-13);
    let x: Vec<f64> = pb.vector.iter().map(|&v| v.max(1e-300) + 1e-9).collect();
    let lambda = (0..k)
        .map(|s| (0..k).filter(|&t| b[s][t]).map(|t| x[t]).sum::<f64>() / x[s])
        .fold(0.0, f64::max)
        * (1.0 + 1e-12 * (k as f64 + 2.0));
    let a = sft.distinguished as usize;
    let others = sft.others();
    let r_dot_x: f64 = others.iter().zip(&x).filter(|(&s, _)| sft.allowed[a][s]).map(|(_, v)| v).sum();
    let c_over_x = others
        .iter()
        .zip(&x)
        .filter(|(&s, _)| sft.allowed[s][a])
        .map(|(_, v)| 1.0 / v)
        .fold(0.0, f64::max);
    let k_bound = r_dot_x * c_over_x * (1.0 + 1e-12 * (k as f64 + 2.0));
    let t0 = if sft.allowed[a][a] { 1.0 } else { 0.0 };
    let m = (k_bound / (lambda * lambda)).max(t0 / lambda).max(f64::MIN_POSITIVE) * (1.0 + 1e-9);
    Some(GrowthCertificate {
        m,
        beta: lambda.ln(),
        poly: 0.0,
        period: 1,
        tight: false,
        provenance: CertificateProvenance::Derived,
    })
}

/// The count series of the loop code.
pub fn loop_series(sft: &SftSpec) -> Result<CountSeries> {
    let counts = LoopCounts::new(sft);
    match loop_certificate(sft) {
        Some(cert) => CountSeries::new(Arc::new(counts), None, Some(cert)),
        None => {
            // no cycle avoids a: loops are at most |A| long
            let k = sft.alphabet.len();
            let mut table = Vec::with_capacity(k);
            counts.for_each(k, &mut |_, c| table.push(c.clone()));
            while table.last().is_some_and(Zero::is_zero) {
                table.pop();
            }
            Ok(CountSeries::finite(TableCounts(table)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopEntropy {
    /// `ln x` where `x` solves the loop equation.
    pub h: f64,
    pub root_x: f64,
    pub enclosure: Interval,
    /// Truncation at which the enclosure met the tolerance.
    pub trunc: usize,
}

/// Solves the loop equation, doubling the truncation until the certified
/// enclosure is narrower than `tol`.
pub fn loop_entropy(sft: &SftSpec, tol: f64) -> Result<LoopEntropy> {
    let series = loop_series(sft)?;
    let mut trunc = 64;
    loop {
        let mut options = SolveOptions::<f64>::new(trunc);
        options.tol = tol;
        let root = series.solve_f_equals_one(&options);
        let done = trunc >= 1 << 14;
        match root {
            Ok(r) if r.enclosure.width() <= 2.0 * tol || done || series.is_finite() => {
                return Ok(LoopEntropy {
                    h: r.root,
                    root_x: r.root.exp(),
                    enclosure: r.enclosure,
                    trunc,
                });
            }
            Err(e) if done => return Err(e),
            _ => trunc *= 2,
        }
    }
}

/// Loop words `a x_1 .. x_i` with every `x_j != a` and `x_i -> a` allowed.
struct LoopWords {
    a: Symbol,
    allowed: Vec<Vec<bool>>,
}

impl WordSource for LoopWords {
    fn for_each_word(&self, max_len: usize, visit: &mut dyn FnMut(&[Symbol])) {
        fn extend(w: &LoopWords, word: &mut Vec<Symbol>, max_len: usize, visit: &mut dyn FnMut(&[Symbol])) {
            let last = *word.last().expect("non-empty") as usize;
            if w.allowed[last][w.a as usize] {
                visit(word);
            }
            if word.len() == max_len {
                return;
            }
            for next in 0..w.allowed.len() {
                if next != w.a as usize && w.allowed[last][next] {
                    word.push(next as Symbol);
                    extend(w, word, max_len, visit);
                    word.pop();
                }
            }
        }
        if max_len >= 1 {
            extend(self, &mut vec![self.a], max_len, visit);
        }
    }
}

/// The loop code as a family: `|C_n| = T_{n-1}`, `h(L) = h(Y^(a))`.
pub fn loop_family(sft: &SftSpec) -> Result<CodeFamily> {
    let series = loop_series(sft)?;
    let source = LoopWords {
        a: sft.distinguished,
        allowed: sft.allowed.clone(),
    };
    let name = format!("loops at {}", sft.alphabet.name(sft.distinguished));
    let mut f = CodeFamily::new(name, sft.alphabet.clone(), series, Some(Arc::new(source)));
    f.flags.unique_decipherability = Flag::holds(Provenance::Certified);
    f.flags.prefix_suffix_proof =
        Some("every code word starts with the distinguished letter and contains it nowhere else".into());
    f.exact_hl = Some(restricted_entropy(sft));
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SftEntropyReport {
    pub letter: String,
    pub h_loop: f64,
    pub h_perron: f64,
    #[serde(serialize_with = "crate::report::real")]
    pub h_restricted: f64,
    pub t_prefix: Vec<String>,
    pub agreement: bool,
    pub loop_detail: LoopEntropy,
}

pub fn sft_entropy(sft: &SftSpec, tol: f64, prefix: usize) -> Result<SftEntropyReport> {
    let lp = loop_entropy(sft, tol)?;
    let h_perron = perron_entropy::<f64>(sft);
    Ok(SftEntropyReport {
        letter: sft.alphabet.name(sft.distinguished).to_string(),
        h_loop: lp.h,
        h_perron,
        h_restricted: restricted_entropy(sft),
        t_prefix: first_return_counts(sft, prefix).t,
        agreement: (lp.h - h_perron).abs() <= 1e-8,
        loop_detail: lp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> SftSpec {
        SftSpec::parse("letters: 0 1\nforbid: 1 1\n", Some("0")).unwrap()
    }

    #[test]
    fn golden_mean_loops() {
        let s = first_return_counts(&golden(), 6);
        assert_eq!(s.t, ["1", "1", "0", "0", "0", "0", "0"]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let lp = loop_entropy(&golden(), 1e-10).unwrap();
        assert!((lp.h - phi.ln()).abs() < 1e-9);
        assert!((perron_entropy::<f64>(&golden()) - phi.ln()).abs() < 1e-10);
        assert_eq!(restricted_entropy(&golden()), f64::NEG_INFINITY);
    }

    #[test]
    fn full_shifts() {
        for k in 2..=6 {
            let sft = SftSpec::full_shift(k);
            let s = first_return_counts(&sft, 5);
            let expected: Vec<String> = (0..=5).map(|i| ((k - 1) as u64).pow(i).to_string()).collect();
            assert_eq!(s.t, expected);
            let lp = loop_entropy(&sft, 1e-11).unwrap();
            assert!((lp.h - (k as f64).ln()).abs() < 1e-10, "k={k}: {lp:?}");
            assert!((restricted_entropy(&sft) - ((k - 1) as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn cycle_has_zero_entropy() {
        let sft = SftSpec::parse("letters: a b c\nforbid: a a\nforbid: a c\nforbid: b a\nforbid: b b\nforbid: c b\nforbid: c c\n", None).unwrap();
        assert!(perron_entropy::<f64>(&sft).abs() < 1e-12);
        let lp = loop_entropy(&sft, 1e-10).unwrap();
        assert!(lp.h.abs() < 1e-9);
    }

    #[test]
    fn rejects_reducible() {
        let err = SftSpec::parse("letters: 0 1\nforbid: 1 0\n", None).unwrap_err();
        assert_eq!(err, Error::NotIrreducible);
        assert!(matches!(
            SftSpec::parse("letters: 0 1\nforbid: 0 2\n", None),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn loop_words_match_counts() {
        let sft = SftSpec::parse("letters: 0 1 2\nforbid: 2 2\n", None).unwrap();
        let f = loop_family(&sft).unwrap();
        let words = f.enumerate_code_words(8).unwrap();
        for n in 1..=8 {
            let got = words.iter().filter(|w| w.len() == n).count();
            assert_eq!(BigUint::from(got), f.counts_of(n), "n={n}");
        }
    }
}
