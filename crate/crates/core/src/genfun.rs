//! The code-word generating function `f(alpha) = sum_j |C_j| e^{-j alpha}`.
//!
//! Evaluation always returns a [`BoundedValue`]: the partial sum up to the
//! truncation length with a rounding-error margin, plus a tail bound taken
//! from the series' [`GrowthCertificate`]. Without a usable certificate the
//! upper end is `+inf`, which is how divergence is reported.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of leading lengths checked against a growth certificate.
pub const CERTIFICATE_SPOT_CHECK: usize = 200;

/// Default sample horizon for [`CountSeries::abscissa`].
pub const ABSCISSA_SAMPLES: usize = 2000;

/// Exact code-word counts `n -> |C_n|` for `n >= 1`.
pub trait CountFn: Send + Sync {
    fn count(&self, n: usize) -> BigUint;

    /// Visits `|C_1|, ..., |C_upto|` in order. Implementors with a cheap
    /// recurrence should override this.
    fn for_each(&self, upto: usize, visit: &mut dyn FnMut(usize, &BigUint)) {
        for n in 1..=upto {
            visit(n, &self.count(n));
        }
    }
}

/// Counts stored in a table; lengths past the end count zero.
#[derive(Debug, Clone)]
pub struct TableCounts(pub Vec<BigUint>);

impl TableCounts {
    pub fn from_lengths(lengths: impl IntoIterator<Item = usize>) -> Self {
        let mut table: Vec<BigUint> = Vec::new();
        for len in lengths {
            assert!(len > 0, "code words have positive length");
            if table.len() < len {
                table.resize(len, BigUint::zero());
            }
            table[len - 1] += 1u32;
        }
        Self(table)
    }
}

impl CountFn for TableCounts {
    fn count(&self, n: usize) -> BigUint {
        n.checked_sub(1)
            .and_then(|i| self.0.get(i))
            .cloned()
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateProvenance {
    ProvedForBuiltin,
    Derived,
    UserAsserted,
}

/// Asserts `|C_j| <= m * e^{j beta} * j^{-poly}` for every `j >= 1`, and
/// `|C_j| = 0` whenever `period` does not divide `j`.
///
/// `tight` records that `beta` is exactly the exponential growth rate of the
/// counts (the abscissa of convergence), which only builtins can claim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCertificate {
    pub m: f64,
    pub beta: f64,
    pub poly: f64,
    pub period: usize,
    pub tight: bool,
    pub provenance: CertificateProvenance,
}

impl GrowthCertificate {
    pub fn exponential(m: f64, beta: f64, provenance: CertificateProvenance) -> Self {
        Self {
            m,
            beta,
            poly: 0.0,
            period: 1,
            tight: false,
            provenance,
        }
    }

    /// Bound on `sum_{j > trunc} j^weight |C_j| e^{-j alpha}`, or `None`
    /// when the certificate does not make that tail converge.
    pub fn tail(&self, alpha: f64, trunc: usize, weight: u32) -> Option<f64> {
        let delta = alpha - self.beta;
        let d = self.period.max(1);
        let j1 = (trunc / d + 1) * d;
        let j1f = j1 as f64;
        let df = d as f64;
        // effective power of j left in the summand
        let q = self.poly - f64::from(weight);
        let bound = if delta > 0.0 {
            let r = (-delta * df).exp();
            let head = (-delta * j1f).exp();
            if q >= 0.0 {
                self.m * j1f.powf(-q) * head / (1.0 - r)
            } else {
                // weight 1 with poly < 1: j^{1-poly} <= j * j1^{-poly}
                let weighted = j1f / (1.0 - r) + df * r / ((1.0 - r) * (1.0 - r));
                self.m * j1f.powf(-self.poly) * head * weighted
            }
        } else if delta == 0.0 && q > 1.0 {
            self.m * (j1f.powf(-q) + j1f.powf(1.0 - q) / (df * (q - 1.0)))
        } else {
            return None;
        };
        if bound.is_finite() {
            Some(bound * (1.0 + 1e-12))
        } else {
            None
        }
    }

    fn admits(&self, n: usize, ln_count: f64) -> bool {
        if ln_count == f64::NEG_INFINITY {
            return true;
        }
        if !n.is_multiple_of(self.period.max(1)) {
            return false;
        }
        let limit = self.m.ln() + n as f64 * self.beta - self.poly * (n as f64).ln();
        ln_count <= limit + 1e-9 * (1.0 + limit.abs())
    }
}

/// `ln n` for an arbitrary-precision integer; `-inf` for zero.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy)]
struct LogCount {
    ln: f64,
    /// The count itself when it is an integer below 2^53.
    small: Option<f64>,
}

const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0;

/// The sequence `|C_n|` with optional growth certificate and finite support.
#[derive(Clone)]
pub struct CountSeries {
    counts: Arc<dyn CountFn>,
    certificate: Option<GrowthCertificate>,
    max_length: Option<usize>,
    cache: Arc<Mutex<Vec<LogCount>>>,
}

impl fmt::Debug for CountSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountSeries")
            .field("certificate", &self.certificate)
            .field("max_length", &self.max_length)
            .finish_non_exhaustive()
    }
}

impl CountSeries {
    /// Builds a series, spot-checking the certificate and the finite support
    /// on the first [`CERTIFICATE_SPOT_CHECK`] lengths.
    pub fn new(
        counts: Arc<dyn CountFn>,
        max_length: Option<usize>,
        certificate: Option<GrowthCertificate>,
    ) -> Result<Self> {
        let series = Self {
            counts,
            certificate,
            max_length,
            cache: Arc::new(Mutex::new(Vec::new())),
        };
        let horizon = CERTIFICATE_SPOT_CHECK.max(max_length.map_or(0, |m| m + 5));
        let logs = series.log_counts(horizon);
        for (i, lc) in logs.iter().enumerate() {
            let n = i + 1;
            if let Some(max) = max_length {
                if n > max && lc.ln > f64::NEG_INFINITY {
                    return Err(Error::PreconditionFailed(format!(
                        "count at length {n} beyond declared maximum length {max}"
                    )));
                }
            }
            if let Some(cert) = &series.certificate {
                if n <= CERTIFICATE_SPOT_CHECK && !cert.admits(n, lc.ln) {
                    return Err(Error::CertificateViolated { length: n });
                }
            }
        }
        Ok(series)
    }

    /// Series for a finite table of counts.
    pub fn finite(counts: TableCounts) -> Self {
        let max = counts.0.len();
        Self::new(Arc::new(counts), Some(max), None).expect("table counts are consistent")
    }

    pub fn count(&self, n: usize) -> BigUint {
        if n == 0 || self.max_length.is_some_and(|m| n > m) {
            return BigUint::zero();
        }
        self.counts.count(n)
    }

    /// Streams `|C_1| ..= |C_upto|`.
    pub fn for_each_count(&self, upto: usize, visit: &mut dyn FnMut(usize, &BigUint)) {
        let upto = self.max_length.map_or(upto, |m| upto.min(m));
        self.counts.for_each(upto, visit);
    }

    pub fn certificate(&self) -> Option<&GrowthCertificate> {
        self.certificate.as_ref()
    }

    pub fn max_length(&self) -> Option<usize> {
        self.max_length
    }

    pub fn is_finite(&self) -> bool {
        self.max_length.is_some()
    }

    /// `ln |C_n|` for `n = 1..=upto`.
    pub fn ln_counts(&self, upto: usize) -> Vec<f64> {
        self.log_counts(upto).iter().map(|lc| lc.ln).collect()
    }

    fn log_counts(&self, upto: usize) -> Vec<LogCount> {
        let upto = self.max_length.map_or(upto, |m| upto.min(m));
        let mut cache = self.cache.lock().expect("count cache poisoned");
        if cache.len() < upto {
            let target = upto.max(2 * cache.len());
            let target = self.max_length.map_or(target, |m| target.min(m));
            let known = cache.len();
            let mut fresh = Vec::with_capacity(target - known);
            self.counts.for_each(target, &mut |n, c| {
                if n > known {
                    let small = c.to_f64().filter(|v| *v < EXACT_LIMIT);
                    fresh.push(LogCount {
                        ln: ln_biguint(c),
                        small,
                    });
                }
            });
            cache.extend(fresh);
        }
        cache[..upto].to_vec()
    }

    fn eval_weighted<S: Real>(&self, alpha: S, trunc: usize, weight: u32) -> BoundedValue<S> {
        assert!(trunc >= 1, "truncation must be positive");
        let logs = self.log_counts(trunc);
        let eps = S::epsilon();
        let mut sum = Compensated::<S>::default();
        let mut err = S::zero();
        let mut exact = true;
        for (i, lc) in logs.iter().enumerate() {
            if lc.ln == f64::NEG_INFINITY {
                continue;
            }
            let j = i + 1;
            let factor = if weight == 1 { j as f64 } else { 1.0 };
            let exact_term = lc
                .small
                .map(|c| c * factor)
                .filter(|v| alpha == S::zero() && *v < EXACT_LIMIT && S::of(*v).as_f64() == *v);
            match exact_term {
                Some(v) => sum.add(S::of(v)),
                None => {
                    exact = false;
                    let ln = S::of(lc.ln);
                    let jf = S::of_usize(j);
                    let t = (ln - jf * alpha).exp() * S::of(factor);
                    let scale = ln.abs() + jf * alpha.abs() + S::one();
                    // f64 error of the log itself plus the exp/multiply rounding
                    let rel = eps * (S::of(4.0) + S::of(2.0) * scale) + S::of(4e-16 * (lc.ln.abs() + 1.0));
                    sum.add(t);
                    err = err + t * rel;
                }
            }
        }
        let total = sum.value();
        if !exact || total.as_f64() >= EXACT_LIMIT {
            err = err + S::of(3.0) * eps * total;
        }
        let lower = (total - err).max(S::zero());
        let tail = if self.max_length.is_some_and(|m| trunc >= m) {
            Some(0.0)
        } else {
            self.certificate
                .and_then(|c| c.tail(alpha.as_f64(), trunc, weight))
        };
        let upper = match tail {
            Some(t) if exact && t == 0.0 && total.as_f64() < EXACT_LIMIT => total,
            Some(t) => {
                let u = total + err + S::of(t);
                u + u * eps * S::of(2.0)
            }
            None => S::infinity(),
        };
        BoundedValue::new(lower, upper)
    }

    /// Enclosure of `f(alpha)` from the first `trunc` lengths.
    pub fn eval_f<S: Real>(&self, alpha: S, trunc: usize) -> BoundedValue<S> {
        self.eval_weighted(alpha, trunc, 0)
    }

    /// Enclosure of `sum_n n |C_n| e^{-n alpha}`.
    pub fn eval_moment<S: Real>(&self, alpha: S, trunc: usize) -> BoundedValue<S> {
        self.eval_weighted(alpha, trunc, 1)
    }

    /// Brackets the exponential growth rate `limsup ln|C_n| / n`.
    ///
    /// Finite families return `[-inf, -inf]`: the series converges for every
    /// `alpha`.
    pub fn abscissa<S: Real>(&self, samples: usize) -> BoundedValue<S> {
        if self.is_finite() {
            return BoundedValue::point(S::neg_infinity());
        }
        let sampled = self
            .ln_counts(samples)
            .iter()
            .enumerate()
            .filter(|(_, ln)| ln.is_finite())
            .map(|(i, ln)| ln / (i + 1) as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let upper = self.certificate.map_or(f64::INFINITY, |c| c.beta);
        BoundedValue::new(S::of(sampled.min(upper)), S::of(upper))
    }

    /// Solves `f(x) = 1` by interval bisection.
    pub fn solve_f_equals_one<S: Real>(&self, options: &SolveOptions<S>) -> Result<RootEnclosure<S>> {
        let trunc = options.trunc;
        let above = |a: S| self.eval_f(a, trunc).lower > S::one();
        let below = |a: S| self.eval_f(a, trunc).upper < S::one();
        let (lo, hi) = match options.bracket_hint {
            Some((a, b)) => {
                if !above(a) {
                    return Err(Error::NoBracket);
                }
                if !below(b) {
                    return Err(Error::TailUnbounded);
                }
                (a, b)
            }
            None => self.find_bracket(&above, &below, options.abscissa_samples)?,
        };

        let quarter = options.tol / S::of(4.0);
        // largest point certified above 1
        let (mut a, mut b) = (lo, hi);
        for _ in 0..400 {
            if b - a <= quarter {
                break;
            }
            let mid = a + (b - a) / S::of(2.0);
            if mid <= a || mid >= b {
                break;
            }
            if above(mid) {
                a = mid;
            } else {
                b = mid;
            }
        }
        let lo_star = a;
        // smallest point certified below 1
        let (mut a, mut b) = (lo_star, hi);
        for _ in 0..400 {
            if b - a <= quarter {
                break;
            }
            let mid = a + (b - a) / S::of(2.0);
            if mid <= a || mid >= b {
                break;
            }
            if below(mid) {
                b = mid;
            } else {
                a = mid;
            }
        }
        let hi_star = b;

        if !self.eval_f(lo_star, trunc).upper.is_finite() {
            // f jumps past 1 where the series stops converging
            let tight = self.certificate.is_some_and(|c| c.tight && lo_star.as_f64() <= c.beta);
            return Err(if tight { Error::NoBracket } else { Error::TailUnbounded });
        }
        let root = lo_star + (hi_star - lo_star) / S::of(2.0);
        let value = self.eval_f(root, trunc);
        Ok(RootEnclosure {
            root,
            enclosure: BoundedValue::new(lo_star, hi_star),
            residual: BoundedValue::new(value.lower - S::one(), value.upper - S::one()),
        })
    }

    fn find_bracket<S: Real>(
        &self,
        above: &dyn Fn(S) -> bool,
        below: &dyn Fn(S) -> bool,
        samples: usize,
    ) -> Result<(S, S)> {
        let abscissa = self.abscissa::<S>(samples);
        let (start_lo, start_hi) = if self.is_finite() {
            (S::zero(), S::one())
        } else {
            let base = abscissa.lower + S::of(1e-6);
            let hi_base = if abscissa.upper.is_finite() {
                abscissa.upper.max(base)
            } else {
                base
            };
            (base, hi_base)
        };
        let step = S::of(0.01);
        let mut lo = None;
        let mut shift = S::zero();
        for k in 0..24 {
            let candidate = start_lo - shift;
            if above(candidate) {
                lo = Some(candidate);
                break;
            }
            shift = step * S::of(f64::from(1u32 << k));
        }
        let lo = lo.ok_or(Error::NoBracket)?;
        let mut hi = None;
        let mut shift = step;
        for k in 0..40 {
            let candidate = start_hi.max(lo) + shift;
            if below(candidate) {
                hi = Some(candidate);
                break;
            }
            shift = step * S::of(2f64.powi(k + 1));
        }
        let hi = hi.ok_or(Error::TailUnbounded)?;
        Ok((lo, hi))
    }
}

/// Exact value of `sum_{j <= trunc} j^weight |C_j| / base^j`.
///
/// This is the partial sum of `f` (or its first moment) at `alpha = ln(base)`
/// with no rounding at all.
pub fn exact_partial_sum(series: &CountSeries, base: u32, trunc: usize, weight: u32) -> BigRational {
    assert!(base >= 2, "base must be at least 2");
    let mut acc = BigUint::zero();
    let mut last = 0usize;
    series.for_each_count(trunc, &mut |j, c| {
        acc = &acc * base;
        if !c.is_zero() {
            if weight == 1 {
                acc += c * BigUint::from(j);
            } else {
                acc += c;
            }
        }
        last = j;
    });
    // lengths past a finite family's support contribute zero terms
    let mut denominator = BigUint::from(base).pow(last as u32);
    if last < trunc {
        let pad = BigUint::from(base).pow((trunc - last) as u32);
        acc *= &pad;
        denominator *= pad;
    }
    if denominator.is_zero() {
        denominator = BigUint::one();
    }
    BigRational::new(acc.into(), denominator.into())
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<S> {
    pub trunc: usize,
    pub tol: S,
    pub bracket_hint: Option<(S, S)>,
    pub abscissa_samples: usize,
}

impl<S: Real> SolveOptions<S> {
    pub fn new(trunc: usize) -> Self {
        Self {
            trunc,
            tol: S::of(1e-10),
            bracket_hint: None,
            abscissa_samples: ABSCISSA_SAMPLES,
        }
    }
}

/// Root of `f(x) = 1`: `enclosure` is certified (`f > 1` at its lower end,
/// `f < 1` at its upper end) and `root` is its midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootEnclosure<S> {
    pub root: S,
    pub enclosure: BoundedValue<S>,
    pub residual: BoundedValue<S>,
}

/// A closed interval `[lower, upper]`; `upper = +inf` means the quantity
/// could not be bounded (divergent or no tail certificate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedValue<S> {
    pub lower: S,
    pub upper: S,
}

impl<S: Real> BoundedValue<S> {
    pub fn new(lower: S, upper: S) -> Self {
        debug_assert!(!(lower > upper), "inverted interval [{lower}, {upper}]");
        Self { lower, upper }
    }

    pub fn point(x: S) -> Self {
        Self { lower: x, upper: x }
    }

    pub fn contains(&self, x: S) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> S {
        if self.lower == self.upper {
            S::zero()
        } else {
            self.upper - self.lower
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }

    pub fn midpoint(&self) -> S {
        if self.lower == self.upper {
            self.lower
        } else {
            self.lower + (self.upper - self.lower) / S::of(2.0)
        }
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self::new(self.lower.min(other.lower), self.upper.max(other.upper))
    }
}

impl<S: Real> fmt::Display for BoundedValue<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

/// Neumaier summation.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated<S> {
    sum: S,
    carry: S,
}

impl<S: Real> Compensated<S> {
    fn add(&mut self, x: S) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    fn value(&self) -> S {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> CountSeries {
        CountSeries::finite(TableCounts::from_lengths([1, 2]))
    }

    #[test]
    fn finite_family_is_exact_at_zero() {
        let s = golden();
        assert_eq!(s.eval_f(0.0f64, 2), BoundedValue::point(2.0));
        assert_eq!(s.eval_moment(0.0f64, 2), BoundedValue::point(3.0));
        assert_eq!(s.eval_f(0.0f64, 10), BoundedValue::point(2.0));
    }

    #[test]
    fn two_letters_root_is_ln2() {
        let s = CountSeries::finite(TableCounts::from_lengths([1, 1]));
        let r = s.solve_f_equals_one(&SolveOptions::<f64>::new(10)).unwrap();
        assert!((r.root - std::f64::consts::LN_2).abs() < 1e-10);
        assert!(r.enclosure.contains(std::f64::consts::LN_2));
    }

    #[test]
    fn golden_root_matches_quadratic() {
        // e^{-x} = y solves y^2 + y - 1 = 0
        let y = (5f64.sqrt() - 1.0) / 2.0;
        let expected = -y.ln();
        let r = golden().solve_f_equals_one(&SolveOptions::<f64>::new(2)).unwrap();
        assert!((r.root - expected).abs() < 1e-10, "{} vs {}", r.root, expected);
        assert!(r.residual.lower <= 1e-10 && r.residual.upper >= -1e-10);
    }

    #[test]
    fn single_word_root_is_zero() {
        let s = CountSeries::finite(TableCounts::from_lengths([3]));
        let r = s.solve_f_equals_one(&SolveOptions::<f64>::new(3)).unwrap();
        assert!(r.root.abs() < 1e-10);
    }

    #[test]
    fn runs_in_single_precision() {
        let r = golden().solve_f_equals_one(&SolveOptions::<f32> {
            tol: 1e-5,
            ..SolveOptions::new(2)
        })
        .unwrap();
        assert!((r.root - 0.481_211_8).abs() < 1e-4);
    }

    #[test]
    fn certificate_violation_is_rejected() {
        let counts = Arc::new(TableCounts(vec![BigUint::from(5u32); 300]));
        let cert = GrowthCertificate::exponential(1.0, 0.0, CertificateProvenance::UserAsserted);
        assert_eq!(
            CountSeries::new(counts, None, Some(cert)).unwrap_err(),
            Error::CertificateViolated { length: 1 }
        );
    }

    #[test]
    fn missing_certificate_means_unbounded() {
        let counts = Arc::new(TableCounts(vec![BigUint::from(1u32); 50]));
        let s = CountSeries::new(counts, None, None).unwrap();
        let v = s.eval_f(1.0f64, 10);
        assert!(!v.is_bounded());
        assert!(v.lower > 0.5);
    }

    #[test]
    fn geometric_tail_bound() {
        // |C_j| = 1 for all j: f(alpha) = 1 / (e^alpha - 1)
        struct Ones;
        impl CountFn for Ones {
            fn count(&self, _: usize) -> BigUint {
                BigUint::one()
            }
        }
        let cert = GrowthCertificate::exponential(1.0, 0.0, CertificateProvenance::UserAsserted);
        let s = CountSeries::new(Arc::new(Ones), None, Some(cert)).unwrap();
        let alpha = 2f64.ln();
        let v = s.eval_f(alpha, 60);
        assert!(v.contains(1.0), "{v}");
        assert!(v.width() < 1e-13);
        let m = s.eval_moment(alpha, 80);
        // sum j 2^{-j} = 2
        assert!(m.contains(2.0), "{m}");
        assert!(m.width() < 1e-12);
        let r = s.solve_f_equals_one(&SolveOptions::<f64>::new(200)).unwrap();
        assert!((r.root - alpha).abs() < 1e-10);
    }

    #[test]
    fn exact_partial_sums() {
        let s = golden();
        // 1/2 + 1/4
        assert_eq!(
            exact_partial_sum(&s, 2, 5, 0),
            BigRational::new(3.into(), 4.into())
        );
        // 1/2 + 2/4
        assert_eq!(exact_partial_sum(&s, 2, 2, 1), BigRational::one());
    }

    #[test]
    fn ln_of_huge_integer() {
        let n = BigUint::from(4u32).pow(20_000);
        let expected = 20_000.0 * 4f64.ln();
        assert!((ln_biguint(&n) - expected).abs() < 1e-9);
        assert_eq!(ln_biguint(&BigUint::zero()), f64::NEG_INFINITY);
    }
}
