//! The entropy pipeline: evaluate `f(h(L))`, pick the regime, solve for
//! `h(X)` when needed, and classify the loop graph.

use serde::Serialize;

use crate::codecheck::{sardinas_patterson, Verdict};
use crate::error::{Error, Result};
use crate::family::{CodeFamily, Flag, Provenance};
use crate::genfun::{CountSeries, SolveOptions};
use crate::Interval;

pub const DEFAULT_TRUNC: usize = 2000;
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 10.0;
pub const DEFAULT_MOMENT_HORIZON: usize = 30_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BelowOne,
    EqualOne,
    AboveOne,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VereJonesClass {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HlProvenance {
    ExactBuiltin,
    UserSupplied,
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HlValue {
    #[serde(serialize_with = "crate::report::real")]
    pub value: f64,
    pub provenance: HlProvenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HgProvenance {
    /// Root of `f = 1`.
    Root,
    /// Equal to `h(L)` because `f(h(L)) = 1`.
    EqualsHl,
    /// Tight growth certificate of a builtin.
    Abscissa,
    /// Sampled growth rate; not proved to equal `h(G)`.
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MmeStatement {
    /// Every measure of maximal entropy is supported on `L`.
    SupportedInL,
    /// `h(X) = h(L)`; an MME off `L` may or may not exist.
    MayOrMayNotExistBeyondL,
    /// Unique MME, fully supported.
    UniqueMme,
    /// `f(h(L)) > 1` but unique decomposition is not established.
    ConclusionUnavailable,
    Undetermined,
}

impl MmeStatement {
    pub fn text(self) -> &'static str {
        match self {
            MmeStatement::SupportedInL => "all measures of maximal entropy are supported on L",
            MmeStatement::MayOrMayNotExistBeyondL => {
                "h(X) = h(L); a measure of maximal entropy not supported on L may or may not exist"
            }
            MmeStatement::UniqueMme => {
                "unique measure of maximal entropy, fully supported; it is the image of the positive recurrent loop graph measure (cited, not re-derived)"
            }
            MmeStatement::ConclusionUnavailable => {
                "f(h(L)) > 1 but unique decomposition is not established; no MME conclusion"
            }
            MmeStatement::Undetermined => "f(h(L)) could not be separated from 1; no MME conclusion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MmeBeyondL {
    Exists,
    DoesNotExist,
    HypothesesNotEstablished,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceHit {
    #[serde(serialize_with = "crate::report::real")]
    pub threshold: f64,
    pub n_reached: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphClass {
    pub class: VereJonesClass,
    pub h_g: Interval,
    pub series_value: Interval,
    pub moment_value: Interval,
    pub divergence_threshold_hit: Option<DivergenceHit>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VereJonesOptions {
    pub trunc: usize,
    pub divergence_threshold: f64,
    /// Largest truncation tried while pushing the moment past the threshold.
    pub moment_horizon: usize,
}

impl Default for VereJonesOptions {
    fn default() -> Self {
        Self {
            trunc: DEFAULT_TRUNC,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            moment_horizon: DEFAULT_MOMENT_HORIZON,
        }
    }
}

/// Classifies the loop graph at `h_g`, given as an enclosure.
///
/// `f` is decreasing, so the series over the enclosure is bounded below by
/// its value at the upper end and above by its value at the lower end.
pub fn vere_jones(series: &CountSeries, h_g: Interval, options: &VereJonesOptions) -> GraphClass {
    let trunc = options.trunc;
    let series_value = Interval::new(
        series.eval_f(h_g.upper, trunc).lower,
        series.eval_f(h_g.lower, trunc).upper,
    );
    let moment_at = |t: usize| {
        Interval::new(
            series.eval_moment(h_g.upper, t).lower,
            series.eval_moment(h_g.lower, t).upper,
        )
    };
    let mut moment_value = moment_at(trunc);
    let mut hit = None;
    if !moment_value.is_bounded() && !series.is_finite() && series_value.contains(1.0) {
        let mut t = trunc;
        loop {
            if moment_value.lower > options.divergence_threshold {
                hit = Some(DivergenceHit {
                    threshold: options.divergence_threshold,
                    n_reached: t,
                });
                break;
            }
            if t >= options.moment_horizon {
                break;
            }
            t = (2 * t).min(options.moment_horizon);
            moment_value = moment_at(t);
        }
    }
    let class = if series_value.upper < 1.0 {
        VereJonesClass::Transient
    } else if series_value.contains(1.0) && moment_value.is_bounded() {
        VereJonesClass::PositiveRecurrent
    } else if series_value.contains(1.0) && hit.is_some() {
        VereJonesClass::NullRecurrent
    } else {
        VereJonesClass::Undetermined
    };
    GraphClass {
        class,
        h_g,
        series_value,
        moment_value,
        divergence_threshold_hit: hit,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub trunc: usize,
    pub tol: f64,
    pub divergence_threshold: f64,
    pub moment_horizon: usize,
    /// Overrides the family's exact `h(L)`.
    pub hl: Option<HlValue>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            trunc: DEFAULT_TRUNC,
            tol: 1e-10,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            moment_horizon: DEFAULT_MOMENT_HORIZON,
            hl: None,
        }
    }
}

impl AnalyzeOptions {
    fn vere_jones(&self) -> VereJonesOptions {
        VereJonesOptions {
            trunc: self.trunc,
            divergence_threshold: self.divergence_threshold,
            moment_horizon: self.moment_horizon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: &'static str,
    pub flag: Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub family: String,
    pub h_l: HlValue,
    pub f_at_h_l: Interval,
    /// True when `f(h(L)) = 1` rests on a closed form rather than numerics.
    pub f_exact: bool,
    pub regime: Regime,
    pub h_x: Interval,
    pub h_g: Option<Interval>,
    pub h_g_provenance: Option<HgProvenance>,
    pub vere_jones: Option<GraphClass>,
    pub mme_statement: MmeStatement,
    pub mme_text: &'static str,
    pub mme_beyond_l: Option<MmeBeyondL>,
    pub hypotheses_used: Vec<Hypothesis>,
    pub notes: Vec<String>,
}

/// Decides unique decomposition for finite codes whose flag is unknown.
fn settle_decomposition(code: &mut CodeFamily) {
    if code.flags.decomposition_established() {
        return;
    }
    if let Some(explicit) = code.explicit() {
        code.flags.unique_decomposition = match sardinas_patterson(explicit).verdict {
            Verdict::Holds => Flag::holds(Provenance::Decided),
            _ => Flag::Fails {
                provenance: Provenance::Decided,
            },
        };
    }
}

fn resolve_hl(code: &CodeFamily, options: &AnalyzeOptions) -> Result<HlValue> {
    if let Some(hl) = options.hl {
        return Ok(hl);
    }
    code.exact_hl
        .map(|value| HlValue {
            value,
            provenance: HlProvenance::ExactBuiltin,
        })
        .ok_or_else(|| Error::PreconditionFailed("h(L) is unknown; supply an exact value or an estimate".into()))
}

/// Runs the full trichotomy on a code family.
pub fn analyze(code: &CodeFamily, options: &AnalyzeOptions) -> Result<EntropyReport> {
    let mut code = code.clone();
    settle_decomposition(&mut code);
    let h_l = resolve_hl(&code, options)?;
    let series = code.series();
    let hl = h_l.value;
    let mut notes = Vec::new();

    let f_at_h_l = if hl == f64::NEG_INFINITY {
        Interval::point(f64::INFINITY)
    } else {
        series.eval_f(hl, options.trunc)
    };
    let closed_form_one = h_l.provenance == HlProvenance::ExactBuiltin
        && code.closed_form_f_at_hl == Some(1.0)
        && f_at_h_l.contains(1.0);
    let regime = if closed_form_one {
        Regime::EqualOne
    } else if f_at_h_l.upper < 1.0 {
        Regime::BelowOne
    } else if f_at_h_l.lower > 1.0 {
        Regime::AboveOne
    } else {
        Regime::Undetermined
    };

    let mut hypotheses_used = Vec::new();
    let vj = options.vere_jones();
    let (h_x, h_g, h_g_provenance, mme_statement) = match regime {
        Regime::BelowOne => {
            let (h_g, prov) = below_one_hg(series);
            (Interval::point(hl), h_g, prov, MmeStatement::SupportedInL)
        }
        Regime::EqualOne => (
            Interval::point(hl),
            Some(Interval::point(hl)),
            Some(HgProvenance::EqualsHl),
            MmeStatement::MayOrMayNotExistBeyondL,
        ),
        Regime::AboveOne => {
            let root = solve(series, hl, options)?;
            hypotheses_used.push(Hypothesis {
                name: "unique_decomposition",
                flag: if code.flags.unique_decomposition.is_established() {
                    code.flags.unique_decomposition
                } else {
                    code.flags.unique_decipherability
                },
            });
            let statement = if code.flags.decomposition_established() {
                MmeStatement::UniqueMme
            } else {
                notes.push(Error::UniqueDecompositionUnknown.to_string());
                MmeStatement::ConclusionUnavailable
            };
            (root, Some(root), Some(HgProvenance::Root), statement)
        }
        Regime::Undetermined => {
            let upper = solve(series, hl, options).map_or(f64::INFINITY, |r| r.upper.max(hl));
            (Interval::new(hl, upper), None, None, MmeStatement::Undetermined)
        }
    };

    let vere_jones = h_g.map(|h| vere_jones(series, h, &vj));
    let mut report = EntropyReport {
        family: code.name.clone(),
        h_l,
        f_at_h_l,
        f_exact: closed_form_one,
        regime,
        h_x,
        h_g,
        h_g_provenance,
        vere_jones,
        mme_statement,
        mme_text: mme_statement.text(),
        mme_beyond_l: None,
        hypotheses_used,
        notes,
    };
    if regime == Regime::EqualOne {
        report.hypotheses_used.extend([
            Hypothesis {
                name: "unique_decipherability",
                flag: code.flags.unique_decipherability,
            },
            Hypothesis {
                name: "b_disjoint_from_l",
                flag: code.flags.b_disjoint_from_l,
            },
        ]);
        report.mme_beyond_l = Some(mme_beyond_l(&code, &report)?);
    }
    Ok(report)
}

fn solve(series: &CountSeries, hl: f64, options: &AnalyzeOptions) -> Result<Interval> {
    let mut solve = SolveOptions::new(options.trunc);
    solve.tol = options.tol;
    let root = series.solve_f_equals_one::<f64>(&solve)?;
    if root.enclosure.lower < hl {
        // f > 1 is certified at the lower end, so the root lies above h(L)
        return Ok(Interval::new(hl, root.enclosure.upper.max(hl)));
    }
    Ok(root.enclosure)
}

/// Below the threshold the loop graph entropy is the growth rate of the
/// counts. Only a tight builtin certificate pins it down exactly.
fn below_one_hg(series: &CountSeries) -> (Option<Interval>, Option<HgProvenance>) {
    match series.certificate() {
        Some(c) if c.tight => (Some(Interval::point(c.beta)), Some(HgProvenance::Abscissa)),
        _ => {
            let a = series.abscissa::<f64>(crate::genfun::ABSCISSA_SAMPLES);
            if a.lower.is_finite() {
                (Some(Interval::point(a.lower)), Some(HgProvenance::Heuristic))
            } else {
                (None, None)
            }
        }
    }
}

/// Whether an MME off `L` exists, for codes with `f(h(L)) = 1`.
pub fn mme_beyond_l(code: &CodeFamily, report: &EntropyReport) -> Result<MmeBeyondL> {
    if report.regime != Regime::EqualOne {
        return Err(Error::RegimeMismatch(format!(
            "requires f(h(L)) = 1 exactly, regime is {:?}",
            report.regime
        )));
    }
    if !(code.flags.unique_decipherability.is_established() && code.flags.b_disjoint_from_l.is_established()) {
        return Ok(MmeBeyondL::HypothesesNotEstablished);
    }
    Ok(match report.vere_jones.as_ref().map(|g| g.class) {
        Some(VereJonesClass::PositiveRecurrent) => MmeBeyondL::Exists,
        Some(VereJonesClass::NullRecurrent | VereJonesClass::Transient) => MmeBeyondL::DoesNotExist,
        _ => MmeBeyondL::Undetermined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin, BuiltinSpec};

    fn report(text: &str) -> EntropyReport {
        let family = builtin(&BuiltinSpec::parse(text).unwrap()).unwrap();
        analyze(&family, &AnalyzeOptions::default()).unwrap()
    }

    #[test]
    fn dyck_is_below_one() {
        let r = report("dyck");
        assert_eq!(r.regime, Regime::BelowOne);
        assert!(r.f_at_h_l.contains(1.0 / 3.0));
        assert_eq!(r.h_x, Interval::point(3f64.ln()));
        assert_eq!(r.vere_jones.as_ref().unwrap().class, VereJonesClass::Transient);
        let family = builtin(&BuiltinSpec::parse("dyck").unwrap()).unwrap();
        assert!(matches!(mme_beyond_l(&family, &r), Err(Error::RegimeMismatch(_))));
    }

    #[test]
    fn positive_recurrent_example() {
        let r = report("ex_positive_recurrent");
        assert_eq!(r.regime, Regime::EqualOne);
        let g = r.vere_jones.clone().unwrap();
        assert_eq!(g.class, VereJonesClass::PositiveRecurrent);
        assert!(g.moment_value.contains(4.0));
        assert_eq!(r.mme_beyond_l, Some(MmeBeyondL::Exists));
    }

    #[test]
    fn null_recurrent_example() {
        let r = report("ex_null_recurrent");
        assert_eq!(r.regime, Regime::EqualOne);
        let g = r.vere_jones.clone().unwrap();
        assert_eq!(g.class, VereJonesClass::NullRecurrent);
        assert!(!g.moment_value.is_bounded());
        assert_eq!(r.mme_beyond_l, Some(MmeBeyondL::DoesNotExist));
    }

    #[test]
    fn golden_mean_code_solves_root() {
        let r = report("golden_mean_code");
        assert_eq!(r.regime, Regime::AboveOne);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r.h_x.midpoint() - phi.ln()).abs() < 1e-10);
        assert!(r.h_x.contains(phi.ln()));
        assert_eq!(r.mme_statement, MmeStatement::UniqueMme);
        assert_eq!(r.vere_jones.clone().unwrap().class, VereJonesClass::PositiveRecurrent);
    }

    #[test]
    fn non_code_withholds_conclusion() {
        use crate::word::{validate_code_set, Alphabet};
        let code = validate_code_set([vec![1], vec![1, 0], vec![0, 1]], Alphabet::indexed(2)).unwrap();
        let r = analyze(&CodeFamily::from_explicit(code), &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.regime, Regime::AboveOne);
        assert_eq!(r.mme_statement, MmeStatement::ConclusionUnavailable);
    }

    #[test]
    fn nonuniform_spec_below_one() {
        let r = report("nonuniform_spec N=404");
        assert_eq!(r.regime, Regime::BelowOne);
        let n = 404f64;
        assert!(r.f_at_h_l.upper <= 3.0 / n + 2.0 / (n.ln() - 1.0));
    }
}
