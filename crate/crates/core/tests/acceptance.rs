//! Acceptance checks: one PASS/FAIL line per criterion.
//!
//! Criterion 1 asks for an enclosure of width below 1e-9 from 120 terms,
//! which is narrower than the tail the first 120 terms leave out. Criterion 7
//! includes a growth check on the Dyck code at alpha = 1.0 whose hypothesis
//! (truncated sum above 1) is false. Both are run as stated and reported; the
//! run only fails if their other parts fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use coded_shift::catalog::{builtin, BuiltinId, BuiltinSpec};
use coded_shift::classify::{analyze, AnalyzeOptions, MmeBeyondL, MmeStatement, Regime, VereJonesClass};
use coded_shift::cli::null_recurrent_dyadic_sums;
use coded_shift::codecheck::{check_prefix_suffix_disjoint, find_double_factorization, sardinas_patterson, Verdict};
use coded_shift::family::CodeFamily;
use coded_shift::language::{language_counts, sample_language, verify_aux1_bound, verify_aux2_growth, verify_wordcount};
use coded_shift::sft::{loop_entropy, perron_entropy, SftSpec};
use coded_shift::Error;
use coded_shift::word::{validate_code_set, Alphabet, Symbol, Word};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    /// Parts that fail for a documented reason while the rest holds.
    known_shortfall: bool,
}

fn family(id: BuiltinId) -> CodeFamily {
    builtin(&BuiltinSpec::new(id)).unwrap()
}

fn explicit(words: &[&str]) -> CodeFamily {
    let words = words.iter().map(|w| Word::from_digits(w).unwrap().into_symbols());
    CodeFamily::from_explicit(validate_code_set(words, Alphabet::indexed(2)).unwrap())
}

fn ok(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        detail,
        known_shortfall: false,
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let options = AnalyzeOptions {
        trunc: 120,
        ..AnalyzeOptions::default()
    };
    let r = analyze(&family(BuiltinId::Dyck), &options).unwrap();
    let elapsed = start.elapsed();
    let width = r.f_at_h_l.width();
    let rest = r.f_at_h_l.contains(1.0 / 3.0)
        && r.regime == Regime::BelowOne
        && r.h_x.lower == 3f64.ln()
        && r.h_x.upper == 3f64.ln()
        && elapsed < Duration::from_secs(5);
    let narrow = width < 1e-9;
    // same analysis at the default truncation
    let full = analyze(&family(BuiltinId::Dyck), &AnalyzeOptions::default()).unwrap();
    let detail = format!(
        "f(ln 3) in [{:.12}, {:.12}] width {width:.2e} at trunc 120 (default trunc: width {:.2e}), regime {:?}, h(X) = {}, {:?}",
        r.f_at_h_l.lower,
        r.f_at_h_l.upper,
        full.f_at_h_l.width(),
        r.regime,
        r.h_x.lower,
        elapsed
    );
    Outcome {
        pass: rest && narrow,
        detail,
        known_shortfall: rest && !narrow && full.f_at_h_l.width() < 1e-9 && full.f_at_h_l.contains(1.0 / 3.0),
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let f = family(BuiltinId::ExPositiveRecurrent);
    let value = f.series().eval_f(2f64.ln(), 200);
    let moment = f.series().eval_moment(2f64.ln(), 100);
    let r = analyze(&f, &AnalyzeOptions::default()).unwrap();
    let class = r.vere_jones.as_ref().map(|g| g.class);
    let elapsed = start.elapsed();
    let pass = value.contains(1.0)
        && value.width() < 1e-12
        && moment.contains(4.0)
        && moment.width() < 1e-9
        && class == Some(VereJonesClass::PositiveRecurrent)
        && r.mme_beyond_l == Some(MmeBeyondL::Exists)
        && elapsed < Duration::from_secs(2);
    ok(
        pass,
        format!(
            "f(ln 2) width {:.1e}, moment [{:.12}, {:.12}], {class:?}, {:?}, {elapsed:?}",
            value.width(),
            moment.lower,
            moment.upper,
            r.mme_beyond_l
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let sums = null_recurrent_dyadic_sums(14).unwrap();
    let exact = sums.iter().all(|(_, ok)| *ok);
    let f = family(BuiltinId::ExNullRecurrent);
    let r = analyze(&f, &AnalyzeOptions::default()).unwrap();
    let g = r.vere_jones.clone().unwrap();
    let hit = g.divergence_threshold_hit;
    let elapsed = start.elapsed();
    let pass = exact
        && hit.is_some_and(|h| h.n_reached <= 30_000 && h.threshold >= 10.0)
        && g.moment_value.lower > 10.0
        && !g.moment_value.is_bounded()
        && g.class == VereJonesClass::NullRecurrent
        && r.mme_beyond_l == Some(MmeBeyondL::DoesNotExist)
        && elapsed < Duration::from_secs(60);
    ok(
        pass,
        format!(
            "dyadic sums exact for K <= 14: {exact}, moment lower {:.4} at n = {:?}, {:?}, {:?}, {elapsed:?}",
            g.moment_value.lower,
            hit.map(|h| h.n_reached),
            g.class,
            r.mme_beyond_l
        ),
    )
}

/// Random irreducible adjacency on `k` letters: a Hamiltonian cycle plus
/// random extra edges.
fn random_sft(rng: &mut ChaCha8Rng) -> SftSpec {
    let k = rng.gen_range(2..=6);
    let mut order: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut allowed = vec![vec![false; k]; k];
    for i in 0..k {
        allowed[order[i]][order[(i + 1) % k]] = true;
    }
    let density = rng.gen_range(0.1..0.8);
    for row in allowed.iter_mut() {
        for cell in row.iter_mut() {
            if rng.gen_bool(density) {
                *cell = true;
            }
        }
    }
    SftSpec::new(Alphabet::indexed(k), allowed, 0).unwrap()
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let golden = SftSpec::parse("letters: 0 1\nforbid: 1 1\n", Some("0")).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let g = loop_entropy(&golden, 1e-10).unwrap().h;
    let golden_ok = (g - phi.ln()).abs() < 1e-9 && (g - perron_entropy::<f64>(&golden)).abs() < 1e-8;
    let full_ok = (2..=6).all(|k| (loop_entropy(&SftSpec::full_shift(k), 1e-11).unwrap().h - (k as f64).ln()).abs() < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f7);
    let mut worst = 0f64;
    let mut checked = 0;
    for _ in 0..60 {
        let sft = random_sft(&mut rng);
        let perron = perron_entropy::<f64>(&sft);
        for a in 0..sft.alphabet().len() as Symbol {
            let h = loop_entropy(&sft.with_letter(a).unwrap(), 1e-11).unwrap().h;
            worst = worst.max((h - perron).abs());
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = golden_ok && full_ok && worst < 1e-8 && elapsed < Duration::from_secs(30);
    ok(
        pass,
        format!("golden {golden_ok}, full shifts {full_ok}, 60 random SFTs / {checked} letters worst gap {worst:.1e}, {elapsed:?}"),
    )
}

fn criterion_5() -> Outcome {
    let r = analyze(&explicit(&["0", "01"]), &AnalyzeOptions::default()).unwrap();
    // e^{-x} is the positive root of y^2 + y - 1
    let oracle = -((5f64.sqrt() - 1.0) / 2.0).ln();
    let pass = r.regime == Regime::AboveOne
        && (r.h_x.midpoint() - oracle).abs() < 1e-10
        && r.mme_statement == MmeStatement::UniqueMme;
    ok(
        pass,
        format!("h(X) = {:.15} vs {oracle:.15}, {:?}, {:?}", r.h_x.midpoint(), r.regime, r.mme_statement),
    )
}

fn criterion_6() -> Outcome {
    let code = explicit(&["0", "01"]);
    let counts = language_counts(&code, 6, 2).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let wc = verify_wordcount(&code, phi.ln(), 12, 2).unwrap();
    ok(
        counts == [2, 3, 5, 8, 13, 21] && wc.holds,
        format!("|L_n| = {counts:?}, wordcount up to 12: {}", wc.holds),
    )
}

fn criterion_7() -> Outcome {
    let dyck = family(BuiltinId::Dyck);
    let aux1 = [
        ("dyck", verify_aux1_bound(&dyck, 1.11, None, 10, 20)),
        ("ex_positive_recurrent", verify_aux1_bound(&family(BuiltinId::ExPositiveRecurrent), 0.75, None, 10, 20)),
        ("{0,01}", verify_aux1_bound(&explicit(&["0", "01"]), 0.5, None, 10, 20)),
    ];
    let aux2 = [
        ("{0,1}", verify_aux2_growth(&explicit(&["0", "1"]), 0.5, 1, 12, 10)),
        ("{0,01}", verify_aux2_growth(&explicit(&["0", "01"]), 0.4, 2, 12, 10)),
    ];
    let mut parts = Vec::new();
    let mut rest = true;
    for (name, r) in &aux1 {
        let holds = r.as_ref().is_ok_and(|r| r.holds);
        rest &= holds;
        parts.push(format!("aux1 {name}: {holds}"));
    }
    for (name, r) in &aux2 {
        let holds = r.as_ref().is_ok_and(|r| r.holds);
        rest &= holds;
        parts.push(format!("aux2 {name}: {holds}"));
    }
    // Dyck code counts 2, 4, 16, 80 at lengths 2, 4, 6, 8 give
    // eta = 0.41 < 1 at alpha = 1.0; f itself stays below 1 there.
    let oracle_eta: f64 = [(2, 2.0), (4, 4.0), (6, 16.0), (8, 80.0)]
        .iter()
        .map(|&(j, c)| c * (-(j as f64)).exp())
        .sum();
    let dyck_aux2 = verify_aux2_growth(&dyck, 1.0, 8, 12, 10);
    let dyck_holds = dyck_aux2.as_ref().is_ok_and(|r| r.holds);
    let refused = matches!(&dyck_aux2, Err(Error::EtaNotAboveOne(eta)) if (eta - oracle_eta).abs() < 1e-12);
    match &dyck_aux2 {
        Ok(r) => parts.push(format!("aux2 dyck t=8: {}", r.holds)),
        Err(e) => parts.push(format!("aux2 dyck t=8: refused ({e}; oracle eta {oracle_eta:.6})")),
    }
    Outcome {
        pass: rest && dyck_holds,
        detail: parts.join(", "),
        known_shortfall: rest && refused,
    }
}

fn random_code(rng: &mut ChaCha8Rng) -> Option<CodeFamily> {
    let n = rng.gen_range(1..=4);
    let words: Vec<Vec<Symbol>> = (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=4);
            (0..len).map(|_| rng.gen_range(0..2)).collect()
        })
        .collect();
    validate_code_set(words, Alphabet::indexed(2)).ok().map(CodeFamily::from_explicit)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut compared = 0;
    let mut mismatches = 0;
    while compared < 1000 {
        let Some(code) = random_code(&mut rng) else { continue };
        let explicit = code.explicit().unwrap();
        let total: usize = explicit.words().iter().map(Word::len).sum();
        let sp = sardinas_patterson(explicit);
        let search = find_double_factorization(&code, 2 * total).unwrap();
        let agree = match (&sp.verdict, &search) {
            (Verdict::Holds, None) => true,
            (Verdict::Fails { witness }, Some(_)) => witness.is_valid(|s| explicit.contains(s)),
            _ => false,
        };
        if !agree {
            mismatches += 1;
        }
        compared += 1;
    }
    let w = find_double_factorization(&explicit(&["1", "10", "01"]), 6).unwrap();
    let witness_ok = w.as_ref().is_some_and(|w| w.word.to_string() == "101");
    let certified = |id| {
        matches!(
            check_prefix_suffix_disjoint(&family(id), 12).unwrap().verdict,
            Verdict::Certified { .. }
        )
    };
    let certs = certified(BuiltinId::Dyck) && certified(BuiltinId::ExPositiveRecurrent);
    ok(
        mismatches == 0 && witness_ok && certs,
        format!("{compared} random codes, {mismatches} mismatches; witness 101: {witness_ok}; certificates: {certs}"),
    )
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    let builtins = [
        BuiltinSpec::new(BuiltinId::Dyck),
        BuiltinSpec::new(BuiltinId::ExPositiveRecurrent),
        BuiltinSpec::new(BuiltinId::ExNullRecurrent),
        BuiltinSpec::new(BuiltinId::NonuniformSpec).with("N", 3),
        BuiltinSpec::new(BuiltinId::GoldenMeanCode),
        BuiltinSpec::new(BuiltinId::FullShift).with("k", 3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for spec in &builtins {
        let f = builtin(spec).unwrap();
        let s = f.series();
        for _ in 0..20 {
            let a1 = rng.gen_range(1.0..2.5);
            let a2 = a1 + rng.gen_range(0.01..0.5);
            let j = rng.gen_range(20..200);
            let (v1, v2) = (s.eval_f(a1, j), s.eval_f(a2, j));
            if v1.lower < v2.lower {
                failures.push(format!("{spec}: monotonicity at {a1}, {a2}"));
            }
            let fine = s.eval_f(a1, 2 * j);
            if fine.lower < v1.lower || fine.upper > v1.upper {
                failures.push(format!("{spec}: refinement at {a1}, {j}"));
            }
        }
        let max_len = if spec.id == BuiltinId::Dyck { 12 } else { 14 };
        let words = f.enumerate_code_words(max_len).unwrap();
        for n in 1..=max_len {
            let got = words.iter().filter(|w| w.len() == n).count();
            if BigUint::from(got) != f.counts_of(n) {
                failures.push(format!("{spec}: enumerator/count at {n}"));
            }
        }
        let n = 4;
        let small = sample_language(&f, n, n).unwrap();
        let large = sample_language(&f, n, n + 3).unwrap();
        if !small.l_n.is_subset(&large.l_n) || !small.w_n.is_subset(&large.w_n) {
            failures.push(format!("{spec}: cap monotonicity"));
        }
        if !large.w_n.is_subset(&large.l_n) || !large.p_n.is_subset(&large.w_n) || !large.s_n.is_subset(&large.w_n) {
            failures.push(format!("{spec}: containment"));
        }
    }
    ok(
        failures.is_empty(),
        if failures.is_empty() {
            "monotonicity, refinement, cap monotonicity, containment, enumerator/count: zero failures".into()
        } else {
            failures.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Dyck f(ln 3) enclosure, regime, h(X)", criterion_1),
        ("positive recurrent example", criterion_2),
        ("null recurrent example", criterion_3),
        ("loop method vs Perron", criterion_4),
        ("finite code {0,01} root", criterion_5),
        ("language oracle and word counts", criterion_6),
        ("counting-bound suite", criterion_7),
        ("code checking", criterion_8),
        ("property suites", criterion_9),
    ];
    let mut hard_failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let status = if o.pass {
            "PASS"
        } else if o.known_shortfall {
            "FAIL (known limitation)"
        } else {
            hard_failures += 1;
            "FAIL"
        };
        println!("criterion {}: {status} - {name}: {}", i + 1, o.detail);
    }
    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
