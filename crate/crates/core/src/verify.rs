//! Seeded verification suites over the whole library.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::{Mutex, MutexGuard, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebraic::Rel;
use crate::discrepancy::{build_discrepancy_instance, dd};
use crate::enumeration::{
    annulus_record, bounded_alphabet, count_lattice_annulus, enumerate_gamma, enumerate_gamma_dfs, gamma_suffix_count,
    level_one_measure_m3, measure_sum_bounded_words, suffix_bound_ln, GammaSpec, PrototypeAutomaton,
};
use crate::error::{Error, Result};
use crate::expansion::{hcf_expand_rational, rcf_check_prefix_property, RealInput};
use crate::gaussian::{nearest_gaussian_integer, rat, GaussianInt, GaussianRational, Rational};
use crate::geometry::area::montecarlo_area;
use crate::geometry::form::Constraint;
use crate::geometry::region::{d_edges, interior_of, open_subset};
use crate::geometry::{canonical_interior, classify, cylinder_region, prototype_set, Form, Membership, Region};
use crate::interval::{sqrt_ceil, ComplexBox};
use crate::oracle::sqrt10_example;
use crate::search::{search_approx, Decision, PsiSpec};
use crate::word::{
    evaluate, make_vk, make_vk_tilde, mobius_apply, qpair, sign_pow, stk_block, stk_matrix_power, Mat2, QPair, Word,
};

pub const SUITES: &[&str] = &["props", "cylinders", "vk", "gamma", "annulus", "rcf", "all"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub detail: String,
    /// Wall time; left out of serialized output so reports stay reproducible.
    #[serde(skip)]
    pub runtime_ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageRow {
    pub anchor: String,
    pub checks: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub coverage: Vec<CoverageRow>,
    /// Wall time; left out of structured output so reports stay reproducible.
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl VerificationReport {
    /// True iff no check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn coverage_table(&self) -> String {
        let mut s = String::new();
        for row in &self.coverage {
            let _ = writeln!(s, "  {:>3}  {}", row.checks, row.anchor);
        }
        s
    }
}

type Outcome = Result<(Status, String)>;
type CheckFn = fn(&mut ChaCha8Rng) -> Outcome;

/// Every property the suites cover.
pub const ANCHORS: &[&str] = &[
    "rounding lands in the half-open unit cell",
    "rounding commutes with integer translation",
    "box arithmetic encloses exact values",
    "canonical form is idempotent and agrees with cross-multiplication",
    "mirror formula",
    "denominator determinant identity",
    "convergent quality bound",
    "strict denominator growth",
    "golden-ratio denominator growth",
    "last-quotient denominator bounds",
    "concatenation denominator bounds",
    "expansion round trip",
    "convergents of an oracle meet the inverse-square bound",
    "prototype chain through -2i",
    "prototype chain through 2i with degenerate sets",
    "prefixes of regular words are regular",
    "regular words extend to full words",
    "suffixes of full words are full",
    "concatenations of full words are full",
    "full prototypes transport cylinders",
    "cylinder diameter and area bounds",
    "every regular prototype has exactly one canonical interior",
    "prototype of v_k",
    "prototype of the tilde words",
    "v_k and its tilde twin share a value",
    "block matrix product",
    "s_k and t_k identities",
    "discrepancy of constructed instances",
    "bounded-alphabet full words at small threshold",
    "full-word enumeration is exhaustive",
    "suffix-family bound",
    "full-word count growth trend",
    "measure sums are monotone",
    "level-one measure against direct integration",
    "annulus counts against half-annulus area",
    "annulus scaling at r = 1/100",
    "annulus members have full cylinders",
    "annulus counts grow as r halves",
    "real continued fraction prefix property",
];

type CheckEntry = (&'static str, &'static str, usize, CheckFn);

const CHECKS: &[CheckEntry] = &[
    ("props", "rounding-cell", 0, check_rounding_cell),
    ("props", "rounding-translation", 1, check_rounding_translation),
    ("props", "box-soundness", 2, check_box_soundness),
    ("props", "canonical-form", 3, check_canonical_form),
    ("props", "mirror", 4, check_mirror),
    ("props", "determinant", 5, check_determinant),
    ("props", "convergent-quality", 6, check_convergent_quality),
    ("props", "strict-growth", 7, check_strict_growth),
    ("props", "golden-growth", 8, check_golden_growth),
    ("props", "last-quotient", 9, check_last_quotient),
    ("props", "concatenation", 10, check_concatenation),
    ("props", "round-trip", 11, check_round_trip),
    ("props", "oracle-convergents", 12, check_oracle_convergents),
    ("cylinders", "chain-minus-2i", 13, check_chain_minus_2i),
    ("cylinders", "chain-2i", 14, check_chain_2i),
    ("cylinders", "regular-prefixes", 15, check_regular_prefixes),
    ("cylinders", "regular-extends", 16, check_regular_extends),
    ("cylinders", "full-suffixes", 17, check_full_suffixes),
    ("cylinders", "full-concatenation", 18, check_full_concatenation),
    ("cylinders", "transport", 19, check_transport),
    ("cylinders", "diameter-area", 20, check_diameter_area),
    ("cylinders", "classification-total", 21, check_classification_total),
    ("vk", "prototype-vk", 22, check_prototype_vk),
    ("vk", "prototype-vk-tilde", 23, check_prototype_vk_tilde),
    ("vk", "value-identity", 24, check_value_identity),
    ("vk", "block-product", 25, check_block_product),
    ("vk", "st-identities", 26, check_st_identities),
    ("vk", "discrepancy-instances", 27, check_discrepancy_instances),
    ("gamma", "small-threshold", 28, check_gamma_small),
    ("gamma", "exhaustive", 29, check_gamma_exhaustive),
    ("gamma", "suffix-bound", 30, check_suffix_bound),
    ("gamma", "growth-trend", 31, check_growth_trend),
    ("gamma", "measure-monotone", 32, check_measure_monotone),
    ("gamma", "level-one-measure", 33, check_level_one_measure),
    ("annulus", "area", 34, check_annulus_area),
    ("annulus", "r-1-100", 35, check_annulus_r100),
    ("annulus", "full-members", 36, check_annulus_full),
    ("annulus", "monotone", 37, check_annulus_monotone),
    ("rcf", "prefix-property", 38, check_rcf_prefix),
];

fn execute(i: usize, (s, name, anchor, f): &CheckEntry, seed: u64) -> Check {
    let t = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64 + 1);
    let (status, detail) = match f(&mut rng) {
        Ok(v) => v,
        Err(e) => (Status::Fail, format!("error: {e}")),
    };
    Check {
        id: format!("{s}.{name}"),
        anchor: ANCHORS[*anchor].to_string(),
        status,
        detail,
        runtime_ms: t.elapsed().as_millis() as u64,
    }
}

/// Runs one check by id (`suite.name`) with the stream it gets inside its suite.
pub fn run_check(id: &str, seed: u64) -> Result<Check> {
    CHECKS
        .iter()
        .enumerate()
        .find(|(_, (s, name, _, _))| format!("{s}.{name}") == id)
        .map(|(i, c)| execute(i, c, seed))
        .ok_or_else(|| Error::Precondition(format!("unknown check {id}")))
}

pub fn run_suite(suite: &str, seed: u64) -> Result<VerificationReport> {
    if !SUITES.contains(&suite) {
        return Err(Error::Precondition(format!(
            "unknown suite {suite}; expected one of {}",
            SUITES.join(", ")
        )));
    }
    let start = std::time::Instant::now();
    let selected: Vec<(usize, &CheckEntry)> = CHECKS
        .iter()
        .enumerate()
        .filter(|(_, c)| suite == "all" || c.0 == suite)
        .collect();
    let checks: Vec<Check> = selected.par_iter().map(|(i, c)| execute(*i, c, seed)).collect();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for c in &checks {
        *counts.entry(c.anchor.as_str()).or_default() += 1;
    }
    let coverage = ANCHORS
        .iter()
        .filter(|a| suite == "all" || counts.contains_key(**a))
        .map(|a| CoverageRow {
            anchor: a.to_string(),
            checks: counts.get(a).copied().unwrap_or(0),
        })
        .collect();
    Ok(VerificationReport {
        suite: suite.to_string(),
        seed,
        checks,
        coverage,
        runtime_ms: start.elapsed().as_millis(),
    })
}

fn verdict(failures: usize, total: usize, what: &str, first: Option<String>) -> Outcome {
    if failures == 0 {
        Ok((Status::Pass, format!("{total} {what}")))
    } else {
        Ok((
            Status::Fail,
            format!(
                "{failures} of {total} {what} failed; first: {}",
                first.unwrap_or_default()
            ),
        ))
    }
}

/// Runs `f` on `n` inputs and summarizes the failures.
fn tally<T, G, F>(rng: &mut ChaCha8Rng, n: usize, what: &str, mut gen: G, f: F) -> Outcome
where
    G: FnMut(&mut ChaCha8Rng) -> T,
    F: Fn(&T) -> Result<bool>,
    T: std::fmt::Debug,
{
    let mut failures = 0;
    let mut first = None;
    for _ in 0..n {
        let x = gen(rng);
        if !f(&x)? {
            failures += 1;
            first.get_or_insert_with(|| format!("{x:?}"));
        }
    }
    verdict(failures, n, what, first)
}

fn ri(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> BigInt {
    BigInt::from(rng.gen_range(lo..=hi))
}

fn rand_gaussian_rational(rng: &mut ChaCha8Rng, span: i64, den: i64) -> GaussianRational {
    let d = rng.gen_range(1..=den);
    // Exact half-integers are common enough to exercise the edge rule.
    let (re, im) = if rng.gen_bool(0.1) {
        (
            Rational::new(ri(rng, -span, span) * 2 + 1, BigInt::from(2)),
            Rational::new(ri(rng, -span * d, span * d), BigInt::from(d)),
        )
    } else {
        (
            Rational::new(ri(rng, -span * d, span * d), BigInt::from(d)),
            Rational::new(ri(rng, -span * d, span * d), BigInt::from(d)),
        )
    };
    GaussianRational::from_parts(&re, &im)
}

/// A point of `D` with dyadic coordinates.
fn rand_in_d(rng: &mut ChaCha8Rng, bits: u32) -> GaussianRational {
    let h = 1i64 << (bits - 1);
    let s = BigInt::one() << bits;
    let re = Rational::new(ri(rng, -h, h - 1), s.clone());
    let im = Rational::new(ri(rng, -h, h - 1), s);
    GaussianRational::from_parts(&re, &im)
}

/// The expansion of a random point of `D`, as a valid word.
fn rand_word(rng: &mut ChaCha8Rng) -> Word {
    loop {
        let z = rand_in_d(rng, 24);
        let w = hcf_expand_rational(&z).quotients;
        if !w.is_empty() {
            return w;
        }
    }
}

fn prefix_qpairs(w: &Word) -> Vec<QPair> {
    (0..=w.len()).map(|n| qpair(&w.prefix(n))).collect()
}

fn gi(x: i64, y: i64) -> GaussianInt {
    GaussianInt::new(x, y)
}

fn q_rat(s: &str) -> GaussianRational {
    s.parse().expect("literal")
}

fn w(s: &str) -> Word {
    s.parse().expect("literal")
}

fn check_rounding_cell(rng: &mut ChaCha8Rng) -> Outcome {
    let half = rat(1, 2);
    tally(
        rng,
        10_000,
        "points",
        |r| rand_gaussian_rational(r, 1000, 1000),
        |z| {
            let g = GaussianRational::from(nearest_gaussian_integer(z));
            let d = z - &g;
            let ok = |x: Rational| -half.clone() <= x && x < half;
            Ok(ok(d.re()) && ok(d.im()))
        },
    )
}

fn check_rounding_translation(rng: &mut ChaCha8Rng) -> Outcome {
    tally(
        rng,
        10_000,
        "translations",
        |r| {
            let z = rand_gaussian_rational(r, 100, 1000);
            let g = GaussianInt::new(ri(r, -10_000, 10_000), ri(r, -10_000, 10_000));
            (z, g)
        },
        |(z, g)| {
            let shifted = z + &GaussianRational::from(g.clone());
            Ok(nearest_gaussian_integer(&shifted) == &nearest_gaussian_integer(z) + g)
        },
    )
}

fn check_box_soundness(rng: &mut ChaCha8Rng) -> Outcome {
    let two = GaussianRational::from(gi(2, 1));
    tally(
        rng,
        1000,
        "expressions",
        |r| (rand_gaussian_rational(r, 3, 1000), rand_gaussian_rational(r, 3, 1000)),
        |(p, q)| {
            // (p q + p) / (q + 2 + i), with 1/|q + 2 + i| bounded away from 0.
            let den = q + &two;
            if den.is_zero() {
                return Ok(true);
            }
            let exact = (&(p * q) + p).checked_div(&den)?;
            let bp = ComplexBox::point(p).round_out(20);
            let bq = ComplexBox::point(q).round_out(20);
            let num = bp.mul(&bq).add(&bp);
            match num.div(&bq.add_exact(&two)) {
                Ok(b) => Ok(b.contains(&exact)),
                Err(_) => Ok(true),
            }
        },
    )
}

fn check_canonical_form(rng: &mut ChaCha8Rng) -> Outcome {
    tally(
        rng,
        1000,
        "fractions",
        |r| {
            let g = |r: &mut ChaCha8Rng| GaussianInt::new(ri(r, -50, 50), ri(r, -50, 50));
            let mut den = g(r);
            while den.is_zero() {
                den = g(r);
            }
            let mut u = g(r);
            while u.is_zero() {
                u = g(r);
            }
            let (c, mut d) = (g(r), g(r));
            while d.is_zero() {
                d = g(r);
            }
            (g(r), den, u, c, d)
        },
        |(a, b, u, c, d)| {
            let z = GaussianRational::new(a.clone(), b.clone())?;
            let again = GaussianRational::new(z.num().clone(), z.den().clone())?;
            let scaled = GaussianRational::new(a * u, b * u)?;
            let other = GaussianRational::new(c.clone(), d.clone())?;
            let cross = a * d == b * c;
            Ok(again == z && scaled == z && cross == (z == other))
        },
    )
}

fn check_mirror(rng: &mut ChaCha8Rng) -> Outcome {
    tally(rng, 1000, "words", rand_word, |u| {
        let qp = qpair(u);
        let lhs = GaussianRational::new(qp.q_minus.clone(), qp.q.clone())?;
        Ok(lhs == evaluate(&u.reversed())?)
    })
}

fn check_determinant(rng: &mut ChaCha8Rng) -> Outcome {
    tally(rng, 1000, "words", rand_word, |u| {
        Ok(prefix_qpairs(u)
            .iter()
            .enumerate()
            .all(|(n, qp)| qp.determinant() == sign_pow(n)))
    })
}

fn check_convergent_quality(rng: &mut ChaCha8Rng) -> Outcome {
    tally(
        rng,
        1000,
        "points",
        |r| rand_in_d(r, 24),
        |z| {
            let u = hcf_expand_rational(z).quotients;
            for qp in prefix_qpairs(&u).iter().skip(1) {
                let conv = qp.value()?;
                let nq = Rational::from_integer(qp.q.norm());
                if (z - &conv).norm() * &nq * &nq > Rational::one() {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    )
}

fn check_strict_growth(rng: &mut ChaCha8Rng) -> Outcome {
    tally(rng, 1000, "words", rand_word, |u| {
        let norms: Vec<BigInt> = prefix_qpairs(u).iter().map(|qp| qp.q.norm()).collect();
        Ok(norms[0].is_one() && norms.windows(2).all(|p| p[0] < p[1]))
    })
}

fn check_golden_growth(rng: &mut ChaCha8Rng) -> Outcome {
    // An upper bound for φ^2 = (3 + √5)/2 keeps the check conservative.
    let phi2 = (rat(3, 1) + sqrt_ceil(&rat(5, 1), 64)) / rat(2, 1);
    tally(rng, 1000, "words", rand_word, |u| {
        let norms: Vec<Rational> = prefix_qpairs(u)
            .iter()
            .map(|qp| Rational::from_integer(qp.q.norm()))
            .collect();
        let len = u.len();
        for k in 0..=len {
            let mut factor = Rational::one();
            for n in 0..=(len - k) {
                if n > 0 && n % 2 == 0 {
                    factor *= &phi2;
                }
                if norms[n + k] < &factor * &norms[k] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })
}

/// `l < 2 sqrt(a) x` for integers with `a, x >= 0`.
fn below_two_root(l: &BigInt, a: &BigInt, x: &BigInt) -> bool {
    l.is_negative() || l * l < BigInt::from(4) * a * x * x
}

fn check_last_quotient(rng: &mut ChaCha8Rng) -> Outcome {
    tally(rng, 1000, "words", rand_word, |u| {
        let a = u.last().expect("nonempty").norm();
        let qp = qpair(u);
        let (x, y) = (qp.q_minus.norm(), qp.q.norm());
        // Squaring (|a| ± 1)|q^-| against |q| leaves one root of |a|^2.
        let upper = below_two_root(&(&y - (&a + 1) * &x), &a, &x);
        let lower = below_two_root(&((&a + 1) * &x - &y), &a, &x);
        Ok(upper && lower)
    })
}

fn check_concatenation(rng: &mut ChaCha8Rng) -> Outcome {
    tally(
        rng,
        1000,
        "splits",
        |r| {
            let mut u = rand_word(r);
            while u.len() < 2 {
                u = rand_word(r);
            }
            let k = r.gen_range(1..u.len());
            (u.prefix(k), u.suffix_from(k))
        },
        |(a, b)| {
            let na = qpair(a).q.norm();
            let nb = qpair(b).q.norm();
            let nab = qpair(&a.concat(b)).q.norm();
            let prod = &na * &nb;
            Ok(prod < BigInt::from(25) * &nab && nab < BigInt::from(9) * &prod)
        },
    )
}

fn check_round_trip(rng: &mut ChaCha8Rng) -> Outcome {
    tally(
        rng,
        10_000,
        "values",
        |r| rand_gaussian_rational(r, 5, 5000),
        |z| {
            let e = hcf_expand_rational(z);
            let frac = z - &GaussianRational::from(nearest_gaussian_integer(z));
            Ok(evaluate(&e.quotients)? == frac)
        },
    )
}

fn check_oracle_convergents(_: &mut ChaCha8Rng) -> Outcome {
    let z = sqrt10_example();
    let rows = search_approx(&z, &PsiSpec::inverse_square(), &BigInt::from(10u64.pow(8)), 2048)?;
    let conv: Vec<_> = rows.iter().filter(|r| r.source.starts_with("convergent")).collect();
    let ok = conv.iter().all(|r| r.psi_check == Decision::Yes);
    let status = if ok && conv.len() >= 8 {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok((
        status,
        format!("{} convergents with |q|^2 <= 10^8 all within 1/|q|^2", conv.len()),
    ))
}

fn outside(c: &str, rel: Rel) -> Constraint {
    Constraint::new(Form::circle(&q_rat(c), rat(1, 1)).neg(), rel)
}

fn hline(sign: i64, rel: Rel) -> Constraint {
    // sign * y - 1/2 rel 0, i.e. y < 1/2 or -y < 1/2 style.
    Constraint::new(Form::line(rat(0, 1), rat(sign, 1), rat(-1, 2)), rel)
}

fn replay(steps: &[(&str, Region, bool)], exact: bool) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (word, want, regular) in steps {
        let got = prototype_set(&w(word));
        let same = if exact { &got == want } else { got.same_set(want) };
        let class = classify(&got)?;
        ok &= same && class.is_regular() == *regular;
        lines.push(format!("{word}: {got} [{class}]"));
    }
    Ok((if ok { Status::Pass } else { Status::Fail }, lines.join("; ")))
}

fn check_chain_minus_2i(_: &mut ChaCha8Rng) -> Outcome {
    let d1 = Region::within_d(vec![outside("i", Rel::Lt)]);
    replay(
        &[
            ("[-2i]", d1.clone(), true),
            (
                "[-2i,-2]",
                Region::within_d(vec![hline(-1, Rel::Lt), outside("1", Rel::Le)]),
                true,
            ),
            ("[-2i,-2,2i]", Region::within_d(vec![outside("-i", Rel::Lt)]), true),
            ("[-2i,-2,2i,-2]", Region::within_d(vec![outside("1", Rel::Le)]), true),
            ("[-2i,-2,2i,-2,-2i]", d1, true),
        ],
        true,
    )
}

fn check_chain_2i(_: &mut ChaCha8Rng) -> Outcome {
    let seg = Region::within_d(vec![hline(-1, Rel::Eq), outside("1", Rel::Le)]);
    let arc = Region::within_d(vec![Constraint::new(Form::circle(&q_rat("-i"), rat(1, 1)), Rel::Eq)]);
    replay(
        &[
            ("[2i]", Region::within_d(vec![outside("-i", Rel::Le)]), true),
            ("[2i,-2+i]", seg.clone(), false),
            ("[2i,-2+i,2i]", arc.clone(), false),
            ("[2i,-2+i,2i,-2+i]", seg, false),
            ("[2i,-2+i,2i,-2+i,2i]", arc, false),
        ],
        false,
    )
}

/// States of all words of length at most 3 over `I_4`.
struct LevelThree {
    auto: PrototypeAutomaton,
    /// (word as letter indices, state) in length-then-lexicographic order.
    words: Vec<(Vec<usize>, usize)>,
}

static LEVEL_THREE: OnceLock<std::result::Result<Mutex<LevelThree>, String>> = OnceLock::new();

/// Shared across checks; building it dominates their cost.
fn level_three() -> Result<MutexGuard<'static, LevelThree>> {
    match LEVEL_THREE.get_or_init(|| build_level_three().map(Mutex::new).map_err(|e| e.to_string())) {
        Ok(m) => Ok(m.lock().unwrap_or_else(|e| e.into_inner())),
        Err(e) => Err(Error::Geometry(e.clone())),
    }
}

fn build_level_three() -> Result<LevelThree> {
    let mut auto = PrototypeAutomaton::new(bounded_alphabet(&rat(4, 1)));
    let n = auto.alphabet().len();
    let mut words: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut frontier = vec![(Vec::new(), PrototypeAutomaton::ROOT)];
    for _ in 0..3 {
        let mut next = Vec::new();
        for (u, s) in &frontier {
            for k in 0..n {
                let t = auto.step(*s, k)?;
                if auto.region(t).is_empty() {
                    continue;
                }
                let mut v: Vec<usize> = u.clone();
                v.push(k);
                words.push((v.clone(), t));
                next.push((v, t));
            }
        }
        frontier = next;
    }
    Ok(LevelThree { auto, words })
}

fn walk(auto: &mut PrototypeAutomaton, from: usize, letters: &[usize]) -> Result<usize> {
    letters.iter().try_fold(from, |s, &k| auto.step(s, k))
}

fn check_regular_prefixes(_: &mut ChaCha8Rng) -> Outcome {
    let mut l3 = level_three()?;
    let mut bad = 0;
    let mut regular = 0;
    let words = l3.words.clone();
    for (u, s) in &words {
        if !l3.auto.class(*s).is_regular() {
            continue;
        }
        regular += 1;
        for j in 1..u.len() {
            let p = walk(&mut l3.auto, PrototypeAutomaton::ROOT, &u[..j])?;
            if !l3.auto.class(p).is_regular() {
                bad += 1;
                break;
            }
        }
    }
    verdict(bad, regular, "regular words up to level 3 over |a| <= 4", None)
}

fn check_regular_extends(_: &mut ChaCha8Rng) -> Outcome {
    let mut l3 = level_three()?;
    let ext: Vec<usize> = [(2, 2), (2, -2), (-2, 2), (-2, -2)]
        .iter()
        .map(|&(x, y)| l3.auto.alphabet().iter().position(|a| a == &gi(x, y)).expect("letter"))
        .collect();
    let words = l3.words.clone();
    let (mut bad, mut regular) = (0, 0);
    for (_, s) in &words {
        if !l3.auto.class(*s).is_regular() {
            continue;
        }
        regular += 1;
        let mut any = false;
        for &k in &ext {
            let t = l3.auto.step(*s, k)?;
            any |= l3.auto.class(t).is_full();
        }
        bad += usize::from(!any);
    }
    verdict(bad, regular, "regular words extended by some ±2±2i", None)
}

fn check_full_suffixes(_: &mut ChaCha8Rng) -> Outcome {
    let mut l3 = level_three()?;
    let words = l3.words.clone();
    let (mut bad, mut full) = (0, 0);
    for (u, s) in &words {
        if !l3.auto.class(*s).is_full() {
            continue;
        }
        full += 1;
        for j in 1..u.len() {
            let t = walk(&mut l3.auto, PrototypeAutomaton::ROOT, &u[j..])?;
            if !l3.auto.class(t).is_full() {
                bad += 1;
                break;
            }
        }
    }
    verdict(bad, full, "full words up to level 3", None)
}

fn check_full_concatenation(_: &mut ChaCha8Rng) -> Outcome {
    let mut l3 = level_three()?;
    let words = l3.words.clone();
    let full: Vec<&(Vec<usize>, usize)> = words.iter().filter(|(_, s)| l3.auto.class(*s).is_full()).collect();
    let short: Vec<&&(Vec<usize>, usize)> = full.iter().filter(|(u, _)| u.len() <= 2).collect();
    let (mut bad, mut pairs) = (0, 0);
    for (u, s) in &short {
        for (v, _) in &short {
            if u.len() + v.len() > 3 {
                continue;
            }
            pairs += 1;
            let t = walk(&mut l3.auto, *s, v)?;
            bad += usize::from(!l3.auto.class(t).is_full());
        }
    }
    verdict(bad, pairs, "pairs of full words with total length <= 3", None)
}

/// A point of `D_u` by rejection sampling, if one turns up quickly.
fn point_in(region: &Region, rng: &mut ChaCha8Rng) -> Option<GaussianRational> {
    (0..400)
        .map(|_| rand_in_d(rng, 20))
        .find(|x| region.contains(x) == Membership::Included)
}

fn check_transport(rng: &mut ChaCha8Rng) -> Outcome {
    let fulls = ["[3]", "[2+2i]", "[-3i]", "[3,3]", "[-2+2i,3i]", "[4,-2-2i]"];
    let (mut bad, mut total, mut skipped) = (0, 0, 0);
    for _ in 0..50 {
        let u = w(fulls[rng.gen_range(0..fulls.len())]);
        let mut v = rand_word(rng);
        v = v.prefix(v.len().min(rng.gen_range(1..=3)));
        let d_v = prototype_set(&v);
        let c_uv = cylinder_region(&u.concat(&v))?;
        for _ in 0..20 {
            let Some(x) = point_in(&d_v, rng) else {
                skipped += 1;
                continue;
            };
            let wpt = mobius_apply(&v, &x)?;
            let img = mobius_apply(&u, &wpt)?;
            total += 1;
            bad += usize::from(c_uv.contains(&img) != Membership::Included);
        }
    }
    let mut out = verdict(bad, total, "transported points", None)?;
    let _ = write!(out.1, " ({skipped} samples without a point)");
    Ok(out)
}

fn check_diameter_area(rng: &mut ChaCha8Rng) -> Outcome {
    let l3 = level_three()?;
    let words = l3.words.clone();
    let regular: Vec<&(Vec<usize>, usize)> = words.iter().filter(|(_, s)| l3.auto.class(*s).is_regular()).collect();
    let alphabet = l3.auto.alphabet().to_vec();
    let (mut bad, mut pairs) = (0, 0);
    let mut c0 = f64::INFINITY;
    let mut area_bad = 0;
    let samples = 30;
    for _ in 0..samples {
        let (u, s) = regular[rng.gen_range(0..regular.len())];
        let word = Word::new(u.iter().map(|&k| alphabet[k].clone()).collect())?;
        let d_u = l3.auto.region(*s).clone();
        let nq = Rational::from_integer(qpair(&word).q.norm());
        let pts: Vec<GaussianRational> = (0..10)
            .filter_map(|_| point_in(&d_u, rng))
            .map(|x| mobius_apply(&word, &x))
            .collect::<Result<_>>()?;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                pairs += 1;
                // |z1 - z2| <= 2/|q|^2.
                bad += usize::from((&pts[i] - &pts[j]).norm() * &nq * &nq > rat(4, 1));
            }
        }
        let cyl = cylinder_region(&word)?;
        let mc = montecarlo_area(&cyl, 20_000, rng.gen());
        let scale = nq.to_f64().unwrap_or(f64::INFINITY).powi(2) / std::f64::consts::PI;
        if mc.value - mc.error_bound > 1.0 / scale {
            area_bad += 1;
        }
        c0 = c0.min(mc.value * scale);
    }
    let ok = bad == 0 && area_bad == 0 && c0 > 0.0 && c0 < 1.0;
    Ok((
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "{samples} regular cylinders, {pairs} point pairs, {bad} over diameter, {area_bad} over area; fitted c0 = {c0:.4}"
        ),
    ))
}

fn check_classification_total(_: &mut ChaCha8Rng) -> Outcome {
    let l3 = level_three()?;
    let mut canon: Vec<Vec<Constraint>> = vec![interior_of(&d_edges())];
    for k in 1..=3u8 {
        for j in 0..4u8 {
            canon.push(canonical_interior(j, k));
        }
    }
    let states: BTreeSet<usize> = l3.words.iter().map(|(_, s)| *s).collect();
    let (mut bad, mut regular) = (0, 0);
    for s in states {
        if !l3.auto.class(s).is_regular() {
            continue;
        }
        regular += 1;
        let u = l3.auto.region(s).interior_constraints();
        let matches = canon
            .iter()
            .filter(|v| open_subset(&u, v) && open_subset(v, &u))
            .count();
        bad += usize::from(matches != 1);
    }
    verdict(bad, regular, "distinct regular prototypes", None)
}

fn check_prototype_vk(_: &mut ChaCha8Rng) -> Outcome {
    let target = Region::within_d(vec![outside("i", Rel::Lt)]);
    let bad = (0..=5).filter(|&k| prototype_set(&make_vk(k)) != target).count();
    verdict(bad, 6, "values of k in 0..=5", None)
}

fn check_prototype_vk_tilde(_: &mut ChaCha8Rng) -> Outcome {
    let arc = Region::within_d(vec![Constraint::new(Form::circle(&q_rat("-i"), rat(1, 1)), Rel::Eq)]);
    let bad = (1..=5)
        .filter(|&k| !prototype_set(&make_vk_tilde(k)).same_set(&arc))
        .count();
    verdict(bad, 5, "values of k in 1..=5", None)
}

fn check_value_identity(_: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    for k in 0..=10 {
        bad += usize::from(evaluate(&make_vk(k))? != evaluate(&make_vk_tilde(k))?);
    }
    verdict(bad, 11, "values of k in 0..=10", None)
}

fn check_block_product(_: &mut ChaCha8Rng) -> Outcome {
    let prod = w("[-2,2i,-2,-2i]")
        .items()
        .iter()
        .fold(Mat2::identity(), |m, a| m.mul(&Mat2::letter(a)));
    let ok = prod == stk_block();
    Ok((
        if ok { Status::Pass } else { Status::Fail },
        format!("product = {prod}"),
    ))
}

fn check_st_identities(_: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    for k in 0..=10u32 {
        let m = stk_matrix_power(k);
        let ratio = GaussianRational::new(m.a.clone(), m.c.clone())?;
        let tail = make_vk(k as usize).suffix_from(1);
        let ok = ratio.im() == rat(1, 2) && m.c.re.is_zero() && m.a == m.d && QPair::from_matrix(&m) == qpair(&tail);
        bad += usize::from(!ok);
    }
    verdict(bad, 11, "values of k in 0..=10", None)
}

/// The twenty seeded discrepancy instances and five points per cylinder.
pub fn discrepancy_suite(rng: &mut ChaCha8Rng) -> Result<(usize, usize, Vec<String>)> {
    let heads = ["[3]", "[4]", "[2+2i]", "[3,3]"];
    let tails = [gi(2, 2), gi(0, 3), gi(-2, 2)];
    let mut combos: Vec<(usize, usize, usize)> = Vec::new();
    for a in 0..heads.len() {
        for k in 1..=3 {
            for b in 0..tails.len() {
                combos.push((a, k, b));
            }
        }
    }
    // Seeded choice of 20 of the 36 combinations.
    for i in 0..20 {
        let j = rng.gen_range(i..combos.len());
        combos.swap(i, j);
    }
    combos.truncate(20);
    combos.sort();
    let (mut bad, mut total) = (0, 0);
    let mut notes = Vec::new();
    for (a, k, b) in combos {
        let inst = build_discrepancy_instance(&w(heads[a]), k, &tails[b])?;
        let cyl = cylinder_region(&inst.approx_word)?;
        let member = cyl.contains(&inst.approx) == Membership::Included;
        total += 1;
        let mut ok = member;
        let mut got = 0;
        let mut tries = 0;
        while got < 5 && tries < 2000 {
            tries += 1;
            let x = rand_in_d(rng, 16);
            let z = mobius_apply(&inst.word, &x)?;
            let e = hcf_expand_rational(&z);
            if e.quotients.prefix(inst.word.len()) != inst.word {
                continue;
            }
            got += 1;
            ok &= dd(&e, &inst.approx)? == inst.expected_dd;
        }
        ok &= got == 5;
        if !ok {
            bad += 1;
            notes.push(format!("{}: member={member}, points={got}", inst.word));
        }
    }
    Ok((bad, total, notes))
}

fn check_discrepancy_instances(rng: &mut ChaCha8Rng) -> Outcome {
    let (bad, total, notes) = discrepancy_suite(rng)?;
    verdict(bad, total, "instances with 5 points each", notes.into_iter().next())
}

/// Words over `I_M` crossing `Q` that are full, by exhaustive search
/// without the automaton.
pub fn gamma_oracle(m: i64, q2: &Rational) -> Result<BTreeSet<String>> {
    let letters: Vec<GaussianInt> = (-m..=m)
        .flat_map(|x| (-m..=m).map(move |y| (x, y)))
        .filter(|(x, y)| x * x + y * y >= 2 && x * x + y * y <= m * m)
        .map(|(x, y)| gi(x, y))
        .collect();
    let mut out = BTreeSet::new();
    let mut stack = vec![(Word::empty(), Region::unit_cell())];
    while let Some((u, d_u)) = stack.pop() {
        for a in &letters {
            let v = u.with(a.clone())?;
            let d_v = crate::geometry::prototype_step(&d_u, a);
            if &Rational::from_integer(qpair(&v).q.norm()) >= q2 {
                if classify(&d_v)?.is_full() {
                    out.insert(v.to_string());
                }
            } else if !d_v.is_empty() {
                stack.push((v, d_v));
            }
        }
    }
    Ok(out)
}

fn check_gamma_small(_: &mut ChaCha8Rng) -> Outcome {
    let spec = GammaSpec::new(rat(3, 1), rat(3, 2));
    let got: BTreeSet<String> = enumerate_gamma(&spec, None)?
        .words
        .iter()
        .map(|g| g.word.to_string())
        .collect();
    let want = gamma_oracle(3, &rat(9, 4))?;
    let level_one = got.iter().filter(|s| !s.contains(',')).count();
    Ok((
        if got == want { Status::Pass } else { Status::Fail },
        format!(
            "M=3, Q=3/2: {} words ({level_one} of length 1); definitional search agrees: {}",
            got.len(),
            got == want
        ),
    ))
}

/// Prefix-freeness, fullness, threshold crossing and BFS/DFS agreement.
pub fn gamma_properties(spec: &GammaSpec) -> Result<(bool, String)> {
    let r = enumerate_gamma(spec, None)?;
    let q2 = &spec.q * &spec.q;
    let set: BTreeSet<String> = r.words.iter().map(|g| g.word.to_string()).collect();
    let mut ok = r.complete && set.len() == r.words.len();
    let mut prefixes = 0;
    for g in &r.words {
        let u = &g.word;
        let qp = qpair(u);
        let (n, nm) = (
            Rational::from_integer(qp.q.norm()),
            Rational::from_integer(qp.q_minus.norm()),
        );
        ok &= nm < q2 && q2 <= n;
        ok &= classify(&prototype_set(u))?.is_full();
        for j in 1..u.len() {
            if set.contains(&u.prefix(j).to_string()) {
                prefixes += 1;
            }
        }
    }
    ok &= prefixes == 0;
    let dfs: BTreeSet<String> = enumerate_gamma_dfs(spec)?.iter().map(|w| w.to_string()).collect();
    ok &= dfs == set;
    Ok((
        ok,
        format!(
            "M={}, Q={}: {} words, {} automaton states, prefix-free: {}, DFS count {}",
            spec.m,
            spec.q,
            set.len(),
            r.automaton_states,
            prefixes == 0,
            dfs.len()
        ),
    ))
}

fn check_gamma_exhaustive(_: &mut ChaCha8Rng) -> Outcome {
    let (ok, detail) = gamma_properties(&GammaSpec::new(rat(3, 1), rat(8, 1)))?;
    Ok((if ok { Status::Pass } else { Status::Fail }, detail))
}

fn check_suffix_bound(_: &mut ChaCha8Rng) -> Outcome {
    let spec = GammaSpec::new(rat(3, 1), rat(8, 1));
    let total = enumerate_gamma(&spec, None)?.words.len() as u64;
    let mut lines = Vec::new();
    let mut ok = true;
    for s in ["[3]", "[2+2i]", "[-3i]", "[1+i]", "[2]", "[1+i,-3]", "[2i,2]"] {
        let u = w(s);
        let (count, complete) = gamma_suffix_count(&u, &spec)?;
        let nq = qpair(&u).q.norm().to_f64().unwrap_or(f64::INFINITY);
        let bound = suffix_bound_ln(3.0, nq, total);
        let holds = complete && (count == 0 || (count as f64).ln() <= bound);
        ok &= holds;
        lines.push(format!("{s}: {count} (ln bound {bound:.1})"));
    }
    Ok((
        if ok { Status::Pass } else { Status::Fail },
        format!("M=3, Q=8, total {total}; {}", lines.join(", ")),
    ))
}

fn check_growth_trend(_: &mut ChaCha8Rng) -> Outcome {
    let mut rows = Vec::new();
    for q in [2i64, 4, 8] {
        let n = enumerate_gamma(&GammaSpec::new(rat(3, 1), rat(q, 1)), None)?
            .words
            .len();
        let target = (q as f64).powf(4.0 - 2.0 / 3.0);
        rows.push(format!("Q={q}: {n} vs Q^(10/3)={target:.0}"));
    }
    Ok((Status::Skipped, format!("reported only: {}", rows.join(", "))))
}

fn check_measure_monotone(_: &mut ChaCha8Rng) -> Outcome {
    let samples = 100_000;
    let ms = [3i64, 4, 8];
    let mut grid = Vec::new();
    for &m in &ms {
        let row: Vec<_> = (1..=3)
            .map(|n| measure_sum_bounded_words(&rat(m, 1), n, samples, 17 + m as u64))
            .collect::<Result<_>>()?;
        grid.push(row);
    }
    let mut ok = true;
    let mut lines = Vec::new();
    for (i, row) in grid.iter().enumerate() {
        for n in 0..3 {
            if n + 1 < 3 {
                ok &= row[n + 1].ci_lo <= row[n].ci_hi;
            }
            if i + 1 < grid.len() {
                ok &= grid[i + 1][n].ci_hi >= row[n].ci_lo;
            }
        }
        let fit: Vec<String> = row
            .iter()
            .map(|r| {
                let m2 = (ms[i] * ms[i]) as f64;
                format!(
                    "{:.4} (c1~{:.2})",
                    r.estimate,
                    m2 * (1.0 - r.estimate.powf(1.0 / r.n as f64))
                )
            })
            .collect();
        lines.push(format!("M={}: {}", ms[i], fit.join(" ")));
    }
    Ok((if ok { Status::Pass } else { Status::Fail }, lines.join("; ")))
}

fn check_level_one_measure(_: &mut ChaCha8Rng) -> Outcome {
    let r = measure_sum_bounded_words(&rat(3, 1), 1, 1_000_000, 9)?;
    let reference = level_one_measure_m3();
    let ok = r.ci_lo <= reference && reference <= r.ci_hi;
    Ok((
        if ok { Status::Pass } else { Status::Fail },
        format!(
            "estimate {:.5} in [{:.5}, {:.5}], reference {reference:.5}",
            r.estimate, r.ci_lo, r.ci_hi
        ),
    ))
}

fn check_annulus_area(_: &mut ChaCha8Rng) -> Outcome {
    let mut c: f64 = 0.0;
    let mut rows = Vec::new();
    for k in 2..=8 {
        let d = 1i64 << k;
        let count = count_lattice_annulus(&rat(1, d))? as f64;
        let area = 1.5 * std::f64::consts::PI * (d * d) as f64;
        let ck = (count - area).abs() / d as f64;
        c = c.max(ck);
        rows.push(format!("1/{d}: {count}"));
    }
    // Half-annulus perimeter over 1/r.
    let limit = 3.0 * std::f64::consts::PI + 2.0;
    Ok((
        if c <= limit { Status::Pass } else { Status::Fail },
        format!("fitted C = {c:.3} (perimeter constant {limit:.3}); {}", rows.join(", ")),
    ))
}

fn check_annulus_r100(_: &mut ChaCha8Rng) -> Outcome {
    let r = annulus_record(&rat(1, 100))?;
    let target = 1.5 * std::f64::consts::PI;
    let ok = (r.scaled - target).abs() <= 0.1 && (r.scaled - target).abs() <= 0.02 * target;
    Ok((
        if ok { Status::Pass } else { Status::Fail },
        format!("count {}, r^2 count = {:.4}, 3π/2 = {target:.4}", r.count, r.scaled),
    ))
}

fn check_annulus_full(rng: &mut ChaCha8Rng) -> Outcome {
    let mut total = 0;
    let mut bad = 0;
    for d in [3i64, 4, 8] {
        // Members b with d <= |b| <= 2d and Im b >= 1.
        let members: Vec<GaussianInt> = (-2 * d..=2 * d)
            .flat_map(|x| (1..=2 * d).map(move |y| (x, y)))
            .filter(|(x, y)| {
                let n = x * x + y * y;
                n >= d * d && n <= 4 * d * d
            })
            .map(|(x, y)| gi(x, y))
            .collect();
        debug_assert_eq!(members.len() as u64, count_lattice_annulus(&rat(1, d))?);
        for _ in 0..20 {
            let b = &members[rng.gen_range(0..members.len())];
            total += 1;
            bad += usize::from(!classify(&prototype_set(&Word::new(vec![b.clone()])?))?.is_full());
        }
    }
    verdict(bad, total, "sampled members for r in {1/3, 1/4, 1/8}", None)
}

fn check_annulus_monotone(_: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let rs = [(1, 4), (1, 5), (2, 9), (1, 7), (3, 20), (1, 10)];
    for (n, d) in rs {
        let a = count_lattice_annulus(&rat(n, d))?;
        let b = count_lattice_annulus(&rat(n, 2 * d))?;
        bad += usize::from(b <= a);
    }
    verdict(bad, rs.len(), "sampled r <= 1/4", None)
}

fn check_rcf_prefix(rng: &mut ChaCha8Rng) -> Outcome {
    let mut failures = 0;
    let mut first = None;
    let n = 1000;
    for _ in 0..n {
        let q: i64 = rng.gen_range(2..=10_000);
        let mut p: i64 = rng.gen_range(1..q);
        while num_integer::Integer::gcd(&p, &q) != 1 {
            p = rng.gen_range(1..q);
        }
        // x = p/q + t/(q^2 K) with 0 < |t| < K.
        let k: i64 = 1 << 20;
        let mut t: i64 = 0;
        while t == 0 {
            t = rng.gen_range(-(k - 1)..k);
        }
        let x = rat(p, q) + Rational::new(BigInt::from(t), BigInt::from(q) * q * k);
        if !x.is_positive() || x >= Rational::one() {
            continue;
        }
        let r = rcf_check_prefix_property(&RealInput::Exact(x.clone()), &BigInt::from(p), &BigInt::from(q), 1024)?;
        if !r.holds {
            failures += 1;
            first.get_or_insert_with(|| format!("x={x}, p/q={p}/{q}: {r:?}"));
        }
    }
    verdict(failures, n, "pairs", first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_anchor_has_a_check() {
        for (i, a) in ANCHORS.iter().enumerate() {
            assert!(CHECKS.iter().any(|c| c.2 == i), "{a}");
        }
        let ids: BTreeSet<_> = CHECKS.iter().map(|c| (c.0, c.1)).collect();
        assert_eq!(ids.len(), CHECKS.len());
    }

    #[test]
    fn vk_suite_passes_and_is_reproducible() {
        let a = run_suite("vk", 7).unwrap();
        assert!(a.passed(), "{a:#?}");
        let b = run_suite("vk", 7).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(run_suite("nope", 1).is_err());
    }

    #[test]
    fn golden_growth_bound_is_conservative() {
        let phi2 = (rat(3, 1) + sqrt_ceil(&rat(5, 1), 64)) / rat(2, 1);
        assert!(phi2 > rat(2618, 1000) && phi2 < rat(2619, 1000));
    }
}
