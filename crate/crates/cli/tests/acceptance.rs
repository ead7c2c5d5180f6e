//! The ten acceptance criteria, one pass/fail line each.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use hcf_core::discrepancy::dd_report;
use hcf_core::enumeration::{
    count_lattice_annulus, enumerate_gamma, level_one_measure_m3, measure_sum_bounded_words, GammaSpec,
};
use hcf_core::expansion::{hcf_expand_rational, hcf_expand_stream};
use hcf_core::gaussian::rat;
use hcf_core::oracle::sqrt10_example;
use hcf_core::verify::{gamma_properties, run_check, Status};
use hcf_core::word::Word;
use hcf_core::GaussianRational;

type Verdict = (bool, String);
type Criterion = (&'static str, fn() -> Verdict, Duration);

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn checks(ids: &[&str]) -> Verdict {
    let mut ok = true;
    let mut lines = Vec::new();
    for id in ids {
        let c = run_check(id, 7).unwrap();
        ok &= c.status == Status::Pass;
        lines.push(format!("{id}={:?} ({})", c.status, c.detail));
    }
    (ok, lines.join("; "))
}

fn example_replay() -> Verdict {
    let z = sqrt10_example();
    let literal: GaussianRational = "(37+6i)/(129+4i)".parse().unwrap();
    let expansion = hcf_expand_rational(&literal).quotients;
    let word_ok = expansion == w("[3,2,3i,-2,3i]");
    let prefix = hcf_expand_stream(&z, 9, 4096).unwrap();
    let prefix_ok = prefix.certified_prefix_len >= 9 && prefix.quotients.prefix(9) == w("[4,-2,3i,2,3i,-2,3i,2,3i]");
    let r = dd_report(&z, &literal, 256).unwrap();
    let lo: f64 = r.distance_lo.parse().unwrap();
    let hi: f64 = r.distance_hi.parse().unwrap();
    let dd_ok = r.dd == 3;
    let interval_ok = 2.8e-5 < lo && hi < 3.0e-5 && r.distance_width <= 1e-9;
    let below_ok = r.below_inv_q_norm_sq == Some(true) && r.q_norm_sq == "16657";
    // The same replay with the denominator 129+24i whose expansion is the displayed word.
    let fixed: GaussianRational = "(37+6i)/(129+24i)".parse().unwrap();
    let f = dd_report(&z, &fixed, 256).unwrap();
    let ok = word_ok && prefix_ok && dd_ok && interval_ok && below_ok;
    (
        ok,
        format!(
            "(37+6i)/(129+4i) expands to {expansion}; z prefix {}; dd {} (want 3); |z-p/q| in [{lo:e}, {hi:e}], |q|^2 = {}; \
             with 129+24i: {} , dd {}, |z-p/q| in [{}, {}] < 1/{}",
            prefix.quotients.prefix(9),
            r.dd,
            r.q_norm_sq,
            f.approx_quotients,
            f.dd,
            f.distance_lo,
            f.distance_hi,
            f.q_norm_sq
        ),
    )
}

fn vk_suite() -> Verdict {
    checks(&["vk.value-identity", "vk.st-identities", "vk.block-product"])
}

fn prototype_replay() -> Verdict {
    checks(&["cylinders.chain-minus-2i", "cylinders.chain-2i"])
}

fn qpair_properties() -> Verdict {
    checks(&[
        "props.determinant",
        "props.convergent-quality",
        "props.strict-growth",
        "props.golden-growth",
        "props.last-quotient",
        "props.concatenation",
        "props.mirror",
    ])
}

fn discrepancy_instances() -> Verdict {
    checks(&["vk.discrepancy-instances"])
}

fn rcf_prefix() -> Verdict {
    checks(&["rcf.prefix-property"])
}

fn gauss_circle() -> Verdict {
    let c = count_lattice_annulus(&rat(1, 100)).unwrap();
    let scaled = c as f64 / 10_000.0;
    let err = (scaled - 1.5 * std::f64::consts::PI).abs();
    // Frozen from the brute-force count in the core unit tests.
    let golden = [(4, 71u64), (8, 293), (16, 1191)];
    let got: Vec<u64> = golden
        .iter()
        .map(|(d, _)| count_lattice_annulus(&rat(1, *d)).unwrap())
        .collect();
    let golden_ok = golden.iter().zip(&got).all(|((_, want), g)| want == g);
    (
        err <= 0.1 && golden_ok,
        format!("r=1/100: r^2 count = {scaled:.4}, |diff| = {err:.4}; counts for 1/4, 1/8, 1/16: {got:?}"),
    )
}

fn gamma_enumeration() -> Verdict {
    let small = enumerate_gamma(&GammaSpec::new(rat(3, 1), rat(3, 2)), None).unwrap();
    let set: BTreeSet<String> = small.words.iter().map(|g| g.word.to_string()).collect();
    let listed = ["[3]", "[-3]", "[3i]", "[-3i]", "[2+2i]", "[2-2i]", "[-2+2i]", "[-2-2i]"];
    let listed_ok = listed.iter().all(|s| set.contains(*s));
    let count_ok = set.len() == 12;
    let (large_ok, detail) = gamma_properties(&GammaSpec::new(rat(3, 1), rat(30, 1))).unwrap();
    let extra: Vec<&String> = set.iter().filter(|s| !listed.contains(&s.as_str())).collect();
    (
        listed_ok && count_ok && large_ok,
        format!(
            "(3, 3/2): {} words (want 12), the 8 listed present: {listed_ok}, others {extra:?}; {detail}",
            set.len()
        ),
    )
}

fn measure_cross_check() -> Verdict {
    let r = measure_sum_bounded_words(&rat(3, 1), 1, 1_000_000, 7).unwrap();
    let reference = level_one_measure_m3();
    (
        r.ci_lo <= reference && reference <= r.ci_hi,
        format!(
            "estimate {:.5} in [{:.5}, {:.5}], reference {reference:.5}",
            r.estimate, r.ci_lo, r.ci_hi
        ),
    )
}

fn determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hcf"))
            .args(["verify", "all", "--seed", "7", "--format", "jsonl"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    (
        same && a.status.success() == b.status.success(),
        format!(
            "{} bytes, identical: {same}, exit {:?}/{:?}",
            a.stdout.len(),
            a.status.code(),
            b.status.code()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("example replay", example_replay, Duration::from_secs(1)),
        ("v_k identities", vk_suite, Duration::from_secs(1)),
        ("prototype chains", prototype_replay, Duration::from_secs(1)),
        ("q-pair properties", qpair_properties, Duration::from_secs(30)),
        ("discrepancy instances", discrepancy_instances, Duration::from_secs(60)),
        ("real prefix property", rcf_prefix, Duration::from_secs(10)),
        ("lattice annulus", gauss_circle, Duration::from_secs(10)),
        ("full-word enumeration", gamma_enumeration, Duration::from_secs(300)),
        ("level-one measure", measure_cross_check, Duration::from_secs(120)),
        ("determinism", determinism, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(v) => v,
            Err(_) => (false, "panicked".to_string()),
        };
        let elapsed = t.elapsed();
        let in_time = elapsed <= *limit;
        let pass = ok && in_time;
        failed += usize::from(!pass);
        let time_note = if in_time {
            String::new()
        } else {
            format!(" over the {limit:?} budget")
        };
        println!(
            "criterion {:>2} {:<24} {} ({} ms{time_note}) {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_millis()
        );
    }
    println!("{} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
