use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hcf_core::discrepancy::{build_discrepancy_instance, dd, dd_report, decimal, distance_enclosure};
use hcf_core::enumeration::{
    annulus_record, enumerate_gamma, gamma_suffix_count, measure_sum_bounded_words, GammaSpec,
};
use hcf_core::expansion::{hcf_expand_rational, hcf_expand_stream, observed_period, StopReason};
use hcf_core::geometry::{classify, cylinder_region, prototype_set, region_area, AreaMethod, Membership, Region};
use hcf_core::oracle::{named_oracle, named_oracle_names, ExactComplex, RefinableComplex, DEFAULT_MAX_BITS};
use hcf_core::search::{parse_decimal, search_approx, PsiSpec};
use hcf_core::verify::{run_suite, Status};
use hcf_core::word::{evaluate, mobius_apply, qpair, Word};
use hcf_core::{Error, GaussianInt, GaussianRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "hcf",
    version,
    about = "Hurwitz continued fractions over the Gaussian integers"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Precision cap for oracle enclosures.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_BITS)]
    max_bits: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expand a Gaussian rational, or a built-in oracle with --oracle.
    Expand {
        #[arg(allow_hyphen_values = true)]
        input: Option<String>,
        #[arg(long)]
        oracle: Option<String>,
        /// Number of quotients for oracles.
        #[arg(short, long, default_value_t = 20)]
        n: usize,
    },
    /// Value [0; a_1, ..., a_n] of a quotient list like "[3,2,3i]".
    Eval { word: String },
    /// p, q, p^-, q^- of a quotient list.
    Qpair { word: String },
    /// Discrepancy between z and an approximant.
    Dd {
        /// Oracle name or Gaussian rational.
        #[arg(allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(allow_hyphen_values = true)]
        approx: Option<String>,
        /// Build an instance from a full word a, with --k and --b.
        #[arg(long)]
        instance: Option<String>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "2+2i", allow_hyphen_values = true)]
        b: String,
    },
    /// The prototype set D_u, or the cylinder with --cylinder.
    Prototype {
        word: String,
        #[arg(long)]
        cylinder: bool,
        /// Report membership of a point.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Full, regular (with its class) or irregular.
    Classify { word: String },
    /// Area of D_u, or of the cylinder with --cylinder.
    Area {
        word: String,
        #[arg(long)]
        cylinder: bool,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Full words over |a| <= M crossing the threshold Q, or measure sums with --measure.
    Gamma {
        #[arg(long)]
        m: String,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        limit: Option<usize>,
        /// Count suffixes of this word instead of listing.
        #[arg(long)]
        suffix: Option<String>,
        #[arg(long, default_value_t = 20_000_000)]
        budget: usize,
        /// Estimate the measure of points whose first n quotients satisfy |a| <= M.
        #[arg(long)]
        measure: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Lattice annulus counts #I(r).
    Annulus {
        #[arg(required = true)]
        r: Vec<String>,
    },
    /// Approximants within psi(|q|) among convergents and v_k constructions.
    Search {
        #[arg(long, default_value = "sqrt10-example")]
        oracle: String,
        #[arg(long, default_value = "x^-2")]
        psi: String,
        #[arg(long, default_value = "1000000")]
        q_norm_limit: String,
    },
    /// Run a verification suite: props, cylinders, vk, gamma, annulus, rcf or all.
    Verify { suite: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Montecarlo,
}

enum Failure {
    Check,
    Usage(String),
    Precision(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Undecidable { .. } | Error::InsufficientPrecision { .. } => Self::Precision(e.to_string()),
            Error::Parse(_)
            | Error::Precondition(_)
            | Error::RationalTarget
            | Error::InvalidQuotient(_)
            | Error::ZeroDenominator
            | Error::DivisionByZero => Self::Usage(e.to_string()),
            _ => Self::Other(e.to_string()),
        }
    }
}

type Res = Result<(), Failure>;

struct Out {
    format: Format,
    lines: Vec<String>,
}

impl Out {
    fn record<T: Serialize>(&mut self, text: impl Into<String>, rec: &T) {
        match self.format {
            Format::Text => self.lines.push(text.into()),
            Format::Jsonl => self.lines.push(serde_json::to_string(rec).expect("records serialize")),
        }
    }

    fn text(&mut self, line: impl Into<String>) {
        if self.format == Format::Text {
            self.lines.push(line.into());
        }
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, Failure> {
    s.parse().map_err(Failure::from)
}

fn oracle(s: &str) -> Result<Box<dyn RefinableComplex>, Failure> {
    if let Some(o) = named_oracle(s) {
        return Ok(o);
    }
    match s.parse::<GaussianRational>() {
        Ok(z) => Ok(Box::new(ExactComplex(z))),
        Err(_) => Err(Failure::Usage(format!(
            "{s} is neither a Gaussian rational nor an oracle ({})",
            named_oracle_names().join(", ")
        ))),
    }
}

#[derive(Serialize)]
struct ExpandRecord {
    input: String,
    quotients: Word,
    terminated: bool,
    certified_prefix_len: usize,
    stop: StopReason,
    observed_period: Option<(usize, usize)>,
}

fn cmd_expand(out: &mut Out, input: Option<String>, oracle_name: Option<String>, n: usize, max_bits: u32) -> Res {
    let (label, e) = match (input, oracle_name) {
        (Some(s), None) => {
            let z: GaussianRational = parse(&s)?;
            (s, hcf_expand_rational(&z))
        }
        (None, Some(name)) => {
            let o = named_oracle(&name).ok_or_else(|| {
                Failure::Usage(format!(
                    "unknown oracle {name}; known: {}",
                    named_oracle_names().join(", ")
                ))
            })?;
            (o.describe(), hcf_expand_stream(o.as_ref(), n, max_bits)?)
        }
        _ => return Err(Failure::Usage("give exactly one of INPUT or --oracle".into())),
    };
    let status = match &e.stop {
        StopReason::Terminated => "terminated".to_string(),
        StopReason::Complete => format!("{} certified", e.certified_prefix_len),
        StopReason::Undecidable { bits } => format!("undecidable at {bits} bits after {}", e.certified_prefix_len),
    };
    let period = if e.terminated {
        None
    } else {
        observed_period(&e.quotients)
    };
    let mut text = format!("{} ({status})", e.quotients);
    if let Some((pre, per)) = period {
        text.push_str(&format!("; observed period {per} after {pre}, unproven"));
    }
    out.record(
        text,
        &ExpandRecord {
            input: label,
            quotients: e.quotients.clone(),
            terminated: e.terminated,
            certified_prefix_len: e.certified_prefix_len,
            stop: e.stop.clone(),
            observed_period: period,
        },
    );
    if let StopReason::Undecidable { .. } = e.stop {
        if e.certified_prefix_len < n {
            return Err(Failure::Precision(format!(
                "only {} of {n} quotients certified; raise --max-bits",
                e.certified_prefix_len
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalRecord {
    word: Word,
    value: GaussianRational,
}

#[derive(Serialize)]
struct QpairRecord {
    word: Word,
    p: GaussianInt,
    q: GaussianInt,
    p_minus: GaussianInt,
    q_minus: GaussianInt,
    determinant: GaussianInt,
}

#[derive(Serialize)]
struct RationalDd {
    z: GaussianRational,
    approx: GaussianRational,
    dd: usize,
    n: usize,
    z_quotients: Word,
    distance_lo: String,
    distance_hi: String,
}

#[derive(Serialize)]
struct InstanceRecord {
    word: Word,
    approx: GaussianRational,
    approx_word: Word,
    z: GaussianRational,
    expected_dd: usize,
    dd: usize,
}

#[allow(clippy::too_many_arguments)]
fn cmd_dd(
    out: &mut Out,
    z: Option<String>,
    approx: Option<String>,
    instance: Option<String>,
    k: usize,
    b: &str,
    seed: u64,
    max_bits: u32,
) -> Res {
    if let Some(a) = instance {
        let a: Word = parse(&a)?;
        let b: GaussianInt = parse(b)?;
        let inst = build_discrepancy_instance(&a, k, &b)?;
        // A seeded point of the cylinder of a v_k b.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = prototype_set(&inst.word);
        let x = (0..10_000)
            .map(|_| {
                let h = 1i64 << 15;
                let s = 1i64 << 16;
                GaussianRational::from_parts(
                    &hcf_core::gaussian::rat(rng.gen_range(-h..h), s),
                    &hcf_core::gaussian::rat(rng.gen_range(-h..h), s),
                )
            })
            .find(|x| region.contains(x) == Membership::Included)
            .ok_or_else(|| Failure::Other("no sample point found in the cylinder".into()))?;
        let zv = mobius_apply(&inst.word, &x)?;
        let value = dd(&hcf_expand_rational(&zv), &inst.approx)?;
        out.record(
            format!(
                "z = {zv} in cylinder of {}; approx = {} = [0;{}]; dd = {value} (expected {})",
                inst.word,
                inst.approx,
                inst.approx_word.to_string().trim_matches(['[', ']']),
                inst.expected_dd
            ),
            &InstanceRecord {
                word: inst.word.clone(),
                approx: inst.approx.clone(),
                approx_word: inst.approx_word.clone(),
                z: zv,
                expected_dd: inst.expected_dd,
                dd: value,
            },
        );
        return if value == inst.expected_dd {
            Ok(())
        } else {
            Err(Failure::Check)
        };
    }
    let (Some(z), Some(approx)) = (z, approx) else {
        return Err(Failure::Usage("dd needs Z and APPROX, or --instance".into()));
    };
    let approx: GaussianRational = parse(&approx)?;
    if let Ok(zr) = z.parse::<GaussianRational>() {
        // Exact expansion; the streamed one cannot settle ties on the cell edge.
        let e = hcf_expand_rational(&zr);
        let value = dd(&e, &approx)?;
        let d = distance_enclosure(&ExactComplex(zr.clone()), &approx, 256);
        let rec = RationalDd {
            z: zr,
            approx: approx.clone(),
            dd: value,
            n: hcf_expand_rational(&approx).quotients.len(),
            z_quotients: e.quotients.clone(),
            distance_lo: decimal(&d.lo, 15),
            distance_hi: decimal(&d.hi, 15),
        };
        out.record(
            format!(
                "dd = {} over N = {}\nz: {}\n|z - p/q| in [{}, {}]",
                rec.dd, rec.n, rec.z_quotients, rec.distance_lo, rec.distance_hi
            ),
            &rec,
        );
        return Ok(());
    }
    let zo = oracle(&z)?;
    let r = dd_report(zo.as_ref(), &approx, max_bits)?;
    let below = match r.below_inv_q_norm_sq {
        Some(true) => "<",
        Some(false) => ">=",
        None => "?",
    };
    out.record(
        format!(
            "dd = {} over N = {}\nz:      {}\napprox: {}\n|z - p/q| in [{}, {}]\n|z - p/q| {below} 1/|q|^2 = 1/{} ~ {:.3e}",
            r.dd, r.n, r.z_prefix, r.approx_quotients, r.distance_lo, r.distance_hi, r.q_norm_sq, r.inv_q_norm_sq
        ),
        &r,
    );
    Ok(())
}

#[derive(Serialize)]
struct RegionOut {
    word: Word,
    kind: &'static str,
    region: hcf_core::geometry::RegionRecord,
    membership: Option<Membership>,
}

fn region_for(word: &Word, cylinder: bool) -> Result<Region, Failure> {
    if cylinder {
        Ok(cylinder_region(word)?)
    } else {
        Ok(prototype_set(word))
    }
}

fn cmd_prototype(out: &mut Out, word: &str, cylinder: bool, point: Option<String>) -> Res {
    let w: Word = parse(word)?;
    let r = region_for(&w, cylinder)?;
    let membership = point
        .map(|p| parse::<GaussianRational>(&p).map(|z| r.contains(&z)))
        .transpose()?;
    let mut text = r.to_string();
    if let Some(m) = &membership {
        text.push_str(&format!(
            "\nmembership: {}",
            serde_json::to_value(m).expect("serializes").as_str().unwrap_or("")
        ));
    }
    out.record(
        text,
        &RegionOut {
            word: w,
            kind: if cylinder { "cylinder" } else { "prototype" },
            region: r.record(),
            membership,
        },
    );
    Ok(())
}

#[derive(Serialize)]
struct ClassRecord {
    word: Word,
    class: hcf_core::geometry::PrototypeClass,
    prototype: String,
}

fn cmd_classify(out: &mut Out, word: &str) -> Res {
    let w: Word = parse(word)?;
    let r = prototype_set(&w);
    let class = classify(&r)?;
    out.record(
        format!("{class}: {r}"),
        &ClassRecord {
            word: w,
            class,
            prototype: r.to_string(),
        },
    );
    Ok(())
}

fn cmd_area(out: &mut Out, word: &str, cylinder: bool, method: Method, samples: u64, seed: u64) -> Res {
    let w: Word = parse(word)?;
    let r = region_for(&w, cylinder)?;
    let m = match method {
        Method::Exact if cylinder => {
            return Err(Failure::Usage(
                "exact areas cover prototype classes; use --method montecarlo".into(),
            ))
        }
        Method::Exact => AreaMethod::Exact,
        Method::Montecarlo => AreaMethod::MonteCarlo { samples, seed },
    };
    let a = region_area(&r, m)?;
    let text = match &a.closed_form {
        Some(f) => format!("{:.9} = {f} (± {:.1e})", a.value, a.error_bound),
        None => format!("{:.6} ± {:.6} (99%, {} samples)", a.value, a.error_bound, samples),
    };
    out.record(text, &a);
    Ok(())
}

#[derive(Serialize)]
struct SuffixRecord {
    word: Word,
    count: u64,
    complete: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_gamma(
    out: &mut Out,
    m: &str,
    q: Option<String>,
    limit: Option<usize>,
    suffix: Option<String>,
    budget: usize,
    measure: Option<usize>,
    samples: u64,
    seed: u64,
) -> Res {
    let m = parse_decimal(m)?;
    if let Some(n) = measure {
        let r = measure_sum_bounded_words(&m, n, samples, seed)?;
        out.record(
            format!(
                "M={} n={}: {:.5} in [{:.5}, {:.5}] (99%, {} samples, {} resampled)",
                r.m, r.n, r.estimate, r.ci_lo, r.ci_hi, r.samples, r.resampled
            ),
            &r,
        );
        return Ok(());
    }
    let q = q.ok_or_else(|| Failure::Usage("gamma needs --q or --measure".into()))?;
    let mut spec = GammaSpec::new(m, parse_decimal(&q)?);
    spec.budget = budget;
    if let Some(s) = suffix {
        let w: Word = parse(&s)?;
        let (count, complete) = gamma_suffix_count(&w, &spec)?;
        out.record(
            format!("{count} suffixes{}", if complete { "" } else { " (incomplete)" }),
            &SuffixRecord {
                word: w,
                count,
                complete,
            },
        );
        return if complete {
            Ok(())
        } else {
            Err(Failure::Other("search budget exhausted".into()))
        };
    }
    let r = enumerate_gamma(&spec, limit)?;
    for g in &r.words {
        out.record(format!("{} |q|^2={} {}", g.word, g.q_norm_sq, g.class), g);
    }
    out.text(format!(
        "{} words{}; {} nodes, {} prototype states",
        r.words.len(),
        if r.complete { "" } else { " (incomplete)" },
        r.nodes,
        r.automaton_states
    ));
    if limit.is_none() && !r.complete {
        return Err(Failure::Other("search budget exhausted; result is partial".into()));
    }
    Ok(())
}

fn cmd_annulus(out: &mut Out, rs: &[String]) -> Res {
    for r in rs {
        let rec = annulus_record(&parse_decimal(r)?)?;
        out.record(
            format!("r={} count={} r^2*count={:.6}", rec.r, rec.count, rec.scaled),
            &rec,
        );
    }
    Ok(())
}

fn cmd_search(out: &mut Out, oracle_name: &str, psi: &str, limit: &str, max_bits: u32) -> Res {
    let z = oracle(oracle_name)?;
    let psi: PsiSpec = parse(psi)?;
    let limit = parse_decimal(limit)?.floor().to_integer();
    let rows = search_approx(z.as_ref(), &psi, &limit, max_bits)?;
    out.text(format!("z = {}, psi = {psi}, |q|^2 <= {limit}", z.describe()));
    for r in &rows {
        let dd = match (r.dd, &r.note) {
            (Some(d), _) => d.to_string(),
            (None, Some(n)) => format!("- ({n})"),
            (None, None) => "-".into(),
        };
        out.record(
            format!(
                "{:<24} {:<18} |q|^2={:<10} |z-p/q| in [{}, {}] psi:{} dd={dd}",
                r.approx.to_string(),
                r.source,
                r.q_norm_sq,
                r.distance_lo,
                r.distance_hi,
                r.psi_check
            ),
            r,
        );
    }
    out.text(format!("{} approximants", rows.len()));
    Ok(())
}

fn cmd_verify(out: &mut Out, suite: &str, seed: u64) -> Res {
    let report = run_suite(suite, seed)?;
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        out.record(
            format!(
                "{tag:<4} {:<34} {} ({} ms)\n     {}",
                c.id, c.anchor, c.runtime_ms, c.detail
            ),
            c,
        );
    }
    let failed = report.checks.iter().filter(|c| c.status == Status::Fail).count();
    out.text(format!(
        "\nsuite {} (seed {}): {} checks, {failed} failed, {} ms\ncoverage:\n{}",
        report.suite,
        report.seed,
        report.checks.len(),
        report.runtime_ms,
        report.coverage_table().trim_end()
    ));
    if out.format == Format::Jsonl {
        #[derive(Serialize)]
        struct Summary<'a> {
            suite: &'a str,
            seed: u64,
            passed: bool,
            coverage: &'a [hcf_core::verify::CoverageRow],
        }
        out.lines.push(
            serde_json::to_string(&Summary {
                suite: &report.suite,
                seed: report.seed,
                passed: report.passed(),
                coverage: &report.coverage,
            })
            .expect("summary serializes"),
        );
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run(cli: Cli, out: &mut Out) -> Res {
    let (seed, bits) = (cli.seed, cli.max_bits);
    match cli.cmd {
        Cmd::Expand { input, oracle, n } => cmd_expand(out, input, oracle, n, bits),
        Cmd::Eval { word } => {
            let w: Word = parse(&word)?;
            let value = evaluate(&w)?;
            out.record(
                value.to_string(),
                &EvalRecord {
                    word: w,
                    value: value.clone(),
                },
            );
            Ok(())
        }
        Cmd::Qpair { word } => {
            let w: Word = parse(&word)?;
            let qp = qpair(&w);
            out.record(
                format!("p = {}\nq = {}\np^- = {}\nq^- = {}", qp.p, qp.q, qp.p_minus, qp.q_minus),
                &QpairRecord {
                    word: w,
                    determinant: qp.determinant(),
                    p: qp.p.clone(),
                    q: qp.q.clone(),
                    p_minus: qp.p_minus.clone(),
                    q_minus: qp.q_minus.clone(),
                },
            );
            Ok(())
        }
        Cmd::Dd {
            z,
            approx,
            instance,
            k,
            b,
        } => cmd_dd(out, z, approx, instance, k, &b, seed, bits),
        Cmd::Prototype { word, cylinder, point } => cmd_prototype(out, &word, cylinder, point),
        Cmd::Classify { word } => cmd_classify(out, &word),
        Cmd::Area {
            word,
            cylinder,
            method,
            samples,
        } => cmd_area(out, &word, cylinder, method, samples, seed),
        Cmd::Gamma {
            m,
            q,
            limit,
            suffix,
            budget,
            measure,
            samples,
        } => cmd_gamma(out, &m, q, limit, suffix, budget, measure, samples, seed),
        Cmd::Annulus { r } => cmd_annulus(out, &r),
        Cmd::Search {
            oracle,
            psi,
            q_norm_limit,
        } => cmd_search(out, &oracle, &psi, &q_norm_limit, bits),
        Cmd::Verify { suite } => cmd_verify(out, &suite, seed),
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Check | Self::Other(_) => 1,
            Self::Usage(_) => 2,
            Self::Precision(_) => 3,
        }
    }

    fn message(&self) -> Option<&str> {
        match self {
            Self::Check => None,
            Self::Other(m) | Self::Usage(m) | Self::Precision(m) => Some(m),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out {
        format: cli.format,
        lines: Vec::new(),
    };
    let result = run(cli, &mut out);
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for l in &out.lines {
        let _ = writeln!(lock, "{l}");
    }
    let _ = lock.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(m) = f.message() {
                eprintln!("error: {m}");
            }
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> (Vec<String>, Option<u8>) {
        let cli = Cli::try_parse_from(std::iter::once("hcf").chain(args.iter().copied())).unwrap();
        let mut out = Out {
            format: cli.format,
            lines: Vec::new(),
        };
        let code = run(cli, &mut out).err().map(|f| f.code());
        (out.lines, code)
    }

    fn json(line: &str) -> serde_json::Value {
        serde_json::from_str(line).unwrap_or_else(|e| panic!("{e}: {line}"))
    }

    #[test]
    fn expand_literals() {
        assert_eq!(
            exec(&["expand", "(37+6i)/(129+24i)"]).0,
            ["[3,2,3i,-2,3i] (terminated)"]
        );
        assert_eq!(exec(&["expand", "0"]).0, ["[] (terminated)"]);
    }

    #[test]
    fn expand_oracle_prefix() {
        let (lines, code) = exec(&["expand", "--oracle", "sqrt10-example", "-n", "5", "--format", "jsonl"]);
        assert_eq!(code, None);
        let v = json(&lines[0]);
        assert_eq!(v["quotients"], "[4,-2,1+3i,-2,1+3i]");
        assert_eq!(v["certified_prefix_len"], 5);
    }

    #[test]
    fn exit_codes() {
        assert!(Cli::try_parse_from(["hcf", "frobnicate"]).is_err());
        assert_eq!(exec(&["expand", "1/"]).1, Some(2));
        assert_eq!(exec(&["expand", "--oracle", "nope"]).1, Some(2));
        // The approximant equals z, so dd is undefined.
        assert_eq!(exec(&["dd", "(12-2i)/37", "(12-2i)/37"]).1, Some(2));
        assert_eq!(Failure::from(Error::Undecidable { bits: 64 }).code(), 3);
        assert_eq!(
            Failure::from(Error::InsufficientPrecision {
                needed: 5,
                available: 2
            })
            .code(),
            3
        );
        assert_eq!(
            exec(&["--max-bits", "2", "expand", "--oracle", "sqrt10-example"]).1,
            Some(2)
        );
        assert_eq!(exec(&["verify", "nosuch"]).1, Some(2));
        assert_eq!(exec(&["area", "[2]", "--cylinder"]).1, Some(2));
    }

    #[test]
    fn jsonl_records_parse() {
        for args in [
            &["qpair", "[3,2,3i]"][..],
            &["classify", "[2i,-2+i]"],
            &["prototype", "[-2i,-2]", "--point", "1/4"],
            &["area", "[1+i]"],
            &["annulus", "1/4", "1/8"],
            &["gamma", "--m", "3", "--q", "3/2"],
            &["dd", "--instance", "[3]", "--k", "2", "--b", "3i"],
            &["dd", "sqrt10-example", "(37+6i)/(129+24i)"],
        ] {
            let mut a = args.to_vec();
            a.extend(["--format", "jsonl"]);
            let (lines, code) = exec(&a);
            assert_eq!(code, None, "{args:?}");
            assert!(!lines.is_empty());
            lines.iter().for_each(|l| drop(json(l)));
        }
    }

    #[test]
    fn dd_instance_meets_expected_value() {
        let (lines, code) = exec(&[
            "dd",
            "--instance",
            "[2+2i]",
            "--k",
            "1",
            "--b",
            "-2+2i",
            "--format",
            "jsonl",
        ]);
        assert_eq!(code, None);
        let v = json(&lines[0]);
        assert_eq!(v["dd"], 5);
        assert_eq!(v["expected_dd"], 5);
    }

    #[test]
    fn gamma_small_threshold() {
        let (lines, _) = exec(&["gamma", "--m", "3", "--q", "3/2", "--format", "jsonl"]);
        let words: Vec<String> = lines
            .iter()
            .map(|l| json(l)["word"].as_str().unwrap().to_string())
            .collect();
        assert_eq!(words.len(), 18);
        assert_eq!(&words[..2], ["[-3]", "[-2-2i]"]);
        let (lines, code) = exec(&["gamma", "--m", "3", "--q", "2", "--suffix", "[1+i]"]);
        assert_eq!(code, None);
        assert_eq!(lines, ["3 suffixes"]);
    }

    #[test]
    fn seeded_commands_are_reproducible() {
        let args = [
            "--seed",
            "11",
            "area",
            "[2]",
            "--method",
            "montecarlo",
            "--samples",
            "20000",
        ];
        assert_eq!(exec(&args), exec(&args));
        let args = ["--seed", "3", "verify", "vk", "--format", "jsonl"];
        let (a, code) = exec(&args);
        assert_eq!(code, None);
        assert_eq!(a, exec(&args).0);
        assert_eq!(json(a.last().unwrap())["passed"], true);
    }

    #[test]
    fn verify_text_has_coverage_table() {
        let (lines, code) = exec(&["verify", "annulus"]);
        assert_eq!(code, None);
        let s = lines.join("\n");
        assert!(s.contains("coverage:"));
        assert!(s.contains("annulus counts grow as r halves"));
    }
}
