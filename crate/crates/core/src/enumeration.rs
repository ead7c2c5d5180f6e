//! Lattice annuli, bounded-alphabet full-word families and measure sums.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::hcf_expand_rational;
use crate::gaussian::{GaussianInt, GaussianRational, Rational};
use crate::geometry::{classify, prototype_step, PrototypeClass, Region};
use crate::word::{qpair, Word};

fn small(r: &Rational, what: &str) -> Result<(i128, i128)> {
    let lim = BigInt::from(1u64 << 40);
    if r.numer().abs() > lim || r.denom() > &lim {
        return Err(Error::Precondition(format!("{what} has too many digits")));
    }
    Ok((
        r.numer().to_i128().expect("bounded"),
        r.denom().to_i128().expect("bounded"),
    ))
}

/// `#{x : lo <= x^2 <= hi}` for integers `x`.
fn count_squares_between(lo: i128, hi: i128) -> u64 {
    if hi < 0 || lo > hi {
        return 0;
    }
    let top = hi.sqrt();
    let nonneg_upto = |t: i128| t + 1; // 0..=t
    let below = if lo <= 0 {
        0
    } else {
        // Largest x >= 0 with x^2 < lo.
        let s = (lo - 1).sqrt();
        nonneg_upto(s)
    };
    let nonneg = nonneg_upto(top) - below;
    if nonneg <= 0 {
        return 0;
    }
    let zero_counted = lo <= 0;
    (2 * nonneg - i128::from(zero_counted)) as u64
}

/// `#I(r)`, the Gaussian integers with `1/r <= |b| <= 2/r` and `Im b >= 1`.
pub fn count_lattice_annulus(r: &Rational) -> Result<u64> {
    if !r.is_positive() || r >= &Rational::one() {
        return Err(Error::Precondition("r must lie in (0, 1)".into()));
    }
    let (n, d) = small(r, "r")?;
    // d^2 <= |b|^2 n^2 <= 4 d^2.
    let (n2, d2) = (n * n, d * d);
    let ymax = (2 * d) / n;
    let mut total = 0u64;
    for y in 1..=ymax {
        let rest = y * y * n2;
        // x^2 n^2 in [d^2 - rest, 4 d^2 - rest].
        let hi = (4 * d2 - rest).div_euclid(n2);
        let lo_num = d2 - rest;
        let lo = if lo_num <= 0 { 0 } else { (lo_num + n2 - 1) / n2 };
        total += count_squares_between(lo, hi);
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnulusRecord {
    pub r: String,
    pub count: u64,
    /// `r^2 * count`, which tends to `3π/2`.
    pub scaled: f64,
}

pub fn annulus_record(r: &Rational) -> Result<AnnulusRecord> {
    let count = count_lattice_annulus(r)?;
    let rf = r.to_f64().unwrap_or(0.0);
    Ok(AnnulusRecord {
        r: r.to_string(),
        count,
        scaled: rf * rf * count as f64,
    })
}

/// `Γ_M(Q)`: bounds are compared through `|a|^2 <= M^2` and `|q|^2` against `Q^2`.
#[derive(Clone, Debug)]
pub struct GammaSpec {
    pub m: Rational,
    pub q: Rational,
    /// Maximum number of search nodes before giving up.
    pub budget: usize,
}

impl GammaSpec {
    pub fn new(m: Rational, q: Rational) -> Self {
        Self {
            m,
            q,
            budget: 20_000_000,
        }
    }

    fn check(&self) -> Result<()> {
        if &self.m * &self.m < Rational::from_integer(BigInt::from(2)) {
            return Err(Error::Precondition("M must be at least sqrt(2)".into()));
        }
        if self.q <= Rational::one() {
            return Err(Error::Precondition("Q must exceed 1".into()));
        }
        if self.m > Rational::from_integer(BigInt::from(1000))
            || self.q > Rational::from_integer(BigInt::from(1u64 << 28))
        {
            return Err(Error::Precondition("M or Q too large for desk-scale search".into()));
        }
        Ok(())
    }

    fn q_sq(&self) -> Rational {
        &self.q * &self.q
    }
}

/// The alphabet `I_M` in lexicographic `(Re, Im)` order.
pub fn bounded_alphabet(m: &Rational) -> Vec<GaussianInt> {
    let m2 = m * m;
    let k = m.floor().to_integer().to_i64().unwrap_or(0);
    let mut out = Vec::new();
    for x in -k..=k {
        for y in -k..=k {
            let n = x * x + y * y;
            if n >= 2 && Rational::from_integer(BigInt::from(n)) <= m2 {
                out.push(GaussianInt::new(x, y));
            }
        }
    }
    out
}

/// Interned prototype regions with memoized transitions and classes.
///
/// Fullness of an extension depends on the word only through its prototype
/// set, so the search walks a small automaton.
pub struct PrototypeAutomaton {
    alphabet: Vec<GaussianInt>,
    regions: Vec<Region>,
    classes: Vec<PrototypeClass>,
    ids: HashMap<Region, usize>,
    next: HashMap<(usize, usize), usize>,
}

impl PrototypeAutomaton {
    pub fn new(alphabet: Vec<GaussianInt>) -> Self {
        let mut a = Self {
            alphabet,
            regions: Vec::new(),
            classes: Vec::new(),
            ids: HashMap::new(),
            next: HashMap::new(),
        };
        a.intern(Region::unit_cell()).expect("D classifies");
        a
    }

    pub const ROOT: usize = 0;

    fn intern(&mut self, r: Region) -> Result<usize> {
        if let Some(&id) = self.ids.get(&r) {
            return Ok(id);
        }
        let class = classify(&r)?;
        let id = self.regions.len();
        self.regions.push(r.clone());
        self.classes.push(class);
        self.ids.insert(r, id);
        Ok(id)
    }

    pub fn alphabet(&self) -> &[GaussianInt] {
        &self.alphabet
    }

    pub fn class(&self, id: usize) -> PrototypeClass {
        self.classes[id]
    }

    pub fn region(&self, id: usize) -> &Region {
        &self.regions[id]
    }

    pub fn states(&self) -> usize {
        self.regions.len()
    }

    pub fn step(&mut self, id: usize, letter: usize) -> Result<usize> {
        if let Some(&n) = self.next.get(&(id, letter)) {
            return Ok(n);
        }
        let r = prototype_step(&self.regions[id], &self.alphabet[letter]);
        let n = self.intern(r)?;
        self.next.insert((id, letter), n);
        Ok(n)
    }

    /// State of an arbitrary word, or `None` if it uses a letter outside the alphabet.
    pub fn state_of(&mut self, w: &Word) -> Result<Option<usize>> {
        let mut id = Self::ROOT;
        for a in w.items() {
            let Some(k) = self.alphabet.iter().position(|x| x == a) else {
                return Ok(None);
            };
            id = self.step(id, k)?;
        }
        Ok(Some(id))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaWord {
    pub word: Word,
    pub q_norm_sq: u128,
    pub class: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaResult {
    pub words: Vec<GammaWord>,
    /// False when the node budget ran out.
    pub complete: bool,
    pub nodes: usize,
    /// Distinct prototype states reached by the search.
    pub automaton_states: usize,
}

type Gi = (i64, i64);

fn gmul(a: Gi, b: Gi) -> Gi {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn gnorm(a: Gi) -> u128 {
    (a.0 as i128 * a.0 as i128 + a.1 as i128 * a.1 as i128) as u128
}

fn to_gi(g: &GaussianInt) -> Result<Gi> {
    match (g.re.to_i64(), g.im.to_i64()) {
        (Some(x), Some(y)) if x.abs() < 1 << 40 && y.abs() < 1 << 40 => Ok((x, y)),
        _ => Err(Error::Precondition("denominator too large for the search".into())),
    }
}

struct Node {
    parent: usize,
    letter: usize,
    q: Gi,
    qm: Gi,
    state: usize,
}

fn norm_ge(n: u128, bound: &Rational) -> bool {
    Rational::from_integer(BigInt::from(n)) >= *bound
}

fn rebuild(nodes: &[Node], mut k: usize, alphabet: &[GaussianInt], prefix: &Word) -> Word {
    let mut rev = Vec::new();
    while k != 0 {
        rev.push(alphabet[nodes[k].letter].clone());
        k = nodes[k].parent;
    }
    rev.reverse();
    prefix.concat(&Word::new(rev).expect("alphabet letters are valid"))
}

/// Breadth-first search for the nonempty `b` with `w b` in `Γ_M(Q)`.
type AutomatonCache = Mutex<HashMap<Vec<GaussianInt>, PrototypeAutomaton>>;

/// Automata survive between searches over the same alphabet.
fn automata() -> &'static AutomatonCache {
    static CACHE: OnceLock<AutomatonCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn gamma_search(spec: &GammaSpec, root: &Word) -> Result<GammaResult> {
    spec.check()?;
    let alphabet = bounded_alphabet(&spec.m);
    let cached = automata().lock().unwrap_or_else(|e| e.into_inner()).remove(&alphabet);
    let mut auto = cached.unwrap_or_else(|| PrototypeAutomaton::new(alphabet.clone()));
    let r = gamma_search_with(spec, root, &mut auto);
    automata()
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert(alphabet, auto);
    r
}

fn gamma_search_with(spec: &GammaSpec, root: &Word, auto: &mut PrototypeAutomaton) -> Result<GammaResult> {
    let q2 = spec.q_sq();
    let empty = GammaResult {
        words: Vec::new(),
        complete: true,
        nodes: 0,
        automaton_states: 0,
    };
    let Some(state) = auto.state_of(root)? else {
        return Ok(empty);
    };
    let qp = qpair(root);
    let (q, qm) = (to_gi(&qp.q)?, to_gi(&qp.q_minus)?);
    if norm_ge(gnorm(q), &q2) || !auto.class(state).is_regular() {
        return Ok(empty);
    }
    let letters: Vec<Gi> = auto.alphabet().iter().map(to_gi).collect::<Result<_>>()?;
    let mut nodes = vec![Node {
        parent: 0,
        letter: 0,
        q,
        qm,
        state,
    }];
    let mut frontier = VecDeque::from([0usize]);
    let mut found = Vec::new();
    let mut complete = true;
    while let Some(k) = frontier.pop_front() {
        for (li, a) in letters.iter().enumerate() {
            if nodes.len() >= spec.budget {
                complete = false;
                break;
            }
            let parent = &nodes[k];
            let aq = gmul(*a, parent.q);
            let nq = (aq.0 + parent.qm.0, aq.1 + parent.qm.1);
            let nqm = parent.q;
            let st = auto.step(parent.state, li)?;
            let class = auto.class(st);
            if !class.is_regular() {
                continue;
            }
            let n = gnorm(nq);
            nodes.push(Node {
                parent: k,
                letter: li,
                q: nq,
                qm: nqm,
                state: st,
            });
            let id = nodes.len() - 1;
            if norm_ge(n, &q2) {
                if class.is_full() {
                    found.push((id, n));
                }
            } else {
                frontier.push_back(id);
            }
        }
        if !complete {
            break;
        }
    }
    let alphabet = auto.alphabet().to_vec();
    let words = found
        .into_iter()
        .map(|(id, n)| GammaWord {
            word: rebuild(&nodes, id, &alphabet, root).suffix_from(root.len()),
            q_norm_sq: n,
            class: PrototypeClass::Full.to_string(),
        })
        .collect();
    let reached: BTreeSet<usize> = nodes.iter().map(|n| n.state).collect();
    Ok(GammaResult {
        words,
        complete,
        nodes: nodes.len(),
        automaton_states: reached.len(),
    })
}

/// `Γ_M(Q)` in breadth-first, then lexicographic order.
pub fn enumerate_gamma(spec: &GammaSpec, limit: Option<usize>) -> Result<GammaResult> {
    let mut r = gamma_search(spec, &Word::empty())?;
    if let Some(l) = limit {
        if r.words.len() > l {
            r.words.truncate(l);
            r.complete = false;
        }
    }
    Ok(r)
}

/// `#{b nonempty : w b in Γ_M(Q)}`.
pub fn gamma_suffix_count(w: &Word, spec: &GammaSpec) -> Result<(u64, bool)> {
    let r = gamma_search(spec, w)?;
    Ok((r.words.len() as u64, r.complete))
}

/// Independent depth-first recount of `Γ_M(Q)` with its own memo.
pub fn enumerate_gamma_dfs(spec: &GammaSpec) -> Result<Vec<Word>> {
    spec.check()?;
    struct Walk {
        alphabet: Vec<GaussianInt>,
        q2: Rational,
        ids: HashMap<Region, usize>,
        states: Vec<(Region, PrototypeClass)>,
        next: HashMap<(usize, usize), usize>,
        stack: Vec<GaussianInt>,
        out: Vec<Word>,
    }
    impl Walk {
        fn step(&mut self, id: usize, k: usize) -> Result<usize> {
            if let Some(&n) = self.next.get(&(id, k)) {
                return Ok(n);
            }
            let r = prototype_step(&self.states[id].0, &self.alphabet[k]);
            let n = match self.ids.get(&r) {
                Some(&n) => n,
                None => {
                    let c = classify(&r)?;
                    self.states.push((r.clone(), c));
                    self.ids.insert(r, self.states.len() - 1);
                    self.states.len() - 1
                }
            };
            self.next.insert((id, k), n);
            Ok(n)
        }

        fn go(&mut self, id: usize, q: &GaussianInt, qm: &GaussianInt) -> Result<()> {
            for k in 0..self.alphabet.len() {
                let n = self.step(id, k)?;
                let class = self.states[n].1;
                if !class.is_regular() {
                    continue;
                }
                let a = self.alphabet[k].clone();
                let nq = &(&a * q) + qm;
                self.stack.push(a);
                if Rational::from_integer(nq.norm()) >= self.q2 {
                    if class.is_full() {
                        self.out.push(Word::new(self.stack.clone())?);
                    }
                } else {
                    self.go(n, &nq, q)?;
                }
                self.stack.pop();
            }
            Ok(())
        }
    }
    let root = Region::unit_cell();
    let mut walk = Walk {
        alphabet: bounded_alphabet(&spec.m),
        q2: spec.q_sq(),
        ids: HashMap::from([(root.clone(), 0)]),
        states: vec![(root, PrototypeClass::Full)],
        next: HashMap::new(),
        stack: Vec::new(),
        out: Vec::new(),
    };
    walk.go(0, &GaussianInt::one(), &GaussianInt::zero())?;
    Ok(walk.out)
}

/// `ln` of the suffix-family bound `(M+1)^(24M) |q(w)|^(-4+2/M) #Γ`.
pub fn suffix_bound_ln(m: f64, q_w_norm_sq: f64, gamma_count: u64) -> f64 {
    24.0 * m * (m + 1.0).ln() + (-4.0 + 2.0 / m) * 0.5 * q_w_norm_sq.ln() + (gamma_count as f64).ln()
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureRecord {
    #[serde(rename = "M")]
    pub m: String,
    pub n: usize,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub samples: u64,
    /// Sample points whose expansion stopped before `n` quotients.
    pub resampled: u64,
}

const GRID_BITS: u32 = 32;

/// First `n` quotients of `(x + iy)/2^32` by integer arithmetic, or
/// `None` if the expansion stops early or the arithmetic would overflow.
fn grid_quotients(x: i64, y: i64, n: usize) -> Option<Vec<(i64, i64)>> {
    // z = p/r with Gaussian integers p, r; then 1/z = r conj(p)/|p|^2.
    let (mut p, mut r) = ((x as i128, y as i128), (1i128 << GRID_BITS, 0i128));
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let s = p.0.checked_mul(p.0)?.checked_add(p.1.checked_mul(p.1)?)?;
        if s == 0 {
            return None;
        }
        let wr = r.0.checked_mul(p.0)?.checked_add(r.1.checked_mul(p.1)?)?;
        let wi = r.1.checked_mul(p.0)?.checked_sub(r.0.checked_mul(p.1)?)?;
        // round_half_up(t) = floor((2t + 1)/2).
        let s2 = s.checked_mul(2)?;
        let re = wr.checked_mul(2)?.checked_add(s)?.div_euclid(s2);
        let im = wi.checked_mul(2)?.checked_add(s)?.div_euclid(s2);
        out.push((i64::try_from(re).ok()?, i64::try_from(im).ok()?));
        let ap = (re * p.0 - im * p.1, re * p.1 + im * p.0);
        (p, r) = ((r.0 - ap.0, r.1 - ap.1), p);
    }
    Some(out)
}

/// Fraction of `D` whose first `n` quotients all satisfy `|a| <= M`.
pub fn measure_sum_bounded_words(m: &Rational, n: usize, samples: u64, seed: u64) -> Result<MeasureRecord> {
    if !(1..=3).contains(&n) {
        return Err(Error::Precondition("n must be 1, 2 or 3".into()));
    }
    if samples == 0 {
        return Err(Error::Precondition("samples must be positive".into()));
    }
    let m2 = m * m;
    let ok = |a: (i64, i64)| Rational::from_integer(BigInt::from(a.0 * a.0 + a.1 * a.1)) <= m2;
    let ok_g = |a: &GaussianInt| Rational::from_integer(a.norm()) <= m2;
    let half = 1i64 << (GRID_BITS - 1);
    const CHUNK: u64 = 1 << 14;
    let (hits, resampled): (u64, u64) = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let want = CHUNK.min(samples - k * CHUNK);
            let (mut hits, mut redo, mut got) = (0u64, 0u64, 0u64);
            while got < want {
                let x = rng.gen_range(-half..half);
                let y = rng.gen_range(-half..half);
                let inside = if let Some(qs) = grid_quotients(x, y, n) {
                    qs.into_iter().all(ok)
                } else if x == 0 && y == 0 {
                    redo += 1;
                    continue;
                } else {
                    let scale = Rational::from_integer(BigInt::one() << GRID_BITS);
                    let z = GaussianRational::from_parts(
                        &(Rational::from_integer(BigInt::from(x)) / &scale),
                        &(Rational::from_integer(BigInt::from(y)) / &scale),
                    );
                    let e = hcf_expand_rational(&z);
                    if e.quotients.len() < n {
                        redo += 1;
                        continue;
                    }
                    e.quotients.items()[..n].iter().all(ok_g)
                };
                got += 1;
                hits += u64::from(inside);
            }
            (hits, redo)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let p = hits as f64 / samples as f64;
    let eps = ((200.0f64).ln() / (2.0 * samples as f64)).sqrt();
    Ok(MeasureRecord {
        m: m.to_string(),
        n,
        estimate: p,
        ci_lo: (p - eps).max(0.0),
        ci_hi: (p + eps).min(1.0),
        samples,
        resampled,
    })
}

/// `1 - λ{z in D : |[1/z]| > 3}` by direct integration of `|w|^-4` over
/// the cells `b + D` with `|b| > 3`; an independent reference for the
/// level-one measure at `M = 3`.
pub fn level_one_measure_m3() -> f64 {
    // Inner integral of (x^2 + y^2)^-2 in y, for x > 0.
    let h = |x: f64, y: f64| y / (2.0 * x * x * (x * x + y * y)) + (y / x).atan() / (2.0 * x * x * x);
    let cell = |cx: f64, cy: f64| {
        // Orient so the outer variable stays away from 0.
        let (cx, cy) = if cx.abs() >= cy.abs() {
            (cx.abs(), cy)
        } else {
            (cy.abs(), cx)
        };
        let (x0, x1) = (cx - 0.5, cx + 0.5);
        let steps = 2000;
        let dx = (x1 - x0) / steps as f64;
        let f = |x: f64| h(x, cy + 0.5) - h(x, cy - 0.5);
        let mut s = f(x0) + f(x1);
        for i in 1..steps {
            s += f(x0 + i as f64 * dx) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * dx / 3.0
    };
    // Outside the square [-7/2, 7/2]^2 the integral is (1 + π/2)/a^2.
    let a = 3.5f64;
    let mut excluded = (1.0 + std::f64::consts::FRAC_PI_2) / (a * a);
    for x in -3i64..=3 {
        for y in -3i64..=3 {
            if x * x + y * y > 9 {
                excluded += cell(x as f64, y as f64);
            }
        }
    }
    1.0 - excluded
}
