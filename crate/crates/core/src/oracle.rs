//! Numbers known only through enclosures of requested precision.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gaussian::{rat, round_half_up, GaussianInt, GaussianRational, Rational};
use crate::interval::{ComplexBox, Interval};
use crate::word::Mat2;

pub const DEFAULT_MAX_BITS: u32 = 4096;
pub const START_BITS: u32 = 64;

/// A complex number given by a deterministic enclosure oracle.
///
/// `enclosure(p)` must contain the number and have width at most `2^-p`.
pub trait RefinableComplex: Send + Sync {
    fn enclosure(&self, bits: u32) -> ComplexBox;
    fn describe(&self) -> String;

    /// Exact `[m(z)]` under the half-open convention, for oracles that know
    /// their value algebraically. Enclosures alone never decide a point on a
    /// cell edge.
    fn exact_round_mobius(&self, _m: &Mat2) -> Option<Result<GaussianInt>> {
        None
    }
}

/// A real number given by a deterministic enclosure oracle.
pub trait RefinableReal: Send + Sync {
    fn enclosure(&self, bits: u32) -> Interval;
    fn describe(&self) -> String;
}

/// Precisions tried in order: `64, 128, ...` capped at and ending with `max_bits`.
pub fn precision_schedule(max_bits: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut b = START_BITS.min(max_bits);
    while b < max_bits {
        out.push(b);
        b = b.saturating_mul(2);
    }
    out.push(max_bits);
    out
}

#[derive(Clone, Debug)]
pub struct ExactComplex(pub GaussianRational);

impl RefinableComplex for ExactComplex {
    fn enclosure(&self, _bits: u32) -> ComplexBox {
        ComplexBox::point(&self.0)
    }

    fn describe(&self) -> String {
        self.0.to_string()
    }
}

/// `(a + b*sqrt(n)) / (c + d*sqrt(n))` with Gaussian rational coefficients.
#[derive(Clone, Debug)]
pub struct QuadraticComplex {
    pub a: GaussianRational,
    pub b: GaussianRational,
    pub c: GaussianRational,
    pub d: GaussianRational,
    pub n: BigInt,
    pub label: String,
}

impl QuadraticComplex {
    fn eval(&self, guard: u32) -> Result<ComplexBox> {
        let s = Interval::point(Rational::from_integer(self.n.clone())).sqrt(guard)?;
        let s = ComplexBox::new(s, Interval::point(Rational::zero()));
        let num = s.mul_exact(&self.b).add_exact(&self.a);
        let den = s.mul_exact(&self.d).add_exact(&self.c);
        num.div(&den)
    }
}

impl RefinableComplex for QuadraticComplex {
    fn enclosure(&self, bits: u32) -> ComplexBox {
        let target = Rational::new(BigInt::one(), BigInt::one() << bits);
        let mut guard = bits + 32;
        loop {
            if let Ok(b) = self.eval(guard) {
                let b = b.round_out(bits + 2);
                if b.width() <= target {
                    return b;
                }
            }
            guard *= 2;
        }
    }

    fn describe(&self) -> String {
        self.label.clone()
    }

    fn exact_round_mobius(&self, m: &Mat2) -> Option<Result<GaussianInt>> {
        Some(self.round_mobius(m))
    }
}

impl QuadraticComplex {
    /// `m(z) = x + y*sqrt(n)` with `x, y` in `Q(i)`.
    fn mobius_exact(&self, m: &Mat2) -> Result<(GaussianRational, GaussianRational)> {
        let g = |x: &GaussianInt| GaussianRational::from(x.clone());
        let (ma, mb, mc, md) = (g(&m.a), g(&m.b), g(&m.c), g(&m.d));
        let (na, nb) = (&(&ma * &self.a) + &(&mb * &self.c), &(&ma * &self.b) + &(&mb * &self.d));
        let (da, db) = (&(&mc * &self.a) + &(&md * &self.c), &(&mc * &self.b) + &(&md * &self.d));
        let n = GaussianRational::from(GaussianInt::new(self.n.clone(), 0));
        // (na + nb s)(da - db s) / (da^2 - db^2 n); the norm vanishes only when da = db = 0.
        let norm = &(&da * &da) - &(&(&db * &db) * &n);
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let x = &(&na * &da) - &(&(&nb * &db) * &n);
        let y = &(&nb * &da) - &(&na * &db);
        Ok((x.checked_div(&norm)?, y.checked_div(&norm)?))
    }

    fn round_mobius(&self, m: &Mat2) -> Result<GaussianInt> {
        let (x, y) = self.mobius_exact(m)?;
        let (xr, xi) = x.parts();
        let (yr, yi) = y.parts();
        Ok(GaussianInt::new(
            round_surd(&xr, &yr, &self.n),
            round_surd(&xi, &yi, &self.n),
        ))
    }
}

/// Sign of `u + v*sqrt(n)` for rationals `u, v` and `n > 0`.
pub fn sign_surd(u: &Rational, v: &Rational, n: &BigInt) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let su = u.cmp(&Rational::zero());
    let sv = v.cmp(&Rational::zero());
    if sv == Equal || su == sv {
        return if su == Equal { sv } else { su };
    }
    if su == Equal {
        return sv;
    }
    // Opposite signs: compare u^2 with v^2 n.
    let lhs = u * u;
    let rhs = v * v * Rational::from_integer(n.clone());
    match lhs.cmp(&rhs) {
        Equal => Equal,
        Greater => su,
        Less => sv,
    }
}

/// `floor(u + v*sqrt(n) + 1/2)`, exactly.
pub fn round_surd(u: &Rational, v: &Rational, n: &BigInt) -> BigInt {
    let t = u + rat(1, 2);
    let approx = Interval::point(Rational::from_integer(n.clone()))
        .sqrt(64)
        .expect("n > 0")
        .scale(v)
        .add(&Interval::point(t.clone()));
    let mut k = approx.lo.floor().to_integer();
    let ge = |k: &BigInt| sign_surd(&(&t - Rational::from_integer(k.clone())), v, n) != std::cmp::Ordering::Less;
    while ge(&(&k + 1)) {
        k += 1;
    }
    while !ge(&k) {
        k -= 1;
    }
    k
}

/// The flagship irrational example `2i / (3 - sqrt(10) + 7i)`.
pub fn sqrt10_example() -> QuadraticComplex {
    let g = |re: i64, im: i64| GaussianRational::from(GaussianInt::new(re, im));
    QuadraticComplex {
        a: g(0, 2),
        b: g(0, 0),
        c: g(3, 7),
        d: g(-1, 0),
        n: BigInt::from(10),
        label: "2i/(3-sqrt(10)+7i)".into(),
    }
}

/// Built-in oracle by name.
pub fn named_oracle(name: &str) -> Option<Box<dyn RefinableComplex>> {
    match name {
        "sqrt10-example" => Some(Box::new(sqrt10_example())),
        _ => None,
    }
}

pub fn named_oracle_names() -> &'static [&'static str] {
    &["sqrt10-example"]
}

#[derive(Clone, Debug)]
pub struct ExactReal(pub Rational);

impl RefinableReal for ExactReal {
    fn enclosure(&self, _bits: u32) -> Interval {
        Interval::point(self.0.clone())
    }

    fn describe(&self) -> String {
        self.0.to_string()
    }
}

/// `a + b*sqrt(n)` with rational `a, b` and a non-square `n > 0`.
#[derive(Clone, Debug)]
pub struct QuadraticReal {
    pub a: Rational,
    pub b: Rational,
    pub n: BigInt,
}

impl QuadraticReal {
    pub fn sqrt2_minus_1() -> Self {
        Self {
            a: rat(-1, 1),
            b: rat(1, 1),
            n: BigInt::from(2),
        }
    }
}

impl RefinableReal for QuadraticReal {
    fn enclosure(&self, bits: u32) -> Interval {
        let target = Rational::new(BigInt::one(), BigInt::one() << bits);
        let mut guard = bits + 8;
        loop {
            let s = Interval::point(Rational::from_integer(self.n.clone()))
                .sqrt(guard)
                .expect("n > 0");
            let v = s
                .scale(&self.b)
                .add(&Interval::point(self.a.clone()))
                .round_out(bits + 2);
            if v.width() <= target {
                return v;
            }
            guard += 16 + self.b.abs().numer().bits() as u32;
        }
    }

    fn describe(&self) -> String {
        format!("{} + {}*sqrt({})", self.a, self.b, self.n)
    }
}

/// The cell of a box if it lies strictly inside one translate `g + D°`.
pub fn certified_cell(b: &ComplexBox) -> Option<GaussianInt> {
    let coord = |i: &Interval| {
        let g = round_half_up(&i.lo);
        let half = rat(1, 2);
        let inside = round_half_up(&i.hi) == g && &i.lo - Rational::from_integer(g.clone()) != -half;
        inside.then_some(g)
    };
    Some(GaussianInt::new(coord(&b.re)?, coord(&b.im)?))
}

/// Certified rounding of a number given by a fallible enclosure function.
pub fn nearest_certified_by<F>(mut f: F, max_bits: u32) -> Result<GaussianInt>
where
    F: FnMut(u32) -> Result<ComplexBox>,
{
    if max_bits < 4 {
        return Err(Error::Precondition("max_bits must be at least 4".into()));
    }
    let mut last = max_bits;
    for bits in precision_schedule(max_bits) {
        last = bits;
        match f(bits) {
            Ok(b) => {
                if let Some(g) = certified_cell(&b) {
                    return Ok(g);
                }
            }
            Err(Error::BoxContainsZero) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Undecidable { bits: last })
}

/// Certified `[m(z)]`: exact when the oracle supports it, else by enclosures.
pub fn nearest_of_mobius(z: &dyn RefinableComplex, m: &Mat2, max_bits: u32) -> Result<GaussianInt> {
    if max_bits < 4 {
        return Err(Error::Precondition("max_bits must be at least 4".into()));
    }
    match z.exact_round_mobius(m) {
        Some(r) => r,
        None => nearest_certified_by(|b| m.apply_box(&z.enclosure(b)), max_bits),
    }
}

pub fn nearest_gaussian_integer_certified(z: &dyn RefinableComplex, max_bits: u32) -> Result<GaussianInt> {
    nearest_of_mobius(z, &Mat2::identity(), max_bits)
}

/// Certified `floor` of a real oracle.
pub fn floor_certified_by<F>(mut f: F, max_bits: u32) -> Result<BigInt>
where
    F: FnMut(u32) -> Result<Interval>,
{
    let mut last = max_bits;
    for bits in precision_schedule(max_bits) {
        last = bits;
        match f(bits) {
            Ok(i) => {
                let lo = i.lo.floor().to_integer();
                if lo == i.hi.floor().to_integer() {
                    return Ok(lo);
                }
            }
            Err(Error::BoxContainsZero) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Undecidable { bits: last })
}

/// Certified sign of a real quantity that is known to be nonzero.
pub fn sign_certified_by<F>(mut f: F, max_bits: u32) -> Result<std::cmp::Ordering>
where
    F: FnMut(u32) -> Result<Interval>,
{
    use std::cmp::Ordering;
    let mut last = max_bits;
    for bits in precision_schedule(max_bits) {
        last = bits;
        let i = f(bits)?;
        if i.lo.is_positive() {
            return Ok(Ordering::Greater);
        }
        if i.hi.is_negative() {
            return Ok(Ordering::Less);
        }
        if i.is_point() && i.lo.is_zero() {
            return Ok(Ordering::Equal);
        }
    }
    Err(Error::Undecidable { bits: last })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(s: &str) -> ExactComplex {
        ExactComplex(s.parse().unwrap())
    }

    #[test]
    fn schedule_doubles_and_caps() {
        assert_eq!(precision_schedule(4096), vec![64, 128, 256, 512, 1024, 2048, 4096]);
        assert_eq!(precision_schedule(100), vec![64, 100]);
        assert_eq!(precision_schedule(8), vec![8]);
    }

    #[test]
    fn certified_examples() {
        assert_eq!(
            nearest_gaussian_integer_certified(&exact("0.25+0.25i"), 64).unwrap(),
            GaussianInt::zero()
        );
        assert!(matches!(
            nearest_gaussian_integer_certified(&exact("1/2"), 4096),
            Err(Error::Undecidable { .. })
        ));
        assert!(nearest_gaussian_integer_certified(&exact("0"), 2).is_err());
    }

    #[test]
    fn sqrt10_example_rounds_to_zero() {
        // z = 2i/(3 - sqrt 10 + 7i) ~ 0.2856 - 0.0066i sits well inside D.
        let z = sqrt10_example();
        let b = z.enclosure(64);
        assert!(b.width() <= Rational::new(BigInt::one(), BigInt::one() << 64));
        assert!(b.re.to_f64_mid() > 0.2855 && b.re.to_f64_mid() < 0.2856);
        assert!(b.im.to_f64_mid() > -0.0067 && b.im.to_f64_mid() < -0.0066);
        assert_eq!(nearest_gaussian_integer_certified(&z, 64).unwrap(), GaussianInt::zero());
    }

    #[test]
    fn surd_rounding() {
        let n = BigInt::from(10);
        // 7/2 + 0*sqrt(10) rounds up; -1/2 + tiny rounds to 0.
        assert_eq!(round_surd(&rat(7, 2), &rat(0, 1), &n), BigInt::from(4));
        assert_eq!(round_surd(&rat(-3, 2), &rat(1, 2), &n), BigInt::from(0));
        assert_eq!(round_surd(&rat(-1, 1), &rat(-3, 10), &n), BigInt::from(-2));
        // 3 - sqrt(9/4 * 4) is exactly 0 when n is a square multiple.
        assert_eq!(
            sign_surd(&rat(3, 1), &rat(-3, 2), &BigInt::from(4)),
            std::cmp::Ordering::Equal
        );
    }

    #[test]
    fn exact_fallback_resolves_edges() {
        // 1/z = 7/2 + i(sqrt(10) - 3)/2 sits on the edge Re = 7/2.
        let z = sqrt10_example();
        assert_eq!(
            nearest_of_mobius(&z, &Mat2::swap(), 4096).unwrap(),
            GaussianInt::new(4, 0)
        );
        assert!(matches!(
            nearest_certified_by(|b| Mat2::swap().apply_box(&z.enclosure(b)), 256),
            Err(Error::Undecidable { .. })
        ));
    }

    #[test]
    fn enclosures_nest() {
        let z = sqrt10_example();
        let coarse = z.enclosure(64);
        let fine = z.enclosure(256);
        assert!(coarse.re.lo <= fine.re.lo && fine.re.hi <= coarse.re.hi);
        assert!(coarse.im.lo <= fine.im.lo && fine.im.hi <= coarse.im.hi);
        let r = QuadraticReal::sqrt2_minus_1();
        let (a, b) = (r.enclosure(30), r.enclosure(300));
        assert!(a.lo <= b.lo && b.hi <= a.hi);
        assert!(b.width() <= Rational::new(BigInt::one(), BigInt::one() << 300));
    }
}
