//! Exact arithmetic in `Z[i]` and `Q(i)`.
//!
//! Rounding to the nearest Gaussian integer uses the half-open cell
//! `[-1/2, 1/2)^2`, so half-integer coordinates round up.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `floor(x + 1/2)`: the integer `g` with `x - g` in `[-1/2, 1/2)`.
pub fn round_half_up(x: &Rational) -> BigInt {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    (x + half).floor().to_integer()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn i() -> Self {
        Self::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    /// The unit multiple of `self` lying in `{re > 0, im >= 0}`; zero maps to zero.
    pub fn normalize_unit(&self) -> Self {
        self.normalizing_unit().map_or_else(Self::zero, |u| self * &u)
    }

    /// The unit `u` such that `self * u` is normalized, or `None` for zero.
    pub fn normalizing_unit(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut unit = Self::one();
        let mut g = self.clone();
        for _ in 0..4 {
            if g.re.is_positive() && !g.im.is_negative() {
                return Some(unit);
            }
            g = g.mul_i();
            unit = unit.mul_i();
        }
        unreachable!("one rotation of a nonzero Gaussian integer lies in the first quadrant")
    }

    /// Euclidean division with the quotient rounded to the nearest Gaussian integer.
    pub fn div_rem(&self, other: &Self) -> Result<(Self, Self)> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = other.norm();
        let t = self * &other.conj();
        let q = GaussianInt::new(
            round_half_up(&Rational::new(t.re, n.clone())),
            round_half_up(&Rational::new(t.im, n)),
        );
        let r = self - &(&q * other);
        Ok((q, r))
    }

    /// Exact quotient, or `None` when `other` does not divide `self`.
    pub fn checked_div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let n = other.norm();
        let t = self * &other.conj();
        if t.re.is_multiple_of(&n) && t.im.is_multiple_of(&n) {
            Some(Self::new(&t.re / &n, &t.im / &n))
        } else {
            None
        }
    }

    pub fn to_rational(&self) -> GaussianRational {
        GaussianRational::from(self.clone())
    }

    pub fn to_c64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl From<i64> for GaussianInt {
    fn from(v: i64) -> Self {
        Self::new(v, 0)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $t:ty) => {
        impl $trait<$t> for $t {
            type Output = $t;
            fn $method(self, rhs: $t) -> $t {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&$t> for $t {
            type Output = $t;
            fn $method(self, rhs: &$t) -> $t {
                (&self).$method(rhs)
            }
        }
        impl $trait<$t> for &$t {
            type Output = $t;
            fn $method(self, rhs: $t) -> $t {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&GaussianInt> for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub<&GaussianInt> for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul<&GaussianInt> for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

forward_binop!(Add, add, GaussianInt);
forward_binop!(Sub, sub, GaussianInt);
forward_binop!(Mul, mul, GaussianInt);

impl Neg for GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        -(self.clone())
    }
}

fn fmt_complex(f: &mut fmt::Formatter<'_>, re: &impl fmt::Display, re_zero: bool, im: &Rational) -> fmt::Result {
    let im_zero = im.is_zero();
    if im_zero {
        return write!(f, "{re}");
    }
    if !re_zero {
        write!(f, "{re}")?;
        if im.is_positive() {
            write!(f, "+")?;
        }
    }
    if im.is_one() {
        write!(f, "i")
    } else if (-im).is_one() {
        write!(f, "-i")
    } else if im.is_integer() {
        write!(f, "{}i", im.numer())
    } else {
        write!(f, "{}/{}i", im.numer(), im.denom())
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(f, &self.re, self.re.is_zero(), &rat_int(self.im.clone()))
    }
}

impl FromStr for GaussianInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let z: GaussianRational = s.parse()?;
        if z.den == GaussianInt::one() {
            Ok(z.num)
        } else {
            Err(Error::Parse(format!("'{s}' is not a Gaussian integer")))
        }
    }
}

/// `num / den` in lowest terms with `den` normalized to `{re > 0, im >= 0}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    num: GaussianInt,
    den: GaussianInt,
}

impl GaussianRational {
    pub fn new(num: GaussianInt, den: GaussianInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonicalize(num, den))
    }

    fn canonicalize(num: GaussianInt, den: GaussianInt) -> Self {
        if num.is_zero() {
            return Self {
                num,
                den: GaussianInt::one(),
            };
        }
        let g = gaussian_gcd(&num, &den).expect("den is nonzero");
        let mut num = num.checked_div_exact(&g).expect("gcd divides");
        let mut den = den.checked_div_exact(&g).expect("gcd divides");
        let u = den.normalizing_unit().expect("den is nonzero");
        num = &num * &u;
        den = &den * &u;
        Self { num, den }
    }

    /// `re + i im` for rational coordinates.
    pub fn from_parts(re: &Rational, im: &Rational) -> Self {
        let l = re.denom().lcm(im.denom());
        let num = GaussianInt::new(re.numer() * (&l / re.denom()), im.numer() * (&l / im.denom()));
        Self::canonicalize(num, GaussianInt::new(l, 0))
    }

    pub fn zero() -> Self {
        Self::from(GaussianInt::zero())
    }

    pub fn one() -> Self {
        Self::from(GaussianInt::one())
    }

    pub fn num(&self) -> &GaussianInt {
        &self.num
    }

    pub fn den(&self) -> &GaussianInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_unit()
    }

    /// Real and imaginary parts as rationals.
    pub fn parts(&self) -> (Rational, Rational) {
        let n = self.den.norm();
        let t = &self.num * &self.den.conj();
        (Rational::new(t.re, n.clone()), Rational::new(t.im, n))
    }

    pub fn re(&self) -> Rational {
        self.parts().0
    }

    pub fn im(&self) -> Rational {
        self.parts().1
    }

    pub fn norm(&self) -> Rational {
        Rational::new(self.num.norm(), self.den.norm())
    }

    pub fn conj(&self) -> Self {
        Self::canonicalize(self.num.conj(), self.den.conj())
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Self::new(&self.num * &other.den, &self.den * &other.num)
    }

    /// Exact comparison of `|self|^2` against a rational.
    pub fn norm_cmp(&self, bound: &Rational) -> std::cmp::Ordering {
        self.norm().cmp(bound)
    }

    pub fn to_c64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let (re, im) = self.parts();
        (re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN))
    }

    pub fn record(&self) -> RationalRecord {
        let (re, im) = self.parts();
        RationalRecord {
            re_num: re.numer().to_string(),
            re_den: re.denom().to_string(),
            im_num: im.numer().to_string(),
            im_den: im.denom().to_string(),
        }
    }
}

impl From<GaussianInt> for GaussianRational {
    fn from(g: GaussianInt) -> Self {
        Self {
            num: g,
            den: GaussianInt::one(),
        }
    }
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::canonicalize(&self.num * &rhs.den + &rhs.num * &self.den, &self.den * &rhs.den)
    }
}

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::canonicalize(&self.num * &rhs.den - &rhs.num * &self.den, &self.den * &rhs.den)
    }
}

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::canonicalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

forward_binop!(Add, add, GaussianRational);
forward_binop!(Sub, sub, GaussianRational);
forward_binop!(Mul, mul, GaussianRational);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -(self.clone())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl FromStr for GaussianRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse::expression(s)
    }
}

/// Structured form of a Gaussian rational: decimal strings of the reduced
/// real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRecord {
    pub re_num: String,
    pub im_num: String,
    pub re_den: String,
    pub im_den: String,
}

impl RationalRecord {
    pub fn to_value(&self) -> Result<GaussianRational> {
        let p = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad integer '{s}'")))
        };
        let (rd, id) = (p(&self.re_den)?, p(&self.im_den)?);
        if rd.is_zero() || id.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(GaussianRational::from_parts(
            &Rational::new(p(&self.re_num)?, rd),
            &Rational::new(p(&self.im_num)?, id),
        ))
    }
}

/// The unique `g` in `Z[i]` with `z - g` in `[-1/2, 1/2)^2`.
pub fn nearest_gaussian_integer(z: &GaussianRational) -> GaussianInt {
    let (re, im) = z.parts();
    GaussianInt::new(round_half_up(&re), round_half_up(&im))
}

/// Greatest common divisor, normalized to `{re > 0, im >= 0}`.
pub fn gaussian_gcd(a: &GaussianInt, b: &GaussianInt) -> Result<GaussianInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroGcd);
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let (_, r) = x.div_rem(&y)?;
        x = y;
        y = r;
    }
    Ok(x.normalize_unit())
}

mod parse {
    //! `expr := operand ('/' operand)?`, `operand := '(' complex ')' | complex`,
    //! `complex := term (('+'|'-') term)*`, `term := number ['i'] | 'i'`.

    use super::*;

    struct Cursor<'a> {
        s: &'a [u8],
        pos: usize,
    }

    impl Cursor<'_> {
        fn skip_ws(&mut self) {
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
        }

        fn peek(&mut self) -> Option<u8> {
            self.skip_ws();
            self.s.get(self.pos).copied()
        }

        fn eat(&mut self, c: u8) -> bool {
            if self.peek() == Some(c) {
                self.pos += 1;
                true
            } else {
                false
            }
        }

        fn err(&self, what: &str) -> Error {
            Error::Parse(format!(
                "{what} at byte {} of '{}'",
                self.pos,
                String::from_utf8_lossy(self.s)
            ))
        }

        fn number(&mut self) -> Result<Option<Rational>> {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let int_end = self.pos;
            let mut frac = "";
            if self.pos < self.s.len() && self.s[self.pos] == b'.' {
                self.pos += 1;
                let fs = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                frac = std::str::from_utf8(&self.s[fs..self.pos]).unwrap_or("");
            }
            if int_end == start && frac.is_empty() {
                if self.pos != start {
                    return Err(self.err("malformed number"));
                }
                return Ok(None);
            }
            // Bound literal length so hostile input cannot request huge allocations.
            if self.pos - start > 4096 {
                return Err(self.err("number literal too long"));
            }
            let int_part = std::str::from_utf8(&self.s[start..int_end]).unwrap_or("");
            let digits = format!("{int_part}{frac}");
            let n: BigInt = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits.parse().map_err(|_| self.err("malformed number"))?
            };
            let d = num_traits::pow(BigInt::from(10), frac.len());
            Ok(Some(Rational::new(n, d)))
        }

        fn complex(&mut self) -> Result<(Rational, Rational)> {
            let (mut re, mut im) = (Rational::zero(), Rational::zero());
            let mut first = true;
            loop {
                let sign = match self.peek() {
                    Some(b'+') => {
                        self.pos += 1;
                        Rational::one()
                    }
                    Some(b'-') => {
                        self.pos += 1;
                        -Rational::one()
                    }
                    _ if first => Rational::one(),
                    _ => break,
                };
                first = false;
                let coeff = self.number()?;
                if self.eat(b'i') {
                    im += sign * coeff.unwrap_or_else(Rational::one);
                } else if let Some(c) = coeff {
                    re += sign * c;
                } else {
                    return Err(self.err("expected a number or 'i'"));
                }
            }
            Ok((re, im))
        }

        fn operand(&mut self) -> Result<GaussianRational> {
            if self.eat(b'(') {
                let v = self.complex()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(GaussianRational::from_parts(&v.0, &v.1))
            } else {
                let v = self.complex()?;
                Ok(GaussianRational::from_parts(&v.0, &v.1))
            }
        }
    }

    pub(super) fn expression(s: &str) -> Result<GaussianRational> {
        let mut c = Cursor {
            s: s.as_bytes(),
            pos: 0,
        };
        if c.peek().is_none() {
            return Err(c.err("empty input"));
        }
        let num = c.operand()?;
        let value = if c.eat(b'/') {
            let den = c.operand()?;
            num.checked_div(&den)?
        } else {
            num
        };
        if c.peek().is_some() {
            return Err(c.err("trailing input"));
        }
        Ok(value)
    }
}

impl Serialize for GaussianInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn rounding_half_open_cell() {
        assert_eq!(nearest_gaussian_integer(&GaussianRational::zero()), g(0, 0));
        assert_eq!(nearest_gaussian_integer(&q("1/2")), g(1, 0));
        assert_eq!(nearest_gaussian_integer(&q("-1/2")), g(0, 0));
        assert_eq!(nearest_gaussian_integer(&q("i/2")), g(0, 1));
        assert_eq!(nearest_gaussian_integer(&q("(3+i)/2")), g(2, 1));
    }

    #[test]
    fn small_example_rounds_to_zero() {
        // |z|^2 = 1405/16657 < 1/2.
        let z = q("(37+6i)/(129+4i)");
        assert!(z.norm() < rat(1, 2));
        assert_eq!(nearest_gaussian_integer(&z), g(0, 0));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gaussian_gcd(&g(2, 0), &g(0, 2)).unwrap(), g(2, 0));
        assert_eq!(gaussian_gcd(&g(1, 1), &g(2, 0)).unwrap(), g(1, 1));
        let d = gaussian_gcd(&g(5, 0), &g(3, 4)).unwrap();
        assert_eq!(d, g(2, 1));
        assert!(g(5, 0).checked_div_exact(&d).is_some());
        assert!(g(3, 4).checked_div_exact(&d).is_some());
        assert_eq!(gaussian_gcd(&g(0, 0), &g(0, 0)), Err(Error::ZeroGcd));
        assert_eq!(gaussian_gcd(&g(0, 0), &g(0, -3)).unwrap(), g(3, 0));
    }

    #[test]
    fn units_and_normalization() {
        let units: Vec<_> = [g(1, 0), g(-1, 0), g(0, 1), g(0, -1)]
            .into_iter()
            .filter(GaussianInt::is_unit)
            .collect();
        assert_eq!(units.len(), 4);
        assert!(!g(1, 1).is_unit());
        for z in [g(2, 1), g(-1, 2), g(-2, -1), g(1, -2)] {
            assert_eq!(z.normalize_unit(), g(2, 1));
        }
        assert_eq!(g(0, -5).normalize_unit(), g(5, 0));
    }

    #[test]
    fn canonical_form() {
        let a = q("(2+2i)/(2i)");
        assert_eq!(a, q("1-i"));
        assert!(a.is_integer());
        let b = q("(12-2i)/37");
        assert_eq!((b.num(), b.den()), (&g(2, 0), &g(6, 1)));
        let c = GaussianRational::new(g(3, 0), g(0, -6)).unwrap();
        assert_eq!(c, q("i/2"));
        assert_eq!(c.den(), &g(2, 0));
        assert!(GaussianRational::new(g(1, 0), g(0, 0)).is_err());
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(g(3, -2).to_string(), "3-2i");
        assert_eq!(g(0, -2).to_string(), "-2i");
        assert_eq!(g(0, 1).to_string(), "i");
        assert_eq!(g(-1, -1).to_string(), "-1-i");
        assert_eq!(g(0, 0).to_string(), "0");
        assert_eq!(q("(37+6i)/(129+24i)").to_string(), "(37+6i)/(129+24i)");
        assert_eq!("-2+i".parse::<GaussianInt>().unwrap(), g(-2, 1));
        assert_eq!("3i".parse::<GaussianInt>().unwrap(), g(0, 3));
        assert_eq!(" 1 - 1i ".parse::<GaussianInt>().unwrap(), g(1, -1));
        assert_eq!(q("0.25+0.25i").parts(), (rat(1, 4), rat(1, 4)));
        assert!("1/2".parse::<GaussianInt>().is_err());
        assert!("(1+".parse::<GaussianRational>().is_err());
        assert!("1/0".parse::<GaussianRational>().is_err());
        assert!("".parse::<GaussianRational>().is_err());
        assert!("2i3".parse::<GaussianRational>().is_err());
    }

    #[test]
    fn record_round_trip() {
        let z = q("(37+6i)/(129+24i)");
        let r = z.record();
        assert_eq!(r.to_value().unwrap(), z);
    }

    #[test]
    fn division_with_remainder_shrinks_norm() {
        let (a, b) = (g(1234, -577), g(31, 17));
        let (qq, r) = a.div_rem(&b).unwrap();
        assert_eq!(&qq * &b + &r, a);
        assert!(r.norm() * 2 <= b.norm());
    }
}
