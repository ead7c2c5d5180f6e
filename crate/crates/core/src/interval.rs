//! Closed rational intervals and complex boxes with outward rounding.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianRational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// Largest multiple of `2^-bits` that is `<= x`.
pub fn dyadic_floor(x: &Rational, bits: u32) -> Rational {
    let s = pow2(bits);
    Rational::new((x * Rational::from_integer(s.clone())).floor().to_integer(), s)
}

/// Smallest multiple of `2^-bits` that is `>= x`.
pub fn dyadic_ceil(x: &Rational, bits: u32) -> Rational {
    let s = pow2(bits);
    Rational::new((x * Rational::from_integer(s.clone())).ceil().to_integer(), s)
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Widen both endpoints to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Self {
        Self {
            lo: dyadic_floor(&self.lo, bits),
            hi: dyadic_ceil(&self.hi, bits),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.hi, -&self.lo)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            Self::new(a, b)
        } else {
            Self::new(b, a)
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().cloned().expect("nonempty");
        let hi = c.iter().max().cloned().expect("nonempty");
        Self::new(lo, hi)
    }

    /// Tight enclosure of `{x^2}`.
    pub fn square(&self) -> Self {
        let (a, b) = (&self.lo * &self.lo, &self.hi * &self.hi);
        if self.contains_zero() {
            Self::new(Rational::zero(), a.max(b))
        } else if a <= b {
            Self::new(a, b)
        } else {
            Self::new(b, a)
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::BoxContainsZero);
        }
        Ok(Self::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    /// Outward enclosure of `sqrt` with endpoints on the `2^-bits` grid.
    pub fn sqrt(&self, bits: u32) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::Precondition("square root of a negative interval".into()));
        }
        Ok(Self::new(sqrt_floor(&self.lo, bits), sqrt_ceil(&self.hi, bits)))
    }

    pub fn to_f64_mid(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.mid().to_f64().unwrap_or(f64::NAN)
    }
}

/// Largest multiple of `2^-bits` whose square is `<= x`, for `x >= 0`.
pub fn sqrt_floor(x: &Rational, bits: u32) -> Rational {
    let s = pow2(bits);
    // floor(sqrt(x) * 2^bits) = isqrt(floor(x * 4^bits)).
    let scaled = (x * Rational::from_integer(&s * &s)).floor().to_integer();
    Rational::new(scaled.sqrt(), s)
}

/// Smallest multiple of `2^-bits` whose square is `>= x`, for `x >= 0`.
pub fn sqrt_ceil(x: &Rational, bits: u32) -> Rational {
    let s = pow2(bits);
    let f = sqrt_floor(x, bits);
    if &f * &f == *x {
        f
    } else {
        f + Rational::new(BigInt::one(), s)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::ToPrimitive;
        let lo = self.lo.to_f64().unwrap_or(f64::NAN);
        let hi = self.hi.to_f64().unwrap_or(f64::NAN);
        write!(f, "[{lo:.12e}, {hi:.12e}]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBox {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexBox {
    pub fn new(re: Interval, im: Interval) -> Self {
        Self { re, im }
    }

    pub fn point(z: &GaussianRational) -> Self {
        let (re, im) = z.parts();
        Self::new(Interval::point(re), Interval::point(im))
    }

    pub fn is_point(&self) -> bool {
        self.re.is_point() && self.im.is_point()
    }

    pub fn width(&self) -> Rational {
        self.re.width().max(self.im.width())
    }

    pub fn contains(&self, z: &GaussianRational) -> bool {
        let (re, im) = z.parts();
        self.re.contains(&re) && self.im.contains(&im)
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_point() && self.re.lo.is_zero() && self.im.lo.is_zero()
    }

    pub fn round_out(&self, bits: u32) -> Self {
        Self::new(self.re.round_out(bits), self.im.round_out(bits))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn add_exact(&self, z: &GaussianRational) -> Self {
        self.add(&Self::point(z))
    }

    pub fn mul_exact(&self, z: &GaussianRational) -> Self {
        self.mul(&Self::point(z))
    }

    /// Enclosure of `{|z|^2}`.
    pub fn norm(&self) -> Interval {
        self.re.square().add(&self.im.square())
    }

    /// `1/z = conj(z)/|z|^2`; fails when the box meets 0.
    pub fn recip(&self) -> Result<Self> {
        if self.is_point() {
            let (re, im) = (&self.re.lo, &self.im.lo);
            let n = re * re + im * im;
            if n.is_zero() {
                return Err(Error::BoxContainsZero);
            }
            return Ok(Self::new(Interval::point(re / &n), Interval::point(-im / &n)));
        }
        if self.contains_zero() {
            return Err(Error::BoxContainsZero);
        }
        let inv = self.norm().recip()?;
        Ok(Self::new(self.re.mul(&inv), self.im.neg().mul(&inv)))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }
}

impl fmt::Display for ComplexBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::rat;
    use proptest::prelude::*;

    fn gq(a: i64, b: i64, c: i64, d: i64) -> GaussianRational {
        GaussianRational::from_parts(&rat(a, b), &rat(c, d))
    }

    #[test]
    fn sqrt_bounds() {
        let two = rat(2, 1);
        let lo = sqrt_floor(&two, 40);
        let hi = sqrt_ceil(&two, 40);
        assert!(&lo * &lo <= two && two < &hi * &hi);
        assert_eq!(&hi - &lo, rat(1, 1 << 40));
        assert_eq!(sqrt_ceil(&rat(9, 4), 3), rat(3, 2));
    }

    #[test]
    fn recip_rejects_zero() {
        let b = ComplexBox::new(
            Interval::new(rat(-1, 2), rat(1, 2)),
            Interval::new(rat(-1, 4), rat(1, 4)),
        );
        assert_eq!(b.recip(), Err(Error::BoxContainsZero));
        assert!(ComplexBox::point(&GaussianRational::zero()).recip().is_err());
    }

    fn widen(z: &GaussianRational, e: i64) -> ComplexBox {
        let eps = rat(1, e);
        let (re, im) = z.parts();
        ComplexBox::new(
            Interval::new(&re - &eps, &re + &eps),
            Interval::new(&im - &eps, &im + &eps),
        )
    }

    proptest! {
        #[test]
        fn box_arithmetic_is_sound(
            a in -50i64..50, b in 1i64..20, c in -50i64..50, d in 1i64..20,
            e in -50i64..50, f in 1i64..20, g in -50i64..50, h in 1i64..20,
            eps in 100i64..100000,
        ) {
            let p = gq(a, b, c, d);
            let q = gq(e, f, g, h);
            let (bp, bq) = (widen(&p, eps), widen(&q, eps));
            prop_assert!(bp.add(&bq).contains(&(&p + &q)));
            prop_assert!(bp.sub(&bq).contains(&(&p - &q)));
            let prod = &p * &q;
            prop_assert!(bp.mul(&bq).contains(&prod));
            // (p*q + p) / q
            let e_exact = &prod + &p;
            let e_box = bp.mul(&bq).add(&bp);
            if let Ok(r) = e_box.div(&bq) {
                prop_assert!(r.contains(&e_exact.checked_div(&q).unwrap()));
            }
            if let Ok(r) = bp.recip() {
                prop_assert!(r.contains(&p.recip().unwrap()));
            }
            prop_assert!(bp.round_out(8).contains(&p));
        }
    }
}
