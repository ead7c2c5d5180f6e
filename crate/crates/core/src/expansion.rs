//! HCF expansions of exact and refinable complex numbers, and real
//! continued fractions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{nearest_gaussian_integer, GaussianInt, GaussianRational, Rational};
use crate::interval::Interval;
use crate::oracle::{floor_certified_by, nearest_of_mobius, sign_certified_by, RefinableComplex, RefinableReal};
use crate::word::{qpair, Mat2, Word};

/// Why a streamed expansion stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopReason {
    /// The requested number of quotients was produced.
    Complete,
    /// The remainder became exactly zero.
    Terminated,
    /// The next quotient could not be certified at the precision cap.
    Undecidable { bits: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HcfExpansion {
    pub quotients: Word,
    pub terminated: bool,
    pub certified_prefix_len: usize,
    pub stop: StopReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionRecord {
    pub quotients: String,
    pub terminated: bool,
    pub certified_prefix_len: usize,
}

impl HcfExpansion {
    pub fn record(&self) -> ExpansionRecord {
        ExpansionRecord {
            quotients: self.quotients.to_string(),
            terminated: self.terminated,
            certified_prefix_len: self.certified_prefix_len,
        }
    }
}

/// Expansion of `z - [z]`; always terminates because `|q|` strictly grows.
pub fn hcf_expand_rational(z: &GaussianRational) -> HcfExpansion {
    let mut w = z - &GaussianRational::from(nearest_gaussian_integer(z));
    let mut out = Vec::new();
    while !w.is_zero() {
        let y = w.recip().expect("w is nonzero");
        let a = nearest_gaussian_integer(&y);
        w = &y - &GaussianRational::from(a.clone());
        out.push(a);
    }
    let n = out.len();
    HcfExpansion {
        quotients: Word::new(out).expect("HCF quotients have norm >= 2"),
        terminated: true,
        certified_prefix_len: n,
        stop: StopReason::Terminated,
    }
}

/// Up to `n` certified quotients of the reduced value `z - [z]`.
///
/// Each step re-evaluates `T^k(z) = T_u^{-1}(z)` from a fresh enclosure of
/// `z`, so enclosure errors do not accumulate across steps.
pub fn hcf_expand_stream(z: &dyn RefinableComplex, n: usize, max_bits: u32) -> Result<HcfExpansion> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let stopped = |w: Word, stop: StopReason| {
        let len = w.len();
        Ok(HcfExpansion {
            terminated: stop == StopReason::Terminated,
            quotients: w,
            certified_prefix_len: len,
            stop,
        })
    };
    let g0 = match nearest_of_mobius(z, &Mat2::identity(), max_bits) {
        Ok(g) => g,
        Err(Error::Undecidable { bits }) => return stopped(Word::empty(), StopReason::Undecidable { bits }),
        Err(e) => return Err(e),
    };
    let shift = Mat2::new(GaussianInt::one(), -&g0, GaussianInt::zero(), GaussianInt::one());
    let mut word = Word::empty();
    while word.len() < n {
        // T^k(z - g0) = T_u^{-1}(z - g0); the next quotient is the rounding of its reciprocal.
        let rem = qpair(&word).mobius().adjugate().mul(&shift);
        if rem
            .apply_box(&z.enclosure(crate::oracle::START_BITS))
            .is_ok_and(|b| b.is_exact_zero())
        {
            return stopped(word, StopReason::Terminated);
        }
        match nearest_of_mobius(z, &Mat2::swap().mul(&rem), max_bits) {
            Ok(a) => word.push(a)?,
            Err(Error::Undecidable { bits }) => return stopped(word, StopReason::Undecidable { bits }),
            Err(e) => return Err(e),
        }
    }
    stopped(word, StopReason::Complete)
}

/// Smallest `(preperiod, period)` such that the tail repeats at least twice.
///
/// This is an observation on a finite prefix, not a proof of periodicity.
pub fn observed_period(w: &Word) -> Option<(usize, usize)> {
    let a = w.items();
    for per in 1..=a.len() / 2 {
        for pre in 0..=a.len() - 2 * per {
            if (pre..a.len() - per).all(|i| a[i] == a[i + per]) {
                return Some((pre, per));
            }
        }
    }
    None
}

/// Real continued fraction quotients `[0; a_1, a_2, ...]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealCFExpansion {
    pub quotients: Vec<BigInt>,
}

pub fn rcf_evaluate(quotients: &[BigInt]) -> Rational {
    quotients.iter().rev().fold(Rational::zero(), |acc, a| {
        (Rational::from_integer(a.clone()) + acc).recip()
    })
}

/// RCF of a rational in `(0, 1)`; the last quotient is at least 2.
pub fn rcf_expand_rational(x: &Rational) -> Result<RealCFExpansion> {
    if !x.is_positive() || *x >= Rational::one() {
        return Err(Error::Precondition(format!("{x} is not in (0, 1)")));
    }
    let mut out = Vec::new();
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    while !num.is_zero() {
        let (a, r) = den.div_rem(&num);
        out.push(a);
        den = std::mem::replace(&mut num, r);
    }
    Ok(RealCFExpansion { quotients: out })
}

/// Up to `n` certified RCF quotients of a real oracle in `(0, 1)`.
///
/// Returns the quotients and whether the expansion terminated.
pub fn rcf_expand_refinable(x: &dyn RefinableReal, n: usize, max_bits: u32) -> Result<(Vec<BigInt>, bool)> {
    let mut out: Vec<BigInt> = Vec::new();
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    while out.len() < n {
        // G^k(x) = (p_k - q_k x) / (q_{k-1} x - p_{k-1}); its reciprocal floors to a_{k+1}.
        let pt = |v: &BigInt| Interval::point(Rational::from_integer(v.clone()));
        let rem_num = |i: &Interval| pt(&p).sub(&i.scale(&Rational::from_integer(q.clone())));
        let rem_den = |i: &Interval| i.scale(&Rational::from_integer(q_prev.clone())).sub(&pt(&p_prev));
        let probe = x.enclosure(crate::oracle::START_BITS);
        let num0 = rem_num(&probe);
        if num0.is_point() && num0.lo.is_zero() {
            return Ok((out, true));
        }
        let a = floor_certified_by(
            |b| {
                let i = x.enclosure(b);
                rem_den(&i).div(&rem_num(&i))
            },
            max_bits,
        )?;
        if !a.is_positive() {
            return Err(Error::Precondition(format!("{} is not in (0, 1)", x.describe())));
        }
        let np = &a * &p + &p_prev;
        let nq = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, np);
        q_prev = std::mem::replace(&mut q, nq);
        out.push(a);
    }
    Ok((out, false))
}

pub enum RealInput<'a> {
    Exact(Rational),
    Refinable(&'a dyn RefinableReal),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixReport {
    /// Set when the inputs do not satisfy `|x - p/q| < 1/q^2` and the side conditions.
    pub precondition_violation: Option<String>,
    /// Expansion length `N` of `p/q`.
    pub n: usize,
    /// Length of the common prefix, capped at `N - 1`.
    pub matched: usize,
    pub holds: bool,
}

impl PrefixReport {
    fn violation(msg: String) -> Self {
        Self {
            precondition_violation: Some(msg),
            n: 0,
            matched: 0,
            holds: false,
        }
    }
}

/// Checks that the first `N - 1` RCF quotients of `x` agree with those of `p/q`.
pub fn rcf_check_prefix_property(x: &RealInput<'_>, p: &BigInt, q: &BigInt, max_bits: u32) -> Result<PrefixReport> {
    if !q.is_positive() || !p.is_positive() || p >= q || !p.gcd(q).is_one() {
        return Ok(PrefixReport::violation(format!(
            "{p}/{q} must be a reduced fraction in (0, 1)"
        )));
    }
    let r = Rational::new(p.clone(), q.clone());
    let bound = Rational::new(BigInt::one(), q * q);
    let close = match x {
        RealInput::Exact(v) => {
            if *v == r {
                return Ok(PrefixReport::violation("x equals p/q".into()));
            }
            (v - &r).abs() < bound
        }
        RealInput::Refinable(o) => {
            // x is irrational, so |x - p/q| != 1/q^2 and the sign is decidable.
            let s = sign_certified_by(
                |b| {
                    let d = o.enclosure(b).sub(&Interval::point(r.clone()));
                    Ok(d.square().sub(&Interval::point(&bound * &bound)))
                },
                max_bits,
            )?;
            s == std::cmp::Ordering::Less
        }
    };
    if !close {
        return Ok(PrefixReport::violation(format!("|x - {p}/{q}| >= 1/{q}^2")));
    }
    let b = rcf_expand_rational(&r)?.quotients;
    let need = b.len() - 1;
    let a = match x {
        RealInput::Exact(v) => {
            if !v.is_positive() || *v >= Rational::one() {
                return Ok(PrefixReport::violation("x is not in (0, 1)".into()));
            }
            rcf_expand_rational(v)?.quotients
        }
        RealInput::Refinable(o) => rcf_expand_refinable(*o, need, max_bits)?.0,
    };
    let matched = a.iter().zip(&b).take(need).take_while(|(u, v)| u == v).count();
    Ok(PrefixReport {
        precondition_violation: None,
        n: b.len(),
        matched,
        holds: matched == need,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::rat;
    use crate::oracle::{sqrt10_example, ExactComplex, ExactReal, QuadraticReal};
    use crate::word::evaluate;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn exact_expansions() {
        assert!(hcf_expand_rational(&GaussianRational::zero()).quotients.is_empty());
        // The value whose expansion is (3, 2, 3i, -2, 3i).
        let e = hcf_expand_rational(&q("(37+6i)/(129+24i)"));
        assert_eq!(e.quotients, w("[3,2,3i,-2,3i]"));
        assert!(e.terminated);
        // The same numerator over 129+4i expands differently.
        assert_eq!(
            hcf_expand_rational(&q("(37+6i)/(129+4i)")).quotients,
            w("[3,1+i,2-4i,1-2i,2i]")
        );
        // (12-2i)/37 equals [0; 3, -2i] but its HCF is (3+i, 2i).
        let v = q("(12-2i)/37");
        assert_eq!(evaluate(&w("[3,-2i]")).unwrap(), v);
        assert_eq!(hcf_expand_rational(&v).quotients, w("[3+i,2i]"));
    }

    #[test]
    fn reduces_before_expanding() {
        let z = &q("5-3i") + &q("(37+6i)/(129+24i)");
        assert_eq!(hcf_expand_rational(&z).quotients, w("[3,2,3i,-2,3i]"));
    }

    #[test]
    fn stream_of_sqrt10_example() {
        // Re(1/z) = 7/2 and the later real parts +-1/2 are exact cell edges;
        // the half-open rule sends +1/2 up, giving period (-2, 1+3i).
        let e = hcf_expand_stream(&sqrt10_example(), 9, 4096).unwrap();
        assert_eq!(e.quotients, w("[4,-2,1+3i,-2,1+3i,-2,1+3i,-2,1+3i]"));
        assert_eq!(e.certified_prefix_len, 9);
        assert!(!e.terminated);
        assert_eq!(observed_period(&e.quotients), Some((1, 2)));
    }

    #[test]
    fn stream_of_exact_points() {
        let e = hcf_expand_stream(&ExactComplex(q("0.25+0.25i")), 1, 64).unwrap();
        assert_eq!(e.quotients, w("[2-2i]"));
        let e = hcf_expand_stream(&ExactComplex(q("0.25+0.25i")), 5, 64).unwrap();
        assert!(e.terminated);
        assert_eq!(e.certified_prefix_len, 1);
        // 1/z = 3 + i/2 lies on a cell edge, so nothing can be certified.
        let e = hcf_expand_stream(&ExactComplex(q("(12-2i)/37")), 5, 256).unwrap();
        assert_eq!(e.certified_prefix_len, 0);
        assert_eq!(e.stop, StopReason::Undecidable { bits: 256 });
        let z = q("(37+6i)/(129+24i)");
        let e = hcf_expand_stream(&ExactComplex(z.clone()), 10, 256).unwrap();
        assert!(e.terminated);
        assert_eq!(e.quotients, hcf_expand_rational(&z).quotients);
    }

    #[test]
    fn rcf_examples() {
        assert_eq!(rcf_expand_rational(&rat(1, 2)).unwrap().quotients, ints(&[2]));
        assert_eq!(rcf_expand_rational(&rat(2, 5)).unwrap().quotients, ints(&[2, 2]));
        assert_eq!(rcf_expand_rational(&rat(5, 7)).unwrap().quotients, ints(&[1, 2, 2]));
        assert_eq!(rcf_evaluate(&ints(&[1, 2, 2])), rat(5, 7));
        assert!(rcf_expand_rational(&rat(1, 1)).is_err());
        let (a, t) = rcf_expand_refinable(&QuadraticReal::sqrt2_minus_1(), 12, 4096).unwrap();
        assert_eq!(a, vec![BigInt::from(2); 12]);
        assert!(!t);
        let (a, t) = rcf_expand_refinable(&ExactReal(rat(5, 7)), 10, 64).unwrap();
        assert_eq!((a, t), (ints(&[1, 2, 2]), true));
    }

    #[test]
    fn prefix_property_examples() {
        let two = BigInt::from(2);
        let r = rcf_check_prefix_property(
            &RealInput::Refinable(&QuadraticReal::sqrt2_minus_1()),
            &two,
            &BigInt::from(5),
            4096,
        )
        .unwrap();
        assert_eq!((r.n, r.matched, r.holds), (2, 1, true));
        let x = rat(5, 7) + rat(1, 100);
        let r = rcf_check_prefix_property(&RealInput::Exact(x), &BigInt::from(5), &BigInt::from(7), 64).unwrap();
        assert_eq!((r.n, r.matched, r.holds), (3, 2, true));
        let r =
            rcf_check_prefix_property(&RealInput::Exact(rat(1, 2)), &BigInt::from(1), &BigInt::from(3), 64).unwrap();
        assert!(r.precondition_violation.is_some() && !r.holds);
    }
}
