//! The expansion discrepancy `dd(z, p/q)` and instances with prescribed value.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::{hcf_expand_rational, hcf_expand_stream, HcfExpansion};
use crate::gaussian::{GaussianInt, GaussianRational, Rational};
use crate::geometry::{classify, prototype_set};
use crate::interval::{ComplexBox, Interval};
use crate::oracle::RefinableComplex;
use crate::word::{evaluate, make_vk, make_vk_tilde, qpair, Word};

/// Number of positions among the first `N` where the quotients of `z` and
/// `approx` differ, `N` being the length of the expansion of `approx`.
pub fn dd(z: &HcfExpansion, approx: &GaussianRational) -> Result<usize> {
    let target = hcf_expand_rational(approx).quotients;
    dd_against(z, &target)
}

/// `dd` against an already expanded approximant.
pub fn dd_against(z: &HcfExpansion, target: &Word) -> Result<usize> {
    let n = target.len();
    if z.terminated && z.quotients.len() <= n {
        return Err(Error::RationalTarget);
    }
    if z.certified_prefix_len < n {
        return Err(Error::InsufficientPrecision {
            needed: n,
            available: z.certified_prefix_len,
        });
    }
    Ok(target
        .items()
        .iter()
        .zip(z.quotients.items())
        .filter(|(a, b)| a != b)
        .count())
}

/// `dd` with `z` given as a list of quotients taken to be certified and
/// not terminating.
pub fn dd_words(z: &Word, approx: &GaussianRational) -> Result<usize> {
    let e = HcfExpansion {
        quotients: z.clone(),
        terminated: false,
        certified_prefix_len: z.len(),
        stop: crate::expansion::StopReason::Complete,
    };
    dd(&e, approx)
}

/// Rigorous enclosure of `|z - approx|` at the given precision.
pub fn distance_enclosure(z: &dyn RefinableComplex, approx: &GaussianRational, bits: u32) -> Interval {
    let diff = z.enclosure(bits).sub(&ComplexBox::point(approx));
    diff.norm()
        .sqrt(bits)
        .expect("norms are nonnegative")
        .round_out(bits + 8)
}

#[derive(Clone, Debug, Serialize)]
pub struct DdReport {
    pub dd: usize,
    pub n: usize,
    pub z_prefix: String,
    pub approx_quotients: String,
    pub distance_lo: String,
    pub distance_hi: String,
    pub distance_width: f64,
    pub q_norm_sq: String,
    pub inv_q_norm_sq: f64,
    /// `|z - p/q| < 1/|q|^2`, decided from the enclosure when possible.
    pub below_inv_q_norm_sq: Option<bool>,
}

/// `dd` for an oracle, with the distance and `1/|q|^2` comparison.
pub fn dd_report(z: &dyn RefinableComplex, approx: &GaussianRational, max_bits: u32) -> Result<DdReport> {
    let target = hcf_expand_rational(approx).quotients;
    let n = target.len();
    let ze = hcf_expand_stream(z, n.max(1), max_bits)?;
    let value = dd_against(&ze, &target)?;
    let bits = 256.min(max_bits).max(64);
    let dist = distance_enclosure(z, approx, bits);
    let qn = qpair(&target).q.norm();
    let inv = Rational::new(BigInt::one(), qn.clone());
    let d2 = dist.square();
    let below = if d2.hi < &inv * &inv {
        Some(true)
    } else if d2.lo >= &inv * &inv {
        Some(false)
    } else {
        None
    };
    Ok(DdReport {
        dd: value,
        n,
        z_prefix: ze.quotients.prefix(n).to_string(),
        approx_quotients: target.to_string(),
        distance_lo: decimal(&dist.lo, 15),
        distance_hi: decimal(&dist.hi, 15),
        distance_width: dist.width().to_f64().unwrap_or(f64::INFINITY),
        q_norm_sq: qn.to_string(),
        inv_q_norm_sq: inv.to_f64().unwrap_or(0.0),
        below_inv_q_norm_sq: below,
    })
}

/// Scientific notation with `digits` significant digits, truncated toward zero.
pub fn decimal(x: &Rational, digits: usize) -> String {
    if x.numer().sign() == num_bigint::Sign::NoSign {
        return "0".into();
    }
    let neg = x.is_negative();
    let a = x.abs();
    // Find e with 10^e <= a < 10^(e+1).
    let ten = Rational::from_integer(BigInt::from(10));
    let mut e: i64 = (a.numer().bits() as i64 - a.denom().bits() as i64) * 3 / 10;
    let pow = |k: i64| -> Rational {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            num_traits::pow(ten.clone(), (-k) as usize).recip()
        }
    };
    while pow(e) > a {
        e -= 1;
    }
    while pow(e + 1) <= a {
        e += 1;
    }
    let scaled = (&a / pow(e - digits as i64 + 1)).floor().to_integer().to_string();
    let (head, tail) = scaled.split_at(1);
    format!("{}{head}.{tail}e{e}", if neg { "-" } else { "" })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyInstance {
    /// `a v_k b`; every point of its cylinder is a valid `z`.
    pub word: Word,
    /// `p(a v_k) / q(a v_k)`.
    pub approx: GaussianRational,
    /// The expansion of `approx`, `a ṽ_k`.
    pub approx_word: Word,
    pub expected_dd: usize,
}

pub fn build_discrepancy_instance(a: &Word, k: usize, b: &GaussianInt) -> Result<DiscrepancyInstance> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if a.is_empty() {
        return Err(Error::Precondition("a must be a nonempty full word".into()));
    }
    if !classify(&prototype_set(a))?.is_full() {
        return Err(Error::Precondition(format!("{a} is not full")));
    }
    if b.norm() < BigInt::from(8) || b.im < BigInt::one() {
        return Err(Error::Precondition(format!("{b} needs |b|^2 >= 8 and Im b >= 1")));
    }
    let head = a.concat(&make_vk(k));
    let approx = evaluate(&head)?;
    Ok(DiscrepancyInstance {
        word: head.with(b.clone())?,
        approx,
        approx_word: a.concat(&make_vk_tilde(k)),
        expected_dd: 3 * k + 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::rat;
    use crate::oracle::sqrt10_example;
    use crate::word::mobius_apply;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn identical_prefix_gives_zero() {
        let z = w("[3,2,3i,-2,3i,5]");
        let approx = evaluate(&w("[3,2,3i,-2,3i]")).unwrap();
        assert_eq!(dd_words(&z, &approx).unwrap(), 0);
    }

    #[test]
    fn domain_errors() {
        let approx: GaussianRational = "(12-2i)/37".parse().unwrap();
        let z = hcf_expand_rational(&approx);
        assert!(matches!(dd(&z, &approx), Err(Error::RationalTarget)));
        let short = w("[3]");
        assert!(matches!(
            dd_words(&short, &approx),
            Err(Error::InsufficientPrecision {
                needed: 2,
                available: 1
            })
        ));
    }

    #[test]
    fn instance_values_hold_on_sampled_points() {
        let inst = build_discrepancy_instance(&w("[3]"), 1, &GaussianInt::new(2, 2)).unwrap();
        assert_eq!(inst.expected_dd, 5);
        assert_eq!(hcf_expand_rational(&inst.approx).quotients, inst.approx_word);
        // z = T_word([0; tail]) expands as word followed by tail.
        for tail in ["[5]", "[3,4i]", "[-7+2i,3,3]"] {
            let z = mobius_apply(&inst.word, &evaluate(&w(tail)).unwrap()).unwrap();
            let e = hcf_expand_rational(&z);
            assert_eq!(e.quotients, inst.word.concat(&w(tail)));
            assert_eq!(dd(&e, &inst.approx).unwrap(), 5);
        }
        assert_eq!(
            build_discrepancy_instance(&w("[4]"), 2, &GaussianInt::new(0, 3))
                .unwrap()
                .expected_dd,
            8
        );
        assert!(build_discrepancy_instance(&w("[2i]"), 1, &GaussianInt::new(2, 2)).is_err());
        assert!(build_discrepancy_instance(&w("[3]"), 1, &GaussianInt::new(2, 0)).is_err());
    }

    #[test]
    fn sqrt10_report() {
        let z = sqrt10_example();
        let approx: GaussianRational = "(37+6i)/(129+24i)".parse().unwrap();
        let r = dd_report(&z, &approx, 4096).unwrap();
        assert_eq!(r.approx_quotients, "[3,2,3i,-2,3i]");
        assert_eq!(r.z_prefix, "[4,-2,1+3i,-2,1+3i]");
        assert_eq!(r.dd, 4);
        assert_eq!(r.below_inv_q_norm_sq, Some(true));
        assert!(r.distance_width < 1e-9);
    }

    #[test]
    fn decimal_format() {
        assert_eq!(decimal(&rat(29, 1_000_000), 3), "2.90e-5");
        assert_eq!(decimal(&rat(-1, 3), 4), "-3.333e-1");
        assert_eq!(decimal(&rat(1000, 1), 2), "1.0e3");
    }
}
