//! Candidate approximants to an oracle value under a power-law bound.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::discrepancy::{dd_against, decimal, distance_enclosure};
use crate::error::{Error, Result};
use crate::expansion::{hcf_expand_rational, hcf_expand_stream};
use crate::gaussian::{GaussianRational, Rational};
use crate::geometry::{classify, prototype_set};
use crate::interval::Interval;
use crate::oracle::RefinableComplex;
use crate::word::{evaluate, make_vk, qpair, Word};

/// `ψ(x) = c x^(-λ)` with rational `c > 0` and `λ >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiSpec {
    pub c: Rational,
    pub lambda: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Undecided,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Yes => "yes",
            Self::No => "no",
            Self::Undecided => "undecided",
        })
    }
}

fn pow(x: &Rational, e: &BigInt) -> Rational {
    let e = e.to_usize().expect("small exponent");
    num_traits::pow(x.clone(), e)
}

impl PsiSpec {
    pub fn new(c: Rational, lambda: Rational) -> Result<Self> {
        if !c.is_positive() || lambda.is_negative() {
            return Err(Error::Precondition("psi needs c > 0 and lambda >= 0".into()));
        }
        if lambda.numer() > &BigInt::from(64) || lambda.denom() > &BigInt::from(64) {
            return Err(Error::Precondition(
                "lambda numerator and denominator must be at most 64".into(),
            ));
        }
        Ok(Self { c, lambda })
    }

    /// `ψ(x) = x^-2`.
    pub fn inverse_square() -> Self {
        Self {
            c: Rational::one(),
            lambda: Rational::from_integer(BigInt::from(2)),
        }
    }

    /// Decides `d <= ψ(|q|)` from an enclosure of `d^2` and the exact `|q|^2`.
    ///
    /// With `λ = s/t` this is `(d^2)^t |q|^(2s) <= c^(2t)`.
    pub fn decide(&self, dist_sq: &Interval, q_norm_sq: &BigInt) -> Decision {
        let (s, t) = (self.lambda.numer(), self.lambda.denom());
        let n = pow(&Rational::from_integer(q_norm_sq.clone()), s);
        let rhs = pow(&self.c, &(t * 2));
        if &pow(&dist_sq.hi, t) * &n <= rhs {
            Decision::Yes
        } else if &pow(&dist_sq.lo, t) * &n > rhs {
            Decision::No
        } else {
            Decision::Undecided
        }
    }
}

impl fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*x^-{}", self.c, self.lambda)
    }
}

/// `C*x^-L`, `x^-L` or `C` (`L` and `C` rationals or decimals).
impl FromStr for PsiSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (c, l) = match s.split_once("x^") {
            Some((head, exp)) => {
                let c = head.strip_suffix('*').unwrap_or(head);
                let c = if c.is_empty() { "1" } else { c };
                let exp = exp.trim_start_matches('(').trim_end_matches(')');
                let l = exp
                    .strip_prefix('-')
                    .ok_or_else(|| Error::Parse(format!("psi exponent must be negative: {s}")))?;
                (c.to_string(), l.to_string())
            }
            None => (s.clone(), "0".to_string()),
        };
        PsiSpec::new(parse_decimal(&c)?, parse_decimal(&l)?)
    }
}

/// Parses `a/b`, integers and decimals like `1e-9` or `0.25` exactly.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational number: {s}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let digits = if digits == "-" || digits == "+" {
        return Err(bad());
    } else {
        digits
    };
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let e = exp - frac.len() as i32;
    if e.unsigned_abs() > 4000 {
        return Err(bad());
    }
    let ten = Rational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, e.unsigned_abs() as usize);
    Ok(if e >= 0 {
        Rational::from_integer(n) * scale
    } else {
        Rational::from_integer(n) / scale
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchRow {
    pub approx: GaussianRational,
    pub source: String,
    pub q_norm_sq: String,
    pub distance_lo: String,
    pub distance_hi: String,
    pub psi_check: Decision,
    pub dd: Option<usize>,
    pub note: Option<String>,
}

fn candidates(z: &dyn RefinableComplex, q_norm_limit: &BigInt, max_bits: u32) -> Result<(Vec<(Word, String)>, Word)> {
    // Every two steps multiply |q|^2 by more than 2.
    let cap = 2 * q_norm_limit.bits() as usize + 4;
    let e = hcf_expand_stream(z, cap, max_bits)?;
    let prefix = e.quotients.prefix(e.certified_prefix_len);
    let mut out = Vec::new();
    for n in 1..=prefix.len() {
        let u = prefix.prefix(n);
        if &qpair(&u).q.norm() > q_norm_limit {
            break;
        }
        out.push((u, format!("convergent {n}")));
    }
    for m in 1..=prefix.len() {
        let a = prefix.prefix(m);
        if &qpair(&a).q.norm() > q_norm_limit {
            break;
        }
        if !classify(&prototype_set(&a))?.is_full() {
            continue;
        }
        for k in 1.. {
            let u = a.concat(&make_vk(k));
            if &qpair(&u).q.norm() > q_norm_limit {
                break;
            }
            out.push((u, format!("{a}+v_{k}")));
        }
    }
    Ok((out, prefix))
}

/// Convergents of `z` and `a v_k` constructions on its full prefixes, kept
/// when `|z - p/q| <= ψ(|q|)` holds or cannot be decided.
pub fn search_approx(
    z: &dyn RefinableComplex,
    psi: &PsiSpec,
    q_norm_limit: &BigInt,
    max_bits: u32,
) -> Result<Vec<SearchRow>> {
    let (cands, prefix) = candidates(z, q_norm_limit, max_bits)?;
    let zexp = crate::expansion::HcfExpansion {
        certified_prefix_len: prefix.len(),
        quotients: prefix,
        terminated: false,
        stop: crate::expansion::StopReason::Complete,
    };
    let bits = 256.min(max_bits).max(64);
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    for (u, source) in cands {
        let approx = evaluate(&u)?;
        if !seen.insert(approx.to_string()) {
            continue;
        }
        let target = hcf_expand_rational(&approx).quotients;
        let qn = qpair(&target).q.norm();
        let dist = distance_enclosure(z, &approx, bits);
        let decision = psi.decide(&dist.square(), &qn);
        if decision == Decision::No {
            continue;
        }
        let (dd, note) = match dd_against(&zexp, &target) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        rows.push(SearchRow {
            approx,
            source,
            q_norm_sq: qn.to_string(),
            distance_lo: decimal(&dist.lo, 6),
            distance_hi: decimal(&dist.hi, 6),
            psi_check: decision,
            dd,
            note,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::rat;
    use crate::oracle::sqrt10_example;

    #[test]
    fn psi_parsing() {
        let p: PsiSpec = "x^-2".parse().unwrap();
        assert_eq!(p, PsiSpec::inverse_square());
        let p: PsiSpec = "1e-9*x^-4".parse().unwrap();
        assert_eq!(p.c, rat(1, 1_000_000_000));
        assert_eq!(p.lambda, rat(4, 1));
        let p: PsiSpec = "3/2 * x^(-5/2)".parse().unwrap();
        assert_eq!(p.lambda, rat(5, 2));
        assert!("x^2".parse::<PsiSpec>().is_err());
        assert!("0*x^-1".parse::<PsiSpec>().is_err());
        assert_eq!(parse_decimal("0.25").unwrap(), rat(1, 4));
    }

    #[test]
    fn psi_decisions() {
        let p = PsiSpec::new(rat(1, 1), rat(1, 2)).unwrap();
        // d <= |q|^-1/2 with |q|^2 = 16: threshold 1/2.
        let n = BigInt::from(16);
        assert_eq!(p.decide(&Interval::point(rat(1, 4)), &n), Decision::Yes);
        assert_eq!(p.decide(&Interval::new(rat(1, 5), rat(1, 3)), &n), Decision::Undecided);
        assert_eq!(p.decide(&Interval::point(rat(1, 3)), &n), Decision::No);
    }

    #[test]
    fn convergents_always_hit_inverse_square() {
        let z = sqrt10_example();
        let rows = search_approx(&z, &PsiSpec::inverse_square(), &BigInt::from(100_000), 2048).unwrap();
        let convergents: Vec<&SearchRow> = rows.iter().filter(|r| r.source.starts_with("convergent")).collect();
        assert!(convergents.len() >= 5);
        assert!(convergents.iter().all(|r| r.psi_check == Decision::Yes));
        // Remainders of z sit on the excluded edge, so the third prefix
        // re-expands differently as a rational.
        assert_eq!(convergents[1].dd, Some(0));
        assert_eq!(convergents[2].dd, Some(3));
        let tiny = PsiSpec::new(rat(1, 1_000_000_000), rat(4, 1)).unwrap();
        assert!(search_approx(&z, &tiny, &BigInt::from(50), 2048).unwrap().is_empty());
    }
}
