//! Exact real numbers of the form `a + b*sqrt(d)` and sign conditions on
//! univariate quadratics.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::gaussian::{rat, Rational};
use crate::interval::{sqrt_ceil, sqrt_floor, Interval};

/// `a + b*sqrt(d)` with rational `a, b` and `d >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub a: Rational,
    pub b: Rational,
    pub d: Rational,
}

/// `Some(r)` with `r >= 0` and `r^2 = x`, if `x` is the square of a rational.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

impl Surd {
    pub fn rational(a: Rational) -> Self {
        Self {
            a,
            b: Rational::zero(),
            d: Rational::zero(),
        }
    }

    /// `a + b*sqrt(d)`, collapsing to a rational when `sqrt(d)` is rational.
    pub fn new(a: Rational, b: Rational, d: Rational) -> Self {
        debug_assert!(!d.is_negative());
        if b.is_zero() || d.is_zero() {
            return Self::rational(a);
        }
        match rational_sqrt(&d) {
            Some(r) => Self::rational(a + b * r),
            None => Self { a, b, d },
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.b.is_zero().then_some(&self.a)
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    /// Enclosure with endpoints on the `2^-bits` grid (widened by `|b|`).
    pub fn enclosure(&self, bits: u32) -> Interval {
        if self.b.is_zero() {
            return Interval::point(self.a.clone());
        }
        let s = Interval::new(sqrt_floor(&self.d, bits), sqrt_ceil(&self.d, bits));
        s.scale(&self.b).add(&Interval::point(self.a.clone()))
    }

    pub fn sign(&self) -> Ordering {
        sign2(&self.a, &self.b, &self.d)
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + b * d.sqrt()
    }
}

fn sgn(x: &Rational) -> Ordering {
    x.cmp(&Rational::zero())
}

/// Sign of `u + v*sqrt(n)`, `n >= 0`.
pub fn sign2(u: &Rational, v: &Rational, n: &Rational) -> Ordering {
    let (su, sv) = (sgn(u), if n.is_zero() { Ordering::Equal } else { sgn(v) });
    if sv == Ordering::Equal {
        return su;
    }
    if su == Ordering::Equal || su == sv {
        return sv;
    }
    match (u * u).cmp(&(v * v * n)) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater => su,
        Ordering::Less => sv,
    }
}

/// Sign of `x + y*sqrt(p) + z*sqrt(q)`, `p, q >= 0`.
pub fn sign3(x: &Rational, y: &Rational, p: &Rational, z: &Rational, q: &Rational) -> Ordering {
    // Sign of L = y sqrt(p) + z sqrt(q).
    let sl = {
        let (sy, sz) = (
            if p.is_zero() { Ordering::Equal } else { sgn(y) },
            if q.is_zero() { Ordering::Equal } else { sgn(z) },
        );
        if sy == Ordering::Equal {
            sz
        } else if sz == Ordering::Equal || sy == sz {
            sy
        } else {
            match (y * y * p).cmp(&(z * z * q)) {
                Ordering::Equal => Ordering::Equal,
                Ordering::Greater => sy,
                Ordering::Less => sz,
            }
        }
    };
    let sx = sgn(x);
    if sl == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sl {
        return sl;
    }
    // Opposite signs: compare x^2 with L^2 = y^2 p + z^2 q + 2yz sqrt(pq).
    let u = x * x - y * y * p - z * z * q;
    let v = -(rat(2, 1) * y * z);
    match sign2(&u, &v, &(p * q)) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater => sx,
        Ordering::Less => sl,
    }
}

pub fn cmp_surd(s: &Surd, t: &Surd) -> Ordering {
    sign3(&(&s.a - &t.a), &s.b, &s.d, &(-&t.b), &t.d)
}

/// A rational strictly between `s < t`.
pub fn rational_between(s: &Surd, t: &Surd) -> Rational {
    debug_assert_eq!(cmp_surd(s, t), Ordering::Less);
    let mut bits = 32;
    loop {
        let (i, j) = (s.enclosure(bits), t.enclosure(bits));
        if i.hi < j.lo {
            return (i.hi + j.lo) / rat(2, 1);
        }
        bits *= 2;
    }
}

/// `c2 t^2 + c1 t + c0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadratic {
    pub c2: Rational,
    pub c1: Rational,
    pub c0: Rational,
}

impl Quadratic {
    pub fn new(c2: Rational, c1: Rational, c0: Rational) -> Self {
        Self { c2, c1, c0 }
    }

    pub fn is_zero(&self) -> bool {
        self.c2.is_zero() && self.c1.is_zero() && self.c0.is_zero()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        (&self.c2 * t + &self.c1) * t + &self.c0
    }

    /// Exact sign at a surd point.
    pub fn sign_at(&self, s: &Surd) -> Ordering {
        // s^2 = a^2 + b^2 d + 2ab sqrt(d).
        let (a, b, d) = (&s.a, &s.b, &s.d);
        let u = &self.c2 * (a * a + b * b * d) + &self.c1 * a + &self.c0;
        let v = &self.c2 * rat(2, 1) * a * b + &self.c1 * b;
        sign2(&u, &v, d)
    }

    /// Distinct real roots, ascending.
    pub fn roots(&self) -> Vec<Surd> {
        if self.c2.is_zero() {
            if self.c1.is_zero() {
                return Vec::new();
            }
            return vec![Surd::rational(-&self.c0 / &self.c1)];
        }
        let disc = &self.c1 * &self.c1 - rat(4, 1) * &self.c2 * &self.c0;
        let two_a = rat(2, 1) * &self.c2;
        let a = -&self.c1 / &two_a;
        match sgn(&disc) {
            Ordering::Less => Vec::new(),
            Ordering::Equal => vec![Surd::rational(a)],
            Ordering::Greater => {
                // (-c1 +- sqrt(disc)) / (2 c2); order by the sign of c2.
                let b = Rational::one() / two_a.abs();
                let lo = Surd::new(a.clone(), -b.clone(), disc.clone());
                let hi = Surd::new(a, b, disc);
                vec![lo, hi]
            }
        }
    }
}

/// A sign condition `q < 0`, `q <= 0` or `q = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Eq,
}

impl Rel {
    pub fn holds(self, s: Ordering) -> bool {
        match self {
            Rel::Lt => s == Ordering::Less,
            Rel::Le => s != Ordering::Greater,
            Rel::Eq => s == Ordering::Equal,
        }
    }
}

/// Sorted distinct union of the roots of all polynomials.
pub fn merged_roots<'a>(polys: impl Iterator<Item = &'a Quadratic>) -> Vec<Surd> {
    let mut all: Vec<Surd> = polys.flat_map(Quadratic::roots).collect();
    all.sort_by(cmp_surd);
    all.dedup_by(|x, y| cmp_surd(x, y) == Ordering::Equal);
    all
}

/// One sample in every cell of the line cut by `roots`: the roots themselves,
/// a rational between each consecutive pair, and one beyond each end.
pub fn cell_samples(roots: &[Surd]) -> Vec<Surd> {
    if roots.is_empty() {
        return vec![Surd::rational(Rational::zero())];
    }
    let mut out = Vec::with_capacity(2 * roots.len() + 1);
    let first = roots[0].enclosure(16).lo.floor() - Rational::one();
    out.push(Surd::rational(first));
    for (k, r) in roots.iter().enumerate() {
        out.push(r.clone());
        if let Some(next) = roots.get(k + 1) {
            out.push(Surd::rational(rational_between(r, next)));
        }
    }
    let last = roots[roots.len() - 1].enclosure(16).hi.ceil() + Rational::one();
    out.push(Surd::rational(last));
    out
}

/// Whether some real `t` satisfies every condition.
pub fn feasible_1d(conds: &[(Quadratic, Rel)]) -> bool {
    find_1d(conds).is_some()
}

/// A witness `t` satisfying every condition, if any.
pub fn find_1d(conds: &[(Quadratic, Rel)]) -> Option<Surd> {
    // Constant conditions decide immediately.
    let mut live = Vec::with_capacity(conds.len());
    for (q, r) in conds {
        if q.c2.is_zero() && q.c1.is_zero() {
            if !r.holds(sgn(&q.c0)) {
                return None;
            }
        } else {
            live.push((q, *r));
        }
    }
    let roots = merged_roots(live.iter().map(|(q, _)| *q));
    cell_samples(&roots)
        .into_iter()
        .find(|t| live.iter().all(|(q, r)| r.holds(q.sign_at(t))))
}

/// Convenience for tests: a big integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(a: Rational, b: Rational, d: i64) -> Surd {
        Surd::new(a, b, int(d))
    }

    #[test]
    fn surd_basics() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(s(int(1), int(1), 4).as_rational(), Some(&int(3)));
        // 1 - sqrt(3)/2 > 0, sqrt(2) + sqrt(3) vs sqrt(10).
        assert_eq!(s(int(1), rat(-1, 2), 3).sign(), Ordering::Greater);
        assert_eq!(sign3(&int(0), &int(1), &int(2), &int(1), &int(3)), Ordering::Greater);
        let r = sign3(&int(0), &int(1), &int(2), &int(-1), &int(3));
        assert_eq!(r, Ordering::Less);
        // sqrt(2) + sqrt(8) - sqrt(18) = 0.
        let t = sign3(&int(0), &int(1), &int(2), &int(1), &int(8));
        assert_eq!(t, Ordering::Greater);
        assert_eq!(
            cmp_surd(&s(int(0), int(1), 2), &s(int(0), rat(1, 2), 8)),
            Ordering::Equal
        );
    }

    #[test]
    fn quadratic_roots() {
        // t^2 - 2 has roots -sqrt 2 < sqrt 2.
        let q = Quadratic::new(int(1), int(0), int(-2));
        let r = q.roots();
        assert_eq!(r.len(), 2);
        assert_eq!(cmp_surd(&r[0], &r[1]), Ordering::Less);
        assert!(r.iter().all(|x| q.sign_at(x) == Ordering::Equal));
        // Negative leading coefficient keeps ascending order.
        let q = Quadratic::new(int(-1), int(0), int(2));
        let r = q.roots();
        assert_eq!(cmp_surd(&r[0], &r[1]), Ordering::Less);
        assert!(Quadratic::new(int(1), int(0), int(1)).roots().is_empty());
    }

    #[test]
    fn one_dimensional_feasibility() {
        let q = |a: i64, b: i64, c: i64| Quadratic::new(int(a), int(b), int(c));
        // t^2 < 2 and t >= 1 and t^2 - 3 <= 0.
        assert!(feasible_1d(&[(q(1, 0, -2), Rel::Lt), (q(0, -1, 1), Rel::Le)]));
        // t^2 <= 0 and t > 0: infeasible.
        assert!(!feasible_1d(&[(q(1, 0, 0), Rel::Le), (q(0, -1, 0), Rel::Lt)]));
        // t^2 = 2 and t > 1: the witness is sqrt 2.
        let w = find_1d(&[(q(1, 0, -2), Rel::Eq), (q(0, -1, 1), Rel::Lt)]).unwrap();
        assert_eq!(cmp_surd(&w, &s(int(0), int(1), 2)), Ordering::Equal);
        assert!(!feasible_1d(&[(q(0, 0, 1), Rel::Le)]));
        assert!(feasible_1d(&[]));
    }

    proptest! {
        #[test]
        fn surd_order_matches_floats(a in -20i64..20, b in -20i64..20, d in 0i64..30,
                                     c in -20i64..20, e in -20i64..20, f in 0i64..30) {
            let x = s(int(a), rat(b, 3), d);
            let y = s(int(c), rat(e, 5), f);
            let (fx, fy) = (x.to_f64(), y.to_f64());
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(cmp_surd(&x, &y), fx.partial_cmp(&fy).unwrap());
            }
            if cmp_surd(&x, &y) == Ordering::Less {
                let m = Surd::rational(rational_between(&x, &y));
                prop_assert_eq!(cmp_surd(&x, &m), Ordering::Less);
                prop_assert_eq!(cmp_surd(&m, &y), Ordering::Less);
            }
        }
    }
}
