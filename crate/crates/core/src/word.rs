//! Words over the HCF alphabet, their Q-pairs and Möbius maps.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianInt, GaussianRational};
use crate::interval::ComplexBox;

/// A finite word `(a_1, ..., a_n)` with every `norm(a_k) >= 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<GaussianInt>);

pub type PartialQuotientSeq = Word;

fn check_letter(a: &GaussianInt) -> Result<()> {
    if a.norm() < BigInt::from(2) {
        Err(Error::InvalidQuotient(a.clone()))
    } else {
        Ok(())
    }
}

impl Word {
    pub fn new(items: Vec<GaussianInt>) -> Result<Self> {
        items.iter().try_for_each(check_letter)?;
        Ok(Self(items))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Shorthand for tests and tables: `Word::from_pairs(&[(3, 0), (0, -2)])`.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(r, i)| GaussianInt::new(r, i)).collect())
    }

    pub fn items(&self) -> &[GaussianInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&GaussianInt> {
        self.0.last()
    }

    pub fn push(&mut self, a: GaussianInt) -> Result<()> {
        check_letter(&a)?;
        self.0.push(a);
        Ok(())
    }

    pub fn with(&self, a: GaussianInt) -> Result<Self> {
        let mut w = self.clone();
        w.push(a)?;
        Ok(w)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn prefix(&self, n: usize) -> Self {
        Self(self.0[..n.min(self.len())].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> Self {
        Self(self.0[n.min(self.len())..].to_vec())
    }

    /// `u^-`: the word with its last letter removed.
    pub fn without_last(&self) -> Self {
        self.prefix(self.len().saturating_sub(1))
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().cloned().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("word must be bracketed: '{s}'")))?;
        if inner.trim().is_empty() {
            return Ok(Self::empty());
        }
        let items = inner
            .split(',')
            .map(str::parse::<GaussianInt>)
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A 2x2 matrix over `Z[i]`, `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: GaussianInt,
    pub b: GaussianInt,
    pub c: GaussianInt,
    pub d: GaussianInt,
}

impl Mat2 {
    pub fn new(a: GaussianInt, b: GaussianInt, c: GaussianInt, d: GaussianInt) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(
            GaussianInt::one(),
            GaussianInt::zero(),
            GaussianInt::zero(),
            GaussianInt::one(),
        )
    }

    /// `[[0, 1], [1, 0]]`.
    pub fn swap() -> Self {
        Self::new(
            GaussianInt::zero(),
            GaussianInt::one(),
            GaussianInt::one(),
            GaussianInt::zero(),
        )
    }

    /// `[[a, 1], [1, 0]]`.
    pub fn letter(a: &GaussianInt) -> Self {
        Self::new(a.clone(), GaussianInt::one(), GaussianInt::one(), GaussianInt::zero())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc.mul(self))
    }

    pub fn det(&self) -> GaussianInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// `z -> (a z + b) / (c z + d)` on an exact point.
    pub fn apply(&self, z: &GaussianRational) -> Result<GaussianRational> {
        let az = &GaussianRational::from(self.a.clone()) * z;
        let cz = &GaussianRational::from(self.c.clone()) * z;
        let num = &az + &GaussianRational::from(self.b.clone());
        let den = &cz + &GaussianRational::from(self.d.clone());
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        num.checked_div(&den)
    }

    pub fn apply_box(&self, z: &ComplexBox) -> Result<ComplexBox> {
        let g = |x: &GaussianInt| GaussianRational::from(x.clone());
        let num = z.mul_exact(&g(&self.a)).add_exact(&g(&self.b));
        let den = z.mul_exact(&g(&self.c)).add_exact(&g(&self.d));
        num.div(&den)
    }

    /// The adjugate, which induces the inverse Möbius map.
    pub fn adjugate(&self) -> Self {
        Self::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `(p(u), q(u), p(u^-), q(u^-))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPair {
    pub p: GaussianInt,
    pub q: GaussianInt,
    pub p_minus: GaussianInt,
    pub q_minus: GaussianInt,
}

impl QPair {
    /// `[[p, p^-], [q, q^-]]`.
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(
            self.p.clone(),
            self.p_minus.clone(),
            self.q.clone(),
            self.q_minus.clone(),
        )
    }

    pub fn from_matrix(m: &Mat2) -> Self {
        Self {
            p: m.a.clone(),
            p_minus: m.b.clone(),
            q: m.c.clone(),
            q_minus: m.d.clone(),
        }
    }

    /// `q p^- - q^- p`.
    pub fn determinant(&self) -> GaussianInt {
        &self.q * &self.p_minus - &self.q_minus * &self.p
    }

    pub fn value(&self) -> Result<GaussianRational> {
        if self.q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        GaussianRational::new(self.p.clone(), self.q.clone())
    }

    /// The Möbius map `T_u(z) = (p^- z + p) / (q^- z + q)`.
    pub fn mobius(&self) -> Mat2 {
        Mat2::new(
            self.p_minus.clone(),
            self.p.clone(),
            self.q_minus.clone(),
            self.q.clone(),
        )
    }
}

/// Q-pair by the three-term recursion.
pub fn qpair(w: &Word) -> QPair {
    let (mut p_minus, mut p) = (GaussianInt::one(), GaussianInt::zero());
    let (mut q_minus, mut q) = (GaussianInt::zero(), GaussianInt::one());
    for a in w.items() {
        let np = a * &p + &p_minus;
        let nq = a * &q + &q_minus;
        p_minus = std::mem::replace(&mut p, np);
        q_minus = std::mem::replace(&mut q, nq);
    }
    QPair { p, q, p_minus, q_minus }
}

/// Q-pair as the product `[[0,1],[1,0]] * prod [[a_j,1],[1,0]]`.
pub fn qpair_matrix(w: &Word) -> QPair {
    let m = w.items().iter().fold(Mat2::swap(), |acc, a| acc.mul(&Mat2::letter(a)));
    QPair::from_matrix(&m)
}

/// `[0; a_1, ..., a_n] = p(u) / q(u)`.
pub fn evaluate(w: &Word) -> Result<GaussianRational> {
    qpair(w).value()
}

pub fn mobius_apply(w: &Word, z: &GaussianRational) -> Result<GaussianRational> {
    qpair(w).mobius().apply(z)
}

pub fn mobius_apply_box(w: &Word, z: &ComplexBox) -> Result<ComplexBox> {
    qpair(w).mobius().apply_box(z)
}

fn repeat_block(head: &[(i64, i64)], block: &[(i64, i64)], k: usize) -> Word {
    let mut v: Vec<(i64, i64)> = head.to_vec();
    for _ in 0..k {
        v.extend_from_slice(block);
    }
    Word::from_pairs(&v).expect("letters have norm >= 2")
}

/// `(3, -2i)` followed by `k` copies of `(-2, 2i, -2, -2i)`.
pub fn make_vk(k: usize) -> Word {
    repeat_block(&[(3, 0), (0, -2)], &[(-2, 0), (0, 2), (-2, 0), (0, -2)], k)
}

/// `(3+i, 2i)` followed by `k` copies of `(-2+i, 2i, -2+i, 2i)`.
pub fn make_vk_tilde(k: usize) -> Word {
    repeat_block(&[(3, 1), (0, 2)], &[(-2, 1), (0, 2), (-2, 1), (0, 2)], k)
}

/// `[[17+4i, -4+8i], [-8, 1-4i]]`, the matrix of the block `(-2, 2i, -2, -2i)`.
pub fn stk_block() -> Mat2 {
    Mat2::new(
        GaussianInt::new(17, 4),
        GaussianInt::new(-4, 8),
        GaussianInt::new(-8, 0),
        GaussianInt::new(1, -4),
    )
}

/// `[[s_k, s_k^-], [t_k, t_k^-]] = [[1, 0], [-2i, 1]] * M^k`.
pub fn stk_matrix_power(k: u32) -> Mat2 {
    let pre = Mat2::new(
        GaussianInt::one(),
        GaussianInt::zero(),
        GaussianInt::new(0, -2),
        GaussianInt::one(),
    );
    pre.mul(&stk_block().pow(k))
}

/// `(-1)^n` as a Gaussian integer.
pub fn sign_pow(n: usize) -> GaussianInt {
    if n.is_multiple_of(2) {
        GaussianInt::one()
    } else {
        GaussianInt::new(-BigInt::one(), 0)
    }
}
