//! Region areas: closed forms for the canonical classes, Monte Carlo otherwise.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::classify::{classify, PrototypeClass};
use super::form::Constraint;
use super::region::Region;
use crate::algebraic::{rational_sqrt, Rel};
use crate::error::{Error, Result};
use crate::gaussian::{rat, Rational};
use crate::interval::{sqrt_ceil, sqrt_floor, Interval};

/// `rational + pi_coeff * π + sqrt3_coeff * √3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactArea {
    pub rational: Rational,
    pub pi_coeff: Rational,
    pub sqrt3_coeff: Rational,
}

fn pi_enclosure() -> Interval {
    let digits: BigInt = "314159265358979323846264338327950288".parse().expect("digits");
    let scale = BigInt::from(10u32).pow(35);
    let lo = Rational::new(digits.clone(), scale.clone());
    let hi = Rational::new(digits + 1, scale);
    Interval::new(lo, hi)
}

impl ExactArea {
    pub fn rational(r: Rational) -> Self {
        Self {
            rational: r,
            pi_coeff: Rational::zero(),
            sqrt3_coeff: Rational::zero(),
        }
    }

    /// Rigorous enclosure of the value.
    pub fn enclosure(&self) -> Interval {
        let three = rat(3, 1);
        let s3 = Interval::new(sqrt_floor(&three, 128), sqrt_ceil(&three, 128));
        Interval::point(self.rational.clone())
            .add(&pi_enclosure().scale(&self.pi_coeff))
            .add(&s3.scale(&self.sqrt3_coeff))
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure().to_f64_mid()
    }

    pub fn for_class(c: PrototypeClass) -> Self {
        let mk = |r: Rational, p: Rational, s: Rational| Self {
            rational: r,
            pi_coeff: p,
            sqrt3_coeff: s,
        };
        match c {
            PrototypeClass::Full | PrototypeClass::RegularSquare => Self::rational(rat(1, 1)),
            PrototypeClass::Irregular => Self::rational(rat(0, 1)),
            // Square minus the lens cut by B(1,1).
            PrototypeClass::Regular { k: 2, .. } => mk(rat(3, 2), rat(-1, 6), rat(-1, 4)),
            // Square minus the two lenses; they overlap in a curved triangle.
            PrototypeClass::Regular { k: 1, .. } => mk(rat(5, 4), rat(-1, 6), rat(-1, 4)),
            // Square minus the corner cut by B(1+i,1).
            PrototypeClass::Regular { .. } => mk(rat(3, 4), rat(-1, 12), rat(1, 4)),
        }
    }
}

impl fmt::Display for ExactArea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = self.rational.to_string();
        for (c, name) in [(&self.pi_coeff, "π"), (&self.sqrt3_coeff, "√3")] {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { " - " } else { " + " };
            let m = c.abs();
            let body = if m == rat(1, 1) {
                name.to_string()
            } else if m.denom() == &BigInt::from(1) {
                format!("{}{name}", m.numer())
            } else if m.numer() == &BigInt::from(1) {
                format!("{name}/{}", m.denom())
            } else {
                format!("{}{name}/{}", m.numer(), m.denom())
            };
            s.push_str(sign);
            s.push_str(&body);
        }
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AreaMethod {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct AreaReport {
    pub method: String,
    pub value: f64,
    /// Rigorous in exact mode; 99% Hoeffding confidence otherwise.
    pub error_bound: f64,
    pub closed_form: Option<String>,
    pub samples: Option<u64>,
    pub hits: Option<u64>,
}

pub fn region_area(r: &Region, method: AreaMethod) -> Result<AreaReport> {
    match method {
        AreaMethod::Exact => {
            let class = classify(r)?;
            let a = ExactArea::for_class(class);
            let e = a.enclosure();
            Ok(AreaReport {
                method: "exact".into(),
                value: a.to_f64(),
                error_bound: e.width().to_f64().unwrap_or(0.0) / 2.0,
                closed_form: Some(a.to_string()),
                samples: None,
                hits: None,
            })
        }
        AreaMethod::MonteCarlo { samples, seed } => Ok(montecarlo_area(r, samples, seed)),
    }
}

/// Sampling box: the closed unit square cut down by any enclosing disks.
/// Regions are assumed to lie in the closed unit square.
fn bounding_box(r: &Region) -> (Rational, Rational, Rational, Rational) {
    let h = rat(1, 2);
    let (mut x0, mut x1, mut y0, mut y1) = (-&h, h.clone(), -&h, h);
    for c in r.constraints() {
        let f = &c.form;
        if !f.is_circle() || !f.a.is_positive() {
            continue;
        }
        let Some(rad) = rational_sqrt(&f.radius_sq()) else {
            continue;
        };
        let (cx, cy) = f.center();
        x0 = x0.max(&cx - &rad);
        x1 = x1.min(&cx + &rad);
        y0 = y0.max(&cy - &rad);
        y1 = y1.min(&cy + &rad);
    }
    (x0, x1, y0, y1)
}

/// A constraint pulled back to grid coordinates `(u, v)` with
/// `x = x0 + w u / 2^32`, `y = y0 + h v / 2^32`, scaled to integer
/// coefficients of `u^2, v^2, u, v, 1`.
enum GridConstraint {
    Small([i128; 5], Rel),
    Big([BigInt; 5], Rel),
}

impl GridConstraint {
    fn new(c: &Constraint, x0: &Rational, y0: &Rational, w: &Rational, h: &Rational) -> Self {
        let f = &c.form;
        let s = Rational::from_integer(BigInt::from(1u64) << 32);
        let (ws, hs) = (w / &s, h / &s);
        let two = rat(2, 1);
        let coefs = [
            &f.a * &ws * &ws,
            &f.a * &hs * &hs,
            (&two * &f.a * x0 + &f.b) * &ws,
            (&two * &f.a * y0 + &f.c) * &hs,
            f.eval(x0, y0),
        ];
        let l = coefs.iter().fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()));
        let ints: [BigInt; 5] = coefs.map(|q| (q * Rational::from_integer(l.clone())).to_integer());
        let limit = BigInt::from(1u64) << 60;
        if ints.iter().all(|x| x.abs() < limit) {
            Self::Small(ints.map(|x| x.to_i128().expect("bounded")), c.rel)
        } else {
            Self::Big(ints, c.rel)
        }
    }

    fn holds(&self, u: u32, v: u32) -> bool {
        match self {
            Self::Small(k, rel) => {
                let (u, v) = (u as i128, v as i128);
                let val = k[0] * u * u + k[1] * v * v + k[2] * u + k[3] * v + k[4];
                rel.holds(val.cmp(&0))
            }
            Self::Big(k, rel) => {
                let (u, v) = (BigInt::from(u), BigInt::from(v));
                let val = &k[0] * &u * &u + &k[1] * &v * &v + &k[2] * &u + &k[3] * &v + &k[4];
                rel.holds(val.sign().cmp(&num_bigint::Sign::NoSign))
            }
        }
    }
}

/// Uniform dyadic sampling of the bounding box with a seeded ChaCha stream.
pub fn montecarlo_area(r: &Region, samples: u64, seed: u64) -> AreaReport {
    let (x0, x1, y0, y1) = bounding_box(r);
    let (w, h) = (&x1 - &x0, &y1 - &y0);
    let box_area = if w.is_positive() && h.is_positive() {
        (&w * &h).to_f64().unwrap_or(0.0)
    } else {
        0.0
    };
    const CHUNK: u64 = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = if box_area == 0.0 || r.is_empty() {
        0
    } else {
        let grid: Vec<GridConstraint> = r
            .constraints()
            .iter()
            .map(|c| GridConstraint::new(c, &x0, &y0, &w, &h))
            .collect();
        (0..chunks)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k);
                let n = CHUNK.min(samples - k * CHUNK);
                (0..n)
                    .filter(|_| {
                        let (u, v) = (rng.gen::<u32>(), rng.gen::<u32>());
                        grid.iter().all(|g| g.holds(u, v))
                    })
                    .count() as u64
            })
            .sum()
    };
    let n = samples.max(1) as f64;
    AreaReport {
        method: "montecarlo".into(),
        value: box_area * hits as f64 / n,
        error_bound: box_area * ((200.0f64).ln() / (2.0 * n)).sqrt(),
        closed_form: None,
        samples: Some(samples),
        hits: Some(hits),
    }
}

pub fn exact_area_of(r: &Region) -> Result<ExactArea> {
    if !r.is_within_d() {
        return Err(Error::Precondition("exact area needs a prototype region".into()));
    }
    Ok(ExactArea::for_class(classify(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::classify::canonical_region;

    #[test]
    fn closed_forms() {
        let g2 = ExactArea::for_class(PrototypeClass::Regular { j: 0, k: 2 });
        assert!((g2.to_f64() - 0.543_388).abs() < 1e-5);
        assert_eq!(g2.to_string(), "3/2 - π/6 - √3/4");
        let g1 = ExactArea::for_class(PrototypeClass::Regular { j: 0, k: 1 });
        assert!((g1.to_f64() - 0.293_388).abs() < 1e-5);
        let g3 = ExactArea::for_class(PrototypeClass::Regular { j: 2, k: 3 });
        assert!((g3.to_f64() - 0.921_213).abs() < 1e-5);
        assert!(g3.enclosure().width() < rat(1, 1 << 30));
    }

    #[test]
    fn montecarlo_agrees_with_closed_forms() {
        for k in 1..=3 {
            let r = canonical_region(1, k);
            let exact = region_area(&r, AreaMethod::Exact).unwrap();
            let mc = region_area(
                &r,
                AreaMethod::MonteCarlo {
                    samples: 20_000,
                    seed: 7,
                },
            )
            .unwrap();
            assert!(
                (exact.value - mc.value).abs() <= mc.error_bound,
                "k={k}: {} vs {} ± {}",
                exact.value,
                mc.value,
                mc.error_bound
            );
        }
    }

    #[test]
    fn montecarlo_is_deterministic() {
        let r = canonical_region(0, 1);
        let a = montecarlo_area(&r, 5000, 11);
        let b = montecarlo_area(&r, 5000, 11);
        assert_eq!(a.hits, b.hits);
        assert_eq!(montecarlo_area(&Region::unit_cell(), 1000, 1).value, 1.0);
    }
}
