//! Generalized circles as real quadratic forms
//! `f(z) = a|z|^2 + b Re z + c Im z + d`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebraic::{rational_sqrt, Rel};
use crate::error::{Error, Result};
use crate::gaussian::{rat, GaussianInt, GaussianRational, Rational};
use crate::word::Mat2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

fn sgn(x: &Rational) -> Ordering {
    x.cmp(&Rational::zero())
}

impl Form {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Self { a, b, c, d }
    }

    /// `|z - center|^2 - radius_sq`.
    pub fn circle(center: &GaussianRational, radius_sq: Rational) -> Self {
        let (cx, cy) = center.parts();
        let two = rat(2, 1);
        Self::new(
            Rational::one(),
            -&two * &cx,
            -&two * &cy,
            &cx * &cx + &cy * &cy - radius_sq,
        )
    }

    /// `b x + c y + d`.
    pub fn line(b: Rational, c: Rational, d: Rational) -> Self {
        Self::new(Rational::zero(), b, c, d)
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        &self.a * (x * x + y * y) + &self.b * x + &self.c * y + &self.d
    }

    pub fn eval_point(&self, z: &GaussianRational) -> Rational {
        let (x, y) = z.parts();
        self.eval(&x, &y)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.a * k, &self.b * k, &self.c * k, &self.d * k)
    }

    pub fn is_circle(&self) -> bool {
        !self.a.is_zero()
    }

    pub fn is_line(&self) -> bool {
        self.a.is_zero() && !(self.b.is_zero() && self.c.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    /// Center of a circle form.
    pub fn center(&self) -> (Rational, Rational) {
        let two_a = rat(2, 1) * &self.a;
        (-&self.b / &two_a, -&self.c / &two_a)
    }

    pub fn center_point(&self) -> GaussianRational {
        let (x, y) = self.center();
        GaussianRational::from_parts(&x, &y)
    }

    /// Squared radius of a circle form; may be zero or negative.
    pub fn radius_sq(&self) -> Rational {
        let (cx, cy) = self.center();
        &cx * &cx + &cy * &cy - &self.d / &self.a
    }

    /// The coefficient that fixes the scale: `a`, else the first nonzero of `b, c`, else `d`.
    pub fn leading(&self) -> &Rational {
        [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|x| !x.is_zero())
            .unwrap_or(&self.d)
    }

    /// Positive rescaling with `|leading| = 1`.
    pub fn normalize_positive(&self) -> Self {
        let l = self.leading().abs();
        if l.is_zero() {
            return self.clone();
        }
        self.scale(&l.recip())
    }

    /// Rescaling with `leading = 1`, and the sign that was divided out.
    pub fn locus_key(&self) -> (Self, Ordering) {
        let l = self.leading().clone();
        if l.is_zero() {
            return (self.clone(), Ordering::Equal);
        }
        (self.scale(&l.recip()), sgn(&l))
    }

    /// The form of the pullback `{w : m(w) in {f rel 0}}` up to a positive factor.
    ///
    /// With `H = [[a, E], [conj E, d]]`, `E = (b + ic)/2`, the pullback is `M* H M`.
    pub fn pullback(&self, m: &Mat2) -> Self {
        let g = |x: &GaussianInt| GaussianRational::from(x.clone());
        let (al, be, ga, de) = (g(&m.a), g(&m.b), g(&m.c), g(&m.d));
        let e = GaussianRational::from_parts(&(&self.b / rat(2, 1)), &(&self.c / rat(2, 1)));
        let ec = e.conj();
        let real = |x: &Rational| GaussianRational::from_parts(x, &Rational::zero());
        let (a, d) = (real(&self.a), real(&self.d));
        // H' = M* H M, entry by entry.
        let h11 = &(&(&a * &(&al.conj() * &al)) + &(&(&al.conj() * &e) * &ga))
            + &(&(&(&ga.conj() * &ec) * &al) + &(&d * &(&ga.conj() * &ga)));
        let h12 = &(&(&a * &(&al.conj() * &be)) + &(&(&al.conj() * &e) * &de))
            + &(&(&(&ga.conj() * &ec) * &be) + &(&d * &(&ga.conj() * &de)));
        let h22 = &(&(&a * &(&be.conj() * &be)) + &(&(&be.conj() * &e) * &de))
            + &(&(&(&de.conj() * &ec) * &be) + &(&d * &(&de.conj() * &de)));
        let (er, ei) = h12.parts();
        Self::new(h11.re(), rat(2, 1) * er, rat(2, 1) * ei, h22.re())
    }

    /// Whether the locus `f = 0` meets the closed square `[-1/2, 1/2]^2`.
    pub fn locus_meets_closed_square(&self) -> bool {
        let h = rat(1, 2);
        let corners = [(-&h, -&h), (-&h, h.clone()), (h.clone(), -&h), (h.clone(), h.clone())];
        if self.is_circle() {
            let rho = self.radius_sq();
            if rho.is_negative() {
                return false;
            }
            let (cx, cy) = self.center();
            let clamp = |v: &Rational| v.clone().max(-&h).min(h.clone());
            let (nx, ny) = (clamp(&cx), clamp(&cy));
            let min_d = (&nx - &cx) * (&nx - &cx) + (&ny - &cy) * (&ny - &cy);
            let max_d = corners
                .iter()
                .map(|(x, y)| (x - &cx) * (x - &cx) + (y - &cy) * (y - &cy))
                .max()
                .expect("four corners");
            min_d <= rho && rho <= max_d
        } else if self.is_line() {
            let vals: Vec<Rational> = corners.iter().map(|(x, y)| self.eval(x, y)).collect();
            let lo = vals.iter().min().expect("four corners");
            let hi = vals.iter().max().expect("four corners");
            !lo.is_positive() && !hi.is_negative()
        } else {
            self.d.is_zero()
        }
    }
}

/// `f rel 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub form: Form,
    pub rel: Rel,
}

#[allow(clippy::large_enum_variant)]
pub enum Normalized {
    True,
    False,
    Keep(Constraint),
}

impl Constraint {
    pub fn new(form: Form, rel: Rel) -> Self {
        Self { form, rel }
    }

    pub fn holds_at(&self, x: &Rational, y: &Rational) -> bool {
        self.rel.holds(sgn(&self.form.eval(x, y)))
    }

    /// The open version `f < 0`.
    pub fn strict(&self) -> Self {
        Self::new(self.form.clone(), Rel::Lt)
    }

    /// Canonical scaling; constant constraints collapse to `True`/`False`.
    pub fn normalized(&self) -> Normalized {
        let f = &self.form;
        let constant_sign = if f.is_constant() {
            Some(sgn(&f.d))
        } else if f.is_circle() && f.radius_sq().is_negative() {
            // a(|z - c|^2 - rho) with rho < 0 has the sign of a everywhere.
            Some(sgn(&f.a))
        } else {
            None
        };
        if let Some(s) = constant_sign {
            return if self.rel.holds(s) {
                Normalized::True
            } else {
                Normalized::False
            };
        }
        let form = match self.rel {
            Rel::Eq => f.locus_key().0,
            _ => f.normalize_positive(),
        };
        Normalized::Keep(Self::new(form, self.rel))
    }

    /// `(locus key, side, boundary included)`; side is `Less` for inside.
    pub fn geometry(&self) -> (Form, Side) {
        let (key, s) = self.form.locus_key();
        let side = match (self.rel, s) {
            (Rel::Eq, _) => Side::On,
            (_, Ordering::Less) => Side::Outside,
            _ => Side::Inside,
        };
        (key, side)
    }

    pub fn boundary(&self) -> Boundary {
        if self.rel == Rel::Lt {
            Boundary::Excluded
        } else {
            Boundary::Included
        }
    }

    /// Constraints whose union is the complement of this one.
    pub fn negation(&self) -> Vec<Constraint> {
        match self.rel {
            Rel::Lt => vec![Self::new(self.form.neg(), Rel::Le)],
            Rel::Le => vec![Self::new(self.form.neg(), Rel::Lt)],
            Rel::Eq => vec![
                Self::new(self.form.clone(), Rel::Lt),
                Self::new(self.form.neg(), Rel::Lt),
            ],
        }
    }

    pub fn record(&self) -> ConstraintRecord {
        let (key, side) = self.geometry();
        let params = if key.is_circle() {
            let (cx, cy) = key.center();
            ConstraintParams::Circle {
                center_re: cx.to_string(),
                center_im: cy.to_string(),
                radius_sq: key.radius_sq().to_string(),
            }
        } else {
            ConstraintParams::Line {
                a: key.b.to_string(),
                b: key.c.to_string(),
                c: (-&key.d).to_string(),
            }
        };
        ConstraintRecord {
            params,
            side,
            boundary: self.boundary(),
        }
    }

    pub fn from_record(r: &ConstraintRecord) -> Result<Self> {
        let p = |s: &str| -> Result<Rational> {
            let s = s.trim();
            if s.len() > 4096 {
                return Err(Error::Parse("rational literal too long".into()));
            }
            s.parse::<Rational>()
                .map_err(|_| Error::Parse(format!("bad rational '{s}'")))
        };
        let key = match &r.params {
            ConstraintParams::Circle {
                center_re,
                center_im,
                radius_sq,
            } => {
                let rho = p(radius_sq)?;
                if !rho.is_positive() || rational_sqrt(&rho).is_none() {
                    return Err(Error::Parse(
                        "radius_sq must be the square of a positive rational".into(),
                    ));
                }
                Form::circle(&GaussianRational::from_parts(&p(center_re)?, &p(center_im)?), rho)
            }
            ConstraintParams::Line { a, b, c } => {
                let (a, b) = (p(a)?, p(b)?);
                if a.is_zero() && b.is_zero() {
                    return Err(Error::Parse("line needs (a, b) != (0, 0)".into()));
                }
                Form::line(a, b, -p(c)?)
            }
        };
        let (form, rel) = match (r.side, r.boundary) {
            (Side::On, Boundary::Included) => (key, Rel::Eq),
            (Side::On, Boundary::Excluded) => {
                return Err(Error::Parse("an 'on' constraint must include its boundary".into()))
            }
            (Side::Inside, Boundary::Excluded) => (key, Rel::Lt),
            (Side::Inside, Boundary::Included) => (key, Rel::Le),
            (Side::Outside, Boundary::Excluded) => (key.neg(), Rel::Lt),
            (Side::Outside, Boundary::Included) => (key.neg(), Rel::Le),
        };
        Ok(Self::new(form, rel))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Inside,
    Outside,
    On,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Included,
    Excluded,
}

/// Circle `|z - center|^2 = radius_sq`, or line `a x + b y = c`; inside of a
/// line means `a x + b y < c` for the stored orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintParams {
    Circle {
        center_re: String,
        center_im: String,
        radius_sq: String,
    },
    Line {
        a: String,
        b: String,
        c: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintRecord {
    #[serde(flatten)]
    pub params: ConstraintParams,
    pub side: Side,
    pub boundary: Boundary,
}

pub(crate) fn fmt_point(x: &Rational, y: &Rational) -> String {
    let g = GaussianRational::from_parts(x, y);
    if g.is_integer() {
        return g.num().to_string();
    }
    let im = if y.is_zero() {
        String::new()
    } else if x.is_zero() {
        format!("{y}i")
    } else if y.is_negative() {
        format!("-{}i", -y)
    } else {
        format!("+{y}i")
    };
    if x.is_zero() {
        im
    } else {
        format!("{x}{im}")
    }
}

fn fmt_radius(rho: &Rational) -> String {
    match rational_sqrt(rho) {
        Some(r) => r.to_string(),
        None => format!("sqrt({rho})"),
    }
}

fn fmt_line(key: &Form, op: &str) -> String {
    // key: b x + c y + d with leading coefficient 1.
    if key.c.is_zero() {
        return format!("Re z {op} {}", -&key.d / &key.b);
    }
    if key.b.is_zero() {
        return format!("Im z {op} {}", -&key.d / &key.c);
    }
    format!("{} Re z + {} Im z {op} {}", key.b, key.c, -&key.d)
}

impl fmt::Display for Constraint {
    /// Set-builder text such as `|z-i| > 1` or `Im z >= -1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (key, side) = self.geometry();
        let op = match (side, self.rel) {
            (Side::On, _) => "=",
            (Side::Inside, Rel::Lt) => "<",
            (Side::Inside, _) => "<=",
            (Side::Outside, Rel::Lt) => ">",
            (Side::Outside, _) => ">=",
        };
        if key.is_circle() {
            let (cx, cy) = key.center();
            let c = fmt_point(&cx, &cy);
            let lhs = if c == "0" {
                "|z|".to_string()
            } else {
                format!("|z-({c})|")
            };
            write!(f, "{lhs} {op} {}", fmt_radius(&key.radius_sq()))
        } else {
            write!(f, "{}", fmt_line(&key, op))
        }
    }
}

impl Constraint {
    /// Relative to `D`: `\ closedB(c,r)`, `∩ B(c,r)`, `∩ {Im z > -1/2}` ...
    pub fn d_relative_text(&self) -> String {
        let (key, side) = self.geometry();
        if key.is_circle() {
            let (cx, cy) = key.center();
            let disk = format!("{}({},{})", "B", fmt_point(&cx, &cy), fmt_radius(&key.radius_sq()));
            return match (side, self.rel) {
                (Side::Outside, Rel::Lt) => format!(" \\ closed{disk}"),
                (Side::Outside, _) => format!(" \\ {disk}"),
                (Side::Inside, Rel::Lt) => format!(" ∩ {disk}"),
                (Side::Inside, _) => format!(" ∩ closed{disk}"),
                (Side::On, _) => format!(" ∩ {{{self}}}"),
            };
        }
        format!(" ∩ {{{self}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn inversion_examples() {
        let inv = Mat2::swap();
        // Im z = 1/2 inverts to |z + i| = 1.
        let l = Form::line(rat(0, 1), rat(1, 1), rat(-1, 2));
        let c = l.pullback(&inv).locus_key().0;
        assert_eq!(c, Form::circle(&q("-i"), rat(1, 1)));
        // Re z = -1/2 inverts to |z + 1| = 1.
        let l = Form::line(rat(1, 1), rat(0, 1), rat(1, 2));
        assert_eq!(l.pullback(&inv).locus_key().0, Form::circle(&q("-1"), rat(1, 1)));
        // |z - 3| = 1 inverts to center 3/8, radius^2 1/64.
        let c = Form::circle(&q("3"), rat(1, 1)).pullback(&inv).locus_key().0;
        assert_eq!(c.center_point(), q("3/8"));
        assert_eq!(c.radius_sq(), rat(1, 64));
        for p in ["2", "4", "3+i"] {
            let z = q(p);
            let w = z.recip().unwrap();
            assert_eq!(c.eval_point(&w), rat(0, 1));
        }
    }

    #[test]
    fn general_inversion_formula() {
        // center' = conj(c)/(|c|^2 - rho), rho' = rho/(|c|^2 - rho)^2.
        let c0 = q("2-i");
        let rho = rat(3, 2);
        let f = Form::circle(&c0, rho.clone()).pullback(&Mat2::swap()).locus_key().0;
        let k = c0.norm() - &rho;
        let expected = c0
            .conj()
            .checked_div(&GaussianRational::from_parts(&k, &rat(0, 1)))
            .unwrap();
        assert_eq!(f.center_point(), expected);
        assert_eq!(f.radius_sq(), &rho / (&k * &k));
    }

    #[test]
    fn translation_pullback() {
        // {w : w - 2 in B(-1,1)} = B(1,1).
        let m = Mat2::new(
            GaussianInt::one(),
            GaussianInt::new(-2, 0),
            GaussianInt::zero(),
            GaussianInt::one(),
        );
        let f = Form::circle(&q("-1"), rat(1, 1)).pullback(&m);
        assert_eq!(f, Form::circle(&q("1"), rat(1, 1)));
    }

    #[test]
    fn square_meeting() {
        assert!(Form::circle(&q("1"), rat(1, 1)).locus_meets_closed_square());
        assert!(!Form::circle(&q("3"), rat(1, 1)).locus_meets_closed_square());
        assert!(Form::circle(&q("0"), rat(1, 100)).locus_meets_closed_square());
        assert!(!Form::circle(&q("0"), rat(4, 1)).locus_meets_closed_square());
        assert!(Form::line(rat(1, 1), rat(0, 1), rat(1, 2)).locus_meets_closed_square());
        assert!(!Form::line(rat(1, 1), rat(0, 1), rat(1, 1)).locus_meets_closed_square());
    }

    #[test]
    fn text_forms() {
        let c = Constraint::new(Form::circle(&q("i"), rat(1, 1)).neg(), Rel::Lt);
        assert_eq!(c.to_string(), "|z-(i)| > 1");
        assert_eq!(c.d_relative_text(), " \\ closedB(i,1)");
        let l = Constraint::new(Form::line(rat(0, 1), rat(-1, 1), rat(-1, 2)), Rel::Lt);
        assert_eq!(l.to_string(), "Im z > -1/2");
        let r = c.record();
        assert_eq!(Constraint::from_record(&r).unwrap(), c);
    }
}
