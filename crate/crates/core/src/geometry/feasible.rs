//! Exact satisfiability of finite systems `f_k rel_k 0` in the plane.
//!
//! Points on a curve are handled by a rational parameterization, which turns
//! every other constraint into a univariate quadratic. Open systems are swept
//! in `x` between the critical abscissas (tangencies and pairwise crossings).

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::form::{Constraint, Form, Normalized};
use crate::algebraic::{cell_samples, cmp_surd, find_1d, rational_sqrt, Quadratic, Rel, Surd};
use crate::gaussian::{rat, Rational};

/// Whether some point satisfies every constraint.
pub fn feasible(cs: &[Constraint]) -> bool {
    let mut live = Vec::with_capacity(cs.len());
    for c in cs {
        match c.normalized() {
            Normalized::True => {}
            Normalized::False => return false,
            Normalized::Keep(c) => live.push(c),
        }
    }
    if let Some(k) = live.iter().position(|c| c.rel == Rel::Eq) {
        return on_locus(&live[k].form, &others(&live, k));
    }
    for (k, c) in live.iter().enumerate() {
        if c.rel == Rel::Le && on_locus(&c.form, &others(&live, k)) {
            return true;
        }
    }
    let forms: Vec<&Form> = live.iter().map(|c| &c.form).collect();
    strict_feasible(&forms)
}

fn others(cs: &[Constraint], skip: usize) -> Vec<&Constraint> {
    cs.iter()
        .enumerate()
        .filter(|(k, _)| *k != skip)
        .map(|(_, c)| c)
        .collect()
}

/// A parameterization `t -> point` of the locus `f = 0`.
enum Param {
    Empty,
    Point(Rational, Rational),
    /// `(cx + r(1-t^2)/(1+t^2), cy + 2rt/(1+t^2))`, plus `(cx - r, cy)` at infinity.
    Circle {
        cx: Rational,
        cy: Rational,
        r: Rational,
    },
    /// `p + t*dir`.
    Line {
        px: Rational,
        py: Rational,
        dx: Rational,
        dy: Rational,
    },
}

fn parameterize(f: &Form) -> Param {
    if f.is_circle() {
        let rho = f.radius_sq();
        let (cx, cy) = f.center();
        return match rho.cmp(&Rational::zero()) {
            Ordering::Less => Param::Empty,
            Ordering::Equal => Param::Point(cx, cy),
            Ordering::Greater => {
                // Möbius images of rational circles under unimodular integer
                // matrices keep rational radii, so this always succeeds there.
                let r = rational_sqrt(&rho).expect("circle with irrational radius");
                Param::Circle { cx, cy, r }
            }
        };
    }
    if f.is_line() {
        let n2 = &f.b * &f.b + &f.c * &f.c;
        let k = -&f.d / n2;
        return Param::Line {
            px: &k * &f.b,
            py: &k * &f.c,
            dx: -&f.c,
            dy: f.b.clone(),
        };
    }
    // Constant forms are removed by normalization.
    Param::Empty
}

/// `g` restricted to the parameterized locus, up to a positive factor.
fn restrict(g: &Form, p: &Param) -> Quadratic {
    match p {
        Param::Circle { cx, cy, r } => {
            let rho = r * r;
            let k = &g.a * (cx * cx + cy * cy + &rho) + &g.b * cx + &g.c * cy + &g.d;
            let two = rat(2, 1);
            let beta = &two * &g.a * cx + &g.b;
            let gamma = &two * &g.a * cy + &g.c;
            Quadratic::new(&k - r * &beta, &two * r * gamma, k + r * beta)
        }
        Param::Line { px, py, dx, dy } => {
            let two = rat(2, 1);
            let c2 = &g.a * (dx * dx + dy * dy);
            let c1 = &two * &g.a * (px * dx + py * dy) + &g.b * dx + &g.c * dy;
            let c0 = g.eval(px, py);
            Quadratic::new(c2, c1, c0)
        }
        Param::Empty | Param::Point(..) => unreachable!(),
    }
}

fn all_hold(rest: &[&Constraint], x: &Rational, y: &Rational) -> bool {
    rest.iter().all(|c| c.holds_at(x, y))
}

/// Whether some point of `f = 0` satisfies `rest`.
fn on_locus(f: &Form, rest: &[&Constraint]) -> bool {
    let p = parameterize(f);
    match &p {
        Param::Empty => false,
        Param::Point(x, y) => all_hold(rest, x, y),
        Param::Circle { cx, cy, r } => {
            if all_hold(rest, &(cx - r), cy) {
                return true;
            }
            let conds: Vec<(Quadratic, Rel)> = rest.iter().map(|c| (restrict(&c.form, &p), c.rel)).collect();
            find_1d(&conds).is_some()
        }
        Param::Line { .. } => {
            let conds: Vec<(Quadratic, Rel)> = rest.iter().map(|c| (restrict(&c.form, &p), c.rel)).collect();
            find_1d(&conds).is_some()
        }
    }
}

/// Abscissas of the points of `f = 0` and `g = 0` in common.
fn crossings(f: &Form, g: &Form, out: &mut Vec<Surd>) {
    let (line, curve) = match (f.is_circle(), g.is_circle()) {
        (true, true) => {
            // Radical line f/a - g/b.
            let rl = Form::new(
                Rational::zero(),
                &f.b / &f.a - &g.b / &g.a,
                &f.c / &f.a - &g.c / &g.a,
                &f.d / &f.a - &g.d / &g.a,
            );
            if !rl.is_line() {
                return;
            }
            (rl, f)
        }
        (true, false) => (g.clone(), f),
        (false, true) => (f.clone(), g),
        (false, false) => {
            let det = &f.b * &g.c - &g.b * &f.c;
            if !det.is_zero() {
                out.push(Surd::rational((&g.d * &f.c - &f.d * &g.c) / det));
            }
            return;
        }
    };
    let p = parameterize(&line);
    let Param::Line { px, dx, .. } = &p else { return };
    let q = restrict(curve, &p);
    if q.is_zero() {
        return;
    }
    for t in q.roots() {
        out.push(Surd::new(px + &t.a * dx, &t.b * dx, t.d.clone()));
    }
}

/// Whether `f_k < 0` for all `k` at some point.
fn strict_feasible(forms: &[&Form]) -> bool {
    if forms.is_empty() {
        return true;
    }
    let mut crit = Vec::new();
    for f in forms {
        if f.is_circle() {
            let rho = f.radius_sq();
            let (cx, _) = f.center();
            if rho.is_positive() {
                crit.push(Surd::new(cx.clone(), Rational::one(), rho.clone()));
                crit.push(Surd::new(cx, -Rational::one(), rho));
            } else {
                crit.push(Surd::rational(cx));
            }
        } else if f.c.is_zero() {
            crit.push(Surd::rational(-&f.d / &f.b));
        }
    }
    for (i, f) in forms.iter().enumerate() {
        for g in &forms[i + 1..] {
            crossings(f, g, &mut crit);
        }
    }
    crit.sort_by(cmp_surd);
    crit.dedup_by(|x, y| cmp_surd(x, y) == Ordering::Equal);
    cell_samples(&crit)
        .iter()
        .filter_map(|s| s.as_rational().cloned())
        .any(|x0| {
            let conds: Vec<(Quadratic, Rel)> = forms
                .iter()
                .map(|f| {
                    let c0 = &f.a * &x0 * &x0 + &f.b * &x0 + &f.d;
                    (Quadratic::new(f.a.clone(), f.c.clone(), c0), Rel::Lt)
                })
                .collect();
            find_1d(&conds).is_some()
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn disk(c: &str, r2: Rational, rel: Rel) -> Constraint {
        Constraint::new(Form::circle(&q(c), r2), rel)
    }

    fn outside(c: &str, r2: Rational, rel: Rel) -> Constraint {
        Constraint::new(Form::circle(&q(c), r2).neg(), rel)
    }

    #[test]
    fn tangent_disks() {
        // Closed unit disks at 0 and 2 touch at 1; open ones are disjoint.
        let one = rat(1, 1);
        assert!(feasible(&[
            disk("0", one.clone(), Rel::Le),
            disk("2", one.clone(), Rel::Le)
        ]));
        assert!(!feasible(&[
            disk("0", one.clone(), Rel::Lt),
            disk("2", one.clone(), Rel::Le)
        ]));
        assert!(feasible(&[
            disk("0", one.clone(), Rel::Lt),
            disk("3/2", one.clone(), Rel::Lt)
        ]));
    }

    #[test]
    fn annulus_and_lines() {
        let one = rat(1, 1);
        // Outside B(0,1), inside B(0,4/3)... and right of x = 2: empty.
        let cs = [
            outside("0", one.clone(), Rel::Le),
            disk("0", rat(16, 9), Rel::Lt),
            Constraint::new(Form::line(rat(-1, 1), rat(0, 1), rat(2, 1)), Rel::Lt),
        ];
        assert!(!feasible(&cs));
        // Circle locus |z|=1 intersected with x >= 1 is the single point 1.
        let cs = [
            Constraint::new(Form::circle(&q("0"), one.clone()), Rel::Eq),
            Constraint::new(Form::line(rat(-1, 1), rat(0, 1), rat(1, 1)), Rel::Le),
        ];
        assert!(feasible(&cs));
        let cs = [
            Constraint::new(Form::circle(&q("0"), one.clone()), Rel::Eq),
            Constraint::new(Form::line(rat(-1, 1), rat(0, 1), rat(1, 1)), Rel::Lt),
        ];
        assert!(!feasible(&cs));
    }

    #[test]
    fn lens_intersection() {
        // B(1,1) and B(i,1) overlap in an open lens around (1+i)/2.
        let one = rat(1, 1);
        assert!(feasible(&[
            disk("1", one.clone(), Rel::Lt),
            disk("i", one.clone(), Rel::Lt)
        ]));
        // Outside both closed disks within the small box around (1+i)/2 is empty.
        let cs = [
            outside("1", one.clone(), Rel::Lt),
            outside("i", one.clone(), Rel::Lt),
            Constraint::new(
                Form::circle(&GaussianRational::from_parts(&rat(1, 2), &rat(1, 2)), rat(1, 100)),
                Rel::Lt,
            ),
        ];
        assert!(!feasible(&cs));
    }
}
