//! Regions as finite intersections of generalized-circle constraints.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::feasible::feasible;
use super::form::{Constraint, ConstraintRecord, Form, Normalized};
use crate::algebraic::Rel;
use crate::error::{Error, Result};
use crate::gaussian::{rat, GaussianInt, GaussianRational, Rational};
use crate::word::Mat2;

/// The four edges of `D = [-1/2, 1/2)^2`: left, right, bottom, top.
pub fn d_edges() -> [Constraint; 4] {
    let h = rat(-1, 2);
    let (z, one) = (Rational::zero(), Rational::one());
    [
        Constraint::new(Form::line(-&one, z.clone(), h.clone()), Rel::Le),
        Constraint::new(Form::line(one.clone(), z.clone(), h.clone()), Rel::Lt),
        Constraint::new(Form::line(z.clone(), -&one, h.clone()), Rel::Le),
        Constraint::new(Form::line(z, one, h), Rel::Lt),
    ]
}

fn is_edge_locus(c: &Constraint) -> bool {
    let k = c.form.locus_key().0;
    d_edges().iter().any(|e| e.form.locus_key().0 == k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Included,
    Excluded,
    /// In the closure, but on an excluded boundary arc other than the
    /// half-open right/top edges of `D`.
    BoundaryOnExcludedEdge,
}

/// A simplified intersection of constraints. With `within_d` set, the four
/// edges of `D` are always among the constraints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    constraints: Vec<Constraint>,
    within_d: bool,
    empty: bool,
    degenerate: bool,
}

const LT: u8 = 1;
const EQ: u8 = 2;
const GT: u8 = 4;

fn mask(rel: Rel, s: std::cmp::Ordering) -> u8 {
    let pos = s == std::cmp::Ordering::Greater;
    match (rel, pos) {
        (Rel::Eq, _) => EQ,
        (Rel::Lt, true) => LT,
        (Rel::Le, true) => LT | EQ,
        (Rel::Lt, false) => GT,
        (Rel::Le, false) => GT | EQ,
    }
}

fn from_mask(key: Form, m: u8) -> Option<Constraint> {
    match m {
        LT => Some(Constraint::new(key, Rel::Lt)),
        x if x == LT | EQ => Some(Constraint::new(key, Rel::Le)),
        EQ => Some(Constraint::new(key, Rel::Eq)),
        GT => Some(Constraint::new(key.neg(), Rel::Lt)),
        x if x == GT | EQ => Some(Constraint::new(key.neg(), Rel::Le)),
        _ => None,
    }
}

/// Whether `others` forces `c`.
fn implied(c: &Constraint, others: &[Constraint]) -> bool {
    c.negation().into_iter().all(|n| {
        let mut sys = others.to_vec();
        sys.push(n);
        !feasible(&sys)
    })
}

/// Strict versions whose intersection is the interior.
pub(crate) fn interior_of(cs: &[Constraint]) -> Vec<Constraint> {
    cs.iter()
        .flat_map(|c| match c.rel {
            Rel::Eq => vec![
                Constraint::new(c.form.clone(), Rel::Lt),
                Constraint::new(c.form.neg(), Rel::Lt),
            ],
            _ => vec![c.strict()],
        })
        .collect()
}

/// `U ⊆ V` for the open sets cut out by strict systems.
pub(crate) fn open_subset(u: &[Constraint], v: &[Constraint]) -> bool {
    v.iter().all(|c| implied(c, u))
}

impl Region {
    /// The half-open unit square `D`.
    pub fn unit_cell() -> Self {
        Self::within_d(Vec::new())
    }

    fn empty_region(within_d: bool) -> Self {
        Self {
            constraints: Vec::new(),
            within_d,
            empty: true,
            degenerate: true,
        }
    }

    /// `D ∩ cs`, simplified.
    pub fn within_d(cs: Vec<Constraint>) -> Self {
        Self::simplify(cs, true)
    }

    /// `∩ cs`, simplified.
    pub fn general(cs: Vec<Constraint>) -> Self {
        Self::simplify(cs, false)
    }

    fn simplify(mut cs: Vec<Constraint>, within_d: bool) -> Self {
        if within_d {
            cs.extend(d_edges());
        }
        // Normalize and merge constraints sharing a locus.
        let mut by_locus: BTreeMap<Form, u8> = BTreeMap::new();
        for c in &cs {
            match c.normalized() {
                Normalized::True => {}
                Normalized::False => return Self::empty_region(within_d),
                Normalized::Keep(c) => {
                    let (key, s) = c.form.locus_key();
                    let m = by_locus.entry(key).or_insert(LT | EQ | GT);
                    *m &= mask(c.rel, s);
                }
            }
        }
        let mut live = Vec::with_capacity(by_locus.len());
        for (key, m) in by_locus {
            if m == 0 {
                return Self::empty_region(within_d);
            }
            if let Some(c) = from_mask(key, m) {
                match c.normalized() {
                    Normalized::Keep(c) => live.push(c),
                    Normalized::True => {}
                    Normalized::False => return Self::empty_region(within_d),
                }
            }
        }
        if within_d {
            // A locus missing the closed square has constant sign on D.
            let mut kept = Vec::with_capacity(live.len());
            for c in live {
                if is_edge_locus(&c) || c.form.locus_meets_closed_square() {
                    kept.push(c);
                } else if !c.holds_at(&Rational::zero(), &Rational::zero()) {
                    return Self::empty_region(true);
                }
            }
            live = kept;
        }
        live.sort();
        if !feasible(&live) {
            return Self::empty_region(within_d);
        }
        let candidates: Vec<Constraint> = live
            .iter()
            .filter(|c| !(within_d && is_edge_locus(c)))
            .cloned()
            .collect();
        for c in candidates {
            let others: Vec<Constraint> = live.iter().filter(|x| **x != c).cloned().collect();
            if implied(&c, &others) {
                live = others;
            }
        }
        if within_d {
            // A tightened edge that the rest already forces goes back to default.
            for e in d_edges() {
                let key = e.form.locus_key().0;
                let Some(pos) = live.iter().position(|c| c.form.locus_key().0 == key) else {
                    continue;
                };
                if live[pos] == e {
                    continue;
                }
                let mut relaxed = live.clone();
                relaxed[pos] = e.clone();
                if implied(&live[pos], &relaxed) {
                    live = relaxed;
                }
            }
            live.sort();
        }
        let degenerate = !feasible(&interior_of(&live));
        Self {
            constraints: live,
            within_d,
            empty: false,
            degenerate,
        }
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Constraints other than the default edges of `D`.
    pub fn extra_constraints(&self) -> Vec<&Constraint> {
        let edges = d_edges();
        self.constraints
            .iter()
            .filter(|c| !(self.within_d && edges.contains(c)))
            .collect()
    }

    pub fn is_within_d(&self) -> bool {
        self.within_d
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Empty interior (a segment, an arc, a point, or nothing).
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn is_unit_cell(&self) -> bool {
        self.within_d && !self.empty && self.extra_constraints().is_empty()
    }

    /// Equality as point sets. Regions with interior are also equal as
    /// values; a segment or arc may be cut out by different circles.
    pub fn same_set(&self, other: &Self) -> bool {
        if self.empty || other.empty {
            return self.empty == other.empty;
        }
        other.constraints.iter().all(|c| implied(c, &self.constraints))
            && self.constraints.iter().all(|c| implied(c, &other.constraints))
    }

    pub fn interior_constraints(&self) -> Vec<Constraint> {
        interior_of(&self.constraints)
    }

    /// Constraints of `{w : m(w) in self}`.
    pub fn pullback_constraints(&self, m: &Mat2) -> Vec<Constraint> {
        self.constraints
            .iter()
            .map(|c| Constraint::new(c.form.pullback(m), c.rel))
            .collect()
    }

    /// Whether the region contains the point, up to its closure.
    pub fn in_closure(&self, z: &GaussianRational) -> bool {
        let (x, y) = z.parts();
        !self.empty
            && self.constraints.iter().all(|c| {
                let rel = if c.rel == Rel::Lt { Rel::Le } else { c.rel };
                rel.holds(c.form.eval(&x, &y).cmp(&Rational::zero()))
            })
    }

    pub fn contains(&self, z: &GaussianRational) -> Membership {
        if self.empty {
            return Membership::Excluded;
        }
        let (x, y) = z.parts();
        if self.constraints.iter().all(|c| c.holds_at(&x, &y)) {
            return Membership::Included;
        }
        if !self.in_closure(z) {
            return Membership::Excluded;
        }
        let edges = d_edges();
        let on_open_d_edge = self
            .constraints
            .iter()
            .any(|c| self.within_d && edges.contains(c) && !c.holds_at(&x, &y));
        if on_open_d_edge {
            Membership::Excluded
        } else {
            Membership::BoundaryOnExcludedEdge
        }
    }

    pub fn record(&self) -> RegionRecord {
        let constraints = if self.within_d {
            self.extra_constraints().into_iter().map(Constraint::record).collect()
        } else {
            self.constraints.iter().map(Constraint::record).collect()
        };
        RegionRecord {
            within_d: self.within_d,
            constraints,
            empty: self.empty,
            degenerate: self.degenerate,
            text: self.to_string(),
        }
    }

    /// Rebuilds a region from a record; `text` and the flags are recomputed.
    pub fn from_record(r: &RegionRecord) -> Result<Self> {
        if r.constraints.len() > 64 {
            return Err(Error::Parse("too many constraints".into()));
        }
        let cs = r
            .constraints
            .iter()
            .map(Constraint::from_record)
            .collect::<Result<Vec<_>>>()?;
        if r.empty {
            return Ok(Self::empty_region(r.within_d));
        }
        Ok(Self::simplify(cs, r.within_d))
    }
}

/// `{w : 1/w in R}`; a total operation on the Riemann sphere.
pub fn invert_region(r: &Region) -> Region {
    Region::general(r.pullback_constraints(&Mat2::swap()))
}

/// `R + g`.
pub fn translate_region(r: &Region, g: &GaussianInt) -> Region {
    let m = Mat2::new(GaussianInt::one(), -g.clone(), GaussianInt::zero(), GaussianInt::one());
    if r.is_empty() {
        return r.clone();
    }
    Region::general(r.pullback_constraints(&m))
}

/// `R ∩ D`.
pub fn intersect_d(r: &Region) -> Region {
    if r.is_empty() {
        return Region::empty_region(true);
    }
    Region::within_d(r.constraints.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRecord {
    /// The four edges of `D` are implied and not listed.
    pub within_d: bool,
    pub constraints: Vec<ConstraintRecord>,
    pub empty: bool,
    pub degenerate: bool,
    pub text: String,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "∅");
        }
        if self.within_d {
            write!(f, "D")?;
            for c in self.extra_constraints() {
                write!(f, "{}", c.d_relative_text())?;
            }
            return Ok(());
        }
        let parts: Vec<String> = self.constraints.iter().map(|c| format!("{{{c}}}")).collect();
        if parts.is_empty() {
            write!(f, "C")
        } else {
            write!(f, "{}", parts.join(" ∩ "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn pt(x: (i64, i64), y: (i64, i64)) -> GaussianRational {
        GaussianRational::from_parts(&rat(x.0, x.1), &rat(y.0, y.1))
    }

    #[test]
    fn unit_cell_membership() {
        let d = Region::unit_cell();
        assert!(d.is_unit_cell());
        assert_eq!(d.to_string(), "D");
        assert_eq!(d.contains(&q("0")), Membership::Included);
        assert_eq!(d.contains(&q("1/2")), Membership::Excluded);
        assert_eq!(d.contains(&pt((-1, 2), (-1, 2))), Membership::Included);
        assert_eq!(d.contains(&q("1")), Membership::Excluded);
    }

    #[test]
    fn disk_complement_membership() {
        let c = Constraint::new(Form::circle(&q("i"), rat(1, 1)).neg(), Rel::Lt);
        let r = Region::within_d(vec![c]);
        assert_eq!(r.to_string(), "D \\ closedB(i,1)");
        assert_eq!(r.contains(&pt((0, 1), (1, 2))), Membership::Excluded);
        assert_eq!(r.contains(&q("0")), Membership::BoundaryOnExcludedEdge);
        assert_eq!(r.contains(&pt((0, 1), (-1, 2))), Membership::Included);
    }

    #[test]
    fn far_constraints_drop() {
        let far = Constraint::new(Form::circle(&q("5"), rat(1, 1)).neg(), Rel::Le);
        assert!(Region::within_d(vec![far]).is_unit_cell());
        let far_inside = Constraint::new(Form::circle(&q("5"), rat(1, 1)), Rel::Le);
        assert!(Region::within_d(vec![far_inside]).is_empty());
    }

    #[test]
    fn redundant_disks_drop() {
        // D minus the small disk around 1 that does not reach D... and a
        // big disk containing D.
        let big = Constraint::new(Form::circle(&q("0"), rat(4, 1)), Rel::Lt);
        let r = Region::within_d(vec![big]);
        assert!(r.is_unit_cell());
    }

    #[test]
    fn segment_is_degenerate() {
        let on = Constraint::new(Form::line(rat(0, 1), rat(1, 1), rat(1, 2)), Rel::Eq);
        let r = Region::within_d(vec![on]);
        assert!(r.is_degenerate());
        assert!(!r.is_empty());
        assert_eq!(r.to_string(), "D ∩ {Im z = -1/2}");
    }

    #[test]
    fn record_round_trip() {
        let c = Constraint::new(Form::circle(&q("1"), rat(1, 1)).neg(), Rel::Le);
        let r = Region::within_d(vec![c]);
        let rec = r.record();
        let json = serde_json::to_string(&rec).unwrap();
        let back: RegionRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(Region::from_record(&back).unwrap(), r);
    }

    #[test]
    fn inversion_and_translation() {
        // B(-1,1) + 2 = B(1,1).
        let b = Region::general(vec![Constraint::new(Form::circle(&q("-1"), rat(1, 1)), Rel::Lt)]);
        let t = translate_region(&b, &GaussianInt::new(2, 0));
        assert_eq!(
            t,
            Region::general(vec![Constraint::new(Form::circle(&q("1"), rat(1, 1)), Rel::Lt)])
        );
        assert_eq!(translate_region(&b, &GaussianInt::zero()), b);
        let half = Region::general(vec![Constraint::new(
            Form::line(rat(0, 1), rat(1, 1), rat(-1, 2)),
            Rel::Eq,
        )]);
        let inv = invert_region(&half);
        assert_eq!(
            inv.constraints()[0].form.locus_key().0,
            Form::circle(&q("-i"), rat(1, 1))
        );
    }
}
