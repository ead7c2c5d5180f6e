//! Full / regular / irregular classification of prototype sets.

use std::fmt;

use serde::Serialize;

use super::form::{Constraint, Form};
use super::region::{d_edges, interior_of, open_subset, Region};
use crate::algebraic::Rel;
use crate::error::{Error, Result};
use crate::gaussian::{rat, GaussianInt, GaussianRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum PrototypeClass {
    Full,
    /// Interior `D°` although the region differs from `D` on the boundary.
    RegularSquare,
    /// Interior `i^j G_k`.
    Regular {
        j: u8,
        k: u8,
    },
    Irregular,
}

impl PrototypeClass {
    pub fn is_full(self) -> bool {
        self == Self::Full
    }

    pub fn is_regular(self) -> bool {
        !matches!(self, Self::Irregular)
    }
}

impl fmt::Display for PrototypeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Full => write!(f, "full"),
            Self::RegularSquare => write!(f, "regular(D°)"),
            Self::Regular { j, k } => write!(f, "regular({j},{k})"),
            Self::Irregular => write!(f, "irregular"),
        }
    }
}

/// Centers of the unit disks removed from `D` in `G_k`.
fn g_centers(k: u8) -> Vec<GaussianInt> {
    match k {
        1 => vec![GaussianInt::new(1, 0), GaussianInt::new(0, 1)],
        2 => vec![GaussianInt::new(1, 0)],
        _ => vec![GaussianInt::new(1, 1)],
    }
}

fn rotate(g: &GaussianInt, j: u8) -> GaussianInt {
    (0..j).fold(g.clone(), |acc, _| acc.mul_i())
}

/// `i^j G_k` as a strict system.
pub fn canonical_interior(j: u8, k: u8) -> Vec<Constraint> {
    let mut cs: Vec<Constraint> = d_edges().iter().map(Constraint::strict).collect();
    for c in g_centers(k) {
        let c = GaussianRational::from(rotate(&c, j));
        cs.push(Constraint::new(Form::circle(&c, rat(1, 1)).neg(), Rel::Lt));
    }
    cs
}

/// The region `i^j G_k` closed up to the half-open edges of `D`, for display.
pub fn canonical_region(j: u8, k: u8) -> Region {
    let extra = canonical_interior(j, k).into_iter().skip(4).collect();
    Region::within_d(extra)
}

pub fn classify(r: &Region) -> Result<PrototypeClass> {
    if !r.is_within_d() {
        return Err(Error::Precondition("classification needs a prototype region".into()));
    }
    if r.is_empty() || r.is_degenerate() {
        return Ok(PrototypeClass::Irregular);
    }
    if r.is_unit_cell() {
        return Ok(PrototypeClass::Full);
    }
    let u = r.interior_constraints();
    let same = |v: &[Constraint]| open_subset(&u, v) && open_subset(v, &u);
    let square = interior_of(&d_edges());
    if same(&square) {
        return Ok(PrototypeClass::RegularSquare);
    }
    for k in 1..=3u8 {
        for j in 0..4u8 {
            if same(&canonical_interior(j, k)) {
                return Ok(PrototypeClass::Regular { j, k });
            }
        }
    }
    Err(Error::Unclassifiable(r.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_regions_classify_to_themselves() {
        for k in 1..=3 {
            for j in 0..4 {
                let r = canonical_region(j, k);
                assert_eq!(classify(&r).unwrap(), PrototypeClass::Regular { j, k }, "{r}");
            }
        }
        assert_eq!(classify(&Region::unit_cell()).unwrap(), PrototypeClass::Full);
    }

    #[test]
    fn canonical_text() {
        assert_eq!(canonical_region(0, 2).to_string(), "D \\ closedB(1,1)");
        assert_eq!(canonical_region(1, 3).to_string(), "D \\ closedB(-1+i,1)");
    }

    #[test]
    fn open_square_variant() {
        // D with its left edge removed.
        let c = Constraint::new(Form::line(rat(-1, 1), rat(0, 1), rat(-1, 2)), Rel::Lt);
        let r = Region::within_d(vec![c]);
        assert_eq!(classify(&r).unwrap(), PrototypeClass::RegularSquare);
    }
}
