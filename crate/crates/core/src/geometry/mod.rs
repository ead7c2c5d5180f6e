//! Prototype sets `D_u`, cylinders and their classification.

pub mod area;
pub mod classify;
pub mod feasible;
pub mod form;
pub mod region;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

pub use area::{region_area, AreaMethod, AreaReport, ExactArea};
pub use classify::{canonical_interior, canonical_region, classify, PrototypeClass};
pub use form::{Constraint, Form};
pub use region::{intersect_d, invert_region, translate_region, Membership, Region, RegionRecord};

use crate::error::{Error, Result};
use crate::gaussian::GaussianInt;
use crate::word::{qpair, Mat2, Word};

/// `D_{u b}` from `D_u`: points `w` of `D` with `1/(w + b)` in `D_u`.
pub fn prototype_step(d_u: &Region, b: &GaussianInt) -> Region {
    if d_u.is_empty() {
        return d_u.clone();
    }
    let m = Mat2::new(GaussianInt::zero(), GaussianInt::one(), GaussianInt::one(), b.clone());
    Region::within_d(d_u.pullback_constraints(&m))
}

type StepKey = (Region, GaussianInt);

fn step_cache() -> &'static Mutex<HashMap<StepKey, Region>> {
    static CACHE: OnceLock<Mutex<HashMap<StepKey, Region>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `prototype_step` through a process-wide memo.
pub fn prototype_step_cached(d_u: &Region, b: &GaussianInt) -> Region {
    let key = (d_u.clone(), b.clone());
    if let Some(r) = step_cache().lock().expect("cache lock").get(&key) {
        return r.clone();
    }
    let r = prototype_step(d_u, b);
    step_cache().lock().expect("cache lock").insert(key, r.clone());
    r
}

/// `D_u`, built letter by letter from `D`.
pub fn prototype_set(w: &Word) -> Region {
    w.items()
        .iter()
        .fold(Region::unit_cell(), |r, b| prototype_step_cached(&r, b))
}

/// The cylinder `T_u(D_u)`.
pub fn cylinder_region(w: &Word) -> Result<Region> {
    if w.is_empty() {
        return Err(Error::Precondition("cylinder of the empty word".into()));
    }
    let d_u = prototype_set(w);
    let inverse = qpair(w).mobius().adjugate();
    Ok(Region::general(d_u.pullback_constraints(&inverse)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::Rel;
    use crate::gaussian::{rat, GaussianRational};
    use crate::word::{evaluate, make_vk, make_vk_tilde};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn q(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn outside(c: &str, rel: Rel) -> Constraint {
        Constraint::new(Form::circle(&q(c), rat(1, 1)).neg(), rel)
    }

    /// `b x + c y + d rel 0`.
    fn line(b: i64, c: i64, d: (i64, i64), rel: Rel) -> Constraint {
        Constraint::new(Form::line(rat(b, 1), rat(c, 1), rat(d.0, d.1)), rel)
    }

    #[test]
    fn minus_two_i_chain() {
        let d1 = Region::within_d(vec![outside("i", Rel::Lt)]);
        assert_eq!(prototype_set(&w("[-2i]")), d1);
        assert_eq!(d1.to_string(), "D \\ closedB(i,1)");
        let d2 = Region::within_d(vec![line(0, -1, (-1, 2), Rel::Lt), outside("1", Rel::Le)]);
        assert_eq!(prototype_set(&w("[-2i,-2]")), d2);
        let d3 = Region::within_d(vec![outside("-i", Rel::Lt)]);
        assert_eq!(prototype_set(&w("[-2i,-2,2i]")), d3);
        let d4 = Region::within_d(vec![outside("1", Rel::Le)]);
        assert_eq!(prototype_set(&w("[-2i,-2,2i,-2]")), d4);
        assert_eq!(prototype_set(&w("[-2i,-2,2i,-2,-2i]")), d1);
    }

    #[test]
    fn two_i_chain() {
        let d1 = Region::within_d(vec![outside("-i", Rel::Le)]);
        assert_eq!(prototype_set(&w("[2i]")), d1);
        let seg = Region::within_d(vec![line(0, 1, (1, 2), Rel::Eq), outside("1", Rel::Le)]);
        let d2 = prototype_set(&w("[2i,-2+i]"));
        assert!(d2.same_set(&seg), "{d2}");
        assert!(d2.is_degenerate());
        let arc = Region::within_d(vec![Constraint::new(Form::circle(&q("-i"), rat(1, 1)), Rel::Eq)]);
        assert!(prototype_set(&w("[2i,-2+i,2i]")).same_set(&arc));
        assert!(prototype_set(&w("[2i,-2+i,2i,-2+i]")).same_set(&seg));
        assert!(prototype_set(&w("[2i,-2+i,2i,-2+i,2i]")).same_set(&arc));
        assert!(!seg.same_set(&arc));
    }

    #[test]
    fn vk_families() {
        let d1 = prototype_set(&w("[-2i]"));
        for k in 0..=5 {
            assert_eq!(prototype_set(&make_vk(k)), d1, "k={k}");
        }
        let arc = Region::within_d(vec![Constraint::new(Form::circle(&q("-i"), rat(1, 1)), Rel::Eq)]);
        for k in 1..=5 {
            assert!(prototype_set(&make_vk_tilde(k)).same_set(&arc), "k={k}");
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&prototype_set(&w("[3]"))).unwrap(), PrototypeClass::Full);
        assert_eq!(classify(&prototype_set(&w("[-2+2i]"))).unwrap(), PrototypeClass::Full);
        assert_eq!(
            classify(&prototype_set(&w("[2i,-2+i,2i]"))).unwrap(),
            PrototypeClass::Irregular
        );
        assert_eq!(
            classify(&prototype_set(&w("[-2i]"))).unwrap(),
            PrototypeClass::Regular { j: 1, k: 2 }
        );
    }

    #[test]
    fn cylinders() {
        let c3 = cylinder_region(&w("[3]")).unwrap();
        assert_eq!(c3.contains(&q("1/3")), Membership::Included);
        assert_eq!(c3.contains(&q("1/2")), Membership::Excluded);
        let c4 = cylinder_region(&w("[4]")).unwrap();
        assert_eq!(c4.contains(&q("1/3")), Membership::Excluded);
        let mut both = c3.constraints().to_vec();
        both.extend(c4.interior_constraints());
        assert!(!feasible::feasible(&region::interior_of(&both)));
        let w2 = w("[3,-2i]");
        let c = cylinder_region(&w2).unwrap();
        assert!(c.in_closure(&evaluate(&w2).unwrap()));
    }
}
