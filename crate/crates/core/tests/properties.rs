use hcf_core::expansion::hcf_expand_rational;
use hcf_core::gaussian::{gaussian_gcd, nearest_gaussian_integer, rat};
use hcf_core::geometry::{prototype_set, Membership, Region};
use hcf_core::word::{evaluate, mobius_apply, qpair, Word};
use hcf_core::{GaussianInt, GaussianRational};
use proptest::prelude::*;

fn gaussian_int(r: i64) -> impl Strategy<Value = GaussianInt> {
    (-r..=r, -r..=r).prop_map(|(a, b)| GaussianInt::new(a, b))
}

fn gaussian_rational() -> impl Strategy<Value = GaussianRational> {
    (gaussian_int(10_000), gaussian_int(10_000))
        .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
        .prop_map(|(n, d)| GaussianRational::new(n, d).unwrap())
}

fn in_unit_cell(z: &GaussianRational) -> bool {
    let half = rat(1, 2);
    let (x, y) = z.parts();
    -&half <= x && x < half && -&half <= y && y < half
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn gaussian_int_text_round_trip(a in gaussian_int(1 << 40)) {
        prop_assert_eq!(a.to_string().parse::<GaussianInt>().unwrap(), a);
    }

    #[test]
    fn gaussian_rational_text_round_trip(z in gaussian_rational()) {
        prop_assert_eq!(z.to_string().parse::<GaussianRational>().unwrap(), z);
    }

    #[test]
    fn remainder_lands_in_unit_cell(z in gaussian_rational()) {
        let a = nearest_gaussian_integer(&z);
        prop_assert!(in_unit_cell(&(&z - &GaussianRational::from(a))));
    }

    #[test]
    fn gcd_divides_both(a in gaussian_int(5_000), b in gaussian_int(5_000)) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let g = gaussian_gcd(&a, &b).unwrap();
        prop_assert!(a.checked_div_exact(&g).is_some());
        prop_assert!(b.checked_div_exact(&g).is_some());
    }

    #[test]
    fn expansion_evaluates_back(z in gaussian_rational()) {
        let a = nearest_gaussian_integer(&z);
        let frac = &z - &GaussianRational::from(a);
        let e = hcf_expand_rational(&z);
        prop_assert!(e.terminated);
        prop_assert_eq!(evaluate(&e.quotients).unwrap(), frac);
        prop_assert_eq!(e.quotients.to_string().parse::<Word>().unwrap(), e.quotients.clone());
    }

    #[test]
    fn unimodular_qpairs(z in gaussian_rational()) {
        let w = hcf_expand_rational(&z).quotients;
        prop_assert!(qpair(&w).determinant().is_unit());
    }

    #[test]
    fn cylinder_points_start_with_their_word(z in gaussian_rational(), x in gaussian_rational()) {
        // Any expansion prefix u and a point x of D_u give a point of the cylinder of u.
        let w = hcf_expand_rational(&z).quotients;
        prop_assume!(!w.is_empty());
        let u = w.prefix(w.len().min(3));
        let d_u = prototype_set(&u);
        let x = &x - &GaussianRational::from(nearest_gaussian_integer(&x));
        prop_assume!(!x.is_zero() && d_u.contains(&x) == Membership::Included);
        let y = mobius_apply(&u, &x).unwrap();
        prop_assert_eq!(hcf_expand_rational(&y).quotients.prefix(u.len()), u);
    }

    #[test]
    fn region_records_round_trip(z in gaussian_rational()) {
        let w = hcf_expand_rational(&z).quotients;
        let r = prototype_set(&w.prefix(w.len().min(4)));
        prop_assert_eq!(Region::from_record(&r.record()).unwrap(), r);
    }
}
