use proptest::prelude::*;

use k3_curves::lattice::{DivisorClass, IntersectionLattice};
use k3_curves::oracle::{h_is_ample, OracleContext};

fn lattice() -> impl Strategy<Value = IntersectionLattice> {
    (2i64..=30, 1i64..=60, 0i64..=40)
        .prop_filter_map("Δ > 0", |(n, d, g)| IntersectionLattice::new(n, d, g).ok())
}

fn small_ample() -> impl Strategy<Value = IntersectionLattice> {
    (2i64..=9, 1i64..=18, 0i64..=10).prop_filter_map("ample H", |(n, d, g)| {
        IntersectionLattice::new(n, d, g).ok().filter(h_is_ample)
    })
}

fn class(r: i64) -> impl Strategy<Value = DivisorClass> {
    (-r..=r, -r..=r).prop_map(|(a, b)| DivisorClass::new(a, b))
}

proptest! {
    #[test]
    fn pairing_is_symmetric_and_bilinear(
        l in lattice(),
        x in class(10_000),
        y in class(10_000),
        z in class(10_000),
    ) {
        prop_assert_eq!(l.intersect(&x, &y), l.intersect(&y, &x));
        prop_assert_eq!(l.intersect(&(x + y), &z), l.intersect(&x, &z) + l.intersect(&y, &z));
        prop_assert_eq!(l.intersect(&z, &(x - y)), l.intersect(&z, &x) - l.intersect(&z, &y));
        prop_assert_eq!(l.intersect(&(3 * x), &y), 3 * l.intersect(&x, &y));
    }

    #[test]
    fn squares_are_even(l in lattice(), x in class(100_000)) {
        prop_assert_eq!(l.square(&x).rem_euclid(2), 0);
    }

    #[test]
    fn discriminant_identity(l in lattice(), x in class(1_000_000), y in class(1_000_000)) {
        let cross = x.cross(&y);
        prop_assert_eq!(l.disc_pair(&x, &y), l.discriminant() as i128 * cross * cross);
    }

    #[test]
    fn riemann_roch_lower_bound(l in small_ample(), x in class(8)) {
        let ctx = OracleContext::new(l);
        let h0 = ctx.h0(x).unwrap().h0;
        prop_assert_eq!(h0 >= 1, ctx.effective_or_zero(x).unwrap());
        let rr = l.square(&x) / 2 + 2;
        if ctx.effective_or_zero(x).unwrap() && rr >= 1 {
            prop_assert!(h0 as i64 >= rr, "h0({}) = {} below {}", x, h0, rr);
        }
    }

    #[test]
    fn nef_classes_are_effective(l in small_ample(), x in class(8)) {
        let ctx = OracleContext::new(l);
        if !x.is_zero() && l.degree(&x) > 0 && ctx.is_nef(x).unwrap() {
            prop_assert!(l.square(&x) >= 0);
            prop_assert!(ctx.effective_or_zero(x).unwrap());
        }
    }

    #[test]
    fn h0_is_additive_on_the_nef_model(l in small_ample(), x in class(8)) {
        let ctx = OracleContext::new(l);
        let r = ctx.h0(x).unwrap();
        if r.h0 > 0 {
            let fixed = r.stripped.iter().fold(DivisorClass::ZERO, |acc, c| acc + *c);
            prop_assert_eq!(r.nef_model + fixed, x);
            prop_assert_eq!(ctx.h0(r.nef_model).unwrap().h0, r.h0);
        }
    }
}
