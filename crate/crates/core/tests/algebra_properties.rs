//! Ring, calculus and ordering laws on random inputs.

use std::cmp::Ordering;

use itlog_core::coeff::rat;
use itlog_core::diffpoly::{compare_antilex, DiffPolynomial, MultiIndex};
use itlog_core::funceq::{flow, itlog_input_order};
use itlog_core::suites::sample_germs;
use itlog_core::{ExactSeries, PowerSeries};
use num_bigint::BigInt;
use proptest::prelude::*;

fn series(order: usize) -> impl Strategy<Value = ExactSeries> {
    prop::collection::vec((-20i64..20, 1i64..9), order + 1).prop_map(|v| {
        PowerSeries::from_coeffs(v.into_iter().map(|(n, d)| rat(n, d)).collect()).unwrap()
    })
}

/// Zero constant term, so the series can be composed into another.
fn inner(order: usize) -> impl Strategy<Value = ExactSeries> {
    series(order).prop_map(|s| {
        let mut c = s.into_coeffs();
        c[0] = rat(0, 1);
        PowerSeries::from_coeffs(c).unwrap()
    })
}

fn index() -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0u32..3, 0..4).prop_map(MultiIndex::new)
}

fn diff_poly() -> impl Strategy<Value = DiffPolynomial<BigInt>> {
    prop::collection::vec((index(), -5i64..5), 0..5).prop_map(|terms| {
        let mut p = DiffPolynomial::zero();
        for (i, c) in terms {
            p.add_term(i, BigInt::from(c));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_ring_axioms(a in series(20), b in series(20), c in series(20)) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn leibniz(a in series(15), b in series(15)) {
        let lhs = a.mul(&b).derive().unwrap();
        let rhs = a.derive().unwrap().mul(&b).add(&a.mul(&b.derive().unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn chain_rule(a in series(12), b in inner(12)) {
        let lhs = a.compose(&b).unwrap().derive().unwrap();
        let rhs = a.derive().unwrap().compose(&b).unwrap().mul(&b.derive().unwrap());
        let n = lhs.order().min(rhs.order());
        prop_assert_eq!(lhs.truncate(n), rhs.truncate(n));
    }

    #[test]
    fn reversion_round_trip(b in inner(12), lead in 1i64..5) {
        let mut c = b.into_coeffs();
        c[1] = rat(lead, 1);
        let a = PowerSeries::from_coeffs(c).unwrap();
        let r = a.reverse().unwrap();
        let id = a.compose(&r).unwrap();
        prop_assert_eq!(id.clone(), PowerSeries::var(id.order()));
        prop_assert_eq!(r.reverse().unwrap(), a.truncate(r.order()));
    }

    #[test]
    fn log_inverts_exp(a in inner(12)) {
        prop_assert_eq!(a.exp().unwrap().log().unwrap(), a);
    }

    #[test]
    fn diff_ring_axioms(p in diff_poly(), q in diff_poly(), r in diff_poly()) {
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert_eq!(p.mul(&q).derive(), p.derive().mul(&q).add(&p.mul(&q.derive())));
    }

    #[test]
    fn evaluation_is_a_ring_map(p in diff_poly(), q in diff_poly(), y in series(14)) {
        let lhs = p.mul(&q).evaluate(&y).unwrap();
        let rhs = p.evaluate(&y).unwrap().mul(&q.evaluate(&y).unwrap());
        let n = lhs.order().min(rhs.order());
        prop_assert_eq!(lhs.truncate(n), rhs.truncate(n));
    }

    #[test]
    fn antilex_is_a_padded_total_order(i in index(), j in index(), k in index(), pad in 0usize..3) {
        let ij = compare_antilex(&i, &j);
        prop_assert_eq!(ij, compare_antilex(&j, &i).reverse());
        prop_assert_eq!(ij == Ordering::Equal, i == j);
        if ij != Ordering::Greater && compare_antilex(&j, &k) != Ordering::Greater {
            prop_assert_ne!(compare_antilex(&i, &k), Ordering::Greater);
        }
        let mut padded = i.entries().to_vec();
        padded.extend(std::iter::repeat_n(0, pad));
        prop_assert_eq!(compare_antilex(&MultiIndex::new(padded), &j), ij);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn flow_exponents_add(sn in -4i64..5, sd in 1i64..4, tn in -4i64..5, td in 1i64..4, g in 0usize..3) {
        let order = 14;
        let (s, t) = (rat(sn, sd), rat(tn, td));
        let f = sample_germs(itlog_input_order(3, order)).swap_remove(g).1;
        let a = flow(&f, &s, order).unwrap();
        let b = flow(&f, &t, order).unwrap();
        let st = flow(&f, &(s + t), order).unwrap();
        prop_assert_eq!(a.compose(&b).unwrap(), st);
    }
}

#[test]
fn scaling_a_diff_poly_scales_its_values() {
    // a homogeneous P of degree d satisfies P(c·y) = c^d P(y)
    let p: DiffPolynomial<BigInt> = "Y Y'' - 2 Y'^2 + 3 Y Y'".parse().unwrap();
    assert!(p.is_homogeneous());
    let (d, _) = p.degree_weight().unwrap();
    let y = sample_germs(12).remove(2).1.series().clone();
    let c = rat(-3, 2);
    let lhs = p.evaluate(&y.scale(&c)).unwrap();
    let mut cd = rat(1, 1);
    for _ in 0..d {
        cd *= &c;
    }
    assert_eq!(lhs, p.evaluate(&y).unwrap().scale(&cd));
}
