//! Guesser: positive controls, soundness, monotonicity, scaling and the
//! false-positive rate on random data.

use itlog_core::coeff::rat;
use itlog_core::diffpoly::{parse_rat_diff, RatPoly};
use itlog_core::funceq::itlog;
use itlog_core::guesser::{guess_ade, guess_linear_ode, GuessError, SearchBounds, Verdict};
use itlog_core::suites::sample_germs;
use itlog_core::{ExactSeries, PowerSeries};
use proptest::prelude::*;

fn exp(order: usize) -> ExactSeries {
    PowerSeries::var(order).exp().unwrap()
}

fn tanh(order: usize) -> ExactSeries {
    let e2 = PowerSeries::var(order).scale(&rat(2, 1)).exp().unwrap();
    let one = PowerSeries::one(order);
    e2.sub(&one).div(&e2.add(&one)).unwrap()
}

fn geometric(order: usize) -> ExactSeries {
    let one = PowerSeries::one(order);
    one.div(&one.sub(&PowerSeries::var(order))).unwrap()
}

/// Same equation up to a non-zero constant factor.
fn same_up_to_scalar(got: &str, want: &str) -> bool {
    let (g, w) = (parse_rat_diff(got).unwrap(), parse_rat_diff(want).unwrap());
    let Some((i, c)) = w.terms().next_back() else {
        return g.is_zero();
    };
    let Some(d) = g.coeff(i).and_then(|d| d.leading().cloned()) else {
        return false;
    };
    g == w.map_coeffs(|p: &RatPoly| p.scale(&(&d / c.leading().unwrap())))
}

#[test]
fn positive_controls() {
    let b = SearchBounds::default();
    let exp_out = guess_ade(&exp(120), &b).unwrap();
    assert_eq!(exp_out.verdict, Verdict::Found);
    let c = exp_out.candidate.unwrap().to_string();
    assert!(same_up_to_scalar(&c, "Y' - Y"), "{c}");

    let tanh_out = guess_ade(&tanh(120), &b).unwrap();
    let c = tanh_out.candidate.unwrap().to_string();
    assert!(same_up_to_scalar(&c, "Y' - 1 + Y^2"), "{c}");

    let lin = SearchBounds::new(2, 1, 2, 20);
    let geo = guess_linear_ode(&geometric(40), &lin, false).unwrap();
    let c = geo.candidate.unwrap().to_string();
    assert!(same_up_to_scalar(&c, "(1 - z) Y' - Y"), "{c}");

    let sq = guess_linear_ode(&PowerSeries::monomial(rat(1, 1), 2, 40), &lin, false).unwrap();
    let c = sq.candidate.unwrap().to_string();
    assert!(same_up_to_scalar(&c, "z Y' - 2 Y"), "{c}");
}

#[test]
fn found_candidates_annihilate_the_series() {
    for y in [exp(60), tanh(60), geometric(60)] {
        let out = guess_ade(&y, &SearchBounds::new(1, 2, 2, 20)).unwrap();
        let p = out.candidate.expect("found");
        let r = p.evaluate(&y).unwrap();
        assert!(r.order() >= out.verified_to);
        assert!(r.truncate(out.verified_to).is_zero());
    }
}

#[test]
fn enlarging_bounds_keeps_a_find() {
    let y = tanh(100);
    let grid = [
        SearchBounds::new(1, 2, 0, 20),
        SearchBounds::new(1, 2, 2, 20),
        SearchBounds::new(1, 3, 2, 20),
        SearchBounds::new(2, 2, 2, 20),
        SearchBounds::new(2, 3, 2, 20),
        SearchBounds::new(2, 3, 3, 20),
    ];
    for (k, b) in grid.iter().enumerate() {
        let out = guess_ade(&y, b).unwrap();
        assert_eq!(out.verdict, Verdict::Found, "bounds #{k}");
    }
    assert!(matches!(
        guess_ade(&y, &SearchBounds::new(2, 3, 4, 20)),
        Err(GuessError::OrderDeficit { .. })
    ));
}

#[test]
fn scaling_the_series_keeps_the_verdict() {
    let b = SearchBounds::new(1, 2, 2, 20);
    for y in [exp(60), tanh(60), geometric(60)] {
        for c in [rat(3, 1), rat(-2, 7)] {
            let a = guess_ade(&y, &b).unwrap();
            let s = guess_ade(&y.scale(&c), &b).unwrap();
            assert_eq!(a.verdict, s.verdict);
        }
    }
    let f = sample_germs(121).remove(0).1;
    let y = itlog(&f, 120).unwrap().phi;
    let b = SearchBounds::default();
    let a = guess_ade(&y, &b).unwrap();
    let s = guess_ade(&y.scale(&rat(-5, 3)), &b).unwrap();
    assert_eq!(a.verdict, Verdict::NoneWithinBounds);
    assert_eq!(s.verdict, Verdict::NoneWithinBounds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    // 100 unknowns at the default bounds; margin 10 leaves ten spare
    // equations, which random data never satisfies by accident.
    #[test]
    fn random_series_give_no_equation(v in prop::collection::vec((-40i64..40, 1i64..12), 111)) {
        let y = PowerSeries::from_coeffs(v.into_iter().map(|(n, d)| rat(n, d)).collect()).unwrap();
        let b = SearchBounds { margin: 10, ..SearchBounds::default() };
        let out = guess_ade(&y, &b).unwrap();
        prop_assert_eq!(out.verdict, Verdict::NoneWithinBounds);
        prop_assert!(out.caveat().is_some());
    }
}
