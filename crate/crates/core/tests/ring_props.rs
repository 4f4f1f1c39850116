use std::collections::HashMap;

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use twist_core::ring::{parse_expr, rat, rf_partial, Poly, Rat, RationalFunction, VarRef};

fn var(i: i64) -> VarRef {
    VarRef::named("B", i)
}

fn poly_strategy() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-3i64..=3, 0u32..=2, 0u32..=2, 0u32..=1), 1..4).prop_map(|terms| {
        let mut p = Poly::zero();
        for (c, e1, e2, e3) in terms {
            let m = twist_core::ring::Monomial::from_pairs([(var(1), e1), (var(2), e2), (var(3), e3)]);
            p.add_term(m, rat(c, 1));
        }
        p
    })
}

fn rf_strategy() -> impl Strategy<Value = RationalFunction> {
    (poly_strategy(), poly_strategy()).prop_filter_map("nonzero denominator", |(n, d)| {
        if d.is_zero() {
            None
        } else {
            RationalFunction::from_parts(n, &d).ok()
        }
    })
}

fn eval_at(f: &RationalFunction, point: &HashMap<VarRef, Rat>) -> Option<Rat> {
    f.eval_with(point).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in rf_strategy(), b in rf_strategy(), c in rf_strategy()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), RationalFunction::one());
        }
    }

    #[test]
    fn normalize_is_idempotent(a in rf_strategy()) {
        let n = a.normalized();
        prop_assert_eq!(n.numerator(), a.numerator());
        prop_assert_eq!(n.denominator(), a.denominator());
    }

    #[test]
    fn mixed_partials_commute(a in rf_strategy()) {
        let (x, y) = (var(1), var(2));
        prop_assert_eq!(rf_partial(&rf_partial(&a, &x), &y), rf_partial(&rf_partial(&a, &y), &x));
    }

    #[test]
    fn partial_obeys_product_rule(a in rf_strategy(), b in rf_strategy()) {
        let x = var(2);
        let lhs = rf_partial(&(&a * &b), &x);
        let rhs = &(&rf_partial(&a, &x) * &b) + &(&a * &rf_partial(&b, &x));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_matches_finite_differences(
        a in rf_strategy(),
        pt in prop::collection::vec((1i64..40, 1i64..7), 3),
    ) {
        let point: HashMap<VarRef, Rat> = (1..=3).zip(&pt).map(|(i, (n, d))| (var(i), rat(*n, *d))).collect();
        let x = var(1);
        let exact = eval_at(&rf_partial(&a, &x), &point);
        prop_assume!(exact.is_some());
        let exact = exact.unwrap();
        let mut errors = Vec::new();
        for h in [rat(1, 1000), rat(1, 10000)] {
            let shifted = |s: &Rat| {
                let mut p = point.clone();
                let v = p.get_mut(&x).unwrap();
                *v = &*v + s;
                eval_at(&a, &p)
            };
            let (Some(up), Some(down)) = (shifted(&h), shifted(&-&h)) else { return Ok(()); };
            let quotient = (up - down) / (&h + &h);
            errors.push((quotient - &exact).abs());
        }
        // central differences are second order: shrinking h tenfold shrinks the error ~100x
        prop_assert!(errors[1].is_zero() || errors[1] <= &errors[0] / Rat::from_integer(50.into()));
    }

    #[test]
    fn print_then_parse_is_identity(a in rf_strategy()) {
        let text = a.to_string();
        let back = parse_expr(&text, None).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn hand_oracles() {
    let f = parse_expr("B[1]*B[2] - B[1] - B[2]", None).unwrap();
    let point: HashMap<VarRef, Rat> = [(var(1), rat(4, 1)), (var(2), rat(4, 1))].into();
    assert_eq!(f.eval_with(&point).unwrap(), rat(16 - 4 - 4, 1));
}
