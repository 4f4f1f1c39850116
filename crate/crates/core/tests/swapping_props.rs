use std::collections::BTreeSet;

use proptest::prelude::*;
use twist_core::ring::{rat, Rat, RationalFunction, VarRef};
use twist_core::swapping::{LabelSet, LinkingMutation, SwapElement, SwappingAlgebra};

fn p(a: i64, b: i64) -> RationalFunction {
    if a == b {
        RationalFunction::zero()
    } else {
        RationalFunction::var(VarRef::pair(a, b))
    }
}

fn frac(num: &[(i64, i64)], den: &[(i64, i64)]) -> RationalFunction {
    let prod = |xs: &[(i64, i64)]| xs.iter().fold(RationalFunction::one(), |acc, (a, b)| &acc * &p(*a, *b));
    prod(num).checked_div(&prod(den)).unwrap()
}

#[test]
fn linking_number_is_cut_independent_with_expected_values() {
    let order = LabelSet::window(0, 5);
    let mut seen = BTreeSet::new();
    for q in 0..6i64.pow(4) {
        let (r, x, s, y) = (q % 6, q / 6 % 6, q / 36 % 6, q / 216);
        let all = order.linking_number_all_cuts(r, x, s, y).unwrap();
        assert!(all.iter().all(|v| *v == all[0]), "cut dependence at {:?}", (r, x, s, y));
        // sign behavior
        assert_eq!(order.linking_number(s, y, r, x).unwrap(), -all[0].clone());
        assert_eq!(order.linking_number(x, r, s, y).unwrap(), -all[0].clone());
        seen.insert(all[0].clone());
    }
    let expected: BTreeSet<Rat> = [-2, -1, 0, 1, 2].iter().map(|n| rat(*n, 2)).collect();
    assert_eq!(seen, expected);
}

fn window_element(alg: &SwappingAlgebra, k: i64) -> SwapElement {
    alg.cross_fraction(k - 1, k + 2, k + 1, k).unwrap()
}

#[test]
fn adjacent_window_identity() {
    let k = 10;
    let alg = SwappingAlgebra::new(LabelSet::window(k - 3, k + 6));
    let lb = alg.log_bracket(&window_element(&alg, k), &window_element(&alg, k + 1)).unwrap();
    let expected = &(&RationalFunction::from_int(-1)
        + &frac(&[(k - 1, k + 2), (k, k + 1)], &[(k - 1, k + 1), (k, k + 2)]))
        + &frac(&[(k + 2, k + 1), (k + 3, k)], &[(k + 2, k), (k + 3, k + 1)]);
    assert_eq!(lb.value, expected);
}

#[test]
fn distance_two_window_identity() {
    let k = 10;
    let alg = SwappingAlgebra::new(LabelSet::window(k - 3, k + 6));
    let lb = alg.log_bracket(&window_element(&alg, k), &window_element(&alg, k + 2)).unwrap();
    let expected = -&frac(&[(k + 2, k + 3), (k + 1, k)], &[(k + 2, k), (k + 1, k + 3)]);
    assert_eq!(lb.value, expected);
}

#[test]
fn far_windows_commute() {
    let k = 10;
    let alg = SwappingAlgebra::new(LabelSet::window(k - 8, k + 8));
    for d in [3, 4, -3, -4] {
        let lb = alg.log_bracket(&window_element(&alg, k), &window_element(&alg, k + d)).unwrap();
        assert!(lb.is_zero(), "offset {d}");
    }
}

fn gen_strategy(m: i64) -> impl Strategy<Value = (i64, i64)> {
    (0..m, 0..m).prop_filter("distinct", |(a, b)| a != b)
}

fn cross_strategy(m: i64) -> impl Strategy<Value = (i64, i64, i64, i64)> {
    (0..m, 0..m, 0..m, 0..m).prop_filter("admissible", |(x, y, z, t)| x != t && y != z && x != z && y != t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_on_generators(a in gen_strategy(8), b in gen_strategy(8), c in gen_strategy(8)) {
        let alg = SwappingAlgebra::new(LabelSet::window(0, 7));
        let (f, g, h) = (alg.generator(a.0, a.1).unwrap(), alg.generator(b.0, b.1).unwrap(), alg.generator(c.0, c.1).unwrap());
        prop_assert!(alg.jacobiator(&f, &g, &h).unwrap().is_zero());
    }

    #[test]
    fn jacobi_on_cross_fractions(a in cross_strategy(7), b in cross_strategy(7), c in cross_strategy(7)) {
        let alg = SwappingAlgebra::new(LabelSet::window(0, 6));
        let f = alg.cross_fraction(a.0, a.1, a.2, a.3).unwrap();
        let g = alg.cross_fraction(b.0, b.1, b.2, b.3).unwrap();
        let h = alg.cross_fraction(c.0, c.1, c.2, c.3).unwrap();
        prop_assert!(alg.jacobiator(&f, &g, &h).unwrap().is_zero());
    }

    #[test]
    fn bracket_is_antisymmetric_bilinear_and_leibniz(
        a in gen_strategy(6), b in gen_strategy(6), c in cross_strategy(6), lam in -5i64..5,
    ) {
        let alg = SwappingAlgebra::new(LabelSet::window(0, 5));
        let f = alg.generator(a.0, a.1).unwrap();
        let g = alg.cross_fraction(c.0, c.1, c.2, c.3).unwrap();
        let h = alg.generator(b.0, b.1).unwrap().add(&g);
        let br = |x: &SwapElement, y: &SwapElement| alg.bracket(x, y).unwrap().value;
        prop_assert_eq!(br(&f, &g), -&br(&g, &f));
        let lin = f.scale(&rat(lam, 1)).add(&h);
        prop_assert_eq!(br(&lin, &g), &br(&f, &g).scale(&rat(lam, 1)) + &br(&h, &g));
        let fg = f.mul(&g);
        prop_assert_eq!(br(&fg, &h), &(&f.value * &br(&g, &h)) + &(&br(&f, &h) * &g.value));
    }

    #[test]
    fn cross_fractions_multiply_in_middle_slots(c in cross_strategy(7), w in 0i64..7) {
        let (x, y, z, t) = c;
        prop_assume!(w != x && w != y);
        let alg = SwappingAlgebra::new(LabelSet::window(0, 6));
        let lhs = alg.cross_fraction(x, y, z, t).unwrap();
        let rhs = alg.cross_fraction(x, y, z, w).unwrap().mul(&alg.cross_fraction(x, y, w, t).unwrap());
        prop_assert_eq!(lhs.value, rhs.value);
    }
}

#[test]
fn mutated_linking_breaks_jacobi() {
    let alg = SwappingAlgebra::new(LabelSet::window(0, 5)).with_mutation(Some(LinkingMutation::FlipSecondTerm));
    let gens: Vec<(i64, i64)> = (0..6).flat_map(|a| (0..6).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let g = &gens;
    let witness =
        g.iter().flat_map(|a| g.iter().flat_map(move |b| g.iter().map(move |c| (*a, *b, *c)))).find(|(a, b, c)| {
            let (f, g, h) =
                (alg.generator(a.0, a.1).unwrap(), alg.generator(b.0, b.1).unwrap(), alg.generator(c.0, c.1).unwrap());
            !alg.jacobiator(&f, &g, &h).unwrap().is_zero()
        });
    assert!(witness.is_some());
}
