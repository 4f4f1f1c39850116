use std::path::PathBuf;

use proptest::prelude::*;
use twist_core::poisson::{
    builtin_structure, compatibility_check, is_poisson, load_structure, miura_check, miura_image, mixed_jacobiator,
    parse_structure, pencil, CheckMode, PoissonStructure, StructureTag, Verdict,
};
use twist_core::ring::{int, parse_expr, RationalFunction, VarRef};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn b(i: i64) -> RationalFunction {
    RationalFunction::var(VarRef::named("B", i))
}

fn p(text: &str) -> RationalFunction {
    parse_expr(text, None).unwrap()
}

#[test]
fn shipped_files_match_builtins() {
    let cases = [
        ("c2n.json", StructureTag::C2N, vec![5, 6, 9]),
        ("s2.json", StructureTag::S2, vec![3, 5, 8]),
        ("v2.json", StructureTag::V2, vec![3, 6]),
        ("c3n.json", StructureTag::C3N, vec![7, 8]),
    ];
    for (file, tag, periods) in cases {
        for n in periods {
            let loaded = load_structure(data(file), Some(n)).unwrap();
            assert!(loaded.table_eq(&builtin_structure(tag, n).unwrap()), "{file} at N = {n}");
        }
    }
}

#[test]
fn bracket_examples() {
    let c2n = builtin_structure(StructureTag::C2N, 6).unwrap();
    let s2 = builtin_structure(StructureTag::S2, 6).unwrap();
    assert_eq!(s2.pbracket(&b(1), &b(2)), &b(1) * &b(2));
    assert_eq!(c2n.pbracket(&b(1), &b(4)), RationalFunction::zero());
    // Only the distance-two entry {B_2, B_4} contributes.
    assert_eq!(c2n.pbracket(&(&b(1) * &b(2)), &b(4)), p("-B[1]*B[2]*B[4]/B[3]"));
    assert_eq!(s2.pbracket(&p("B[1]*B[2] - B[1] - B[2]"), &b(4)), RationalFunction::zero());
    assert_eq!(s2.pbracket(&p("-B[2]*B[4]/B[3]"), &b(1)), p("B[1]*B[2]*B[4]/B[3]"));
}

#[test]
fn jacobiator_examples() {
    let c2n = builtin_structure(StructureTag::C2N, 7).unwrap();
    assert!(c2n.jacobiator(&b(1), &b(2), &b(3)).is_zero());
    assert!(c2n.jacobiator(&b(2), &b(2), &b(5)).is_zero());
}

#[test]
fn symmetries_of_builtins() {
    for tag in StructureTag::ALL {
        let s = builtin_structure(tag, 7).unwrap();
        assert!(s.is_shift_equivariant(), "{tag}");
    }
    assert!(builtin_structure(StructureTag::C2N, 7).unwrap().is_reversal_anti_equivariant());
    assert!(builtin_structure(StructureTag::S2, 7).unwrap().is_reversal_anti_equivariant());
}

#[test]
fn builtins_are_poisson_small() {
    for n in 5..=6 {
        for tag in [StructureTag::C2N, StructureTag::S2] {
            let s = builtin_structure(tag, n).unwrap();
            let v = is_poisson(&s, CheckMode::Paranoid);
            assert!(v.is_poisson(), "{tag} N = {n}: {:?}", v.witness);
        }
    }
    let c3n = builtin_structure(StructureTag::C3N, 7).unwrap();
    assert!(is_poisson(&c3n, CheckMode::Reduced).is_poisson());
}

#[test]
fn pencil_is_poisson_in_lambda() {
    let c2n = builtin_structure(StructureTag::C2N, 5).unwrap();
    let s2 = builtin_structure(StructureTag::S2, 5).unwrap();
    let pen = pencil(&c2n, &s2).unwrap();
    assert!(pen.entry(&VarRef::named("B", 1), &VarRef::named("B", 2)).depends_on(&VarRef::named("lam", 0)));
    assert!(is_poisson(&pen, CheckMode::Paranoid).is_poisson());
}

#[test]
fn c2n_s2_compatible() {
    let c2n = builtin_structure(StructureTag::C2N, 6).unwrap();
    let s2 = builtin_structure(StructureTag::S2, 6).unwrap();
    for mode in [CheckMode::Reduced, CheckMode::Paranoid] {
        let r = compatibility_check(&c2n, &s2, mode).unwrap();
        assert_eq!(r.verdict, Verdict::Compatible);
        assert!(r.witness.is_none() && r.pencil_poisson && r.pencil_agrees);
    }
    let self_pair = compatibility_check(&c2n, &c2n, CheckMode::Reduced).unwrap();
    assert_eq!(self_pair.verdict, Verdict::Compatible);
}

#[test]
fn c3n_and_external_table_incompatible() {
    let c3n = builtin_structure(StructureTag::C3N, 7).unwrap();
    let s3 = load_structure(data("s3_external.json"), Some(7)).unwrap();
    assert!(is_poisson(&s3, CheckMode::Paranoid).is_poisson());
    let r = compatibility_check(&c3n, &s3, CheckMode::Reduced).unwrap();
    assert_eq!(r.verdict, Verdict::Incompatible);
    assert!(r.pencil_agrees && !r.pencil_poisson);
    let w = r.witness.expect("witness");
    assert_eq!(w.triple.to_string(), "(X[1], X[2], X[3])");
    // value from an independent symbolic expansion
    assert_eq!(w.value, p("-X[1]*X[2]^2*X[3]*(Y[1] - Y[2])"));
}

#[test]
fn non_poisson_input_is_undetermined() {
    // {B_1, B_2} = B_1 gives Jac(B_1, B_2, B_3) = −B_1
    let text = r#"{"name": "lin", "N": "symbolic", "families": [{"symbol": "B", "count_per_k": 1}],
        "entries": [{"offset": 1, "expr": "B[k]"}]}"#;
    let lin = parse_structure(text, Some(5)).unwrap();
    let v = is_poisson(&lin, CheckMode::Reduced);
    assert_eq!(v.witness.as_ref().unwrap().value, -&b(1));
    let s2 = builtin_structure(StructureTag::S2, 5).unwrap();
    let r = compatibility_check(&lin, &s2, CheckMode::Reduced).unwrap();
    assert_eq!(r.verdict, Verdict::Undetermined);
    assert_eq!(r.poisson, [false, true]);
}

#[test]
fn miura_pushforward_differs_from_target() {
    let r = miura_check(5).unwrap();
    assert!(r.pairs[0].holds, "(1, 1) is 0 = 0");
    // {μ1, μ3} only sees the v2–v3 coupling
    let pair = &r.pairs[2];
    assert_eq!(pair.j, 3);
    assert_eq!(pair.target, RationalFunction::zero());
    assert_eq!(pair.pushed, p("-v[3]*(v[1] + 1)*(v[4] + 1)/(v[2]*v[4])"));
    assert!(!r.holds());
    let mu = miura_image(5);
    assert_eq!(mu[0], p("(1 + v[1])*(1 + 1/v[2])"));
}

#[test]
fn zero_table_is_poisson() {
    let z = PoissonStructure::empty("zero", 5, vec![twist_core::ring::Family::of("B")]);
    assert!(is_poisson(&z, CheckMode::Paranoid).is_poisson());
}

fn small_rf() -> impl Strategy<Value = RationalFunction> {
    let atom = (1i64..=6, 1i64..=3, -2i64..=2).prop_map(|(i, e, c)| {
        let c = if c == 0 { 1 } else { c };
        &b(i).pow(e).unwrap().scale(&int(c)) + &RationalFunction::from_int(c)
    });
    (atom.clone(), atom.clone(), atom).prop_map(|(x, y, z)| &x + &y.checked_div(&z).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bracket_axioms(f in small_rf(), g in small_rf(), h in small_rf()) {
        let s = builtin_structure(StructureTag::C2N, 6).unwrap();
        prop_assert_eq!(s.pbracket(&f, &g), -&s.pbracket(&g, &f));
        prop_assert_eq!(s.pbracket(&f, &(&g + &h)), &s.pbracket(&f, &g) + &s.pbracket(&f, &h));
        prop_assert_eq!(s.pbracket(&f, &(&g * &h)), &(&s.pbracket(&f, &g) * &h) + &(&g * &s.pbracket(&f, &h)));
        prop_assert!(s.pbracket(&f, &f).is_zero());
    }

    #[test]
    fn shift_equivariance(f in small_rf(), g in small_rf(), sh in 1i64..6) {
        let s = builtin_structure(StructureTag::C2N, 6).unwrap();
        let chi = |x: &RationalFunction| x.map_vars(|v| s.shift(v, sh)).unwrap();
        prop_assert_eq!(s.pbracket(&chi(&f), &chi(&g)), chi(&s.pbracket(&f, &g)));
    }

    #[test]
    fn reversal_anti_equivariance(f in small_rf(), g in small_rf()) {
        for tag in [StructureTag::C2N, StructureTag::S2] {
            let s = builtin_structure(tag, 6).unwrap();
            let nu = |x: &RationalFunction| x.map_vars(|v| s.reverse(v)).unwrap();
            prop_assert_eq!(s.pbracket(&nu(&f), &nu(&g)), -&nu(&s.pbracket(&f, &g)));
        }
    }

    /// Guard beyond generator triples: Jacobi and the mixed Jacobiator on
    /// composite rational functions.
    #[test]
    fn composite_jacobi(f in small_rf(), g in small_rf(), h in small_rf()) {
        let c2n = builtin_structure(StructureTag::C2N, 6).unwrap();
        let s2 = builtin_structure(StructureTag::S2, 6).unwrap();
        prop_assert!(c2n.jacobiator(&f, &g, &h).is_zero());
        prop_assert!(mixed_jacobiator(&c2n, &s2, &f, &g, &h).unwrap().is_zero());
    }
}
