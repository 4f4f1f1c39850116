//! Verification suites: each returns a report of named checks, so callers
//! can print, serialize or gate on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::coords::{
    b_from_polygon, hill_from_b, polygon_from_hill, random_polygon, representative_offset, theta_symbolic_line,
    window_element, CoordError, CoordKind, CoordVector, Coordinate, HillOperator, WindowBracket,
};
use crate::poisson::{builtin_structure, builtin_structure_with, PoissonStructure, StructureMutation, StructureTag};
use crate::ring::{rat, Rat, RationalFunction, VarRef};
use crate::swapping::{LabelSet, LinkingMutation, SwapElement, SwappingAlgebra};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct SwappingSuite {
    pub seed: u64,
    /// Labels `0..labels`.
    pub labels: i64,
    pub triples: usize,
    pub mutation: Option<LinkingMutation>,
}

impl Default for SwappingSuite {
    fn default() -> Self {
        SwappingSuite { seed: 1, labels: 8, triples: 200, mutation: None }
    }
}

fn pair(a: i64, b: i64) -> RationalFunction {
    RationalFunction::var(VarRef::pair(a, b))
}

fn pair_fraction(num: &[(i64, i64)], den: &[(i64, i64)]) -> RationalFunction {
    let prod = |xs: &[(i64, i64)]| xs.iter().fold(RationalFunction::one(), |acc, (a, b)| &acc * &pair(*a, *b));
    prod(num).checked_div(&prod(den)).expect("pair variables are nonzero")
}

/// `[e_k, e_{k+1}]` and `−1 + (k−1,k+2)(k,k+1)/((k−1,k+1)(k,k+2)) + (k+2,k+1)(k+3,k)/((k+2,k)(k+3,k+1))`.
pub fn adjacent_window_identity(alg: &SwappingAlgebra, k: i64) -> Result<(RationalFunction, RationalFunction), String> {
    let e = |j| window_element(alg, Coordinate::B, j).map_err(|e| e.to_string());
    let lhs = alg.log_bracket(&e(k)?, &e(k + 1)?).map_err(|e| e.to_string())?.value;
    let rhs = &(&RationalFunction::from_int(-1)
        + &pair_fraction(&[(k - 1, k + 2), (k, k + 1)], &[(k - 1, k + 1), (k, k + 2)]))
        + &pair_fraction(&[(k + 2, k + 1), (k + 3, k)], &[(k + 2, k), (k + 3, k + 1)]);
    Ok((lhs, rhs))
}

/// `[e_k, e_{k+2}]` and `−(k+2,k+3)(k+1,k)/((k+2,k)(k+1,k+3))`.
pub fn distance_two_window_identity(
    alg: &SwappingAlgebra,
    k: i64,
) -> Result<(RationalFunction, RationalFunction), String> {
    let e = |j| window_element(alg, Coordinate::B, j).map_err(|e| e.to_string());
    let lhs = alg.log_bracket(&e(k)?, &e(k + 2)?).map_err(|e| e.to_string())?.value;
    let rhs = -&pair_fraction(&[(k + 2, k + 3), (k + 1, k)], &[(k + 2, k), (k + 1, k + 3)]);
    Ok((lhs, rhs))
}

fn identity_check(name: &str, got: Result<(RationalFunction, RationalFunction), String>) -> Check {
    match got {
        Ok((lhs, rhs)) if lhs == rhs => Check::new(name, true, "exact"),
        Ok((lhs, rhs)) => Check::new(name, false, format!("got {lhs}, expected {rhs}")),
        Err(e) => Check::new(name, false, e),
    }
}

/// First triple whose Jacobiator is nonzero, scanning in order.
fn jacobi_witness(
    alg: &SwappingAlgebra,
    triples: &[[SwapElement; 3]],
) -> Result<Option<(usize, RationalFunction)>, String> {
    triples
        .par_iter()
        .enumerate()
        .map(|(i, [f, g, h])| match alg.jacobiator(f, g, h) {
            Ok(v) if v.is_zero() => Ok(None),
            Ok(v) => Ok(Some((i, v))),
            Err(e) => Err(e.to_string()),
        })
        .collect::<Result<Vec<_>, String>>()
        .map(|v| v.into_iter().flatten().next())
}

fn describe(e: &SwapElement) -> String {
    e.value.to_string()
}

fn jacobi_check(name: &str, alg: &SwappingAlgebra, triples: &[[SwapElement; 3]]) -> Check {
    match jacobi_witness(alg, triples) {
        Ok(None) => Check::new(name, true, format!("{} triples, all Jacobiators 0", triples.len())),
        Ok(Some((i, v))) => {
            let [f, g, h] = &triples[i];
            Check::new(name, false, format!("Jacobiator of ({}, {}, {}) = {v}", describe(f), describe(g), describe(h)))
        }
        Err(e) => Check::new(name, false, e),
    }
}

/// Linking numbers, the two window identities, far-window commutation and
/// the Jacobi identity on random and exhaustive triples.
pub fn verify_swapping(cfg: &SwappingSuite) -> SuiteReport {
    let mut checks = Vec::new();
    let m = cfg.labels;
    let order = LabelSet::window(0, m - 1);

    let mut bad = None;
    'outer: for q in 0..m.pow(4) {
        let (r, x, s, y) = (q % m, q / m % m, q / (m * m) % m, q / (m * m * m));
        let all = order.linking_number_all_cuts(r, x, s, y).expect("labels in window");
        let allowed = [-2, -1, 0, 1, 2].iter().any(|n| all[0] == rat(*n, 2));
        if !allowed || all.iter().any(|v| *v != all[0]) {
            bad = Some((r, x, s, y));
            break 'outer;
        }
    }
    checks.push(Check::new(
        "linking number is cut independent with values in {0, ±1/2, ±1}",
        bad.is_none(),
        bad.map(|t| format!("fails at {t:?}")).unwrap_or_else(|| format!("all 4-tuples on {m} labels")),
    ));

    let k = 10;
    let local = SwappingAlgebra::new(LabelSet::window(k - 8, k + 8)).with_mutation(cfg.mutation);
    checks.push(identity_check("adjacent window identity", adjacent_window_identity(&local, k)));
    checks.push(identity_check("distance-two window identity", distance_two_window_identity(&local, k)));
    let far = [3, 4, -3, -4].iter().find_map(|d| {
        let e = window_element(&local, Coordinate::B, k).ok()?;
        let f = window_element(&local, Coordinate::B, k + d).ok()?;
        match local.log_bracket(&e, &f) {
            Ok(b) if b.is_zero() => None,
            Ok(b) => Some(format!("offset {d}: {}", b.value)),
            Err(e) => Some(e.to_string()),
        }
    });
    checks.push(Check::new("far windows commute", far.is_none(), far.unwrap_or_else(|| "offsets ±3, ±4".into())));

    let alg = SwappingAlgebra::new(order).with_mutation(cfg.mutation);
    let mut r = rng(cfg.seed);
    let gen = |r: &mut ChaCha8Rng| loop {
        let (a, b) = (r.gen_range(0..m), r.gen_range(0..m));
        if a != b {
            return alg.generator(a, b).expect("labels in window");
        }
    };
    let gens: Vec<[SwapElement; 3]> = (0..cfg.triples).map(|_| [gen(&mut r), gen(&mut r), gen(&mut r)]).collect();
    checks.push(jacobi_check("Jacobi identity on random generator triples", &alg, &gens));

    let cross = |r: &mut ChaCha8Rng| loop {
        let v: Vec<i64> = (0..4).map(|_| r.gen_range(0..m)).collect();
        if v[0] != v[3] && v[1] != v[2] && v[0] != v[2] && v[1] != v[3] {
            return alg.cross_fraction(v[0], v[1], v[2], v[3]).expect("admissible");
        }
    };
    let crosses: Vec<[SwapElement; 3]> =
        (0..cfg.triples).map(|_| [cross(&mut r), cross(&mut r), cross(&mut r)]).collect();
    checks.push(jacobi_check("Jacobi identity on random cross-fraction triples", &alg, &crosses));

    let small = SwappingAlgebra::new(LabelSet::window(0, 5)).with_mutation(cfg.mutation);
    let g: Vec<SwapElement> = (0..6)
        .flat_map(|a| (0..6).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| small.generator(a, b).expect("labels in window"))
        .collect();
    let mut all = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            for l in j + 1..g.len() {
                all.push([g[i].clone(), g[j].clone(), g[l].clone()]);
            }
        }
    }
    checks.push(jacobi_check("Jacobi identity on all generator triples of 6 labels", &small, &all));

    SuiteReport {
        suite: "verify-swapping".into(),
        seed: Some(cfg.seed),
        config: json!({
            "labels": m,
            "triples": cfg.triples,
            "mutation": cfg.mutation.map(|_| "flip-linking-sign"),
        }),
        checks,
    }
}

#[derive(Debug, Clone)]
pub struct FormulasSuite {
    /// 2 or 3.
    pub n: usize,
    pub period: usize,
    pub seed: u64,
    pub polygons: usize,
    pub mutation: Option<StructureMutation>,
}

/// `θ{e_i, e_{i+d}}` against `π(B_i, B_{i+d})` with every `B_j` replaced by
/// `θ(e_j)`, for symbolic points `f[j]` on the line.
pub fn derive_line_entry(
    structure: &PoissonStructure,
    d: i64,
) -> Result<(RationalFunction, RationalFunction), CoordError> {
    let n = structure.period() as i64;
    let i = n / 2 + 1;
    let w = WindowBracket::new(Coordinate::B, Coordinate::B, d)?;
    let derived = theta_symbolic_line(&w.bracket.value, |l| l + i)?;
    let alg = SwappingAlgebra::new(LabelSet::window(i - n - 4, i + n + 4));
    let entry = structure.entry(&Coordinate::B.var(i, n as usize), &Coordinate::B.var(i + d, n as usize));
    let closed = entry
        .substitute(|v| {
            // nearest lift of B[m] to i
            let j = i + representative_offset(v.index - i, n as usize);
            let e = window_element(&alg, Coordinate::B, j).ok()?;
            theta_symbolic_line(&e.value, |l| l).ok()
        })
        .map_err(CoordError::Ring)?;
    Ok((derived, closed))
}

fn class_name(left: Coordinate, right: Coordinate, d: i64, on_table: bool) -> String {
    let idx = match d {
        0 => "k".to_string(),
        d if d > 0 => format!("k+{d}"),
        d => format!("k{d}"),
    };
    let tag = if on_table { "" } else { " (off-table)" };
    format!("{{{}[k], {}[{idx}]}}{tag}", left.family(), right.family())
}

/// Coordinate brackets derived from the swapping algebra against the
/// closed-form tables: symbolic for `n = 2`, exact on random polygons for
/// `n = 3`.
pub fn verify_formulas(cfg: &FormulasSuite) -> Result<SuiteReport, String> {
    let (lo, hi) = crate::virasoro::mode_range(cfg.period);
    let mut checks = Vec::new();
    match cfg.n {
        2 => {
            let s = builtin_structure(StructureTag::C2N, cfg.period).map_err(|e| e.to_string())?;
            for d in (lo..=hi).filter(|d| *d != 0) {
                let on_table = !s.entry(&VarRef::named("B", 1), &VarRef::named("B", 1 + d)).is_zero();
                let name = class_name(Coordinate::B, Coordinate::B, d, on_table);
                checks.push(match derive_line_entry(&s, d) {
                    Ok((a, b)) if a == b => Check::new(name, true, "exact"),
                    Ok((a, b)) => Check::new(name, false, format!("derived {a}, table {b}")),
                    Err(e) => Check::new(name, false, e.to_string()),
                });
            }
        }
        3 => {
            let s = builtin_structure_with(StructureTag::C3N, cfg.period, cfg.mutation).map_err(|e| e.to_string())?;
            let mut r = rng(cfg.seed);
            let polygons = (0..cfg.polygons)
                .map(|_| random_polygon(3, cfg.period, &mut r))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let fams = [Coordinate::X, Coordinate::Y];
            let classes: Vec<(Coordinate, Coordinate, i64)> = fams
                .iter()
                .flat_map(|l| fams.iter().flat_map(move |r| (lo..=hi).map(move |d| (*l, *r, d))))
                .filter(|(l, r, d)| !(l == r && *d == 0))
                .collect();
            let n = cfg.period as i64;
            checks = classes
                .par_iter()
                .map(|&(left, right, d)| {
                    let on_table = !s.entry(&left.var(1, cfg.period), &right.var(1 + d, cfg.period)).is_zero();
                    let name = class_name(left, right, d, on_table);
                    let w = match WindowBracket::new(left, right, d) {
                        Ok(w) => w,
                        Err(e) => return Check::new(name, false, e.to_string()),
                    };
                    let mut worst: Option<(f64, usize, i64)> = None;
                    for (pi, poly) in polygons.iter().enumerate() {
                        for i in 1..=n {
                            match w.check(&s, i, poly) {
                                Ok(c) if c.derived == c.closed_form => {}
                                Ok(c) => {
                                    if worst.is_none_or(|(r, _, _)| c.residual > r) {
                                        worst = Some((c.residual, pi, i));
                                    }
                                }
                                Err(e) => return Check::new(name, false, format!("polygon {pi}, k = {i}: {e}")),
                            }
                        }
                    }
                    match worst {
                        None => {
                            Check::new(name, true, format!("{} polygons × {n} positions, residual 0", polygons.len()))
                        }
                        Some((res, pi, i)) => {
                            Check::new(name, false, format!("max residual {res:.3e} at polygon {pi}, k = {i}"))
                        }
                    }
                })
                .collect();
        }
        other => return Err(format!("dimension must be 2 or 3, got {other}")),
    }
    Ok(SuiteReport {
        suite: "verify-formulas".into(),
        seed: (cfg.n == 3).then_some(cfg.seed),
        config: json!({
            "n": cfg.n,
            "N": cfg.period,
            "polygons": if cfg.n == 3 { cfg.polygons } else { 0 },
            "mutation": cfg.mutation.map(|_| "flip-xy-diagonal"),
        }),
        checks,
    })
}

#[derive(Debug, Clone)]
pub struct HillSuite {
    pub seed: u64,
    pub count: usize,
    pub periods: Vec<usize>,
}

fn random_hill(n: usize, r: &mut ChaCha8Rng) -> HillOperator<Rat> {
    // |H_k| ≤ N² keeps b_k = H_k/N² + 2 in [1, 3]
    let n2 = (n * n) as i64;
    HillOperator::new(
        (0..n)
            .map(|_| {
                let q = r.gen_range(1..=7);
                rat(r.gen_range(-n2 * q..=n2 * q), q)
            })
            .collect(),
    )
}

/// `B_k = b_k b_{k+1}` on random exact Hill operators, and the exact round
/// trip `hill_from_b ∘ b_from_polygon ∘ polygon_from_hill`.
pub fn verify_hill(cfg: &HillSuite) -> SuiteReport {
    let mut r = rng(cfg.seed);
    let mut checks = Vec::new();
    for &n in &cfg.periods {
        let ops: Vec<HillOperator<Rat>> = (0..cfg.count).map(|_| random_hill(n, &mut r)).collect();
        let results: Vec<Result<(bool, bool), String>> = ops
            .par_iter()
            .map(|op| {
                let poly = polygon_from_hill(op).map_err(|e| e.to_string())?;
                let b = b_from_polygon(&poly).map_err(|e| e.to_string())?;
                let product = (1..=n as i64).all(|k| *b.b(k) == &op.b(k) * &op.b(k + 1));
                let round = match hill_from_b(&b, true) {
                    Ok(back) => back == *op,
                    Err(e) if n % 2 == 0 => matches!(e, CoordError::NonUniqueHill(_)),
                    Err(_) => false,
                };
                Ok((product, round))
            })
            .collect();
        let first_err = results.iter().position(|x| x.is_err());
        let product_bad = results.iter().position(|x| matches!(x, Ok((false, _))));
        let round_bad = results.iter().position(|x| matches!(x, Ok((_, false))));
        let detail = |bad: Option<usize>| match (first_err, bad) {
            (Some(i), _) => format!("operator {i}: {}", results[i].as_ref().unwrap_err()),
            (None, Some(i)) => format!("operator {i} fails"),
            (None, None) => format!("{} operators", cfg.count),
        };
        checks.push(Check::new(
            format!("B_k = b_k b_(k+1), N = {n}"),
            first_err.is_none() && product_bad.is_none(),
            detail(product_bad),
        ));
        let name = if n % 2 == 1 {
            format!("exact round trip on the positive branch, N = {n}")
        } else {
            format!("even N = {n} reports a non-unique Hill operator")
        };
        checks.push(Check::new(name, first_err.is_none() && round_bad.is_none(), detail(round_bad)));
    }
    let flat = CoordVector { kind: CoordKind::B, values: vec![rat(4, 1); 5] };
    let flat_ok = hill_from_b(&flat, true).is_ok_and(|op| op.h.iter().all(|h| *h == rat(0, 1)));
    checks.push(Check::new("B ≡ 4 inverts to H ≡ 0", flat_ok, "N = 5"));
    SuiteReport {
        suite: "hill".into(),
        seed: Some(cfg.seed),
        config: json!({ "count": cfg.count, "N": cfg.periods }),
        checks,
    }
}
