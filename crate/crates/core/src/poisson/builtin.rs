use std::fmt;
use std::str::FromStr;

use super::{PoissonError, PoissonStructure};
use crate::ring::{Family, RationalFunction, VarRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StructureTag {
    C2N,
    S2,
    V2,
    C3N,
}

impl StructureTag {
    pub const ALL: [StructureTag; 4] = [StructureTag::C2N, StructureTag::S2, StructureTag::V2, StructureTag::C3N];

    /// Smallest period at which every listed offset class is distinct,
    /// including the classes the table declares to be zero.
    pub fn min_period(self) -> usize {
        match self {
            StructureTag::C2N => 5,
            StructureTag::S2 | StructureTag::V2 => 3,
            StructureTag::C3N => 7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StructureTag::C2N => "C2N",
            StructureTag::S2 => "S2",
            StructureTag::V2 => "V2",
            StructureTag::C3N => "C3N",
        }
    }
}

impl fmt::Display for StructureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructureTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        StructureTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown structure tag `{s}`"))
    }
}

/// Deliberate corruptions used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureMutation {
    /// Flips the sign of `{X_k, Y_k}` in the planar structure.
    FlipXYDiagonal,
}

type Row = (&'static str, &'static str, i64, RationalFunction);

fn build(
    tag: StructureTag,
    period: usize,
    families: &[&str],
    superpose: bool,
    rows: impl Fn(&dyn Fn(&str, i64) -> RationalFunction) -> Vec<Row>,
) -> Result<PoissonStructure, PoissonError> {
    let min = if superpose { 3 } else { tag.min_period() };
    if period < min {
        return Err(PoissonError::PeriodTooSmall { name: tag.name().into(), period, min });
    }
    let n = period as i64;
    let mut s = PoissonStructure::empty(tag.name(), period, families.iter().map(|f| Family::of(f)).collect());
    for k in 1..=n {
        let var = |fam: &str, d: i64| RationalFunction::var(VarRef::named(fam, k + d).normalized(Some(n)));
        for (left, right, d, value) in rows(&var) {
            let a = VarRef::named(left, k).normalized(Some(n));
            let b = VarRef::named(right, k + d).normalized(Some(n));
            if a == b {
                continue;
            }
            if superpose {
                s.accumulate(a, b, value);
            } else {
                s.insert(a, b, value)?;
            }
        }
    }
    Ok(s)
}

fn one() -> RationalFunction {
    RationalFunction::one()
}

fn c2n_rows(v: &dyn Fn(&str, i64) -> RationalFunction) -> Vec<Row> {
    let b = |d| v("B", d);
    let adjacent = &(&(&b(0) * &b(1)) - &b(0)) - &b(1);
    let distance_two = -&(&b(0) * &b(2)).checked_div(&b(1)).expect("nonzero variable");
    vec![("B", "B", 1, adjacent), ("B", "B", 2, distance_two)]
}

fn c3n_rows(v: &dyn Fn(&str, i64) -> RationalFunction, mutation: Option<StructureMutation>) -> Vec<Row> {
    let x = |d| v("X", d);
    let y = |d| v("Y", d);
    let m = |a: &RationalFunction, b: &RationalFunction| a * b;
    let om = |a: &RationalFunction| &one() - a;
    let mut rows = vec![
        // {X_k, X_{k+1}} = X_k X_{k+1} (1 − Y_k)(1 − X_k − X_{k+1})
        ("X", "X", 1, m(&m(&m(&x(0), &x(1)), &om(&y(0))), &(&om(&x(0)) - &x(1)))),
        // {X_k, X_{k+2}} = X_k X_{k+1} X_{k+2} (Y_k + Y_{k+1} − 1)
        ("X", "X", 2, m(&m(&m(&x(0), &x(1)), &x(2)), &(&(&y(0) + &y(1)) - &one()))),
        ("X", "Y", -3, m(&m(&m(&x(-1), &x(0)), &y(-3)), &y(-2))),
        (
            "X",
            "Y",
            -2,
            m(
                &m(&x(0), &y(-2)),
                &(&(&(&(&m(&x(0), &y(-1)) + &m(&x(-1), &y(-1))) + &m(&x(-1), &y(-2))) - &x(-1)) - &y(-1)),
            ),
        ),
        ("X", "Y", -1, m(&m(&m(&x(0), &y(-1)), &om(&x(0))), &om(&y(-1)))),
        ("X", "Y", 0, -&m(&m(&m(&x(0), &y(0)), &om(&x(0))), &om(&y(0)))),
        (
            "X",
            "Y",
            1,
            m(&m(&x(0), &y(1)), &(&(&(&(&y(0) + &x(1)) - &m(&x(0), &y(0))) - &m(&x(1), &y(0))) - &m(&x(1), &y(1)))),
        ),
        ("X", "Y", 2, -&m(&m(&m(&x(0), &x(1)), &y(1)), &y(2))),
        // {Y_k, Y_{k+1}} = Y_k Y_{k+1} (1 − X_{k+1})(1 − Y_k − Y_{k+1})
        ("Y", "Y", 1, m(&m(&m(&y(0), &y(1)), &om(&x(1))), &(&om(&y(0)) - &y(1)))),
        // {Y_k, Y_{k+2}} = Y_k Y_{k+1} Y_{k+2} (X_{k+1} + X_{k+2} − 1)
        ("Y", "Y", 2, m(&m(&m(&y(0), &y(1)), &y(2)), &(&(&x(1) + &x(2)) - &one()))),
    ];
    if mutation == Some(StructureMutation::FlipXYDiagonal) {
        for row in rows.iter_mut().filter(|r| r.0 == "X" && r.1 == "Y" && r.2 == 0) {
            row.3 = -&row.3;
        }
    }
    rows
}

/// One of the structures `C2N`, `S2`, `V2`, `C3N` at period `N`.
pub fn builtin_structure(tag: StructureTag, period: usize) -> Result<PoissonStructure, PoissonError> {
    builtin_structure_with(tag, period, None)
}

pub fn builtin_structure_with(
    tag: StructureTag,
    period: usize,
    mutation: Option<StructureMutation>,
) -> Result<PoissonStructure, PoissonError> {
    build_tag(tag, period, mutation, false)
}

/// Below the minimal period, offset classes collide. This variant sums every
/// row that lands on the same pair instead of rejecting the table; it is an
/// exploration device, not one of the listed structures.
pub fn superposed_structure(tag: StructureTag, period: usize) -> Result<PoissonStructure, PoissonError> {
    let s = build_tag(tag, period, None, true)?;
    Ok(s.renamed(&format!("{}~superposed", tag.name())))
}

fn build_tag(
    tag: StructureTag,
    period: usize,
    mutation: Option<StructureMutation>,
    superpose: bool,
) -> Result<PoissonStructure, PoissonError> {
    match tag {
        StructureTag::C2N => build(tag, period, &["B"], superpose, c2n_rows),
        StructureTag::S2 => build(tag, period, &["B"], superpose, |v| vec![("B", "B", 1, &v("B", 0) * &v("B", 1))]),
        StructureTag::V2 => build(tag, period, &["v"], superpose, |v| vec![("v", "v", 1, &v("v", 0) * &v("v", 1))]),
        StructureTag::C3N => build(tag, period, &["X", "Y"], superpose, |v| c3n_rows(v, mutation)),
    }
}

/// `μ(v_k) = (1 + v_k)(1 + v_{k+1}⁻¹)` for `k = 1..N`.
pub fn miura_image(period: usize) -> Vec<RationalFunction> {
    let n = period as i64;
    let v = |k: i64| RationalFunction::var(VarRef::named("v", k).normalized(Some(n)));
    (1..=n)
        .map(|k| {
            let inv = v(k + 1).inv().expect("variable is nonzero");
            &(&one() + &v(k)) * &(&one() + &inv)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_expr;

    fn var(f: &str, k: i64) -> VarRef {
        VarRef::named(f, k)
    }

    #[test]
    fn sample_entries() {
        let c2n = builtin_structure(StructureTag::C2N, 5).unwrap();
        assert_eq!(c2n.entry(&var("B", 1), &var("B", 2)), parse_expr("B[1]*B[2] - B[1] - B[2]", None).unwrap());
        assert_eq!(c2n.entry(&var("B", 5), &var("B", 2)), parse_expr("-B[5]*B[2]/B[1]", None).unwrap());
        let s2 = builtin_structure(StructureTag::S2, 5).unwrap();
        assert!(s2.entry(&var("B", 1), &var("B", 3)).is_zero());
        let c3n = builtin_structure(StructureTag::C3N, 7).unwrap();
        // {X_k, Y_{k−3}} at k = 4
        assert_eq!(c3n.entry(&var("X", 4), &var("Y", 1)), parse_expr("X[3]*X[4]*Y[1]*Y[2]", None).unwrap());
    }

    #[test]
    fn period_limits() {
        assert!(matches!(builtin_structure(StructureTag::C2N, 4), Err(PoissonError::PeriodTooSmall { min: 5, .. })));
        assert!(matches!(builtin_structure(StructureTag::C3N, 6), Err(PoissonError::PeriodTooSmall { min: 7, .. })));
        assert!(builtin_structure(StructureTag::S2, 4).is_ok());
    }

    #[test]
    fn superposition_at_four() {
        let s = superposed_structure(StructureTag::C2N, 4).unwrap();
        let both = parse_expr("-B[1]*B[3]/B[2] + B[1]*B[3]/B[4]", None).unwrap();
        assert_eq!(s.entry(&var("B", 1), &var("B", 3)), both);
        assert!(superposed_structure(StructureTag::C2N, 7)
            .unwrap()
            .table_eq(&builtin_structure(StructureTag::C2N, 7).unwrap()));
    }

    #[test]
    fn mutation_flips_one_family() {
        let good = builtin_structure(StructureTag::C3N, 7).unwrap();
        let bad = builtin_structure_with(StructureTag::C3N, 7, Some(StructureMutation::FlipXYDiagonal)).unwrap();
        assert_eq!(bad.entry(&var("X", 2), &var("Y", 2)), -&good.entry(&var("X", 2), &var("Y", 2)));
        assert_eq!(bad.entry(&var("X", 2), &var("Y", 3)), good.entry(&var("X", 2), &var("Y", 3)));
    }
}
