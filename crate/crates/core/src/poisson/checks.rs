use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::builtin::{builtin_structure, miura_image, StructureTag};
use super::{PoissonError, PoissonStructure};
use crate::ring::{Family, RationalFunction, VarRef};

/// Three generators, in the order they were checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple(pub [VarRef; 3]);

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.0;
        write!(f, "({a}, {b}, {c})")
    }
}

impl Serialize for Triple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().serialize(s)
    }
}

fn as_string<S: Serializer>(v: &RationalFunction, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub triple: Triple,
    #[serde(serialize_with = "as_string")]
    pub value: RationalFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// One representative per orbit of the symmetries the tables respect.
    Reduced,
    /// Every triple of distinct generators.
    Paranoid,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoissonVerdict {
    pub structure: String,
    #[serde(rename = "N")]
    pub period: usize,
    pub mode: CheckMode,
    pub triples_checked: usize,
    pub witness: Option<Witness>,
}

impl PoissonVerdict {
    pub fn is_poisson(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Compatible,
    Incompatible,
    /// One of the inputs is not Poisson, so compatibility is not defined.
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityReport {
    pub structures: [String; 2],
    #[serde(rename = "N")]
    pub period: usize,
    pub mode: CheckMode,
    pub verdict: Verdict,
    pub triples_checked: usize,
    pub witness: Option<Witness>,
    pub poisson: [bool; 2],
    /// Whether `a + λ b` is Poisson identically in `λ`.
    pub pencil_poisson: bool,
    /// Whether the pencil verdict agrees with the mixed-Jacobiator verdict.
    pub pencil_agrees: bool,
}

/// Canonical representative of the orbit of a sorted triple.
fn canonical(s: &PoissonStructure, t: [VarRef; 3], use_reversal: bool) -> [VarRef; 3] {
    let n = s.period() as i64;
    let mut best = t;
    let mut consider = |u: [VarRef; 3]| {
        for sh in 0..n {
            let mut m = u.map(|v| s.shift(v, sh));
            m.sort();
            if m < best {
                best = m;
            }
        }
    };
    consider(t);
    if use_reversal {
        consider(t.map(|v| s.reverse(v)));
    }
    best
}

/// Triples `a < b < c` of generators, optionally one per symmetry orbit.
fn triples(s: &PoissonStructure, mode: CheckMode, use_reversal: bool) -> Vec<Triple> {
    let g = s.generators();
    let reduce = mode == CheckMode::Reduced && s.is_shift_equivariant();
    let mut out = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            for k in j + 1..g.len() {
                let t = [g[i], g[j], g[k]];
                if !reduce || canonical(s, t, use_reversal) == t {
                    out.push(Triple(t));
                }
            }
        }
    }
    out
}

fn first_nonzero(list: &[Triple], f: impl Fn(&Triple) -> RationalFunction + Sync) -> Option<Witness> {
    list.par_iter().find_map_first(|t| {
        let value = f(t);
        (!value.is_zero()).then_some(Witness { triple: *t, value })
    })
}

fn var(v: VarRef) -> RationalFunction {
    RationalFunction::var(v)
}

/// Jacobi identity on generator triples.
pub fn is_poisson(s: &PoissonStructure, mode: CheckMode) -> PoissonVerdict {
    let list = triples(s, mode, s.is_reversal_anti_equivariant());
    let witness = first_nonzero(&list, |Triple([a, b, c])| s.jacobiator(&var(*a), &var(*b), &var(*c)));
    PoissonVerdict { structure: s.name().to_string(), period: s.period(), mode, triples_checked: list.len(), witness }
}

/// `K(f, g, h) = {{f,g}_a, h}_b + {{f,g}_b, h}_a + cyclic`.
pub fn mixed_jacobiator(
    sa: &PoissonStructure,
    sb: &PoissonStructure,
    f: &RationalFunction,
    g: &RationalFunction,
    h: &RationalFunction,
) -> Result<RationalFunction, PoissonError> {
    sa.same_shape(sb)?;
    let term = |x: &RationalFunction, y: &RationalFunction, z: &RationalFunction| {
        &sb.pbracket(&sa.pbracket(x, y), z) + &sa.pbracket(&sb.pbracket(x, y), z)
    };
    Ok(&(&term(f, g, h) + &term(g, h, f)) + &term(h, f, g))
}

/// `a + λ b` with `λ` a formal Casimir `lam[0]`.
pub fn pencil(sa: &PoissonStructure, sb: &PoissonStructure) -> Result<PoissonStructure, PoissonError> {
    sa.same_shape(sb)?;
    let lambda = RationalFunction::var(VarRef::new(Family::of("lam"), 0));
    let name = format!("{} + lam*{}", sa.name(), sb.name());
    let mut out = PoissonStructure::empty(&name, sa.period(), sa.families().to_vec());
    let mut keys: Vec<(VarRef, VarRef)> = sa.entries().chain(sb.entries()).map(|(a, b, _)| (*a, *b)).collect();
    keys.sort();
    keys.dedup();
    for (a, b) in keys {
        let value = &sa.entry(&a, &b) + &(&lambda * &sb.entry(&a, &b));
        out.insert(a, b, value)?;
    }
    Ok(out)
}

/// Mixed Jacobiator on generator triples, cross-checked against the pencil.
pub fn compatibility_check(
    sa: &PoissonStructure,
    sb: &PoissonStructure,
    mode: CheckMode,
) -> Result<CompatibilityReport, PoissonError> {
    sa.same_shape(sb)?;
    let poisson = [is_poisson(sa, mode).is_poisson(), is_poisson(sb, mode).is_poisson()];
    let shift_ok = sa.is_shift_equivariant() && sb.is_shift_equivariant();
    let use_reversal = sa.is_reversal_anti_equivariant() && sb.is_reversal_anti_equivariant();
    let effective = if shift_ok { mode } else { CheckMode::Paranoid };
    let list = triples(sa, effective, use_reversal);
    let witness = first_nonzero(&list, |Triple([a, b, c])| {
        mixed_jacobiator(sa, sb, &var(*a), &var(*b), &var(*c)).expect("shapes checked")
    });
    let pencil_poisson = is_poisson(&pencil(sa, sb)?, mode).is_poisson();
    let verdict = match (poisson, &witness) {
        ([true, true], None) => Verdict::Compatible,
        ([true, true], Some(_)) => Verdict::Incompatible,
        _ => Verdict::Undetermined,
    };
    let pencil_agrees = match verdict {
        Verdict::Compatible => pencil_poisson,
        Verdict::Incompatible => !pencil_poisson,
        Verdict::Undetermined => true,
    };
    Ok(CompatibilityReport {
        structures: [sa.name().to_string(), sb.name().to_string()],
        period: sa.period(),
        mode,
        verdict,
        triples_checked: list.len(),
        witness,
        poisson,
        pencil_poisson,
        pencil_agrees,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MiuraPair {
    pub i: i64,
    pub j: i64,
    /// `{μ(v_i), μ(v_j)}` in the `v` bracket.
    #[serde(serialize_with = "as_string")]
    pub pushed: RationalFunction,
    /// `(δ_{i+1,j} − δ_{i−1,j}) μ(v_i) μ(v_j)`.
    #[serde(serialize_with = "as_string")]
    pub target: RationalFunction,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MiuraReport {
    #[serde(rename = "N")]
    pub period: usize,
    pub pairs: Vec<MiuraPair>,
}

impl MiuraReport {
    pub fn holds(&self) -> bool {
        self.pairs.iter().all(|p| p.holds)
    }

    pub fn first_failure(&self) -> Option<&MiuraPair> {
        self.pairs.iter().find(|p| !p.holds)
    }
}

/// Compares the pushforward of the `v` bracket under `μ` with the `B`
/// bracket `(δ_{i+1,j} − δ_{i−1,j}) B_i B_j`, for `i = 1` and every `j`.
pub fn miura_check(period: usize) -> Result<MiuraReport, PoissonError> {
    let v2 = builtin_structure(StructureTag::V2, period)?;
    let mu = miura_image(period);
    let n = period as i64;
    let i = 1;
    let pairs = (1..=n)
        .into_par_iter()
        .map(|j| {
            let (mi, mj) = (&mu[(i - 1) as usize], &mu[(j - 1) as usize]);
            let pushed = v2.pbracket(mi, mj);
            let delta = |d: i64| i64::from((i + d - j).rem_euclid(n) == 0);
            let coeff = delta(1) - delta(-1);
            let target = (mi * mj).scale(&crate::ring::int(coeff));
            let holds = pushed == target;
            MiuraPair { i, j, pushed, target, holds }
        })
        .collect();
    Ok(MiuraReport { period, pairs })
}
