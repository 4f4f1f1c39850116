//! Bivector tables on cyclic lattices of coordinates and the brackets they
//! define, with Jacobi, compatibility and Poisson-map checks.

mod builtin;
mod checks;
mod file;

pub use builtin::{
    builtin_structure, builtin_structure_with, miura_image, superposed_structure, StructureMutation, StructureTag,
};
pub use checks::{
    compatibility_check, is_poisson, miura_check, mixed_jacobiator, pencil, CheckMode, CompatibilityReport, MiuraPair,
    MiuraReport, PoissonVerdict, Triple, Verdict, Witness,
};
pub use file::{load_structure, parse_structure, EntrySpec, FamilySpec, PeriodSpec, StructureFile};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::ring::{Family, RationalFunction, RingError, Template, VarRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoissonError {
    #[error("inconsistent table: {a} and {b} get incompatible entries ({first} vs {second})")]
    InconsistentTable { a: VarRef, b: VarRef, first: String, second: String },
    #[error("period {period} too small for {name} (needs at least {min})")]
    PeriodTooSmall { name: String, period: usize, min: usize },
    #[error("structures do not match: {0}")]
    StructureMismatch(String),
    #[error("invalid structure file: {0}")]
    Schema(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// One row of a bivector table: `π(left_k, right_{k+offset}) = expr(k)`.
#[derive(Debug, Clone)]
pub struct TableEntry {
    pub left: Family,
    pub right: Family,
    pub offset: i64,
    pub expr: Template,
}

/// Cyclic antisymmetric bivector `π` on the generators `F[k]`, `k = 1..N`,
/// for each declared family `F`.
#[derive(Debug, Clone)]
pub struct PoissonStructure {
    name: String,
    period: usize,
    families: Vec<Family>,
    /// `π(a, b)` stored in both orders, nonzero entries only.
    adj: BTreeMap<VarRef, BTreeMap<VarRef, RationalFunction>>,
}

impl PoissonStructure {
    /// The zero bivector.
    pub fn empty(name: &str, period: usize, families: Vec<Family>) -> Self {
        PoissonStructure { name: name.to_string(), period, families, adj: BTreeMap::new() }
    }

    /// Instantiates table rows for `k = 1..N`, completing by antisymmetry.
    pub fn from_table(
        name: &str,
        period: usize,
        families: Vec<Family>,
        entries: &[TableEntry],
    ) -> Result<Self, PoissonError> {
        let mut s = Self::empty(name, period, families);
        let n = period as i64;
        for e in entries {
            for k in 1..=n {
                let a = VarRef::new(e.left, k).normalized(Some(n));
                let b = VarRef::new(e.right, k + e.offset).normalized(Some(n));
                if a == b {
                    return Err(PoissonError::PeriodTooSmall { name: name.to_string(), period, min: period + 1 });
                }
                s.insert(a, b, e.expr.instantiate(k, Some(n))?)?;
            }
        }
        Ok(s)
    }

    /// Sets `π(a, b) = value` and `π(b, a) = −value`; a second, different
    /// value for the same pair is an error.
    pub fn insert(&mut self, a: VarRef, b: VarRef, value: RationalFunction) -> Result<(), PoissonError> {
        if let Some(old) = self.adj.get(&a).and_then(|row| row.get(&b)) {
            if *old != value {
                return Err(PoissonError::InconsistentTable {
                    a,
                    b,
                    first: old.to_string(),
                    second: value.to_string(),
                });
            }
            return Ok(());
        }
        if value.is_zero() {
            return Ok(());
        }
        self.adj.entry(b).or_default().insert(a, -&value);
        self.adj.entry(a).or_default().insert(b, value);
        Ok(())
    }

    /// Adds `value` to `π(a, b)` (and `−value` to `π(b, a)`).
    pub fn accumulate(&mut self, a: VarRef, b: VarRef, value: RationalFunction) {
        let old = self.entry(&a, &b);
        let new = &old + &value;
        for (x, y, v) in [(a, b, new.clone()), (b, a, -&new)] {
            if v.is_zero() {
                if let Some(row) = self.adj.get_mut(&x) {
                    row.remove(&y);
                }
            } else {
                self.adj.entry(x).or_default().insert(y, v);
            }
        }
        self.adj.retain(|_, row| !row.is_empty());
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// All generators, sorted.
    pub fn generators(&self) -> Vec<VarRef> {
        let mut out: Vec<VarRef> =
            self.families.iter().flat_map(|f| (1..=self.period as i64).map(move |k| VarRef::new(*f, k))).collect();
        out.sort();
        out
    }

    pub fn is_generator(&self, v: &VarRef) -> bool {
        v.second.is_none() && self.families.contains(&v.family) && (1..=self.period as i64).contains(&v.index)
    }

    /// `π(a, b)`, zero when absent.
    pub fn entry(&self, a: &VarRef, b: &VarRef) -> RationalFunction {
        let n = Some(self.period as i64);
        let (a, b) = (a.normalized(n), b.normalized(n));
        self.adj.get(&a).and_then(|row| row.get(&b)).cloned().unwrap_or_else(RationalFunction::zero)
    }

    /// Nonzero entries `π(a, b)` with `a < b`.
    pub fn entries(&self) -> impl Iterator<Item = (&VarRef, &VarRef, &RationalFunction)> {
        self.adj.iter().flat_map(|(a, row)| row.iter().filter(move |(b, _)| a < *b).map(move |(b, v)| (a, b, v)))
    }

    /// Entry-by-entry equality of two tables.
    pub fn table_eq(&self, other: &Self) -> bool {
        if self.period != other.period {
            return false;
        }
        let families = |s: &Self| s.families.iter().copied().collect::<BTreeSet<_>>();
        if families(self) != families(other) {
            return false;
        }
        let keys = |s: &Self| s.entries().map(|(a, b, _)| (*a, *b)).collect::<Vec<_>>();
        keys(self) == keys(other) && self.entries().all(|(a, b, v)| other.entry(a, b) == *v)
    }

    /// `{f, g} = Σ π(a, b) ∂_a f ∂_b g` over generators `a`, `b`; any other
    /// variable (such as a pencil parameter) is a Casimir.
    pub fn pbracket(&self, f: &RationalFunction, g: &RationalFunction) -> RationalFunction {
        let partials = |h: &RationalFunction| -> Vec<(VarRef, RationalFunction)> {
            h.variables().into_iter().filter(|v| self.adj.contains_key(v)).map(|v| (v, h.partial(&v))).collect()
        };
        let df = partials(f);
        let dg: HashMap<VarRef, RationalFunction> = partials(g).into_iter().collect();
        let mut total = RationalFunction::zero();
        for (a, dfa) in &df {
            for (b, pi) in &self.adj[a] {
                if let Some(dgb) = dg.get(b) {
                    total = &total + &(&(pi * dfa) * dgb);
                }
            }
        }
        total
    }

    /// `{{f,g},h} + {{g,h},f} + {{h,f},g}`.
    pub fn jacobiator(&self, f: &RationalFunction, g: &RationalFunction, h: &RationalFunction) -> RationalFunction {
        let a = self.pbracket(&self.pbracket(f, g), h);
        let b = self.pbracket(&self.pbracket(g, h), f);
        let c = self.pbracket(&self.pbracket(h, f), g);
        &(&a + &b) + &c
    }

    /// The cyclic shift `χ_s(F[l]) = F[l + s]`.
    pub fn shift(&self, v: VarRef, s: i64) -> VarRef {
        if self.families.contains(&v.family) {
            v.shifted(s, Some(self.period as i64))
        } else {
            v
        }
    }

    /// The reversal `ν(F[l]) = F[N + 1 − l]`.
    pub fn reverse(&self, v: VarRef) -> VarRef {
        if self.families.contains(&v.family) && v.second.is_none() {
            VarRef { index: self.period as i64 + 1 - v.index, ..v }.normalized(Some(self.period as i64))
        } else {
            v
        }
    }

    /// Whether `{ν a, ν b} = −ν{a, b}` holds on every pair of generators.
    pub fn is_reversal_anti_equivariant(&self) -> bool {
        self.entries().all(|(a, b, v)| {
            let image = v.map_vars(|x| self.reverse(x)).expect("reversal is a bijection");
            self.entry(&self.reverse(*a), &self.reverse(*b)) == -&image
        })
    }

    /// Whether `{χ_s a, χ_s b} = χ_s{a, b}` holds for `s = 1` (hence all `s`).
    pub fn is_shift_equivariant(&self) -> bool {
        self.entries().all(|(a, b, v)| {
            let image = v.map_vars(|x| self.shift(x, 1)).expect("shift is a bijection");
            self.entry(&self.shift(*a, 1), &self.shift(*b, 1)) == image
        })
    }

    fn same_shape(&self, other: &Self) -> Result<(), PoissonError> {
        let families = |s: &Self| s.families.iter().copied().collect::<BTreeSet<_>>();
        if self.period != other.period || families(self) != families(other) {
            return Err(PoissonError::StructureMismatch(format!(
                "{} (N = {}, {:?}) vs {} (N = {}, {:?})",
                self.name, self.period, self.families, other.name, other.period, other.families
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ParseContext;

    fn b(i: i64) -> RationalFunction {
        RationalFunction::var(VarRef::named("B", i))
    }

    #[test]
    fn antisymmetric_completion_and_conflicts() {
        let ctx = ParseContext::default();
        let entry = |offset, text: &str| TableEntry {
            left: Family::of("B"),
            right: Family::of("B"),
            offset,
            expr: ctx.parse(text).unwrap(),
        };
        let s = PoissonStructure::from_table("t", 5, vec![Family::of("B")], &[entry(1, "B[k]*B[k+1]")]).unwrap();
        assert_eq!(s.entry(&VarRef::named("B", 2), &VarRef::named("B", 1)), -&(&b(1) * &b(2)));
        assert_eq!(s.pbracket(&b(1), &b(2)), &b(1) * &b(2));
        let bad = PoissonStructure::from_table(
            "t",
            5,
            vec![Family::of("B")],
            &[entry(1, "B[k]*B[k+1]"), entry(-1, "B[k]*B[k-1]")],
        );
        assert!(matches!(bad, Err(PoissonError::InconsistentTable { .. })));
        let consistent = PoissonStructure::from_table(
            "t",
            5,
            vec![Family::of("B")],
            &[entry(1, "B[k]*B[k+1]"), entry(-1, "-B[k]*B[k-1]")],
        );
        assert!(consistent.is_ok());
    }
}
