//! JSON bivector tables.
//!
//! ```json
//! {
//!   "name": "C2N",
//!   "N": "symbolic",
//!   "families": [{"symbol": "B", "count_per_k": 1}],
//!   "entries": [
//!     {"offset": 1, "expr": "B[k]*B[k+1] - B[k] - B[k+1]"},
//!     {"offset": 2, "expr": "-B[k]*B[k+2]/B[k+1]"}
//!   ]
//! }
//! ```
//!
//! Each entry sets `π(left[k], right[k+offset])`. With more than one family
//! every entry names its `left` and `right` family.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PoissonError, PoissonStructure, TableEntry};
use crate::ring::{Family, ParseContext};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PeriodSpec {
    Fixed(usize),
    Symbolic(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub symbol: String,
    pub count_per_k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub offset: i64,
    pub expr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub name: String,
    #[serde(rename = "N")]
    pub period: PeriodSpec,
    pub families: Vec<FamilySpec>,
    pub entries: Vec<EntrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl StructureFile {
    /// Instantiates the table at period `N`; `None` uses the file's own period.
    pub fn instantiate(&self, period: Option<usize>) -> Result<PoissonStructure, PoissonError> {
        let schema = |m: String| PoissonError::Schema(m);
        let n = match (&self.period, period) {
            (PeriodSpec::Fixed(n), Some(p)) if *n != p => {
                return Err(schema(format!("file fixes N = {n}, requested {p}")));
            }
            (PeriodSpec::Fixed(n), _) => *n,
            (PeriodSpec::Symbolic(s), Some(p)) if s == "symbolic" => p,
            (PeriodSpec::Symbolic(s), None) if s == "symbolic" => {
                return Err(schema("symbolic N needs an explicit period".into()));
            }
            (PeriodSpec::Symbolic(s), _) => {
                return Err(schema(format!("N must be an integer or \"symbolic\", got `{s}`")))
            }
        };
        if n == 0 {
            return Err(schema("N must be positive".into()));
        }
        let mut families = Vec::new();
        for f in &self.families {
            if f.count_per_k != 1 {
                return Err(schema(format!("family {}: only count_per_k = 1 is supported", f.symbol)));
            }
            let fam = Family::new(&f.symbol)?;
            if families.contains(&fam) {
                return Err(schema(format!("family {} declared twice", f.symbol)));
            }
            families.push(fam);
        }
        let ctx = ParseContext::only(families.iter().copied());
        let resolve = |given: &Option<String>| -> Result<Family, PoissonError> {
            match given {
                Some(name) => {
                    let fam = Family::new(name)?;
                    if families.contains(&fam) {
                        Ok(fam)
                    } else {
                        Err(schema(format!("entry refers to undeclared family {name}")))
                    }
                }
                None if families.len() == 1 => Ok(families[0]),
                None => Err(schema("entries must name left and right families when several are declared".into())),
            }
        };
        let table = self
            .entries
            .iter()
            .map(|e| {
                Ok(TableEntry {
                    left: resolve(&e.left)?,
                    right: resolve(&e.right)?,
                    offset: e.offset,
                    expr: ctx.parse(&e.expr)?,
                })
            })
            .collect::<Result<Vec<_>, PoissonError>>()?;
        PoissonStructure::from_table(&self.name, n, families, &table)
    }
}

/// Parses a structure file and instantiates it at period `N`.
pub fn parse_structure(text: &str, period: Option<usize>) -> Result<PoissonStructure, PoissonError> {
    let file: StructureFile = serde_json::from_str(text).map_err(|e| PoissonError::Schema(e.to_string()))?;
    file.instantiate(period)
}

pub fn load_structure(path: impl AsRef<Path>, period: Option<usize>) -> Result<PoissonStructure, PoissonError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| PoissonError::Schema(format!("{}: {e}", path.display())))?;
    parse_structure(&text, period)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antisymmetry_conflict() {
        let text = r#"{"name": "bad", "N": 5, "families": [{"symbol": "B", "count_per_k": 1}],
            "entries": [{"offset": 1, "expr": "B[k]*B[k+1]"}, {"offset": -1, "expr": "B[k]*B[k-1]"}]}"#;
        assert!(matches!(parse_structure(text, None), Err(PoissonError::InconsistentTable { .. })));
    }

    #[test]
    fn empty_table_is_zero() {
        let text =
            r#"{"name": "zero", "N": "symbolic", "families": [{"symbol": "B", "count_per_k": 1}], "entries": []}"#;
        let s = parse_structure(text, Some(6)).unwrap();
        assert_eq!(s.entries().count(), 0);
        assert!(matches!(parse_structure(text, None), Err(PoissonError::Schema(_))));
    }

    #[test]
    fn schema_errors() {
        let undeclared = r#"{"name": "u", "N": 5, "families": [{"symbol": "B", "count_per_k": 1}],
            "entries": [{"offset": 1, "expr": "X[k]"}]}"#;
        assert!(matches!(parse_structure(undeclared, None), Err(PoissonError::Ring(_))));
        let ambiguous = r#"{"name": "a", "N": 7, "families": [{"symbol": "X", "count_per_k": 1}, {"symbol": "Y", "count_per_k": 1}],
            "entries": [{"offset": 1, "expr": "X[k]"}]}"#;
        assert!(matches!(parse_structure(ambiguous, None), Err(PoissonError::Schema(_))));
        assert!(matches!(parse_structure("{}", None), Err(PoissonError::Schema(_))));
    }
}
