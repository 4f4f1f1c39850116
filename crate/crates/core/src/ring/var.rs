use std::cmp::Ordering;
use std::fmt;

use super::RingError;

/// Name of a variable family (`B`, `X`, `v`, `pair`, ...).
///
/// Stored as up to eight ASCII bytes packed big-endian into a `u64`, so the
/// derived integer order coincides with the lexicographic order of the names.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Family(u64);

impl Family {
    pub const MAX_LEN: usize = 8;

    pub fn new(name: &str) -> Result<Self, RingError> {
        let bytes = name.as_bytes();
        let valid = !bytes.is_empty()
            && bytes.len() <= Self::MAX_LEN
            && bytes[0].is_ascii_alphabetic()
            && bytes.iter().all(|b| b.is_ascii_alphanumeric() || *b == b'_');
        if !valid {
            return Err(RingError::InvalidFamily(name.to_string()));
        }
        let mut packed = 0u64;
        for i in 0..Self::MAX_LEN {
            packed <<= 8;
            if let Some(b) = bytes.get(i) {
                packed |= *b as u64;
            }
        }
        Ok(Family(packed))
    }

    /// Panicking constructor for names known at compile time.
    pub fn of(name: &str) -> Self {
        Self::new(name).expect("static family name")
    }

    pub fn name(&self) -> String {
        self.0.to_be_bytes().iter().take_while(|b| **b != 0).map(|b| *b as char).collect()
    }

    pub fn pair() -> Self {
        Self::of("pair")
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A generator of a coordinate ring: a family symbol plus its index.
///
/// Single-index families (`B[3]`) leave `second` empty; ordered-pair
/// generators of the swapping ring (`pair[r, x]`) carry both labels.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub family: Family,
    pub index: i64,
    pub second: Option<i64>,
}

impl VarRef {
    pub fn new(family: Family, index: i64) -> Self {
        VarRef { family, index, second: None }
    }

    pub fn named(family: &str, index: i64) -> Self {
        Self::new(Family::of(family), index)
    }

    pub fn pair(first: i64, second: i64) -> Self {
        VarRef { family: Family::pair(), index: first, second: Some(second) }
    }

    pub fn is_pair(&self) -> bool {
        self.second.is_some()
    }

    /// Reduces the index into `[1, period]` (the convention `k + N = k`).
    /// Pair generators live on a non-periodic label set and are left alone.
    pub fn normalized(self, period: Option<i64>) -> Self {
        match (period, self.second) {
            (Some(n), None) => VarRef { index: (self.index - 1).rem_euclid(n) + 1, ..self },
            _ => self,
        }
    }

    pub fn shifted(self, by: i64, period: Option<i64>) -> Self {
        VarRef { index: self.index + by, ..self }.normalized(period)
    }
}

impl Ord for VarRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.family.cmp(&other.family).then(self.index.cmp(&other.index)).then(self.second.cmp(&other.second))
    }
}

impl PartialOrd for VarRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.second {
            Some(s) => write!(f, "{}[{}, {}]", self.family, self.index, s),
            None => write!(f, "{}[{}]", self.family, self.index),
        }
    }
}

impl fmt::Debug for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
