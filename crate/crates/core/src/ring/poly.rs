use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::rat::{rat_gcd, Rat};
use super::scalar;
use super::var::VarRef;
use super::RingError;

/// A power product `x1^e1 * x2^e2 * ...` with variables sorted and all
/// exponents positive.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarRef, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarRef) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn var_pow(v: VarRef, e: u32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    /// Builds a monomial from unsorted (variable, exponent) pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarRef, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &VarRef) -> u32 {
        self.0.binary_search_by(|(w, _)| w.cmp(v)).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn factors(&self) -> &[(VarRef, u32)] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarRef> {
        self.0.iter().map(|(v, _)| v)
    }

    fn merge(&self, other: &Self, f: impl Fn(u32, u32) -> u32) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let (v, e) = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    Ordering::Less => {
                        i += 1;
                        (x.0, f(x.1, 0))
                    }
                    Ordering::Greater => {
                        j += 1;
                        (y.0, f(0, y.1))
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (x.0, f(x.1, y.1))
                    }
                },
                (Some(x), None) => {
                    i += 1;
                    (x.0, f(x.1, 0))
                }
                (None, Some(y)) => {
                    j += 1;
                    (y.0, f(0, y.1))
                }
                (None, None) => unreachable!(),
            };
            if e > 0 {
                out.push((v, e));
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.merge(other, |a, b| a + b)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        self.merge(other, u32::min)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        self.merge(other, u32::max)
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        Monomial(self.0.iter().map(|(v, x)| (*v, x * e)).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().all(|(v, e)| other.exponent(v) >= *e)
    }

    /// `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if !other.divides(self) {
            return None;
        }
        Some(self.merge(other, |a, b| a - b))
    }

    pub fn map_vars(&self, f: &impl Fn(VarRef) -> VarRef) -> Self {
        Self::from_pairs(self.0.iter().map(|(v, e)| (f(*v), *e)))
    }
}

/// Graded lexicographic order: total degree first, then the exponent of the
/// smallest variable (in `VarRef` order) decides.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (x, y) in self.0.iter().zip(other.0.iter()) {
                match x.0.cmp(&y.0) {
                    // `self` contains a smaller (= more significant) variable.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match x.1.cmp(&y.1) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    },
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.0.iter().map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in a `BTreeMap` under the graded lexicographic order, so the
/// leading term is the last entry and iteration order is deterministic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(v: VarRef) -> Self {
        Self::term(Monomial::var(v), Rat::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// The constant value if the polynomial has no variables.
    pub fn constant_value(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<VarRef> {
        self.terms.keys().flat_map(|m| m.vars().copied()).collect()
    }

    pub fn depends_on(&self, v: &VarRef) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += coef * mono * other`.
    pub fn add_scaled(&mut self, other: &Poly, coef: &Rat, mono: &Monomial) {
        for (m, c) in &other.terms {
            self.add_term(m.mul(mono), c * coef);
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Poly {
        if mono.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.mul(mono), x.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, v: &VarRef) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let lowered = m.div(&Monomial::var(*v)).expect("exponent is positive");
            out.add_term(lowered, c * Rat::from_integer(e.into()));
        }
        out
    }

    /// Greatest common monomial divisor of all terms (`1` for the zero poly).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    pub fn div_monomial(&self, mono: &Monomial) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.div(mono)?, c.clone());
        }
        Some(Poly { terms })
    }

    /// Rational content with the sign of the leading coefficient, so that
    /// `self / content` has coprime integer coefficients and a positive
    /// leading coefficient.
    pub fn signed_content(&self) -> Rat {
        let Some((_, lead)) = self.leading_term() else {
            return Rat::one();
        };
        let g = self.terms.values().fold(Rat::zero(), |acc, c| rat_gcd(&acc, c));
        if lead.is_negative() {
            -g
        } else {
            g
        }
    }

    /// Exact division: `Some(q)` with `q * divisor == self`, or `None`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = divisor.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        if divisor.is_monomial() {
            return self.div_monomial(&dm).map(|p| p.scale(&dc.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            rem.add_scaled(divisor, &-qc.clone(), &qm);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn map_vars(&self, f: &impl Fn(VarRef) -> VarRef) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(f), c.clone())))
    }

    /// Evaluates at the given values. `values` must cover every variable.
    pub fn eval<S: scalar::Scalar>(&self, values: &HashMap<VarRef, S>) -> Result<S, RingError> {
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_rat(c);
            for (v, e) in m.factors() {
                let x = values.get(v).ok_or(RingError::UnassignedVariable(*v))?;
                t = t.mul(&x.powu(*e));
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut acc: HashMap<Monomial, Rat> = HashMap::with_capacity(self.len() * rhs.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                *acc.entry(m1.mul(m2)).or_insert_with(Rat::zero) += c1 * c2;
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::parse::format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat::{int, rat};

    fn b(i: i64) -> Poly {
        Poly::var(VarRef::named("B", i))
    }

    #[test]
    fn grlex_puts_higher_degree_last() {
        let p = &(&b(1) * &b(2)) + &b(1);
        let (lead, _) = p.leading_term().unwrap();
        assert_eq!(lead.degree(), 2);
        let q = &b(1) + &b(2);
        // B[1] is the smaller variable, hence the larger monomial.
        assert_eq!(q.leading_term().unwrap().0, &Monomial::var(VarRef::named("B", 1)));
    }

    #[test]
    fn exact_division() {
        let num = &(&b(1) * &b(1)) - &(&b(2) * &b(2));
        let den = &b(1) - &b(2);
        assert_eq!(num.div_exact(&den), Some(&b(1) + &b(2)));
        assert_eq!(den.div_exact(&num), None);
        assert_eq!((&b(1) + &Poly::one()).div_exact(&b(1)), None);
        assert_eq!(num.scale(&int(3)).div_exact(&Poly::constant(int(3))), Some(num));
    }

    #[test]
    fn derivative_and_content() {
        let p = &(&b(1) * &b(2)) - &(&b(1) + &b(2));
        assert_eq!(p.derivative(&VarRef::named("B", 1)), &b(2) - &Poly::one());
        let q = (&b(1) * &b(1)).mul_monomial(&Monomial::var(VarRef::named("B", 2)));
        let r = &q + &(&b(1) * &b(2)).scale(&int(-4));
        assert_eq!(
            r.monomial_content(),
            Monomial::from_pairs([(VarRef::named("B", 1), 1), (VarRef::named("B", 2), 1)])
        );
        assert_eq!(r.scale(&int(-6)).signed_content(), int(-6));
        assert_eq!(r.scale(&rat(3, 4)).signed_content(), rat(3, 4));
    }
}
