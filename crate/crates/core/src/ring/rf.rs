use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{Monomial, Poly};
use super::rat::Rat;
use super::scalar;
use super::var::VarRef;
use super::RingError;

/// Exact multivariate rational function `num / den`.
///
/// The denominator is kept partially factored: a monic monomial part and a
/// multiset of primitive, non-monomial polynomial factors with positive
/// leading coefficient. All scalar content lives in the numerator.
///
/// Canonical form: the monomial content shared by `num` and the monomial part
/// is cancelled, and `num` is not divisible by any stored factor. Factors are
/// not guaranteed to be pairwise coprime, so equality is decided by
/// cross-multiplication over a common multiple of both denominators, never
/// by comparing representations.
#[derive(Clone)]
pub struct RationalFunction {
    num: Poly,
    mono: Monomial,
    factors: BTreeMap<Poly, u32>,
}

/// Splits a nonzero polynomial into `scalar * monomial * prod(factors)`,
/// peeling off factors already known to the caller first.
fn split_poly(p: &Poly, known: &[&Poly]) -> (Rat, Monomial, Vec<(Poly, u32)>) {
    let m = p.monomial_content();
    let mut q = p.div_monomial(&m).expect("monomial content divides");
    let c = q.signed_content();
    q = q.scale(&c.recip());
    let mut out: Vec<(Poly, u32)> = Vec::new();
    for f in known {
        let mut e = 0;
        while !q.is_constant() {
            match q.div_exact(f) {
                Some(r) => {
                    q = r;
                    e += 1;
                }
                None => break,
            }
        }
        if e > 0 {
            out.push(((*f).clone(), e));
        }
    }
    if !q.is_constant() {
        out.push((q, 1));
    }
    (c, m, out)
}

impl RationalFunction {
    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rat::from_integer(n.into()))
    }

    pub fn var(v: VarRef) -> Self {
        Self::from_poly(Poly::var(v))
    }

    pub fn from_poly(num: Poly) -> Self {
        RationalFunction { num, mono: Monomial::one(), factors: BTreeMap::new() }
    }

    /// `num / den` in canonical form.
    pub fn from_parts(num: Poly, den: &Poly) -> Result<Self, RingError> {
        Self::from_poly(num).div_poly(den, 1)
    }

    fn canonical(mut num: Poly, mut mono: Monomial, mut factors: BTreeMap<Poly, u32>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.monomial_content().gcd(&mono);
        if !g.is_one() {
            num = num.div_monomial(&g).expect("gcd divides");
            mono = mono.div(&g).expect("gcd divides");
        }
        factors.retain(|f, e| {
            while *e > 0 {
                match num.div_exact(f) {
                    Some(q) => {
                        num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
            *e > 0
        });
        RationalFunction { num, mono, factors }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    /// The denominator expanded into a single polynomial.
    pub fn denominator(&self) -> Poly {
        let mut d = Poly::term(self.mono.clone(), Rat::one());
        for (f, e) in &self.factors {
            d = &d * &f.pow(*e);
        }
        d
    }

    pub fn denominator_factors(&self) -> (&Monomial, &BTreeMap<Poly, u32>) {
        (&self.mono, &self.factors)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.mono.is_one() && self.factors.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<Rat> {
        self.as_polynomial().and_then(Poly::constant_value)
    }

    pub fn variables(&self) -> BTreeSet<VarRef> {
        let mut vars = self.num.variables();
        vars.extend(self.mono.vars().copied());
        for f in self.factors.keys() {
            vars.extend(f.variables());
        }
        vars
    }

    pub fn depends_on(&self, v: &VarRef) -> bool {
        self.num.depends_on(v) || self.mono.exponent(v) > 0 || self.factors.keys().any(|f| f.depends_on(v))
    }

    /// Common multiple of both denominators (max exponents per factor) and
    /// the cofactors that lift each side onto it.
    fn common_denominator(&self, other: &Self) -> (Monomial, BTreeMap<Poly, u32>, Poly, Poly) {
        let mono = self.mono.lcm(&other.mono);
        let mut factors = self.factors.clone();
        for (f, e) in &other.factors {
            let slot = factors.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
        let cofactor = |side: &Self| {
            let mut p = Poly::term(mono.div(&side.mono).expect("lcm"), Rat::one());
            for (f, e) in &factors {
                let missing = e - side.factors.get(f).copied().unwrap_or(0);
                if missing > 0 {
                    p = &p * &f.pow(missing);
                }
            }
            p
        };
        let (ca, cb) = (cofactor(self), cofactor(other));
        (mono, factors, ca, cb)
    }

    fn add_impl(&self, other: &Self, sign: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if sign { other.clone() } else { -other };
        }
        let (mono, factors, ca, cb) = self.common_denominator(other);
        let lhs = &self.num * &ca;
        let rhs = &other.num * &cb;
        let num = if sign { &lhs + &rhs } else { &lhs - &rhs };
        Self::canonical(num, mono, factors)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut factors = self.factors.clone();
        for (f, e) in &other.factors {
            *factors.entry(f.clone()).or_insert(0) += e;
        }
        Self::canonical(&self.num * &other.num, self.mono.mul(&other.mono), factors)
    }

    /// Divides by `p^e` for a polynomial `p`, splitting `p` against the
    /// factors already present in the denominator.
    pub fn div_poly(&self, p: &Poly, e: u32) -> Result<Self, RingError> {
        if p.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if e == 0 || self.is_zero() {
            return Ok(self.clone());
        }
        let known: Vec<&Poly> = self.factors.keys().collect();
        let (c, m, parts) = split_poly(p, &known);
        let mut factors = self.factors.clone();
        for (f, k) in parts {
            *factors.entry(f).or_insert(0) += k * e;
        }
        let num = self.num.scale(&c.pow(e as i32).recip());
        Ok(Self::canonical(num, self.mono.mul(&m.pow(e)), factors))
    }

    pub fn inv(&self) -> Result<Self, RingError> {
        if self.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        let known: Vec<&Poly> = self.factors.keys().collect();
        let (c, m, parts) = split_poly(&self.num, &known);
        let mut num = Poly::term(self.mono.clone(), c.recip());
        for (f, e) in &self.factors {
            num = &num * &f.pow(*e);
        }
        Ok(Self::canonical(num, m, parts.into_iter().collect()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, RingError> {
        Ok(self.mul_impl(&other.inv()?))
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn pow(&self, e: i64) -> Result<Self, RingError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let e = u32::try_from(e).map_err(|_| RingError::ExponentTooLarge(e))?;
        if e == 0 {
            return Ok(Self::one());
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let factors = self.factors.iter().map(|(f, k)| (f.clone(), k * e)).collect();
        Ok(RationalFunction { num: self.num.pow(e), mono: self.mono.pow(e), factors })
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction { num: self.num.scale(c), ..self.clone() }
    }

    /// Partial derivative by the quotient rule, written against the factored
    /// denominator: only factors that depend on `v` get their exponent bumped.
    pub fn partial(&self, v: &VarRef) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut moving: Vec<(Poly, u32)> = Vec::new();
        let mono_exp = self.mono.exponent(v);
        if mono_exp > 0 {
            moving.push((Poly::var(*v), mono_exp));
        }
        for (f, e) in &self.factors {
            if f.depends_on(v) {
                moving.push((f.clone(), *e));
            }
        }
        if moving.is_empty() {
            return Self::canonical(self.num.derivative(v), self.mono.clone(), self.factors.clone());
        }
        let product = moving.iter().fold(Poly::one(), |acc, (g, _)| &acc * g);
        let mut num = &self.num.derivative(v) * &product;
        for (i, (g, e)) in moving.iter().enumerate() {
            let others =
                moving.iter().enumerate().filter(|(j, _)| *j != i).fold(Poly::one(), |acc, (_, (h, _))| &acc * h);
            let term = &(&self.num * &g.derivative(v)) * &others;
            num = &num - &term.scale(&Rat::from_integer((*e).into()));
        }
        let mut mono = self.mono.clone();
        if mono_exp > 0 {
            mono = mono.mul(&Monomial::var(*v));
        }
        let mut factors = self.factors.clone();
        for (f, _) in moving.iter().skip(usize::from(mono_exp > 0)) {
            *factors.get_mut(f).expect("moving factor is stored") += 1;
        }
        Self::canonical(num, mono, factors)
    }

    /// Evaluates in any scalar domain; a vanishing denominator is a pole.
    pub fn eval_with<S: scalar::Scalar>(&self, values: &HashMap<VarRef, S>) -> Result<S, RingError> {
        let num = self.num.eval(values)?;
        let den = Poly::term(self.mono.clone(), Rat::one()).eval(values)?;
        let mut den = den;
        for (f, e) in &self.factors {
            den = den.mul(&f.eval(values)?.powu(*e));
        }
        let inv = den.inv().ok_or(RingError::Pole)?;
        Ok(num.mul(&inv))
    }

    /// Evaluates with an assignment callback (e.g. a closure over a slice).
    pub fn eval<S: scalar::Scalar>(&self, assign: impl Fn(&VarRef) -> Option<S>) -> Result<S, RingError> {
        let mut values = HashMap::new();
        for v in self.variables() {
            let x = assign(&v).ok_or(RingError::UnassignedVariable(v))?;
            values.insert(v, x);
        }
        self.eval_with(&values)
    }

    /// Substitutes rational functions for variables; unmapped variables stay.
    pub fn substitute(&self, map: impl Fn(&VarRef) -> Option<RationalFunction>) -> Result<Self, RingError> {
        self.eval(|v| Some(map(v).unwrap_or_else(|| RationalFunction::var(*v))))
    }

    /// Renames variables; `f` must be injective on the variables present.
    pub fn map_vars(&self, f: impl Fn(VarRef) -> VarRef) -> Result<Self, RingError> {
        let mut out = Self::from_poly(self.num.map_vars(&f));
        let mono = Poly::term(self.mono.map_vars(&f), Rat::one());
        out = out.div_poly(&mono, 1)?;
        for (g, e) in &self.factors {
            out = out.div_poly(&g.map_vars(&f), *e)?;
        }
        Ok(out)
    }

    /// Decides `self == other` by cross-multiplication.
    pub fn equals(&self, other: &Self) -> bool {
        if self.is_polynomial() && other.is_polynomial() {
            return self.num == other.num;
        }
        let (_, _, ca, cb) = self.common_denominator(other);
        &self.num * &ca == &other.num * &cb
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for RationalFunction {}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl From<VarRef> for RationalFunction {
    fn from(v: VarRef) -> Self {
        Self::var(v)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        self.add_impl(rhs, true)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self.add_impl(rhs, false)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        self.mul_impl(rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, ..self.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: &RationalFunction) -> RationalFunction {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl std::iter::Sum for RationalFunction {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| &acc + &x)
    }
}

impl scalar::Scalar for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn from_rat(q: &Rat) -> Self {
        RationalFunction::constant(q.clone())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        RationalFunction::inv(self).ok()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::format_rf(self))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Field operation selector for [`rf_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// One exact field operation, result canonical.
pub fn rf_arith(op: ArithOp, f: &RationalFunction, g: &RationalFunction) -> Result<RationalFunction, RingError> {
    Ok(match op {
        ArithOp::Add => f + g,
        ArithOp::Sub => f - g,
        ArithOp::Mul => f * g,
        ArithOp::Div => f.checked_div(g)?,
    })
}

/// Rebuilds the canonical representative of `num / den`.
pub fn rf_normalize(num: &Poly, den: &Poly) -> Result<RationalFunction, RingError> {
    RationalFunction::from_parts(num.clone(), den)
}

impl RationalFunction {
    /// Canonical representative; idempotent.
    pub fn normalized(&self) -> Self {
        Self::canonical(self.num.clone(), self.mono.clone(), self.factors.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat::{int, rat};

    fn b(i: i64) -> RationalFunction {
        RationalFunction::var(VarRef::named("B", i))
    }

    fn bp(i: i64) -> Poly {
        Poly::var(VarRef::named("B", i))
    }

    #[test]
    fn content_reduction() {
        let f = rf_normalize(&bp(1).scale(&int(2)), &bp(2).scale(&int(4))).unwrap();
        assert_eq!(f.numerator(), &bp(1).scale(&rat(1, 2)));
        assert_eq!(f.denominator(), bp(2));
    }

    #[test]
    fn difference_of_squares_cancels() {
        let num = &(&bp(1) * &bp(1)) - &(&bp(2) * &bp(2));
        let den = &bp(1) - &bp(2);
        let f = rf_normalize(&num, &den).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f, &b(1) + &b(2));
        // equality oracle: cross-multiplication by hand
        assert_eq!(&f.numerator().clone() * &den, &num * &f.denominator());
    }

    #[test]
    fn zero_numerator_and_zero_denominator() {
        let f = rf_normalize(&Poly::zero(), &bp(1)).unwrap();
        assert!(f.is_zero());
        assert!(f.is_polynomial());
        assert!(matches!(rf_normalize(&bp(1), &Poly::zero()), Err(RingError::DivisionByZero)));
    }

    #[test]
    fn arithmetic_examples() {
        assert!((&b(1) + &(-&b(1))).is_zero());
        let q = b(1).checked_div(&b(2)).unwrap();
        assert_eq!(&q * &b(2), b(1));
        let v = RationalFunction::var(VarRef::named("v", 1));
        let inv = (&RationalFunction::one() + &v).pow(-1).unwrap();
        assert_eq!(inv.numerator(), &Poly::one());
        assert_eq!(inv.denominator(), &Poly::one() + &Poly::var(VarRef::named("v", 1)));
        assert!(matches!(RationalFunction::zero().pow(-1), Err(RingError::DivisionByZero)));
        assert!(matches!(rf_arith(ArithOp::Div, &b(1), &RationalFunction::zero()), Err(RingError::DivisionByZero)));
    }

    #[test]
    fn partial_examples() {
        let f = &(&b(1) * &b(2)) - &(&b(1) + &b(2));
        assert_eq!(f.partial(&VarRef::named("B", 1)), &b(2) - &RationalFunction::one());
        let g = (&b(1) * &b(3)).checked_div(&b(2)).unwrap();
        let expected = -&(&b(1) * &b(3)).checked_div(&(&b(2) * &b(2))).unwrap();
        assert_eq!(g.partial(&VarRef::named("B", 2)), expected);
        assert!(b(3).partial(&VarRef::named("B", 1)).is_zero());
    }

    #[test]
    fn partial_through_polynomial_factor() {
        // d/dx 1/(1 + x)^2 = -2/(1 + x)^3
        let x = RationalFunction::var(VarRef::named("x", 1));
        let f = (&RationalFunction::one() + &x).pow(-2).unwrap();
        let d = f.partial(&VarRef::named("x", 1));
        let expected = (&RationalFunction::one() + &x).pow(-3).unwrap().scale(&int(-2));
        assert_eq!(d, expected);
    }

    #[test]
    fn eval_examples() {
        let f = &(&b(1) * &b(2)) - &(&b(1) + &b(2));
        let val: Rat = f.eval(|_| Some(int(4))).unwrap();
        assert_eq!(val, int(8));
        let g = b(1).checked_div(&b(2)).unwrap();
        let pole: Result<Rat, _> = g.eval(|v| Some(if v.index == 2 { int(0) } else { int(1) }));
        assert!(matches!(pole, Err(RingError::Pole)));
        let c = RationalFunction::constant(rat(7, 3));
        assert_eq!(c.eval::<Rat>(|_| None).unwrap(), rat(7, 3));
        let unassigned: Result<Rat, _> = b(1).eval(|_| None);
        assert!(matches!(unassigned, Err(RingError::UnassignedVariable(_))));
    }

    #[test]
    fn shared_factors_merge_on_addition() {
        let x = RationalFunction::var(VarRef::named("x", 1));
        let y = RationalFunction::var(VarRef::named("x", 2));
        let d1 = (&x - &y).inv().unwrap();
        let d2 = (&(&x - &y) * &(&x + &y)).inv().unwrap();
        let s = &d1 + &d2;
        // (x + y + 1) / ((x - y)(x + y))
        let expected = (&(&x + &y) + &RationalFunction::one()).checked_div(&(&(&x - &y) * &(&x + &y))).unwrap();
        assert_eq!(s, expected);
        assert!(s.denominator_factors().1.values().all(|e| *e == 1));
    }

    #[test]
    fn renaming_preserves_value() {
        let f = (&b(1) - &b(3)).checked_div(&(&b(2) - &b(1))).unwrap();
        let g = f.map_vars(|v| VarRef { index: 4 - v.index, ..v }).unwrap();
        let expected = (&b(3) - &b(1)).checked_div(&(&b(2) - &b(3))).unwrap();
        assert_eq!(g, expected);
    }
}
