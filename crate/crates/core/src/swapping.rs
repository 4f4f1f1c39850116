//! The swapping algebra on a cyclically ordered label set.
//!
//! Labels are integers; their cyclic order is the increasing order closed up
//! into a circle. A generator `rx` is the variable `pair[r, x]`, and `xx = 0`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ring::{rat, Rat, RationalFunction, RingError, VarRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwapError {
    #[error("label {0} is not in the label set")]
    UnknownLabel(i64),
    #[error("label {0} appears twice")]
    DuplicateLabel(i64),
    #[error("cross fraction [{0}, {1}, {2}, {3}] needs x != t and y != z")]
    InvalidCrossFraction(i64, i64, i64, i64),
    #[error("variable {0} is not a pair generator")]
    NotAPair(VarRef),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Finite set of labels on the circle, in increasing cyclic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<i64>,
}

fn sign(a: i64) -> i8 {
    a.signum() as i8
}

impl LabelSet {
    pub fn new(labels: impl IntoIterator<Item = i64>) -> Result<Self, SwapError> {
        let mut labels: Vec<i64> = labels.into_iter().collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(SwapError::DuplicateLabel(w[0]));
        }
        Ok(LabelSet { labels })
    }

    /// Consecutive labels `lo..=hi`.
    pub fn window(lo: i64, hi: i64) -> Self {
        LabelSet { labels: (lo..=hi).collect() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn contains(&self, label: i64) -> bool {
        self.labels.binary_search(&label).is_ok()
    }

    pub fn rank(&self, label: i64) -> Result<usize, SwapError> {
        self.labels.binary_search(&label).map_err(|_| SwapError::UnknownLabel(label))
    }

    /// The two sign products whose half-difference is the linking number, with
    /// the circle cut just before the label of rank `cut`.
    fn linking_terms(&self, cut: usize, r: i64, x: i64, s: i64, y: i64) -> Result<(i8, i8), SwapError> {
        let m = self.labels.len() as i64;
        let pos = |a: i64| -> Result<i64, SwapError> { Ok((self.rank(a)? as i64 - cut as i64).rem_euclid(m)) };
        let (r, x, s, y) = (pos(r)?, pos(x)?, pos(s)?, pos(y)?);
        let first = sign(r - x) * sign(r - y) * sign(y - x);
        let second = sign(r - x) * sign(r - s) * sign(s - x);
        Ok((first, second))
    }

    pub fn linking_number_with_cut(&self, cut: usize, r: i64, x: i64, s: i64, y: i64) -> Result<Rat, SwapError> {
        let (a, b) = self.linking_terms(cut, r, x, s, y)?;
        Ok(rat((a - b) as i64, 2))
    }

    pub fn linking_number(&self, r: i64, x: i64, s: i64, y: i64) -> Result<Rat, SwapError> {
        self.linking_number_with_cut(0, r, x, s, y)
    }

    /// Linking number recomputed at every cut point of the circle.
    pub fn linking_number_all_cuts(&self, r: i64, x: i64, s: i64, y: i64) -> Result<Vec<Rat>, SwapError> {
        (0..self.len()).map(|c| self.linking_number_with_cut(c, r, x, s, y)).collect()
    }
}

/// `J(rx, sy)` on the given label set.
pub fn linking_number(r: i64, x: i64, s: i64, y: i64, order: &LabelSet) -> Result<Rat, SwapError> {
    order.linking_number(r, x, s, y)
}

/// Which subrings of the fraction algebra an element is known to lie in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Membership {
    /// Polynomial in the generators.
    pub ring: bool,
    /// In the subring generated by cross fractions.
    pub multifraction: bool,
    /// A product of cross fractions and their inverses.
    pub cross_monomial: bool,
}

impl Membership {
    const FRACTION: Membership = Membership { ring: false, multifraction: false, cross_monomial: false };

    fn both(a: Self, b: Self) -> Self {
        Membership {
            ring: a.ring && b.ring,
            multifraction: a.multifraction && b.multifraction,
            cross_monomial: a.cross_monomial && b.cross_monomial,
        }
    }
}

/// Element of the swapping fraction algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapElement {
    pub value: RationalFunction,
    pub membership: Membership,
}

impl SwapElement {
    pub fn constant(c: Rat) -> Self {
        let cross_monomial = c.is_one();
        SwapElement {
            value: RationalFunction::constant(c),
            membership: Membership { ring: true, multifraction: true, cross_monomial },
        }
    }

    pub fn zero() -> Self {
        Self::constant(rat(0, 1))
    }

    /// Arbitrary fraction over pair variables; only ring membership is inferred.
    pub fn from_value(value: RationalFunction) -> Self {
        let ring = value.is_polynomial();
        SwapElement { value, membership: Membership { ring, ..Membership::FRACTION } }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_multifraction(&self) -> bool {
        self.membership.multifraction
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = Membership::both(self.membership, other.membership);
        m.cross_monomial = false;
        SwapElement { value: &self.value + &other.value, membership: m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut m = Membership::both(self.membership, other.membership);
        m.cross_monomial = false;
        SwapElement { value: &self.value - &other.value, membership: m }
    }

    pub fn mul(&self, other: &Self) -> Self {
        SwapElement {
            value: &self.value * &other.value,
            membership: Membership::both(self.membership, other.membership),
        }
    }

    pub fn inv(&self) -> Result<Self, SwapError> {
        let value = self.value.inv()?;
        let cm = self.membership.cross_monomial;
        let membership = Membership { ring: value.is_polynomial(), multifraction: cm, cross_monomial: cm };
        Ok(SwapElement { value, membership })
    }

    pub fn div(&self, other: &Self) -> Result<Self, SwapError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.mul(&Self::constant(c.clone()))
    }
}

/// Negative-control perturbations of the linking number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkingMutation {
    /// Replaces `½(a − b)` by `½(a + b)`.
    FlipSecondTerm,
}

/// Swapping bracket on a fixed label set.
#[derive(Debug, Clone)]
pub struct SwappingAlgebra {
    labels: LabelSet,
    mutation: Option<LinkingMutation>,
}

impl SwappingAlgebra {
    pub fn new(labels: LabelSet) -> Self {
        SwappingAlgebra { labels, mutation: None }
    }

    pub fn with_mutation(mut self, mutation: Option<LinkingMutation>) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    /// `J(rx, sy)`, including the mutation if one is set.
    pub fn linking(&self, r: i64, x: i64, s: i64, y: i64) -> Result<Rat, SwapError> {
        match self.mutation {
            None => self.labels.linking_number(r, x, s, y),
            Some(LinkingMutation::FlipSecondTerm) => {
                let (a, b) = self.labels.linking_terms(0, r, x, s, y)?;
                Ok(rat((a + b) as i64, 2))
            }
        }
    }

    fn check(&self, label: i64) -> Result<(), SwapError> {
        self.labels.rank(label).map(|_| ())
    }

    pub fn pair_value(&self, r: i64, x: i64) -> Result<RationalFunction, SwapError> {
        self.check(r)?;
        self.check(x)?;
        Ok(if r == x { RationalFunction::zero() } else { RationalFunction::var(VarRef::pair(r, x)) })
    }

    /// The generator `rx` (zero when `r = x`).
    pub fn generator(&self, r: i64, x: i64) -> Result<SwapElement, SwapError> {
        let value = self.pair_value(r, x)?;
        let ring = Membership { ring: true, ..Membership::FRACTION };
        Ok(SwapElement { value, membership: ring })
    }

    /// `[x, y, z, t] = (xz / xt) · (yt / yz)`.
    pub fn cross_fraction(&self, x: i64, y: i64, z: i64, t: i64) -> Result<SwapElement, SwapError> {
        if x == t || y == z {
            return Err(SwapError::InvalidCrossFraction(x, y, z, t));
        }
        let num = &self.pair_value(x, z)? * &self.pair_value(y, t)?;
        let den = &self.pair_value(x, t)? * &self.pair_value(y, z)?;
        let value = num.checked_div(&den)?;
        Ok(SwapElement { value, membership: Membership { ring: false, multifraction: true, cross_monomial: true } })
    }

    fn pair_partials(&self, f: &RationalFunction) -> Result<Vec<(i64, i64, RationalFunction)>, SwapError> {
        f.variables()
            .into_iter()
            .map(|v| match v.second {
                Some(second) => {
                    self.check(v.index)?;
                    self.check(second)?;
                    Ok((v.index, second, f.partial(&v)))
                }
                None => Err(SwapError::NotAPair(v)),
            })
            .collect()
    }

    /// `Σ J(u, v) · ry · sx · ∂f/∂u · ∂g/∂v` over `u = rx` in `f`, `v = sy` in `g`.
    pub fn bracket_values(&self, f: &RationalFunction, g: &RationalFunction) -> Result<RationalFunction, SwapError> {
        let df = self.pair_partials(f)?;
        let dg = self.pair_partials(g)?;
        let mut total = RationalFunction::zero();
        for (r, x, dfu) in &df {
            for (s, y, dgv) in &dg {
                if r == y || s == x {
                    continue;
                }
                let jv = self.linking(*r, *x, *s, *y)?;
                if jv.is_zero() {
                    continue;
                }
                let swap = &self.pair_value(*r, *y)? * &self.pair_value(*s, *x)?;
                total = &total + &(&(&swap * dfu) * dgv).scale(&jv);
            }
        }
        Ok(total)
    }

    pub fn bracket(&self, f: &SwapElement, g: &SwapElement) -> Result<SwapElement, SwapError> {
        let value = self.bracket_values(&f.value, &g.value)?;
        let m = Membership::both(f.membership, g.membership);
        let membership = Membership { ring: m.ring, multifraction: m.multifraction, cross_monomial: false };
        Ok(SwapElement { value, membership })
    }

    /// `[f, g] = {f, g} / (f g)`.
    pub fn log_bracket(&self, f: &SwapElement, g: &SwapElement) -> Result<SwapElement, SwapError> {
        if f.is_zero() || g.is_zero() {
            return Err(SwapError::Ring(RingError::DivisionByZero));
        }
        let b = self.bracket(f, g)?;
        let value = b.value.checked_div(&(&f.value * &g.value))?;
        Ok(SwapElement { value, membership: Membership { ring: false, ..b.membership } })
    }

    /// `{{f,g},h} + {{g,h},f} + {{h,f},g}`.
    pub fn jacobiator(&self, f: &SwapElement, g: &SwapElement, h: &SwapElement) -> Result<RationalFunction, SwapError> {
        let fg = self.bracket_values(&f.value, &g.value)?;
        let gh = self.bracket_values(&g.value, &h.value)?;
        let hf = self.bracket_values(&h.value, &f.value)?;
        Ok(&(&self.bracket_values(&fg, &h.value)? + &self.bracket_values(&gh, &f.value)?)
            + &self.bracket_values(&hf, &g.value)?)
    }
}

/// Free function form of the bracket.
pub fn swap_bracket(alg: &SwappingAlgebra, f: &SwapElement, g: &SwapElement) -> Result<SwapElement, SwapError> {
    alg.bracket(f, g)
}

pub fn swap_jacobiator(
    alg: &SwappingAlgebra,
    f: &SwapElement,
    g: &SwapElement,
    h: &SwapElement,
) -> Result<RationalFunction, SwapError> {
    alg.jacobiator(f, g, h)
}
