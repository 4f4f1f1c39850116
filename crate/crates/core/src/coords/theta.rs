use super::linalg::{det, Vector};
use super::polygon::{b_from_polygon, xy_from_polygon, TwistedPolygon};
use super::{CoordError, Field};
use crate::poisson::PoissonStructure;
use crate::ring::{RationalFunction, RingError, VarRef};
use crate::swapping::{LabelSet, SwapElement, SwappingAlgebra};

/// The lattice coordinates that come from window cross fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coordinate {
    B,
    X,
    Y,
}

impl Coordinate {
    pub fn family(self) -> &'static str {
        match self {
            Coordinate::B => "B",
            Coordinate::X => "X",
            Coordinate::Y => "Y",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            Coordinate::B => 2,
            Coordinate::X | Coordinate::Y => 3,
        }
    }

    pub fn var(self, k: i64, period: usize) -> VarRef {
        VarRef::named(self.family(), k).normalized(Some(period as i64))
    }
}

/// Labels `(x, y, z, t)` of the cross fraction attached to coordinate `k`.
///
/// `B_k ↔ [k−1, k+2, k+1, k]`; for the planar coordinates the elements map
/// to `1/(1 − X_k)` and `1/(1 − Y_k)`.
pub fn window_labels(c: Coordinate, k: i64) -> [i64; 4] {
    match c {
        Coordinate::B => [k - 1, k + 2, k + 1, k],
        Coordinate::X => [k - 2, k - 1, k, k + 1],
        Coordinate::Y => [k + 2, k + 1, k - 1, k - 2],
    }
}

pub fn window_element(alg: &SwappingAlgebra, c: Coordinate, k: i64) -> Result<SwapElement, CoordError> {
    let [x, y, z, t] = window_labels(c, k);
    Ok(alg.cross_fraction(x, y, z, t)?)
}

/// `θ(ab)`: `det(f̃(a), f̃(b))` for `n = 2`, `det(f̃(a), f̃(b), f̃(b+1))` for `n = 3`.
pub fn theta_pair<S: Field>(n: usize, lift: &impl Fn(i64) -> Vector<S>, a: i64, b: i64) -> S {
    let mut rows = vec![lift(a)];
    rows.extend((0..n as i64 - 1).map(|i| lift(b + i)));
    det(&rows)
}

/// Evaluates an element over pair variables through `θ`, mapping each label
/// to a polygon index first.
pub fn theta_eval<S: Field>(
    g: &RationalFunction,
    n: usize,
    lift: impl Fn(i64) -> Vector<S>,
    label_to_index: impl Fn(i64) -> i64,
) -> Result<S, CoordError> {
    let value = g.eval(|v: &VarRef| {
        v.second.map(|second| theta_pair(n, &lift, label_to_index(v.index), label_to_index(second)))
    });
    match value {
        Err(RingError::Pole) => Err(CoordError::Pole),
        other => Ok(other?),
    }
}

/// `θ` for `n = 2` with symbolic points: the lift of label `a` is
/// `(f[a], 1)`, so `θ(ab) = f[a] − f[b]`.
pub fn theta_symbolic_line(
    g: &RationalFunction,
    label_to_index: impl Fn(i64) -> i64,
) -> Result<RationalFunction, CoordError> {
    let f = |j: i64| RationalFunction::var(VarRef::named("f", j));
    let value = g.substitute(|v| v.second.map(|second| &f(label_to_index(v.index)) - &f(label_to_index(second))));
    match value {
        Err(RingError::Pole) | Err(RingError::DivisionByZero) => Err(CoordError::Pole),
        other => Ok(other?),
    }
}

/// Both sides of one coordinate bracket on one polygon.
#[derive(Debug, Clone)]
pub struct BracketCheck<S> {
    /// Representative offset of `j − i` in `(−N/2, N/2]`.
    pub offset: i64,
    /// Bracket derived from the swapping algebra through `θ`.
    pub derived: S,
    /// Closed-form entry of the structure at the polygon's coordinates.
    pub closed_form: S,
    pub residual: f64,
}

/// Representative of `d mod N` in `(−N/2, N/2]`.
pub fn representative_offset(d: i64, period: usize) -> i64 {
    let n = period as i64;
    let r = d.rem_euclid(n);
    if 2 * r > n {
        r - n
    } else {
        r
    }
}

/// Symbolic bracket of the window elements of `left_0` and `right_d`, on a
/// label window just large enough to hold both.
pub fn window_bracket(
    left: Coordinate,
    right: Coordinate,
    d: i64,
) -> Result<(SwapElement, SwapElement, SwapElement), CoordError> {
    let labels: Vec<i64> = window_labels(left, 0).into_iter().chain(window_labels(right, d)).collect();
    let (lo, hi) = (*labels.iter().min().expect("labels"), *labels.iter().max().expect("labels"));
    let alg = SwappingAlgebra::new(LabelSet::window(lo, hi));
    let e = window_element(&alg, left, 0)?;
    let f = window_element(&alg, right, d)?;
    let b = alg.bracket(&e, &f)?;
    Ok((e, f, b))
}

/// Symbolic window elements `e = left_0`, `f = right_d` and their bracket.
#[derive(Debug, Clone)]
pub struct WindowBracket {
    pub left: Coordinate,
    pub right: Coordinate,
    pub offset: i64,
    pub e: SwapElement,
    pub f: SwapElement,
    pub bracket: SwapElement,
}

impl WindowBracket {
    pub fn new(left: Coordinate, right: Coordinate, offset: i64) -> Result<Self, CoordError> {
        let (e, f, bracket) = window_bracket(left, right, offset)?;
        Ok(WindowBracket { left, right, offset, e, f, bracket })
    }

    /// Compares the `θ`-image of the bracket, translated to start at `i`,
    /// with the structure's entry `π(left_i, right_{i+offset})`.
    pub fn check<S: Field>(
        &self,
        structure: &PoissonStructure,
        i: i64,
        polygon: &TwistedPolygon<S>,
    ) -> Result<BracketCheck<S>, CoordError> {
        let n = polygon.n();
        let period = polygon.period();
        let lift = |k: i64| polygon.lift(k);
        let at = |g: &RationalFunction| theta_eval(g, n, lift, |label| label + i);
        let derived = if n == 2 {
            at(&self.bracket.value)?
        } else {
            // X = 1 − 1/θ(e), so dX = dθ(e)/θ(e)²
            let (te, tf) = (at(&self.e.value)?, at(&self.f.value)?);
            let scale = te.mul(&te).mul(&tf).mul(&tf).inv().ok_or(CoordError::Pole)?;
            at(&self.bracket.value)?.mul(&scale)
        };
        let coords = if n == 2 { b_from_polygon(polygon)? } else { xy_from_polygon(polygon)? };
        let entry = structure.entry(&self.left.var(i, period), &self.right.var(i + self.offset, period));
        let closed_form = entry.eval_with(&coords.assignment()).map_err(|e| match e {
            RingError::Pole => CoordError::Pole,
            other => CoordError::Ring(other),
        })?;
        let residual = derived.sub(&closed_form).to_f64().abs();
        Ok(BracketCheck { offset: self.offset, derived, closed_form, residual })
    }
}

/// Compares the `θ`-image of the swapping bracket of two window elements
/// with the structure's closed-form entry `π(left_i, right_j)`.
pub fn numeric_bracket_check<S: Field>(
    structure: &PoissonStructure,
    left: Coordinate,
    i: i64,
    right: Coordinate,
    j: i64,
    polygon: &TwistedPolygon<S>,
) -> Result<BracketCheck<S>, CoordError> {
    let d = representative_offset(j - i, polygon.period());
    WindowBracket::new(left, right, d)?.check(structure, i, polygon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::random_polygon;
    use crate::ring::Rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn window_elements_map_to_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p2 = random_polygon(2, 6, &mut rng).unwrap();
        let b = b_from_polygon(&p2).unwrap();
        let alg = SwappingAlgebra::new(LabelSet::window(-10, 20));
        for k in 1..=6 {
            let w = window_element(&alg, Coordinate::B, k).unwrap();
            assert_eq!(theta_eval(&w.value, 2, |i| p2.lift(i), |l| l).unwrap(), *b.b(k));
        }
        let p3 = random_polygon(3, 7, &mut rng).unwrap();
        let xy = xy_from_polygon(&p3).unwrap();
        let one = Rat::from_integer(1.into());
        for k in 1..=7 {
            let ex = window_element(&alg, Coordinate::X, k).unwrap();
            let ey = window_element(&alg, Coordinate::Y, k).unwrap();
            let tx: Rat = theta_eval(&ex.value, 3, |i| p3.lift(i), |l| l).unwrap();
            let ty: Rat = theta_eval(&ey.value, 3, |i| p3.lift(i), |l| l).unwrap();
            assert_eq!(tx, (&one - xy.x(k)).recip());
            assert_eq!(ty, (&one - xy.y(k)).recip());
        }
    }

    #[test]
    fn symbolic_line_cross_ratio() {
        let alg = SwappingAlgebra::new(LabelSet::window(-1, 2));
        let w = window_element(&alg, Coordinate::B, 0).unwrap();
        let got = theta_symbolic_line(&w.value, |l| l).unwrap();
        // [f(-1), f(2), f(1), f(0)]
        let want = crate::ring::parse_expr("(f[-1] - f[1])*(f[2] - f[0])/((f[-1] - f[0])*(f[2] - f[1]))", None);
        assert!(want.is_err(), "f is not a default family");
        let f = |j: i64| RationalFunction::var(VarRef::named("f", j));
        let want = (&(&f(-1) - &f(1)) * &(&f(2) - &f(0))).checked_div(&(&(&f(-1) - &f(0)) * &(&f(2) - &f(1)))).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn offsets() {
        assert_eq!(representative_offset(6, 7), -1);
        assert_eq!(representative_offset(3, 6), 3);
        assert_eq!(representative_offset(-3, 6), 3);
        assert_eq!(representative_offset(4, 7), -3);
    }
}
