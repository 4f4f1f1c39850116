use std::collections::BTreeMap;

use super::linalg::{mat_mul, Mat};
use super::polygon::{CoordKind, CoordVector, TwistedPolygon};
use super::{CoordError, Field};

/// Periodic discrete Hill operator `C_{k+1} = (H_k/N² + 2) C_k − C_{k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HillOperator<S> {
    /// `H_1..H_N`.
    pub h: Vec<S>,
}

impl<S: Field> HillOperator<S> {
    pub fn new(h: Vec<S>) -> Self {
        HillOperator { h }
    }

    pub fn period(&self) -> usize {
        self.h.len()
    }

    /// `H_k` with `k` taken mod `N`.
    pub fn h(&self, k: i64) -> &S {
        &self.h[(k - 1).rem_euclid(self.period() as i64) as usize]
    }

    /// `b_k = H_k/N² + 2`.
    pub fn b(&self, k: i64) -> S {
        let n = self.period() as i64;
        let n2 = S::from_i64(n * n).inv().expect("positive period");
        self.h(k).mul(&n2).add(&S::from_i64(2))
    }

    /// The operator with the given `b_1..b_N`.
    pub fn from_b(b: &[S]) -> Self {
        let n = b.len() as i64;
        let n2 = S::from_i64(n * n);
        HillOperator { h: b.iter().map(|bk| bk.sub(&S::from_i64(2)).mul(&n2)).collect() }
    }
}

/// The solution with `C_0 = c0`, `C_1 = c1` on `lo..=hi` (must contain 0 and 1).
pub fn hill_solve<S: Field>(op: &HillOperator<S>, c0: S, c1: S, lo: i64, hi: i64) -> BTreeMap<i64, S> {
    let mut c = BTreeMap::new();
    c.insert(0, c0);
    c.insert(1, c1);
    for k in 1..hi {
        let next = op.b(k).mul(&c[&k]).sub(&c[&(k - 1)]);
        c.insert(k + 1, next);
    }
    for k in (lo + 1..=0).rev() {
        // C_{k−1} = b_k C_k − C_{k+1}
        let prev = op.b(k).mul(&c[&k]).sub(&c[&(k + 1)]);
        c.insert(k - 1, prev);
    }
    c.retain(|k, _| (lo..=hi).contains(k));
    c
}

/// Polygon of the two solutions `X: (1, 0)`, `Y: (0, 1)` with lifts
/// `(X_k, Y_k)` and monodromy from the companion matrices `[[b_k, −1], [1, 0]]`.
pub fn polygon_from_hill<S: Field>(op: &HillOperator<S>) -> Result<TwistedPolygon<S>, CoordError> {
    let n = op.period() as i64;
    let x = hill_solve(op, S::one(), S::zero(), 0, n);
    let y = hill_solve(op, S::zero(), S::one(), 0, n);
    let base = (0..n).map(|k| vec![x[&k].clone(), y[&k].clone()]).collect();
    // (C_{k+1}, C_k)ᵀ = T_k (C_k, C_{k−1})ᵀ; conjugating the product by the
    // coordinate swap turns it into the action on lifts.
    let mut p: Mat<S> = vec![vec![S::one(), S::zero()], vec![S::zero(), S::one()]];
    for k in 1..=n {
        let t = vec![vec![op.b(k), S::one().neg()], vec![S::one(), S::zero()]];
        p = mat_mul(&t, &p);
    }
    let monodromy = vec![vec![p[1][1].clone(), p[0][1].clone()], vec![p[1][0].clone(), p[0][0].clone()]];
    TwistedPolygon::new(base, monodromy)
}

/// Inverts `B_k = b_k b_{k+1}` for odd `N`: `b_1² = Π_{odd} B / Π_{even} B`.
pub fn hill_from_b<S: Field>(coords: &CoordVector<S>, positive_branch: bool) -> Result<HillOperator<S>, CoordError> {
    assert_eq!(coords.kind, CoordKind::B, "Hill reconstruction needs B coordinates");
    let n = coords.period();
    if n.is_multiple_of(2) {
        return Err(CoordError::NonUniqueHill(n));
    }
    let mut ratio = S::one();
    for k in 1..=n as i64 {
        let bk = coords.b(k);
        ratio = if k % 2 == 1 { ratio.mul(bk) } else { ratio.mul(&bk.inv().ok_or(CoordError::Pole)?) };
    }
    let root = ratio.sqrt()?;
    let mut b = vec![if positive_branch { root } else { root.neg() }];
    for k in 1..n as i64 {
        let prev = b.last().expect("nonempty");
        b.push(coords.b(k).mul(&prev.inv().ok_or(CoordError::Pole)?));
    }
    Ok(HillOperator::from_b(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::b_from_polygon;
    use crate::ring::int;

    #[test]
    fn constant_solutions() {
        let op = HillOperator::new(vec![int(0); 5]);
        let c = hill_solve(&op, int(0), int(1), -3, 8);
        assert!(c.iter().all(|(k, v)| *v == int(*k)));
        let c = hill_solve(&op, int(1), int(1), -3, 8);
        assert!(c.values().all(|v| *v == int(1)));
    }

    #[test]
    fn flat_operator_gives_b_four() {
        let op = HillOperator::new(vec![int(0); 5]);
        let p = polygon_from_hill(&op).unwrap();
        let b = b_from_polygon(&p).unwrap();
        assert!(b.values.iter().all(|v| *v == int(4)));
        let back = hill_from_b(&b, true).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn constant_operator() {
        let c = int(7);
        let op = HillOperator::new(vec![c.clone(); 5]);
        let b = b_from_polygon(&polygon_from_hill(&op).unwrap()).unwrap();
        let expected = (c / int(25) + int(2)).pow(2);
        assert!(b.values.iter().all(|v| *v == expected));
    }

    #[test]
    fn branch_errors() {
        let b6 = CoordVector { kind: CoordKind::B, values: vec![int(4); 6] };
        assert!(matches!(hill_from_b(&b6, true), Err(CoordError::NonUniqueHill(6))));
        let mut neg = vec![int(4); 5];
        neg[1] = int(-4);
        let bn = CoordVector { kind: CoordKind::B, values: neg };
        assert!(matches!(hill_from_b(&bn, true), Err(CoordError::NoRealBranch)));
        let mut irr = vec![int(4); 5];
        irr[0] = int(8);
        let bi = CoordVector { kind: CoordKind::B, values: irr };
        assert!(matches!(hill_from_b(&bi, true), Err(CoordError::NoRationalBranch)));
        let bf = CoordVector { kind: CoordKind::B, values: vec![8.0, 4.0, 4.0, 4.0, 4.0] };
        assert!(hill_from_b(&bf, true).is_ok());
    }
}
