use std::collections::HashMap;

use rand::Rng;

use super::linalg::{cross3, det_rows, identity, mat_inverse, mat_mul, mat_vec, Mat, Vector};
use super::{cross_ratio_proj, is_degenerate, CoordError, Field};
use crate::ring::{rat, Rat, Scalar, VarRef};

/// `N`-twisted polygon in `RP^{n-1}`: lifts `f̃(0..N)` and a monodromy with
/// `f̃(k + N) = M f̃(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedPolygon<S> {
    n: usize,
    base: Vec<Vector<S>>,
    monodromy: Mat<S>,
    inverse: Mat<S>,
}

impl<S: Field> TwistedPolygon<S> {
    /// Builds and checks general position of every `n` lifts within a period.
    pub fn new(base: Vec<Vector<S>>, monodromy: Mat<S>) -> Result<Self, CoordError> {
        let p = Self::new_unchecked(base, monodromy)?;
        p.check_general_position()?;
        Ok(p)
    }

    /// Builds without the general-position scan.
    pub fn new_unchecked(base: Vec<Vector<S>>, monodromy: Mat<S>) -> Result<Self, CoordError> {
        let n = base.first().map_or(0, Vec::len);
        if !(2..=3).contains(&n) || base.len() <= n || base.iter().any(|v| v.len() != n) {
            return Err(CoordError::InvalidPeriod { n, period: base.len() });
        }
        let inverse = mat_inverse(&monodromy).ok_or(CoordError::SingularMonodromy)?;
        Ok(TwistedPolygon { n, base, monodromy, inverse })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> usize {
        self.base.len()
    }

    pub fn monodromy(&self) -> &Mat<S> {
        &self.monodromy
    }

    pub fn base(&self) -> &[Vector<S>] {
        &self.base
    }

    /// The lift `f̃(k)` for any `k ∈ ℤ`.
    pub fn lift(&self, k: i64) -> Vector<S> {
        let n = self.period() as i64;
        let (q, r) = (k.div_euclid(n), k.rem_euclid(n));
        let mut v = self.base[r as usize].clone();
        let m = if q >= 0 { &self.monodromy } else { &self.inverse };
        for _ in 0..q.unsigned_abs() {
            v = mat_vec(m, &v);
        }
        v
    }

    pub fn check_general_position(&self) -> Result<(), CoordError> {
        let big_n = self.period();
        let mut idx: Vec<usize> = (0..self.n).collect();
        loop {
            let rows: Vec<&[S]> = idx.iter().map(|i| self.base[*i].as_slice()).collect();
            if is_degenerate(&rows) {
                return Err(CoordError::DegeneratePolygon(format!("lifts {idx:?} are dependent")));
            }
            // next n-subset of 0..N in lexicographic order
            let mut i = self.n;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                if idx[i] < big_n - self.n + i {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..self.n {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    /// Image under the linear map `a`: lifts `a f̃(k)`, monodromy `a M a⁻¹`.
    pub fn transformed(&self, a: &Mat<S>) -> Result<Self, CoordError> {
        let a_inv = mat_inverse(a).ok_or(CoordError::SingularMonodromy)?;
        let base = self.base.iter().map(|v| mat_vec(a, v)).collect();
        Self::new_unchecked(base, mat_mul(&mat_mul(a, &self.monodromy), &a_inv))
    }

    /// Rescales the lift of each residue class by the given scalar.
    pub fn rescaled(&self, scalars: &[S]) -> Self {
        let base =
            self.base.iter().zip(scalars.iter().cycle()).map(|(v, c)| v.iter().map(|x| x.mul(c)).collect()).collect();
        TwistedPolygon { base, ..self.clone() }
    }

    /// The polygon `k ↦ f̃(k + s)`.
    pub fn shifted(&self, s: i64) -> Self {
        let base = (0..self.period() as i64).map(|k| self.lift(k + s)).collect();
        TwistedPolygon { base, ..self.clone() }
    }
}

impl TwistedPolygon<Rat> {
    pub fn to_f64(&self) -> TwistedPolygon<f64> {
        let conv = |m: &Mat<Rat>| -> Mat<f64> { m.iter().map(|r| r.iter().map(Field::to_f64).collect()).collect() };
        TwistedPolygon {
            n: self.n,
            base: conv(&self.base),
            monodromy: conv(&self.monodromy),
            inverse: conv(&self.inverse),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoordKind {
    B,
    XY,
}

/// `B_1..B_N`, or `X_1..X_N` followed by `Y_1..Y_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordVector<S> {
    pub kind: CoordKind,
    pub values: Vec<S>,
}

impl<S: Field> CoordVector<S> {
    pub fn period(&self) -> usize {
        match self.kind {
            CoordKind::B => self.values.len(),
            CoordKind::XY => self.values.len() / 2,
        }
    }

    fn cyclic(&self, offset: usize, k: i64) -> &S {
        let n = self.period() as i64;
        &self.values[offset + (k - 1).rem_euclid(n) as usize]
    }

    /// `B_k` with `k` taken mod `N`.
    pub fn b(&self, k: i64) -> &S {
        self.cyclic(0, k)
    }

    pub fn x(&self, k: i64) -> &S {
        self.cyclic(0, k)
    }

    pub fn y(&self, k: i64) -> &S {
        self.cyclic(self.period(), k)
    }

    /// Values keyed by the variables `B[k]` or `X[k]`, `Y[k]`, `k = 1..N`.
    pub fn assignment(&self) -> HashMap<VarRef, S> {
        let n = self.period() as i64;
        let mut out = HashMap::new();
        for k in 1..=n {
            match self.kind {
                CoordKind::B => {
                    out.insert(VarRef::named("B", k), self.b(k).clone());
                }
                CoordKind::XY => {
                    out.insert(VarRef::named("X", k), self.x(k).clone());
                    out.insert(VarRef::named("Y", k), self.y(k).clone());
                }
            }
        }
        out
    }
}

/// `B_k = [f_{k−1}, f_{k+2}, f_{k+1}, f_k]` for `k = 1..N`.
pub fn b_from_polygon<S: Field>(p: &TwistedPolygon<S>) -> Result<CoordVector<S>, CoordError> {
    if p.n() != 2 {
        return Err(CoordError::InvalidPeriod { n: p.n(), period: p.period() });
    }
    let values = (1..=p.period() as i64)
        .map(|k| cross_ratio_proj(&p.lift(k - 1), &p.lift(k + 2), &p.lift(k + 1), &p.lift(k)))
        .collect::<Result<_, _>>()?;
    Ok(CoordVector { kind: CoordKind::B, values })
}

/// Coordinates of a point `v` on the line spanned by `e1`, `e2`.
fn line_coords<S: Field>(v: &[S], e1: &[S], e2: &[S]) -> Result<Vector<S>, CoordError> {
    // solve with the best-conditioned 2×2 minor
    let (i, j) = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .max_by(|a, b| {
            let m = |&(i, j): &(usize, usize)| e1[i].mul(&e2[j]).sub(&e1[j].mul(&e2[i])).to_f64().abs();
            m(a).total_cmp(&m(b))
        })
        .expect("three minors");
    let d = e1[i].mul(&e2[j]).sub(&e1[j].mul(&e2[i]));
    let inv = d.inv().ok_or_else(|| CoordError::DegeneratePolygon("line basis is degenerate".into()))?;
    let alpha = v[i].mul(&e2[j]).sub(&v[j].mul(&e2[i])).mul(&inv);
    let beta = e1[i].mul(&v[j]).sub(&e1[j].mul(&v[i])).mul(&inv);
    Ok(vec![alpha, beta])
}

fn meet<S: Field>(l1: &[S], l2: &[S]) -> Result<Vector<S>, CoordError> {
    let p = cross3(l1, l2);
    if p.iter().all(Scalar::is_zero) || is_degenerate::<S>(&[l1, l2, &cross3(l1, l2)]) {
        return Err(CoordError::DegeneratePolygon("intersecting lines coincide".into()));
    }
    Ok(p)
}

/// Cross ratio of four points on the line through `e1`, `e2`.
fn collinear_cross_ratio<S: Field>(pts: [&[S]; 4], e1: &[S], e2: &[S]) -> Result<S, CoordError> {
    let c: Vec<Vector<S>> = pts.iter().map(|p| line_coords(p, e1, e2)).collect::<Result<_, _>>()?;
    cross_ratio_proj(&c[0], &c[1], &c[2], &c[3])
}

/// `X_k` and `Y_k` for `k = 1..N` of a polygon in `RP²`.
pub fn xy_from_polygon<S: Field>(p: &TwistedPolygon<S>) -> Result<CoordVector<S>, CoordError> {
    if p.n() != 3 {
        return Err(CoordError::InvalidPeriod { n: p.n(), period: p.period() });
    }
    let big_n = p.period() as i64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..=big_n {
        let f: Vec<Vector<S>> = (-2..=2).map(|d| p.lift(k + d)).collect();
        let (fm2, fm1, f0, fp1, fp2) = (&f[0], &f[1], &f[2], &f[3], &f[4]);
        let back = cross3(fm2, fm1);
        let front = cross3(fp1, fp2);
        let x = collinear_cross_ratio([fm2, &meet(&back, &front)?, fm1, &meet(&back, &cross3(f0, fp1))?], fm2, fm1)?;
        let y = collinear_cross_ratio([&meet(&front, &back)?, fp2, &meet(&front, &cross3(fm1, f0))?, fp1], fp1, fp2)?;
        xs.push(x);
        ys.push(y);
    }
    xs.extend(ys);
    Ok(CoordVector { kind: CoordKind::XY, values: xs })
}

fn random_rat(rng: &mut impl Rng) -> Rat {
    loop {
        let q = rat(rng.gen_range(-9..=9), rng.gen_range(1..=5));
        if q != rat(0, 1) {
            return q;
        }
    }
}

fn random_unimodular(n: usize, rng: &mut impl Rng) -> Mat<Rat> {
    let mut m: Mat<Rat> = identity(n);
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let mut e: Mat<Rat> = identity(n);
        e[i][j] = rat(rng.gen_range(-3..=3), rng.gen_range(1..=2));
        m = mat_mul(&m, &e);
    }
    m
}

/// Random exact polygon in general position whose coordinates are defined,
/// nonzero and different from one.
pub fn random_polygon(n: usize, period: usize, rng: &mut impl Rng) -> Result<TwistedPolygon<Rat>, CoordError> {
    let mut last = CoordError::InvalidPeriod { n, period };
    for _ in 0..200 {
        let base = (0..period).map(|_| (0..n).map(|_| random_rat(rng)).collect()).collect();
        let poly = match TwistedPolygon::new(base, random_unimodular(n, rng)) {
            Ok(p) => p,
            Err(e) => {
                last = e;
                continue;
            }
        };
        let coords = if n == 2 { b_from_polygon(&poly) } else { xy_from_polygon(&poly) };
        match coords {
            Ok(c) if c.values.iter().all(|v| !v.is_zero() && *v != rat(1, 1)) && window_dets_nonzero(&poly) => {
                return Ok(poly)
            }
            Ok(_) => last = CoordError::DegeneratePolygon("coordinate equals 0 or 1".into()),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Pair determinants over a few periods, as needed by window elements.
fn window_dets_nonzero(p: &TwistedPolygon<Rat>) -> bool {
    let n = p.n() as i64;
    let span = 2 * p.period() as i64 + 8;
    (-span..=span).all(|a| {
        (a - 6..=a + 6).filter(|b| *b != a && !(n == 3 && *b + 1 == a)).all(|b| {
            let rows: Vec<Vector<Rat>> = (0..n).map(|i| if i == 0 { p.lift(a) } else { p.lift(b + i - 1) }).collect();
            let refs: Vec<&[Rat]> = rows.iter().map(|r| r.as_slice()).collect();
            !det_rows(&refs).is_zero()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lifts_respect_monodromy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_polygon(3, 7, &mut rng).unwrap();
        for k in -9..9 {
            assert_eq!(p.lift(k + 7), mat_vec(p.monodromy(), &p.lift(k)));
        }
    }

    #[test]
    fn general_position_failure() {
        let base = vec![vec![int(1), int(0)], vec![int(0), int(1)], vec![int(2), int(0)]];
        let err = TwistedPolygon::new(base, identity(2)).unwrap_err();
        assert!(matches!(err, CoordError::DegeneratePolygon(_)));
    }

    #[test]
    fn xy_invariance_and_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_polygon(3, 7, &mut rng).unwrap();
        let xy = xy_from_polygon(&p).unwrap();
        let a: Mat<Rat> =
            vec![vec![int(2), int(1), int(0)], vec![int(0), int(1), int(3)], vec![int(1), int(0), int(1)]];
        assert_eq!(xy_from_polygon(&p.transformed(&a).unwrap()).unwrap(), xy);
        let scaled = p.rescaled(&[int(2), int(-3), rat(1, 2)]);
        assert_eq!(xy_from_polygon(&scaled).unwrap(), xy);
        let shifted = xy_from_polygon(&p.shifted(2)).unwrap();
        for k in 1..=7 {
            assert_eq!(shifted.x(k), xy.x(k + 2));
            assert_eq!(shifted.y(k), xy.y(k + 2));
        }
    }
}
