//! Small dense linear algebra (dimension 2 and 3) over a [`Field`].

use super::Field;

pub type Vector<S> = Vec<S>;
pub type Mat<S> = Vec<Vec<S>>;

pub(crate) fn det2<S: Field>(a: &[S], b: &[S]) -> S {
    a[0].mul(&b[1]).sub(&a[1].mul(&b[0]))
}

pub fn cross3<S: Field>(a: &[S], b: &[S]) -> Vector<S> {
    vec![
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

fn dot<S: Field>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// Determinant of the matrix whose rows are `rows` (Laplace expansion).
pub(crate) fn det_rows<S: Field>(rows: &[&[S]]) -> S {
    match rows.len() {
        0 => S::one(),
        1 => rows[0][0].clone(),
        2 => det2(rows[0], rows[1]),
        3 => dot(rows[0], &cross3(rows[1], rows[2])),
        n => {
            let mut acc = S::zero();
            for col in 0..n {
                let minor: Vec<Vec<S>> = rows[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, x)| x.clone()).collect())
                    .collect();
                let minor_refs: Vec<&[S]> = minor.iter().map(|r| r.as_slice()).collect();
                let term = rows[0][col].mul(&det_rows(&minor_refs));
                acc = if col % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

pub fn det<S: Field>(vectors: &[Vector<S>]) -> S {
    let refs: Vec<&[S]> = vectors.iter().map(|v| v.as_slice()).collect();
    det_rows(&refs)
}

pub fn mat_vec<S: Field>(m: &Mat<S>, v: &[S]) -> Vector<S> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul<S: Field>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    let n = b[0].len();
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).fold(S::zero(), |acc, (x, r)| acc.add(&x.mul(&r[j])))).collect())
        .collect()
}

pub fn identity<S: Field>(n: usize) -> Mat<S> {
    (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect()
}

/// Inverse via the adjugate; `None` when singular.
pub fn mat_inverse<S: Field>(m: &Mat<S>) -> Option<Mat<S>> {
    let n = m.len();
    let rows: Vec<&[S]> = m.iter().map(|r| r.as_slice()).collect();
    let inv_det = det_rows(&rows).inv()?;
    let cofactor = |i: usize, j: usize| -> S {
        let minor: Vec<Vec<S>> =
            (0..n).filter(|r| *r != i).map(|r| (0..n).filter(|c| *c != j).map(|c| m[r][c].clone()).collect()).collect();
        let refs: Vec<&[S]> = minor.iter().map(|r| r.as_slice()).collect();
        let d = det_rows(&refs);
        if (i + j).is_multiple_of(2) {
            d
        } else {
            d.neg()
        }
    };
    // inverse = adj / det, adj[i][j] = cofactor(j, i)
    Some((0..n).map(|i| (0..n).map(|j| cofactor(j, i).mul(&inv_det)).collect()).collect())
}
