//! Exact rational linear algebra.
//!
//! Dense row-major matrices over `BigRational`. Every basis choice is
//! deterministic: pivots are taken leftmost, free variables are the
//! non-pivot columns in increasing order.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar.
pub type Q = BigRational;

/// A column vector of exact rationals.
pub type Vector = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// `(-1)^k` as a rational.
pub fn sign(k: i64) -> Q {
    if k.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

pub fn zero_vec(n: usize) -> Vector {
    vec![Q::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("subspace is not contained in the ambient span")]
    SubspaceNotContained,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RationalMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Builds a `rows x cols.len()` matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn apply(&self, v: &[Q]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = Q::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &Q) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    /// Columns selected by index, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_columns(
            self.rows,
            &idx.iter().map(|&c| self.column(c)).collect::<Vec<_>>(),
        )
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_rows(
            &idx.iter()
                .map(|&r| self.row(r).to_vec())
                .collect::<Vec<_>>(),
        )
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        if self.rows == 0 {
            return other.clone();
        }
        if other.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RationalMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    pub fn inverse(&self) -> Result<Self, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::DimensionMismatch(
                "inverse of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = Q::one();
        }
        let (red, pivots) = rref(&aug);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(LinAlgError::Singular);
        }
        let mut inv = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = red[(r, n + c)].clone();
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Q;
    fn index(&self, (r, c): (usize, usize)) -> &Q {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Q {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

/// Reduced row echelon form with the leftmost-pivot rule.
pub fn rref(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..a.cols {
        if prow == a.rows {
            break;
        }
        let Some(sel) = (prow..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        if sel != prow {
            for c in 0..a.cols {
                a.data.swap(sel * a.cols + c, prow * a.cols + c);
            }
        }
        let inv = a[(prow, col)].recip();
        for c in col..a.cols {
            let v = &a[(prow, c)] * &inv;
            a[(prow, c)] = v;
        }
        for r in 0..a.rows {
            if r == prow || a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone();
            for c in col..a.cols {
                if a[(prow, c)].is_zero() {
                    continue;
                }
                let v = &factor * &a[(prow, c)];
                a[(r, c)] -= v;
            }
        }
        pivots.push(col);
        prow += 1;
    }
    (a, pivots)
}

/// Basis of the null space: one vector per non-pivot column, with that
/// free variable set to 1 and the others to 0.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<Vector> {
    let (red, pivots) = rref(m);
    let n = m.cols();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = zero_vec(n);
        v[free] = Q::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -red[(r, free)].clone();
        }
        basis.push(v);
    }
    basis
}

/// Basis of the column space: the pivot columns of `m` itself.
pub fn image_basis(m: &RationalMatrix) -> Vec<Vector> {
    let (_, pivots) = rref(m);
    pivots.into_iter().map(|c| m.column(c)).collect()
}

/// Vectors of `total` whose classes form a basis of `span(total) / span(sub)`.
///
/// The sub vectors are placed first and the leftmost-pivot rule picks the
/// complement among `total`, in order.
pub fn subquotient_basis(
    space_dim: usize,
    sub: &[Vector],
    total: &[Vector],
) -> Result<Vec<Vector>, LinAlgError> {
    for v in sub.iter().chain(total) {
        if v.len() != space_dim {
            return Err(LinAlgError::DimensionMismatch(format!(
                "vector of length {} in space of dimension {space_dim}",
                v.len()
            )));
        }
    }
    let mut cols: Vec<Vector> = sub.to_vec();
    cols.extend(total.iter().cloned());
    let joint = RationalMatrix::from_columns(space_dim, &cols);
    let (_, pivots) = rref(&joint);
    let total_rank = RationalMatrix::from_columns(space_dim, total).rank();
    if pivots.len() != total_rank {
        return Err(LinAlgError::SubspaceNotContained);
    }
    Ok(pivots
        .into_iter()
        .filter(|&p| p >= sub.len())
        .map(|p| total[p - sub.len()].clone())
        .collect())
}

/// Reduces a spanning set to a basis (leftmost pivots).
pub fn span_basis(space_dim: usize, vecs: &[Vector]) -> Vec<Vector> {
    image_basis(&RationalMatrix::from_columns(space_dim, vecs))
}

/// Solves `cols * x = target`; `None` if the target is not in the span.
/// When the columns are dependent the solution has zeros on free variables.
pub fn solve(space_dim: usize, cols: &[Vector], target: &[Q]) -> Option<Vector> {
    let n = cols.len();
    let mut all = cols.to_vec();
    all.push(target.to_vec());
    let aug = RationalMatrix::from_columns(space_dim, &all);
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = zero_vec(n);
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = red[(r, n)].clone();
    }
    Some(x)
}

/// Left inverse data for a list of linearly independent columns: returns a
/// matrix `L` with `L * cols = I`, or an error when the columns are dependent.
pub fn left_inverse(space_dim: usize, cols: &[Vector]) -> Result<RationalMatrix, LinAlgError> {
    let k = cols.len();
    let m = RationalMatrix::from_columns(space_dim, cols);
    // Complete to a basis with standard vectors, invert, keep the first k rows.
    let mut ext = cols.to_vec();
    for i in 0..space_dim {
        ext.push(unit_vec(space_dim, i));
    }
    let full = RationalMatrix::from_columns(space_dim, &ext);
    let (_, pivots) = rref(&full);
    if pivots.iter().take(k).copied().collect::<Vec<_>>() != (0..k).collect::<Vec<_>>() {
        return Err(LinAlgError::Singular);
    }
    let square = full.select_columns(&pivots);
    let inv = square.inverse()?;
    let l = inv.select_rows(&(0..k).collect::<Vec<_>>());
    debug_assert_eq!(&l * &m, RationalMatrix::identity(k));
    Ok(l)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn axpy(acc: &mut [Q], s: &Q, v: &[Q]) {
    if s.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += s * b;
        }
    }
}

/// Renders a rational compactly, e.g. `-3/2`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(rows)
    }

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn rref_examples() {
        let (r, p) = rref(&m(&[&[1, 2], &[2, 4]]));
        assert_eq!(r, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);

        let id = RationalMatrix::identity(3);
        assert_eq!(rref(&id), (id.clone(), vec![0, 1, 2]));

        let (r, p) = rref(&m(&[&[0, 1], &[1, 0]]));
        assert_eq!(r, RationalMatrix::identity(2));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&m(&[&[1, 2], &[2, 4]])), vec![v(&[-2, 1])]);
        assert!(kernel_basis(&RationalMatrix::identity(3)).is_empty());
        assert_eq!(
            kernel_basis(&RationalMatrix::zeros(2, 3)),
            vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]
        );
    }

    #[test]
    fn image_examples() {
        assert_eq!(image_basis(&m(&[&[1, 2], &[2, 4]])), vec![v(&[1, 2])]);
        assert!(image_basis(&RationalMatrix::zeros(2, 2)).is_empty());
        assert_eq!(
            image_basis(&RationalMatrix::identity(2)),
            vec![v(&[1, 0]), v(&[0, 1])]
        );
    }

    #[test]
    fn subquotient_examples() {
        let e1 = v(&[1, 0]);
        let e2 = v(&[0, 1]);
        assert_eq!(
            subquotient_basis(2, &[e1.clone()], &[e1.clone(), e2.clone()]).unwrap(),
            vec![e2.clone()]
        );
        assert!(
            subquotient_basis(2, &[e1.clone(), e2.clone()], &[e1.clone(), e2.clone()])
                .unwrap()
                .is_empty()
        );
        let f1 = v(&[1, 0, 0]);
        let f3 = v(&[0, 0, 1]);
        assert_eq!(
            subquotient_basis(3, &[], &[f1.clone(), f3.clone()]).unwrap(),
            vec![f1, f3]
        );
        assert_eq!(
            subquotient_basis(2, &[e2.clone()], &[e1]),
            Err(LinAlgError::SubspaceNotContained)
        );
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, RationalMatrix::identity(2));
        let x = solve(2, &a.columns(), &v(&[3, 2])).unwrap();
        assert_eq!(a.apply(&x), v(&[3, 2]));
        assert!(solve(2, &[v(&[1, 1])], &v(&[1, 0])).is_none());
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(LinAlgError::Singular));
    }

    #[test]
    fn left_inverse_roundtrip() {
        let cols = vec![v(&[1, 1, 0]), v(&[0, 1, 1])];
        let l = left_inverse(3, &cols).unwrap();
        assert_eq!(
            &l * &RationalMatrix::from_columns(3, &cols),
            RationalMatrix::identity(2)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
            (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-3i64..=3, r * c).prop_map(move |xs| {
                    let rows: Vec<Vec<Q>> = xs
                        .chunks(c)
                        .map(|ch| ch.iter().map(|&x| q(x)).collect())
                        .collect();
                    RationalMatrix::from_rows(&rows)
                })
            })
        }

        proptest! {
            #[test]
            fn rank_nullity(a in small_matrix()) {
                prop_assert_eq!(kernel_basis(&a).len() + image_basis(&a).len(), a.cols());
            }

            #[test]
            fn rref_idempotent(a in small_matrix()) {
                let (r1, p1) = rref(&a);
                let (r2, p2) = rref(&r1);
                prop_assert_eq!(r1, r2);
                prop_assert_eq!(p1, p2);
            }

            #[test]
            fn kernel_vectors_are_exact(a in small_matrix()) {
                for k in kernel_basis(&a) {
                    prop_assert!(is_zero_vec(&a.apply(&k)));
                }
            }
        }
    }
}
