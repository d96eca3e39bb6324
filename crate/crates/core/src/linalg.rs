//! Dense exact matrices.
//!
//! Elimination always takes the first nonzero pivot so that every output
//! (echelon forms, kernels, left inverses) is reproducible.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Field, Scalar};

/// Dense row-major matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: format!("rows of length {m}"),
                    found: format!("row of length {}", row.len()),
                });
            }
            for x in row {
                if x.field() != field {
                    return Err(Error::FieldMismatch);
                }
                data.push(x);
            }
        }
        Ok(Matrix {
            field,
            rows: n,
            cols: m,
            data,
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_rows(field, rows).expect("rectangular integer rows")
    }

    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.random(rng))
    }

    /// Random element of GL_n, by rejection.
    pub fn random_invertible<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        debug_assert_eq!(x.field(), self.field);
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Scalar] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    /// Skew-symmetric with zero diagonal.
    pub fn is_alternating(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self.get(i, i).is_zero()
                    && (i + 1..self.cols).all(|j| *self.get(i, j) == -self.get(j, i))
            })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn checked_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", rhs.rows),
            });
        }
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * rhs.get(k, j));
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Matrix, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix shapes differ"
        );
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| op(a, b)).collect(),
        }
    }

    /// Copy of the submatrix on the given rows and columns (any order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "column counts differ");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m.get(r, c).inv().unwrap();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m.get(r, c).inv().unwrap();
            for i in r + 1..m.rows {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c) * &inv;
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            r += 1;
        }
        r
    }

    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(self.field.zero());
            };
            if pr != c {
                m.swap_rows(c, pr);
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv().unwrap();
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c) * &inv;
                for j in c..n {
                    let v = m.get(i, j) - &(&factor * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let (red, pivots) = aug.rref();
        if pivots.iter().filter(|&&c| c < n).count() < n {
            return Err(Error::RankDeficient {
                rank: self.rank(),
                needed: n,
            });
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Ok(red.select(&rows, &cols))
    }

    /// Pfaffian by congruence elimination.
    ///
    /// Adding a multiple of row/column `k` to row/column `i` leaves the
    /// Pfaffian unchanged, a simultaneous swap negates it.
    pub fn pfaffian(&self) -> Result<Scalar> {
        self.check_skew()?;
        let n = self.rows;
        let mut m = self.clone();
        let mut pf = self.field.one();
        for k in (0..n).step_by(2) {
            let Some(j) = (k + 1..n).find(|&j| !m.get(k, j).is_zero()) else {
                return Ok(self.field.zero());
            };
            if j != k + 1 {
                m.swap_rows(k + 1, j);
                m.swap_cols(k + 1, j);
                pf = -pf;
            }
            let pivot = m.get(k, k + 1).clone();
            pf = &pf * &pivot;
            let inv = pivot.inv().unwrap();
            for i in k + 2..n {
                // clear m[k][i] using index k+1
                let c = m.get(k, i) * &inv;
                if !c.is_zero() {
                    m.add_congruent(i, k + 1, &-&c);
                }
                // clear m[k+1][i] using index k; m[k+1][k] = -pivot
                let c = m.get(k + 1, i) * &inv;
                if !c.is_zero() {
                    m.add_congruent(i, k, &c);
                }
            }
        }
        Ok(pf)
    }

    fn check_skew(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows % 2 == 1 {
            return Err(Error::OddDimension(self.rows));
        }
        if !self.is_alternating() {
            return Err(Error::NotSkewSymmetric);
        }
        Ok(())
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row_i += c * row_src, then col_i += c * col_src.
    fn add_congruent(&mut self, i: usize, src: usize, c: &Scalar) {
        for j in 0..self.cols {
            let v = self.get(i, j) + &(c * self.get(src, j));
            self.set(i, j, v);
        }
        for r in 0..self.rows {
            let v = self.get(r, i) + &(c * self.get(r, src));
            self.set(r, i, v);
        }
    }

    /// Determinant of the submatrix on rows `t` and columns `s`, both
    /// strictly increasing.
    pub fn minor(&self, t: &[usize], s: &[usize]) -> Result<Scalar> {
        check_index_set(t, self.rows)?;
        check_index_set(s, self.cols)?;
        if t.len() != s.len() {
            return Err(Error::SizeMismatch {
                rows: t.len(),
                cols: s.len(),
            });
        }
        self.select(t, s).det()
    }

    /// Some `Y` with `Y * self = I`, built from the first maximal set of
    /// independent rows.
    pub fn left_inverse(&self) -> Result<Matrix> {
        let (_, pivot_rows) = self.transpose().rref();
        if pivot_rows.len() < self.cols {
            return Err(Error::RankDeficient {
                rank: pivot_rows.len(),
                needed: self.cols,
            });
        }
        let all_cols: Vec<usize> = (0..self.cols).collect();
        let block_inv = self.select(&pivot_rows, &all_cols).inverse()?;
        let mut y = Matrix::zeros(self.field, self.cols, self.rows);
        for (k, &r) in pivot_rows.iter().enumerate() {
            for i in 0..self.cols {
                y.set(i, r, block_inv.get(i, k).clone());
            }
        }
        Ok(y)
    }

    /// Basis of the right null space `{v : self * v = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![self.field.zero(); self.cols];
                v[fc] = self.field.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -red.get(r, fc);
                }
                v
            })
            .collect()
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }
}

fn check_index_set(set: &[usize], bound: usize) -> Result<()> {
    if let Some(&bad) = set.iter().find(|&&i| i >= bound) {
        return Err(Error::IndexOutOfRange { index: bad, bound });
    }
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::SizeMismatch {
            rows: set.len(),
            cols: set.len(),
        });
    }
    Ok(())
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &'a Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix product shapes")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;

    fn add(self, rhs: &'a Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &'a Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// JSON form: `{"field": {...}, "rows": [["1","2"],["0","4/3"]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: Field,
    pub rows: Vec<Vec<String>>,
    /// Column count, needed only to describe matrices with zero rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        MatrixJson {
            field: m.field,
            rows: (0..m.rows)
                .map(|i| m.row(i).iter().map(ToString::to_string).collect())
                .collect(),
            cols: (m.rows == 0).then_some(m.cols),
        }
    }
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Matrix> {
        let field = json.field;
        let rows = json
            .rows
            .iter()
            .map(|r| r.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut m = Matrix::from_rows(field, rows)?;
        if m.rows == 0 {
            m.cols = json.cols.unwrap_or(0);
        }
        Ok(m)
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = MatrixJson::deserialize(d)?;
        Matrix::try_from(json).map_err(serde::de::Error::custom)
    }
}

/// Determinant by cofactor expansion along the first row, for entries in
/// any commutative ring (used for polynomial matrices and as an oracle).
pub fn det_by_expansion<T>(m: &[Vec<T>], zero: &T, one: &T) -> T
where
    T: Clone,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    let n = m.len();
    let cols: Vec<usize> = (0..n).collect();
    expand_det(m, 0, &cols, zero, one)
}

fn expand_det<T>(m: &[Vec<T>], row: usize, cols: &[usize], zero: &T, one: &T) -> T
where
    T: Clone,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    if cols.is_empty() {
        return one.clone();
    }
    let mut acc = zero.clone();
    for (k, &c) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &m[row][c] * &expand_det(m, row + 1, &rest, zero, one);
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Pfaffian by expansion along the first row:
/// `pf(A) = sum_j (-1)^(j+1) a_{0j} pf(A with 0, j removed)`.
pub fn pfaffian_by_expansion<T>(m: &[Vec<T>], zero: &T, one: &T) -> T
where
    T: Clone,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    let idx: Vec<usize> = (0..m.len()).collect();
    expand_pf(m, &idx, zero, one)
}

fn expand_pf<T>(m: &[Vec<T>], idx: &[usize], zero: &T, one: &T) -> T
where
    T: Clone,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    if idx.is_empty() {
        return one.clone();
    }
    if idx.len() % 2 == 1 {
        return zero.clone();
    }
    let first = idx[0];
    let mut acc = zero.clone();
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&x| x != j).collect();
        let term = &m[first][j] * &expand_pf(m, &rest, zero, one);
        // pos is 1-based among the remaining indices
        acc = if pos % 2 == 1 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// All strictly increasing `k`-subsets of `0..n`, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}
