//! Small dense matrices over exact scalars.
//!
//! Products skip zero entries of the left factor, so the sparse structure
//! maps used by the shipped targets cost only their nonzero count.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// A single column.
    pub fn column(v: Vec<S>) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn mul(&self, rhs: &Matrix<S>) -> Result<Matrix<S>> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out: Matrix<S> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let base = i * rhs.cols;
                for (j, b) in rhs.row(k).iter().enumerate() {
                    if !b.is_zero() {
                        let cell = &mut out.data[base + j];
                        *cell = cell.add_ref(&a.mul_ref(b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Columns `[start, start + width)`.
    pub fn col_block(&self, start: usize, width: usize) -> Matrix<S> {
        let mut out = Matrix::zeros(self.rows, width);
        for i in 0..self.rows {
            for j in 0..width {
                out.set(i, j, self.get(i, start + j).clone());
            }
        }
        out
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix<S>) -> Result<Matrix<S>> {
        if self.rows != rhs.rows {
            return Err(Error::Shape("hstack with different row counts".into()));
        }
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(rhs.row(i));
        }
        Ok(Matrix { rows: self.rows, cols, data })
    }

    pub fn block_diag(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
        let mut out = Matrix::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix<S>) -> Result<Matrix<S>> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape("adding matrices of different shapes".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.add_ref(b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Matrix<S> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc.add_ref(&x.mul_ref(y));
        }
    }
    acc
}

pub fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.add_ref(y)).collect()
}

pub fn vec_scale<S: Scalar>(c: &S, a: &[S]) -> Vec<S> {
    a.iter().map(|x| c.mul_ref(x)).collect()
}

/// Rank by exact Gaussian elimination.
#[allow(clippy::needless_range_loop)]
pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let mut a: Vec<Vec<S>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let inv = a[rank][c].inverse();
        let pivot_row: Vec<S> = a[rank].iter().map(|x| x.mul_ref(&inv)).collect();
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let factor = a[r][c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = x.sub_ref(&factor.mul_ref(y));
                }
            }
        }
        a[rank] = pivot_row;
        rank += 1;
    }
    rank
}

impl<S: Scalar> Serialize for Matrix<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Matrix<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<S>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn product_and_shapes() {
        let a = m(&[&[1, 2], &[0, 3]]);
        let b = m(&[&[4], &[5]]);
        assert_eq!(a.mul(&b).unwrap(), m(&[&[14], &[15]]));
        assert!(b.mul(&a).is_err());
    }

    #[test]
    fn blocks() {
        let a = m(&[&[1]]);
        let b = m(&[&[2]]);
        assert_eq!(Matrix::block_diag(&a, &b), m(&[&[1, 0], &[0, 2]]));
        assert_eq!(a.hstack(&b).unwrap(), m(&[&[1, 2]]));
        assert_eq!(m(&[&[1, 2, 3]]).col_block(1, 2), m(&[&[2, 3]]));
    }

    #[test]
    fn rank_counts_independent_rows() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]]).to_rows()), 1);
        assert_eq!(rank(&m(&[&[0, 1], &[1, 0], &[1, 1]]).to_rows()), 2);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec![Rational::one()], vec![]];
        assert!(Matrix::from_rows(rows).is_err());
    }
}
