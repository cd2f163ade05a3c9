//! Small dense linear algebra: row-major matrices and LU with partial pivoting.
//!
//! The nodal systems here have a few dozen unknowns, so a dense direct
//! solve is both the simplest and the fastest option.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest matrix entry are
/// treated as zero.
const SINGULAR_RTOL: f64 = 1e-13;

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `y += self * x`
    pub fn mul_vec_add(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += self.row(i).iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    pub fn lu(&self) -> Result<LuFactors> {
        LuFactors::factor(self)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.lu()?.solve(rhs))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// In-place LU factorization `P·M = L·U` of a square matrix.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        assert_eq!(m.rows, m.cols, "LU needs a square matrix");
        let n = m.rows;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = SINGULAR_RTOL * m.max_abs();

        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|r| (r, lu[r * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= threshold || pivot_abs == 0.0 {
                return Err(Error::Singular {
                    column: k,
                    pivot: pivot_abs,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for r in k + 1..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[r * n + j] -= factor * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system_with_pivoting() {
        // first pivot is zero, so a row swap is required
        let m = DenseMatrix::from_rows(&[
            vec![0.0, 2.0, 1.0],
            vec![1.0, 1.0, 0.0],
            vec![3.0, 0.0, 1.0],
        ]);
        let x_true = [1.0, -2.0, 3.0];
        let b = m.mul_vec(&x_true);
        let x = m.solve(&b).unwrap();
        for (a, e) in x.iter().zip(x_true) {
            assert!((a - e).abs() < 1e-14);
        }
    }

    #[test]
    fn detects_singular_matrix() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(m.lu(), Err(Error::Singular { .. })));
    }

    #[test]
    fn identity_solve_is_exact() {
        let m = DenseMatrix::identity(4);
        let b = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(m.solve(&b).unwrap(), b.to_vec());
    }

    #[test]
    fn symmetry_check() {
        let s = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]);
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 3.0]]);
        assert!(s.is_symmetric(0.0));
        assert!(!a.is_symmetric(0.1));
    }
}
