//! Matrices over the prime field F_p and exact Gaussian elimination.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::poly::inv_mod;

/// Row-major matrix with entries in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub reduced: FpMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Certificate returned instead of an inverse: the echelon form exhibits a
/// zero row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularReport {
    pub rank: usize,
    pub echelon: FpMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<u32>),
    /// Consistent, but the solution set is an affine space of dimension `kernel_dim`.
    Underdetermined { particular: Vec<u32>, kernel_dim: usize },
    Inconsistent,
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, size: usize) -> Self {
        let mut out = Self::zeros(p, size, size);
        for i in 0..size {
            out.data[i * size + i] = 1 % p;
        }
        out
    }

    pub fn from_vec(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|&&x| x >= p) {
            return Err(Error::OutOfRange(format!("entry {bad} not in F_{p}")));
        }
        Ok(FpMatrix { p, rows, cols, data })
    }

    pub fn from_rows(p: u32, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::BadShape("ragged rows".into()));
        }
        Self::from_vec(p, rows.len(), cols, rows.concat())
    }

    /// Builds the matrix whose j-th column is `columns[j]`.
    pub fn from_columns(p: u32, columns: &[Vec<u32>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::BadShape("ragged columns".into()));
        }
        let mut out = Self::zeros(p, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                if v >= p {
                    return Err(Error::OutOfRange(format!("entry {v} not in F_{p}")));
                }
                out.data[i * out.cols + j] = v;
            }
        }
        Ok(out)
    }

    pub fn p(&self) -> u32 {
        self.p
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        debug_assert!(v < self.p);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> FpMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        FpMatrix { p: self.p, rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> FpMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            data.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        FpMatrix { p: self.p, rows: self.rows, cols: idx.len(), data }
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows || self.p != other.p {
            return Err(Error::BadShape(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let p = self.p as u64;
        let mut out = Self::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = ((out.data[idx] as u64 + a * other.get(l, j) as u64) % p) as u32;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[u32]) -> Result<Vec<u32>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, got: x.len() });
        }
        let p = self.p as u64;
        Ok((0..self.rows)
            .map(|i| {
                let acc = self
                    .row(i)
                    .iter()
                    .zip(x)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                acc as u32
            })
            .collect())
    }

    /// Reduced row-echelon form by exact elimination.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let pivots = m.reduce_in_place(self.cols);
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Eliminates on the first `limit` columns, carrying the rest along.
    fn reduce_in_place(&mut self, limit: usize) -> Vec<usize> {
        let p = self.p as u64;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..limit {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(row, piv);
            let inv = inv_mod(self.get(row, col), self.p) as u64;
            for j in col..self.cols {
                let v = self.get(row, j) as u64 * inv % p;
                self.set(row, j, v as u32);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col) as u64;
                if factor == 0 {
                    continue;
                }
                for j in col..self.cols {
                    let sub = factor * self.get(row, j) as u64 % p;
                    let v = (self.get(r, j) as u64 + p - sub) % p;
                    self.set(r, j, v as u32);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Exact inverse, or the echelon form that certifies rank deficiency.
    pub fn inverse(&self) -> std::result::Result<FpMatrix, SingularReport> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Self::zeros(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1 % self.p);
        }
        let pivots = aug.reduce_in_place(n);
        if pivots.len() < n {
            return Err(SingularReport {
                rank: pivots.len(),
                echelon: aug.select_cols(&(0..n).collect::<Vec<_>>()),
            });
        }
        Ok(aug.select_cols(&(n..2 * n).collect::<Vec<_>>()))
    }

    /// Solves `self * x = b`.
    pub fn solve(&self, b: &[u32]) -> Result<Solution> {
        if b.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, got: b.len() });
        }
        let mut aug = Self::zeros(self.p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i] % self.p);
        }
        let pivots = aug.reduce_in_place(self.cols);
        let rank = pivots.len();
        if (rank..self.rows).any(|r| aug.get(r, self.cols) != 0) {
            return Ok(Solution::Inconsistent);
        }
        let mut x = vec![0u32; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        if rank == self.cols {
            Ok(Solution::Unique(x))
        } else {
            Ok(Solution::Underdetermined { particular: x, kernel_dim: self.cols - rank })
        }
    }
}

/// Inverts a square F_p matrix; `Err` carries the singularity certificate.
pub fn fp_gauss_invert(m: &FpMatrix) -> std::result::Result<FpMatrix, SingularReport> {
    m.inverse()
}
