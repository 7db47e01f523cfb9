use serde::{Deserialize, Serialize};

use super::{FieldElement, FieldParams};
use crate::error::{Error, Result};

/// Row-major matrix over F_q. Entries are integer images; the owning field is
/// supplied to every operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FqMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadShape(format!("{} entries for {rows}x{cols}", data.len())));
        }
        Ok(FqMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        FqMatrix { rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(size: usize) -> Self {
        let mut out = Self::zeros(size, size);
        for i in 0..size {
            out.data[i * size + i] = FieldElement::ONE;
        }
        out
    }

    /// Builds from integer images, validating each against `field`.
    pub fn from_images(field: &FieldParams, rows: &[Vec<u128>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::BadShape("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flatten()
            .map(|&x| field.from_integer(x).map_err(|_| Error::FieldMismatch(format!("entry {x} >= q"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(FqMatrix { rows: rows.len(), cols, data })
    }

    pub fn to_images(&self) -> Vec<Vec<u128>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|a| a.image()).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn check_field(&self, field: &FieldParams) -> Result<()> {
        match self.data.iter().find(|&&a| !field.contains(a)) {
            Some(a) => Err(Error::FieldMismatch(format!("matrix entry {a} >= q = {}", field.q()))),
            None => Ok(()),
        }
    }

    pub fn mul_vec(&self, field: &FieldParams, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, got: x.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(FieldElement::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
            })
            .collect())
    }

    pub fn mul(&self, field: &FieldParams, other: &FqMatrix) -> Result<FqMatrix> {
        if self.cols != other.rows {
            return Err(Error::BadShape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let v = (0..self.cols).fold(FieldElement::ZERO, |acc, l| {
                    field.add(acc, field.mul(self.get(i, l), other.get(l, j)))
                });
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Rank over F_q by Gaussian elimination.
    pub fn rank(&self, field: &FieldParams) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(piv) = (rank..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            for j in 0..a.cols {
                a.data.swap(rank * a.cols + j, piv * a.cols + j);
            }
            let inv = field.inv(a.get(rank, col)).expect("pivot is nonzero");
            for r in rank + 1..a.rows {
                let factor = field.mul(a.get(r, col), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..a.cols {
                    let v = field.sub(a.get(r, j), field.mul(factor, a.get(rank, j)));
                    a.set(r, j, v);
                }
            }
            rank += 1;
        }
        rank
    }
}
