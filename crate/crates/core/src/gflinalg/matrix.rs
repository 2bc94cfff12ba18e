use std::fmt;

use super::vector::{FpVector, Prime};
use crate::error::{Error, Result};

/// A dense matrix over a prime field, stored as a list of row vectors.
///
/// Matrices act on column vectors: column `j` is the image of the `j`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: Prime,
    cols: usize,
    rows: Vec<FpVector>,
}

/// Reduced row echelon form of a matrix.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<FpVector>,
    /// Pivot column of each nonzero row, increasing.
    pub pivots: Vec<usize>,
}

impl FpMatrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix { p, cols, rows: vec![FpVector::zeros(p, cols); rows] }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        FpMatrix { p, cols: n, rows: (0..n).map(|i| FpVector::unit(p, n, i)).collect() }
    }

    /// Build from integer rows; entries are reduced mod `p`.
    pub fn from_rows(p: Prime, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Ok(FpMatrix { p, cols, rows: rows.iter().map(|r| FpVector::from_residues(p, r)).collect() })
    }

    pub fn from_row_vectors(p: Prime, cols: usize, rows: Vec<FpVector>) -> Result<Self> {
        for r in &rows {
            if r.dim() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.dim() });
            }
            if r.prime() != p {
                return Err(Error::InvalidArgument("row over a different field".into()));
            }
        }
        Ok(FpMatrix { p, cols, rows })
    }

    /// F₂ matrix from row bit masks (bit `j` of `rows[i]` is entry `(i, j)`).
    pub fn from_bit_rows(cols: usize, rows: &[u64]) -> Self {
        FpMatrix { p: Prime::TWO, cols, rows: rows.iter().map(|&b| FpVector::from_bits(cols, b)).collect() }
    }

    /// The matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(p: Prime, dim: usize, columns: &[FpVector]) -> Self {
        let mut m = FpMatrix::zeros(p, dim, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.dim(), dim);
            for i in 0..dim {
                m.rows[i].set(j, c.get(i));
            }
        }
        m
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.rows[i].set(j, v)
    }

    pub fn row(&self, i: usize) -> &FpVector {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[FpVector] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> FpVector {
        let mut c = FpVector::zeros(self.p, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            c.set(i, r.get(j));
        }
        c
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.p, self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in 0..self.cols {
                let v = r.get(j);
                if v != 0 {
                    t.rows[j].set(i, v);
                }
            }
        }
        t
    }

    /// Matrix product. Panics on shape mismatch.
    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.p, other.p, "matrices over different fields");
        assert_eq!(self.cols, other.rows.len(), "matrix shape mismatch");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = FpVector::zeros(self.p, other.cols);
                for k in 0..self.cols {
                    let c = r.get(k);
                    if c != 0 {
                        out.add_scaled_assign(&other.rows[k], c);
                    }
                }
                out
            })
            .collect();
        FpMatrix { p: self.p, cols: other.cols, rows }
    }

    /// Matrix-vector product `M v`.
    pub fn apply(&self, v: &FpVector) -> FpVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        let mut out = FpVector::zeros(self.p, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            out.set(i, r.dot(v));
        }
        out
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.nrows(), self.cols), (other.nrows(), other.cols));
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.add(b)).collect();
        FpMatrix { p: self.p, cols: self.cols, rows }
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.nrows(), self.cols), (other.nrows(), other.cols));
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.sub(b)).collect();
        FpMatrix { p: self.p, cols: self.cols, rows }
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        FpMatrix { p: self.p, cols: self.cols, rows: self.rows.iter().map(|r| r.scale(c)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == FpMatrix::identity(self.p, self.cols)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(FpVector::is_zero)
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        assert!(self.is_square());
        let mut result = FpMatrix::identity(self.p, self.cols);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.cols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        FpMatrix { p: self.p, cols: self.cols, rows }
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.nrows(), other.nrows());
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.concat(b)).collect();
        FpMatrix { p: self.p, cols: self.cols + other.cols, rows }
    }

    pub fn echelon(&self) -> Echelon {
        let p = self.p;
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(piv) = (r..rows.len()).find(|&i| rows[i].get(col) != 0) else {
                continue;
            };
            rows.swap(r, piv);
            let lead = rows[r].get(col);
            if lead != 1 {
                rows[r] = rows[r].scale(p.inv(lead));
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r {
                    let c = row.get(col);
                    if c != 0 {
                        row.add_scaled_assign(&pivot_row, p.get() - c);
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        Echelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{x : M x = 0}`.
    pub fn kernel_basis(&self) -> Vec<FpVector> {
        let ech = self.echelon();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = FpVector::unit(p, self.cols, f);
                for (row, &pc) in ech.rows.iter().zip(&ech.pivots) {
                    let c = row.get(f);
                    if c != 0 {
                        x.set(pc, p.get() - c);
                    }
                }
                x
            })
            .collect()
    }

    /// Some `x` with `M x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &FpVector) -> Result<Option<FpVector>> {
        if b.dim() != self.nrows() {
            return Err(Error::DimensionMismatch { expected: self.nrows(), found: b.dim() });
        }
        let aug_rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&FpVector::from_residues(self.p, &[b.get(i) as i64])))
            .collect();
        let aug = FpMatrix { p: self.p, cols: self.cols + 1, rows: aug_rows };
        let ech = aug.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = FpVector::zeros(self.p, self.cols);
        for (row, &pc) in ech.rows.iter().zip(&ech.pivots) {
            x.set(pc, row.get(self.cols));
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.cols;
        let ech = self.hstack(&FpMatrix::identity(self.p, n)).echelon();
        if ech.pivots.len() < n || ech.pivots[n - 1] != n - 1 {
            return None;
        }
        let rows = ech.rows.iter().map(|r| r.slice(n, 2 * n)).collect();
        Some(FpMatrix { p: self.p, cols: n, rows })
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.cols
    }

    /// `dim ker(M - 1)`, the dimension of the subspace fixed by `M`.
    pub fn fixed_subspace_dim(&self) -> usize {
        assert!(self.is_square(), "fixed subspace of a non-square matrix");
        self.cols - self.sub(&FpMatrix::identity(self.p, self.cols)).rank()
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}
