//! Column-major dense matrix container used throughout the crate.
//!
//! Matrices are immutable once constructed; construction rejects non-finite
//! entries and zero dimensions. Internally everything is 0-based; the 1-based
//! convention of index files and selections is confined to
//! [`crate::deim::IndexSelection`].

use crate::error::{Error, Result};
use crate::util::indexed_map;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from column-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DataLength {
                len: data.len(),
                rows,
                cols,
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { rows, cols, data })
    }

    /// Internal constructor for values produced by finite arithmetic.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert!(rows > 0 && cols > 0);
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Assembles a matrix from equal-length column vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
        }
        let rows = columns[0].len();
        for c in columns {
            if c.len() != rows {
                return Err(Error::ColumnLengthMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
        }
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            data.extend_from_slice(c);
        }
        Self::new(rows, columns.len(), data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[j * self.rows + i]
    }

    /// Contiguous view of column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        let start = j * self.rows;
        &self.data[start..start + self.rows]
    }

    pub fn column_vec(&self, j: usize) -> Vec<f64> {
        self.column(j).to_vec()
    }

    pub fn row_vec(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Iterator over column slices, in order. Also serves as the column
    /// stream source for the incremental factorization.
    pub fn column_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.cols).map(move |j| self.column(j))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for j in 0..self.cols {
            let col = self.column(j);
            for i in 0..self.rows {
                data[i * self.cols + j] = col[i];
            }
        }
        DenseMatrix::from_raw(self.cols, self.rows, data)
    }

    /// Matrix product, dispatching to the parallel kernel when the
    /// `parallel` feature is enabled and the product is large enough.
    /// Both paths accumulate each output column in the same order, so the
    /// result is bitwise identical either way.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let work = self.rows * self.cols * rhs.cols * 2;
        let cols = indexed_map(rhs.cols, work, |j| self.product_column(rhs, j));
        flatten_columns(self.rows, cols)
    }

    /// Strictly sequential matrix product.
    pub fn matmul_seq(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let cols: Vec<Vec<f64>> = (0..rhs.cols).map(|j| self.product_column(rhs, j)).collect();
        flatten_columns(self.rows, cols)
    }

    /// Matrix product forced onto the rayon pool.
    #[cfg(feature = "parallel")]
    pub fn matmul_par(&self, rhs: &DenseMatrix) -> DenseMatrix {
        use rayon::prelude::*;
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let cols: Vec<Vec<f64>> = (0..rhs.cols)
            .into_par_iter()
            .map(|j| self.product_column(rhs, j))
            .collect();
        flatten_columns(self.rows, cols)
    }

    #[inline]
    fn product_column(&self, rhs: &DenseMatrix, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        let rcol = rhs.column(j);
        for (t, &w) in rcol.iter().enumerate() {
            if w != 0.0 {
                axpy(&mut out, w, self.column(t));
            }
        }
        out
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec shape mismatch");
        let mut y = vec![0.0; self.rows];
        for (t, &w) in x.iter().enumerate() {
            if w != 0.0 {
                axpy(&mut y, w, self.column(t));
            }
        }
        y
    }

    /// y = A^T x, computed as one dot product per column.
    pub fn transpose_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec shape mismatch");
        (0..self.cols).map(|j| dot(self.column(j), x)).collect()
    }

    /// Entrywise difference `self - rhs`.
    pub fn sub(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "sub shape mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        DenseMatrix::from_raw(self.rows, self.cols, data)
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * s).collect(),
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        norm2(self.column(j))
    }

    /// Extracts columns by 0-based indices, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> DenseMatrix {
        assert!(!idx.is_empty() && idx.iter().all(|&j| j < self.cols));
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.column(j));
        }
        DenseMatrix::from_raw(self.rows, idx.len(), data)
    }

    /// Extracts rows by 0-based indices, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        assert!(!idx.is_empty() && idx.iter().all(|&i| i < self.rows));
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for j in 0..self.cols {
            let col = self.column(j);
            for &i in idx {
                data.push(col[i]);
            }
        }
        DenseMatrix::from_raw(idx.len(), self.cols, data)
    }

    /// Extracts the submatrix with rows `p` and columns `q` (0-based).
    pub fn submatrix(&self, p: &[usize], q: &[usize]) -> DenseMatrix {
        self.select_rows(p).select_columns(q)
    }
}

#[inline]
pub(crate) fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += a * xi;
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn flatten_columns(rows: usize, cols: Vec<Vec<f64>>) -> DenseMatrix {
    let n = cols.len();
    let mut data = Vec::with_capacity(rows * n);
    for c in cols {
        debug_assert_eq!(c.len(), rows);
        data.extend_from_slice(&c);
    }
    DenseMatrix::from_raw(rows, n, data)
}
