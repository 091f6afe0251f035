use std::fmt;

use crate::error::{Error, Result};

/// Row-major dense real matrix with at least one row and one column and
/// only finite entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(8)])?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    /// Validating constructor.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::InvalidShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Constructor for internally produced data that is finite by construction.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert!(rows >= 1 && cols >= 1 && data.len() == rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "empty matrix");
        Self::from_parts(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_parts(rows, cols, data)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidShape {
                rows: r,
                cols: c,
                len: rows.iter().map(Vec::len).sum(),
            });
        }
        Self::new(r, c, rows.concat())
    }

    /// Diagonal `rows x cols` matrix carrying `diag` on its main diagonal.
    pub fn from_diag(rows: usize, cols: usize, diag: &[f64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.data[i * cols + i] = d;
        }
        m
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Sets one entry; non-finite values are rejected.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite { row: i, col: j });
        }
        self.data[i * self.cols + j] = value;
        Ok(())
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Columns as contiguous vectors.
    pub(crate) fn to_columns(&self) -> Vec<Vec<f64>> {
        let mut cols = vec![Vec::with_capacity(self.rows); self.cols];
        for i in 0..self.rows {
            for (c, &x) in cols.iter_mut().zip(self.row(i)) {
                c.push(x);
            }
        }
        cols
    }

    pub(crate) fn from_columns(rows: usize, cols: &[Vec<f64>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for (j, &x) in self.row(i).iter().enumerate() {
                out[j * self.rows + i] = x;
            }
        }
        Self::from_parts(self.cols, self.rows, out)
    }

    /// Leading `k` columns.
    pub fn leading_columns(&self, k: usize) -> DenseMatrix {
        assert!(k >= 1 && k <= self.cols);
        Self::from_fn(self.rows, k, |i, j| self.get(i, j))
    }

    fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self::from_parts(self.rows, self.cols, data))
    }

    pub fn scale(&self, factor: f64) -> DenseMatrix {
        Self::from_parts(
            self.rows,
            self.cols,
            self.data.iter().map(|x| x * factor).collect(),
        )
    }

    /// `max |self(i,j) - other(i,j)|` without allocating the difference.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())))
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let n = other.cols;
        let mut out = vec![0.0; self.rows * n];
        for i in 0..self.rows {
            let dst = &mut out[i * n..(i + 1) * n];
            for (p, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(p), dst);
                }
            }
        }
        Ok(Self::from_parts(self.rows, n, out))
    }

    /// `selfᵀ * other`.
    pub fn t_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let n = other.cols;
        let mut out = vec![0.0; self.cols * n];
        for p in 0..self.rows {
            let src = other.row(p);
            for (i, &a) in self.row(p).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, src, &mut out[i * n..(i + 1) * n]);
                }
            }
        }
        Ok(Self::from_parts(self.cols, n, out))
    }

    /// `self * otherᵀ`.
    pub fn matmul_t(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let (m, n) = (self.rows, other.rows);
        let mut out = vec![0.0; m * n];
        // outer loop over the larger operand
        if n > m {
            for j in 0..n {
                let b = other.row(j);
                for i in 0..m {
                    out[i * n + j] = dot(self.row(i), b);
                }
            }
        } else {
            for (i, dst) in out.chunks_exact_mut(n.max(1)).enumerate().take(m) {
                let a = self.row(i);
                for (j, o) in dst.iter_mut().enumerate() {
                    *o = dot(a, other.row(j));
                }
            }
        }
        Ok(Self::from_parts(m, n, out))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ x`.
    pub fn t_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            axpy(xi, self.row(i), &mut out);
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    pub fn fro_norm(&self) -> f64 {
        // scaled accumulation avoids overflow for huge entries
        let scale = self.max_norm();
        if scale == 0.0 {
            return 0.0;
        }
        let ss: f64 = self.data.iter().map(|x| (x / scale) * (x / scale)).sum();
        scale * ss.sqrt()
    }
}

/// Free-function forms of the two entrywise norms.
pub fn max_norm(a: &DenseMatrix) -> f64 {
    a.max_norm()
}

pub fn fro_norm(a: &DenseMatrix) -> f64 {
    a.fro_norm()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub(crate) fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
