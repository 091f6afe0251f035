use super::matrix::DenseMatrix;
use super::svd::svd_dense;
use crate::error::{Error, Result};

/// `Y = U diag(s) Vᵀ` with orthonormal `U` (m x r), `V` (n x r) and
/// nonincreasing nonnegative `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactors {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
}

impl LowRankFactors {
    /// Checks shapes, ordering and orthonormality (within `1e-10`).
    pub fn new(u: DenseMatrix, s: Vec<f64>, v: DenseMatrix) -> Result<Self> {
        let f = Self::from_parts_unchecked(u, s, v);
        if f.u.cols() != f.s.len() || f.v.cols() != f.s.len() {
            return Err(Error::ShapeMismatch {
                left: f.u.shape(),
                right: f.v.shape(),
            });
        }
        if f.s.iter().any(|&x| x < 0.0) || f.s.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidDimensions(
                "singular values must be nonnegative and nonincreasing".into(),
            ));
        }
        let deviation = f.orthonormality_residual();
        if deviation > 1e-10 {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(f)
    }

    pub(crate) fn from_parts_unchecked(u: DenseMatrix, s: Vec<f64>, v: DenseMatrix) -> Self {
        Self { u, s, v }
    }

    /// The zero matrix represented with `r` canonical directions.
    pub fn zero(rows: usize, cols: usize, r: usize) -> Self {
        Self {
            u: DenseMatrix::from_fn(rows, r, |i, j| if i == j { 1.0 } else { 0.0 }),
            s: vec![0.0; r],
            v: DenseMatrix::from_fn(cols, r, |i, j| if i == j { 1.0 } else { 0.0 }),
        }
    }

    /// SVD factors of `scale * A Bᵀ` for `A` (m x r) and `B` (n x r), valid
    /// even when `A` or `B` is rank deficient.
    pub fn from_product(a: &DenseMatrix, b: &DenseMatrix, scale: f64) -> Result<Self> {
        if a.cols() != b.cols() {
            return Err(Error::ShapeMismatch {
                left: a.shape(),
                right: b.shape(),
            });
        }
        let r = a.cols();
        if r > a.rows() || r > b.rows() {
            let dense = a.matmul_t(b)?.scale(scale);
            return Ok(svd_dense(&dense)?.truncate(r.min(a.rows()).min(b.rows())));
        }
        // A = Ua Sa Vaᵀ, B = Ub Sb Vbᵀ  =>  A Bᵀ = Ua (Sa Vaᵀ Vb Sb) Ubᵀ
        let fa = svd_dense(a)?;
        let fb = svd_dense(b)?;
        let left = scale_columns(&fa.v, &fa.s);
        let right = scale_columns(&fb.v, &fb.s);
        let core = left.t_matmul(&right)?.scale(scale);
        let fc = svd_dense(&core)?;
        Ok(Self {
            u: fa.u.matmul(&fc.u)?,
            s: fc.s,
            v: fb.u.matmul(&fc.v)?,
        })
    }

    pub fn rows(&self) -> usize {
        self.u.rows()
    }

    pub fn cols(&self) -> usize {
        self.v.rows()
    }

    /// Number of stored factor columns.
    pub fn width(&self) -> usize {
        self.s.len()
    }

    /// Count of singular values above `tol * s[0]`.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        match self.s.first() {
            Some(&s0) if s0 > 0.0 => self.s.iter().filter(|&&x| x > tol * s0).count(),
            _ => 0,
        }
    }

    /// Keeps the leading `r` triplets.
    pub fn truncate(mut self, r: usize) -> Self {
        let r = r.min(self.s.len()).max(1);
        if r < self.s.len() {
            self.u = self.u.leading_columns(r);
            self.v = self.v.leading_columns(r);
            self.s.truncate(r);
        }
        self
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let us = scale_columns(&self.u, &self.s);
        us.matmul(&self.v.transpose()).expect("factor shapes are consistent")
    }

    /// `max(‖UᵀU − I‖_max, ‖VᵀV − I‖_max)`.
    pub fn orthonormality_residual(&self) -> f64 {
        let id = DenseMatrix::identity(self.width());
        let du = self.u.t_matmul(&self.u).and_then(|g| g.max_abs_diff(&id));
        let dv = self.v.t_matmul(&self.v).and_then(|g| g.max_abs_diff(&id));
        match (du, dv) {
            (Ok(a), Ok(b)) => a.max(b),
            _ => f64::INFINITY,
        }
    }
}

pub(crate) fn scale_columns(a: &DenseMatrix, s: &[f64]) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) * s[j])
}
