//! Seeded generators for the studied matrix classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{householder_qr, DenseMatrix};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixClass {
    Identity,
    Hadamard,
    Uniform,
    Banded,
    StiefelProduct,
}

impl MatrixClass {
    /// Whether instances depend on the seed.
    pub fn is_random(self) -> bool {
        matches!(self, Self::Uniform | Self::Banded | Self::StiefelProduct)
    }
}

/// Description of one member of a matrix family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub class: MatrixClass,
    pub n: usize,
    /// Band width, banded class only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    /// Factor rank, stiefel-product class only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Scale to unit max norm (stiefel-product).
    #[serde(default)]
    pub normalize: bool,
}

impl MatrixSpec {
    pub fn new(class: MatrixClass, n: usize) -> Self {
        Self {
            class,
            n,
            b: None,
            k: None,
            seed: 0,
            normalize: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidDimensions("n must be positive".into()));
        }
        match self.class {
            MatrixClass::Banded => {
                let b = self
                    .b
                    .ok_or_else(|| Error::Config("banded class needs `b`".into()))?;
                if b == 0 || b > self.n {
                    return Err(Error::InvalidBand { n: self.n, b });
                }
            }
            MatrixClass::StiefelProduct => {
                let k = self
                    .k
                    .ok_or_else(|| Error::Config("stiefel-product class needs `k`".into()))?;
                if k == 0 || k > self.n {
                    return Err(Error::InvalidRank { rank: k, max: self.n });
                }
            }
            MatrixClass::Hadamard if !self.n.is_power_of_two() => {
                return Err(Error::NotPowerOfTwo(self.n));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<DenseMatrix> {
        self.validate()?;
        let mut rng = Rng::new(self.seed);
        match self.class {
            MatrixClass::Identity => Ok(identity(self.n)),
            MatrixClass::Hadamard => hadamard(self.n),
            MatrixClass::Uniform => Ok(uniform(self.n, &mut rng)),
            MatrixClass::Banded => banded_uniform(self.n, self.b.unwrap_or(self.n), &mut rng),
            MatrixClass::StiefelProduct => {
                stiefel_product(self.n, self.k.unwrap_or(self.n), &mut rng, self.normalize)
            }
        }
    }
}

pub fn identity(n: usize) -> DenseMatrix {
    DenseMatrix::identity(n)
}

/// I.i.d. Uniform(-1, 1) entries.
pub fn uniform(n: usize, rng: &mut Rng) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |_, _| rng.uniform_pm1())
}

/// Uniform(-1, 1) entries on the `2b - 1` central diagonals, zero elsewhere.
pub fn banded_uniform(n: usize, b: usize, rng: &mut Rng) -> Result<DenseMatrix> {
    if b == 0 || b > n {
        return Err(Error::InvalidBand { n, b });
    }
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) < b {
            rng.uniform_pm1()
        } else {
            0.0
        }
    }))
}

/// `n x k` matrix with orthonormal columns, Haar distributed on the Stiefel
/// manifold (QR of a Gaussian with positive `R` diagonal).
pub fn stiefel(n: usize, k: usize, rng: &mut Rng) -> DenseMatrix {
    householder_qr(&rng.gaussian_matrix(n, k, 1.0)).0
}

/// `Q₁Q₂ᵀ` for independent Stiefel samples; optionally scaled to unit max norm.
pub fn stiefel_product(n: usize, k: usize, rng: &mut Rng, normalize: bool) -> Result<DenseMatrix> {
    if k == 0 || k > n {
        return Err(Error::InvalidRank { rank: k, max: n });
    }
    let q1 = stiefel(n, k, rng);
    let q2 = stiefel(n, k, rng);
    let p = q1.matmul_t(&q2)?;
    Ok(if normalize { p.scale(1.0 / p.max_norm()) } else { p })
}

/// Sylvester construction, entries ±1.
pub fn hadamard(n: usize) -> Result<DenseMatrix> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    // H(i, j) = (-1)^popcount(i & j)
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }))
}
