//! One-sided (Hestenes) Jacobi SVD.
//!
//! Works on the columns of the taller orientation, so the rotations act on the
//! smaller Gram side. Intended for matrices whose smaller dimension is at most
//! a few hundred; larger problems go through [`super::rsvd_truncate`].

use super::factors::LowRankFactors;
use super::matrix::{dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Full thin SVD, `r = min(m, n)`, singular values nonincreasing.
pub fn svd_dense(a: &DenseMatrix) -> Result<LowRankFactors> {
    let (m, n) = a.shape();
    if m >= n {
        let (u, s, v) = jacobi_tall(a)?;
        Ok(LowRankFactors::from_parts_unchecked(u, s, v))
    } else {
        let (v, s, u) = jacobi_tall(&a.transpose())?;
        Ok(LowRankFactors::from_parts_unchecked(u, s, v))
    }
}

/// Singular values only.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd_dense(a)?.s)
}

fn jacobi_tall(a: &DenseMatrix) -> Result<(DenseMatrix, Vec<f64>, DenseMatrix)> {
    let (m, n) = a.shape();
    let mut cols = a.to_columns();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let fro = a.fro_norm();
    // columns below this norm are treated as numerically zero
    let tiny = (m as f64) * f64::EPSILON * fro;
    let tiny2 = tiny * tiny;
    let tol = 4.0 * f64::EPSILON;

    let mut norms2: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();
    let mut converged = fro == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                what: "one-sided Jacobi SVD",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms2[p];
                let beta = norms2[q];
                if alpha <= tiny2 || beta <= tiny2 {
                    continue;
                }
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
                norms2[p] = alpha - t * gamma;
                norms2[q] = beta + t * gamma;
            }
        }
        // refresh the running norms to stop drift
        for (nrm, c) in norms2.iter_mut().zip(&cols) {
            *nrm = dot(c, c);
        }
        converged = !rotated;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sv: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]).then(i.cmp(&j)));

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut v_sorted = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for &j in &order {
        let sj = sv[j];
        if sj > tiny {
            u_cols.push(cols[j].iter().map(|x| x / sj).collect());
            s.push(sj);
        } else {
            missing.push(u_cols.len());
            u_cols.push(Vec::new());
            s.push(0.0);
        }
        v_sorted.push(std::mem::take(&mut v[j]));
    }
    complete_basis(&mut u_cols, &missing, m);

    Ok((
        DenseMatrix::from_columns(m, &u_cols),
        s,
        DenseMatrix::from_columns(n, &v_sorted),
    ))
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Fills the slots listed in `missing` with unit vectors orthogonal to every
/// other column, by Gram-Schmidt on canonical basis vectors.
fn complete_basis(cols: &mut [Vec<f64>], missing: &[usize], m: usize) {
    if missing.is_empty() {
        return;
    }
    let mut next_canonical = 0;
    for &slot in missing {
        loop {
            assert!(next_canonical < m, "cannot complete basis beyond dimension {m}");
            let mut e = vec![0.0; m];
            e[next_canonical] = 1.0;
            next_canonical += 1;
            // two passes of classical Gram-Schmidt
            for _ in 0..2 {
                for (idx, c) in cols.iter().enumerate() {
                    if idx == slot || c.is_empty() {
                        continue;
                    }
                    let proj = dot(c, &e);
                    for (ei, ci) in e.iter_mut().zip(c) {
                        *ei -= proj * ci;
                    }
                }
            }
            let nrm = norm2(&e);
            if nrm > 0.5 {
                e.iter_mut().for_each(|x| *x /= nrm);
                cols[slot] = e;
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn reconstruct(f: &LowRankFactors) -> DenseMatrix {
        f.to_dense()
    }

    #[test]
    fn diagonal() {
        let a = DenseMatrix::from_diag(3, 3, &[1.0, 3.0, 2.0]);
        let f = svd_dense(&a).unwrap();
        assert_eq!(f.s, vec![3.0, 2.0, 1.0]);
        assert!(reconstruct(&f).max_abs_diff(&a).unwrap() < 1e-15);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [1.0, 2.0, 2.0];
        let v = [3.0, 0.0, 4.0, 0.0];
        let a = DenseMatrix::from_fn(3, 4, |i, j| u[i] * v[j]);
        let f = svd_dense(&a).unwrap();
        assert!((f.s[0] - 15.0).abs() < 1e-13);
        assert!(f.s[1..].iter().all(|&s| s < 1e-13));
        assert!(f.orthonormality_residual() < 1e-12);
        assert!(reconstruct(&f).max_abs_diff(&a).unwrap() < 1e-13);
    }

    #[test]
    fn zero_matrix() {
        let f = svd_dense(&DenseMatrix::zeros(4, 3)).unwrap();
        assert_eq!(f.s, vec![0.0; 3]);
        assert!(f.orthonormality_residual() < 1e-15);
    }

    #[test]
    fn random_wide_and_tall() {
        let mut rng = Rng::new(3);
        for (m, n) in [(8, 6), (6, 8), (30, 30), (1, 5), (5, 1)] {
            let a = rng.gaussian_matrix(m, n, 1.0);
            let f = svd_dense(&a).unwrap();
            let s1 = f.s[0];
            assert!(reconstruct(&f).max_abs_diff(&a).unwrap() <= 1e-9 * s1, "{m}x{n}");
            assert!(f.orthonormality_residual() <= 1e-10);
            assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
