//! Singular values via one-sided Jacobi, plus rank and stable-rank queries.
//!
//! The routine rotates column pairs of the (possibly transposed) input until
//! all columns are mutually orthogonal; the singular values are the final
//! column norms. One-sided Jacobi computes small singular values to high
//! relative accuracy, which matters for tolerance-cut rank decisions.

use crate::matrix::DenseMatrix;
use crate::{Error, Result};

/// Threshold policy for counting singular values as nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankTolerance {
    /// `tau = max(m, n) * sigma_max * eps`, the conventional cut.
    Default,
    /// A caller-supplied absolute threshold.
    Absolute(f64),
}

/// All `min(m, n)` singular values of `a`, descending.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    // Work on the orientation with fewer columns; spectra agree under transpose.
    let work = if n <= m { a.clone() } else { a.transpose() };
    jacobi_column_norms(work)
}

fn jacobi_column_norms(a: DenseMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    // Column-major working buffer: column j occupies cols[j*m .. (j+1)*m].
    let mut cols = vec![0.0f64; m * n];
    for i in 0..m {
        let row = a.row(i);
        for j in 0..n {
            cols[j * m + i] = row[j];
        }
    }
    let mut sq: Vec<f64> = (0..n)
        .map(|j| cols[j * m..(j + 1) * m].iter().map(|v| v * v).sum())
        .collect();

    const MAX_SWEEPS: usize = 64;
    let tol = 1.0e-15;
    for _ in 0..MAX_SWEEPS {
        // Refresh cached squared norms once per sweep to stop drift.
        for j in 0..n {
            sq[j] = cols[j * m..(j + 1) * m].iter().map(|v| v * v).sum();
        }
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (head, tail) = cols.split_at_mut(q * m);
                let cp = &mut head[p * m..p * m + m];
                let cq = &mut tail[..m];
                let mut gamma = 0.0;
                for i in 0..m {
                    gamma += cp[i] * cq[i];
                }
                let alpha = sq[p];
                let beta = sq[q];
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let vp = cp[i];
                    let vq = cq[i];
                    cp[i] = c * vp - s * vq;
                    cq[i] = s * vp + c * vq;
                }
                sq[p] = alpha - t * gamma;
                sq[q] = beta + t * gamma;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..n)
        .map(|j| {
            cols[j * m..(j + 1) * m]
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Largest singular value.
pub fn operator_norm(a: &DenseMatrix) -> f64 {
    singular_values(a)[0]
}

/// `||a||_F^2 / ||a||_op^2`; errors on the zero matrix.
pub fn stable_rank(a: &DenseMatrix) -> Result<f64> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let fro = a.frobenius_norm();
    let op = operator_norm(a);
    Ok((fro / op).powi(2))
}

/// The absolute threshold implied by a policy for the given spectrum scale.
pub fn rank_threshold(sigma_max: f64, m: usize, n: usize, tol: RankTolerance) -> f64 {
    match tol {
        RankTolerance::Default => m.max(n) as f64 * sigma_max * f64::EPSILON,
        RankTolerance::Absolute(t) => t,
    }
}

/// Count of singular values above the policy threshold.
pub fn numerical_rank(a: &DenseMatrix, tol: RankTolerance) -> usize {
    let sv = singular_values(a);
    rank_from_singular_values(&sv, a.rows(), a.cols(), tol)
}

/// Rank cut applied to an already-computed descending spectrum.
pub fn rank_from_singular_values(sv: &[f64], m: usize, n: usize, tol: RankTolerance) -> usize {
    if sv.is_empty() {
        return 0;
    }
    let tau = rank_threshold(sv[0], m, n, tol);
    sv.iter().take_while(|&&s| s > tau).count()
}
