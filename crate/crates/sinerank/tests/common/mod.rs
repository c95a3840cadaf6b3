//! Shared test support: independent spectral oracles.
//!
//! These deliberately avoid the library's one-sided Jacobi path so that
//! spectra can be cross-checked through a second algebraic route.

#![allow(dead_code)]

use sinerank::DenseMatrix;

/// Singular values via eigenvalues of `A^T A`, computed with a classical
/// two-sided Jacobi eigensolver, square-rooted and sorted descending.
///
/// Forming the Gram matrix floors the resolvable tail near
/// `sigma_max * sqrt(n * eps)`; callers comparing against it must stay above
/// that noise level.
pub fn gram_eigen_singular_values(a: &DenseMatrix) -> Vec<f64> {
    let at = a.transpose();
    let (small, big) = if a.rows() >= a.cols() {
        (at.matmul(a).unwrap(), ())
    } else {
        (a.matmul(&at).unwrap(), ())
    };
    let _ = big;
    let g = small;
    let n = g.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| g.row(i).to_vec()).collect();
    for _ in 0..100 {
        let mut off = 0.0f64;
        let mut diag_max = 0.0f64;
        for i in 0..n {
            diag_max = diag_max.max(m[i][i].abs());
            for j in 0..n {
                if i != j {
                    off += m[i][j] * m[i][j];
                }
            }
        }
        if off.sqrt() <= 1e-14 * diag_max.max(1e-300) {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                if m[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * m[p][q]).atan2(m[q][q] - m[p][p]);
                let (s, c) = theta.sin_cos();
                for i in 0..n {
                    let (vip, viq) = (m[i][p], m[i][q]);
                    m[i][p] = c * vip - s * viq;
                    m[i][q] = s * vip + c * viq;
                }
                for j in 0..n {
                    let (vpj, vqj) = (m[p][j], m[q][j]);
                    m[p][j] = c * vpj - s * vqj;
                    m[q][j] = s * vpj + c * vqj;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i].max(0.0).sqrt()).collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eig
}

/// Largest singular value by power iteration on `A^T A` with a fixed start.
pub fn power_iteration_operator_norm(a: &DenseMatrix, iters: usize) -> f64 {
    let n = a.cols();
    // deterministic non-degenerate start
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i as f64 * 0.7391).sin() * 0.5))
        .collect();
    let at = a.transpose();
    let mut norm = 0.0;
    for _ in 0..iters {
        let ax = a.matvec(&x).unwrap();
        let mut y = at.matvec(&ax).unwrap();
        let len = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 {
            return 0.0;
        }
        for v in y.iter_mut() {
            *v /= len;
        }
        let ay = a.matvec(&y).unwrap();
        norm = ay.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y;
    }
    norm
}

/// Stable rank through the oracle route: exact Frobenius sum over entries
/// divided by the squared power-iteration operator norm.
pub fn oracle_stable_rank(a: &DenseMatrix) -> f64 {
    let fro2: f64 = a.entries().iter().map(|v| v * v).sum();
    let op = power_iteration_operator_norm(a, 400);
    fro2 / (op * op)
}

/// Rank cut against an absolute threshold, applied to oracle singular values.
pub fn rank_above(sv: &[f64], tau: f64) -> usize {
    sv.iter().filter(|&&s| s > tau).count()
}
