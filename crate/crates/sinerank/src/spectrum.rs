//! Spectrum summaries: singular values, norms, stable and numerical rank.

use serde::{Deserialize, Serialize};

use crate::matrix::DenseMatrix;
use crate::svd::{rank_from_singular_values, rank_threshold, singular_values, RankTolerance};

/// Everything the spectral comparisons report about one matrix.
///
/// For the zero matrix, `sv_normalized` is all zeros and `stable_rank` is
/// reported as `0.0` (the standalone `stable_rank` operation errors instead).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Descending, non-negative.
    pub singular_values: Vec<f64>,
    /// `singular_values` divided by the largest (all zeros for the zero matrix).
    pub sv_normalized: Vec<f64>,
    pub frobenius_norm: f64,
    pub operator_norm: f64,
    pub stable_rank: f64,
    pub numerical_rank: usize,
    /// Absolute threshold used for the numerical-rank cut.
    pub rank_tolerance: f64,
}

impl SpectrumReport {
    pub fn compute(a: &DenseMatrix, tol: RankTolerance) -> Self {
        let sv = singular_values(a);
        Self::from_singular_values(sv, a, tol)
    }

    pub(crate) fn from_singular_values(sv: Vec<f64>, a: &DenseMatrix, tol: RankTolerance) -> Self {
        let (m, n) = a.shape();
        let sigma_max = sv.first().copied().unwrap_or(0.0);
        let sv_normalized = if sigma_max > 0.0 {
            sv.iter().map(|s| s / sigma_max).collect()
        } else {
            vec![0.0; sv.len()]
        };
        let frobenius_norm = a.frobenius_norm();
        let stable_rank = if sigma_max > 0.0 {
            (frobenius_norm / sigma_max).powi(2)
        } else {
            0.0
        };
        let numerical_rank = rank_from_singular_values(&sv, m, n, tol);
        let rank_tolerance = rank_threshold(sigma_max, m, n, tol);
        Self {
            singular_values: sv,
            sv_normalized,
            frobenius_norm,
            operator_norm: sigma_max,
            stable_rank,
            numerical_rank,
            rank_tolerance,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum report serializes")
    }
}

/// Single-column CSV with header `sigma`.
pub fn singular_values_csv(values: &[f64]) -> String {
    let mut out = String::from("sigma\n");
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    out
}
