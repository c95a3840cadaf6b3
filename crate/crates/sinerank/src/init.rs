//! Seeded initialization schemes and labeled RNG streams.
//!
//! Every consumer of randomness (factor init, weight init, shuffling, trial
//! sweeps) draws from its own stream derived from the root seed and a fixed
//! label, so adding one consumer never perturbs another.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Distribution family for factor/weight entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    KaimingUniform,
    XavierUniform,
    /// `U(-1/N, 1/N)` with `N` picked by the fan basis; requires `N > k`.
    UniformPmOneOverN,
}

/// Which dimension of the materialized `m x n` matrix sets the fan count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FanBasis {
    Rows,
    Cols,
    Both,
}

/// A deterministic initialization recipe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitScheme {
    pub kind: InitKind,
    pub fan_basis: FanBasis,
    pub seed: u64,
}

impl InitScheme {
    /// Kaiming uniform over the input fan (columns of the materialized matrix).
    pub fn kaiming(seed: u64) -> Self {
        Self {
            kind: InitKind::KaimingUniform,
            fan_basis: FanBasis::Cols,
            seed,
        }
    }

    /// Xavier uniform over both fans.
    pub fn xavier(seed: u64) -> Self {
        Self {
            kind: InitKind::XavierUniform,
            fan_basis: FanBasis::Both,
            seed,
        }
    }

    /// `U(-1/N, 1/N)` with `N` = input fan.
    pub fn uniform_pm_one_over_n(seed: u64) -> Self {
        Self {
            kind: InitKind::UniformPmOneOverN,
            fan_basis: FanBasis::Cols,
            seed,
        }
    }

    fn fan(&self, m: usize, n: usize) -> usize {
        match self.fan_basis {
            FanBasis::Rows => m,
            FanBasis::Cols => n,
            FanBasis::Both => m + n,
        }
    }

    /// Half-width of the sampling interval for a materialized `m x n` matrix
    /// factored at rank `k`. `k = 0` means a direct (non-factored) weight.
    pub fn bound(&self, m: usize, n: usize, k: usize) -> Result<f64> {
        let fan = self.fan(m, n);
        match self.kind {
            InitKind::KaimingUniform => Ok((6.0 / fan as f64).sqrt()),
            InitKind::XavierUniform => Ok((6.0 / (m + n) as f64).sqrt()),
            InitKind::UniformPmOneOverN => {
                if fan <= k {
                    return Err(Error::InvalidScheme {
                        reason: format!("uniform_pm_1_over_N requires N > k, got N={fan}, k={k}"),
                    });
                }
                Ok(1.0 / fan as f64)
            }
        }
    }
}

impl FromStr for InitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kaiming_uniform" | "kaiming" => Ok(InitKind::KaimingUniform),
            "xavier_uniform" | "xavier" => Ok(InitKind::XavierUniform),
            "uniform_pm_1_over_n" | "uniform" => Ok(InitKind::UniformPmOneOverN),
            other => Err(Error::InvalidScheme {
                reason: format!("unknown init kind `{other}`"),
            }),
        }
    }
}

/// Stream labels in use across the crate.
pub mod labels {
    pub const INIT: &str = "init";
    pub const SHUFFLE: &str = "shuffle";
    pub const TRIAL: &str = "trial";
    pub const FULL_RANK: &str = "full-rank";
}

fn label_hash(label: &str) -> u64 {
    // FNV-1a; stable across platforms and releases.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// RNG stream for `(seed, label)`.
pub fn rng_stream(seed: u64, label: &str) -> ChaCha8Rng {
    rng_stream_indexed(seed, label, 0)
}

/// RNG stream for `(seed, label, index)`; used for parallel trial sweeps.
pub fn rng_stream_indexed(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label_hash(label) ^ index);
    rng
}

/// Samples `rows x cols` entries i.i.d. from `U(-bound, bound)`, row-major.
pub fn sample_uniform(rows: usize, cols: usize, bound: f64, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let entries = (0..rows * cols)
        .map(|_| {
            let u: f64 = rng.random();
            bound * (2.0 * u - 1.0)
        })
        .collect();
    DenseMatrix::from_vec_unchecked(rows, cols, entries)
}

/// A direct `rows x cols` weight drawn from the scheme (no factorization).
pub fn sample_weight(rows: usize, cols: usize, scheme: &InitScheme) -> Result<DenseMatrix> {
    let bound = scheme.bound(rows, cols, 0)?;
    let mut rng = rng_stream(scheme.seed, labels::INIT);
    Ok(sample_uniform(rows, cols, bound, &mut rng))
}

/// Factor pair `(U, V)` for a materialized `m x n` matrix of rank `k`.
/// `U` is sampled first, then `V`, from the scheme's `init` stream.
pub fn sample_factors(
    m: usize,
    n: usize,
    k: usize,
    scheme: &InitScheme,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let bound = scheme.bound(m, n, k)?;
    let mut rng = rng_stream(scheme.seed, labels::INIT);
    let u = sample_uniform(m, k, bound, &mut rng);
    let v = sample_uniform(n, k, bound, &mut rng);
    Ok((u, v))
}
