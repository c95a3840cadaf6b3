//! Renders weight-magnitude heatmaps as PGM images: a full-rank matrix, a
//! rank-1 product, and the product under sine modulation at two frequencies.
//! Higher frequencies visibly restore row diversity.
//!
//! Run with: `cargo run --release --example rank_heatmaps -- [out_dir]`

use std::path::PathBuf;

use sinerank::cli::heatmap_full_rank_matrix;
use sinerank::init::{sample_factors, InitScheme};
use sinerank::io::{quantize_min_max, write_pgm};
use sinerank::svd::{numerical_rank, RankTolerance};
use sinerank::DenseMatrix;

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| "heatmaps".into());
    std::fs::create_dir_all(&out).expect("create output dir");

    let seed = 42;
    let full = heatmap_full_rank_matrix(128, 128, seed);
    let scheme = InitScheme::uniform_pm_one_over_n(seed);
    let (u, v) = sample_factors(128, 128, 1, &scheme).unwrap();
    let plain = u.matmul(&v.transpose()).unwrap();

    let mut emit = |mat: &DenseMatrix, name: &str| {
        let abs: Vec<f64> = mat.entries().iter().map(|e| e.abs()).collect();
        let path = out.join(name);
        write_pgm(&path, mat.cols(), mat.rows(), &quantize_min_max(&abs)).unwrap();
        println!(
            "{:<22} numerical rank {:>3}  -> {}",
            name,
            numerical_rank(mat, RankTolerance::Default),
            path.display()
        );
    };

    emit(&full, "full_rank.pgm");
    emit(&plain, "rank1_product.pgm");
    emit(&plain.sine_modulate(100.0), "sine_w100.pgm");
    emit(&plain.sine_modulate(2000.0), "sine_w2000.pgm");
}
