//! Searches a frequency grid for the smallest omega at which the sine map
//! pushes a rank-k product above its base rank — the constructive witness
//! for the rank-lift existence claim.
//!
//! Run with: `cargo run --release --example theorem_witness -- [k]`

use sinerank::init::{sample_factors, InitScheme};
use sinerank::theory::{default_omega_grid, find_omega0};

fn main() {
    let k: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let scheme = InitScheme::uniform_pm_one_over_n(42);
    let (u, v) = sample_factors(128, 128, k, &scheme).expect("N = 128 > k required");
    let grid = default_omega_grid();
    let result = find_omega0(&u, &v, &grid).unwrap();

    println!("factors 128x128, k = {k}, entries ~ U(-1/128, 1/128)");
    println!("base rank of U V^T: {}\n", result.base_rank);
    println!("{:>12}  rank", "omega");
    for (omega, rank) in result.omega_grid.iter().zip(&result.ranks) {
        let marker = if Some(*omega) == result.omega0 { "  <- omega0" } else { "" };
        println!("{omega:>12.3e}  {rank}{marker}");
    }
    match result.omega0 {
        Some(w) => println!("\nsmallest rank-lifting frequency: {w:.3e}"),
        None => println!("\nno lift found on this grid"),
    }
}
