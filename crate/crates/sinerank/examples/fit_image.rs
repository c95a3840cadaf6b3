//! Fits a procedural checkerboard with a coordinate MLP whose hidden layers
//! are rank-1 factor pairs, comparing the plain product against the
//! sine-modulated one from the same seed.
//!
//! Run with: `cargo run --release --example fit_image -- [grid] [epochs]`
//! (defaults 32x32, 200 epochs; expect a couple of minutes)

use sinerank::nn::{
    build_model, gen_image_task, task_model_specs, train, Activation, ImagePattern, LayerKind,
    TrainConfig,
};

fn main() {
    let grid: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(32);
    let epochs: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(200);
    let data = gen_image_task(ImagePattern::Checker, grid, grid);
    let mut cfg = TrainConfig::for_task(data.task_kind, data.len(), 5);
    cfg.epochs = epochs;

    println!(
        "checker {grid}x{grid}, hidden widths [256, 256], k = 1, {} epochs, lr {}, batch {}\n",
        cfg.epochs, cfg.learning_rate, cfg.batch_size
    );
    for (name, kind, omega) in [
        ("plain", LayerKind::LowrankPlain, None),
        ("sine", LayerKind::LowrankSine, Some(200.0)),
    ] {
        let specs = task_model_specs(2, &[256, 256], kind, 1, omega, Activation::Gaussian);
        let mut model = build_model(&specs, 5).unwrap();
        match train(&mut model, &data, &cfg) {
            Ok(h) => println!(
                "{name:<6} psnr {:>7.3} dB   ({} params, {:.2}% of dense)",
                h.final_psnr.unwrap(),
                h.param_count,
                100.0 * h.compression_rate
            ),
            Err(e) => println!("{name:<6} failed: {e}"),
        }
    }
}
