//! Fits the binary occupancy of an analytic sphere with a coordinate MLP,
//! comparing dense, plain low-rank, and sine low-rank hidden layers.
//!
//! Run with: `cargo run --release --example fit_occupancy -- [grid] [k]`
//! (defaults 16^3 and k = 1; expect several minutes)

use sinerank::nn::{
    build_model, gen_occupancy_task, task_model_specs, train, Activation, LayerKind,
    OccupancyShape, TrainConfig,
};

fn main() {
    let grid: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    let k: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let data = gen_occupancy_task(OccupancyShape::Sphere, grid);
    let cfg = TrainConfig::for_task(data.task_kind, data.len(), 3);

    println!(
        "sphere occupancy {grid}^3, hidden widths [256, 256], {} epochs, lr {}, batch {}\n",
        cfg.epochs, cfg.learning_rate, cfg.batch_size
    );
    for (name, kind) in [
        ("dense", LayerKind::Dense),
        ("plain", LayerKind::LowrankPlain),
        ("sine", LayerKind::LowrankSine),
    ] {
        let specs = task_model_specs(3, &[256, 256], kind, k, None, Activation::Gaussian);
        let mut model = build_model(&specs, 3).unwrap();
        match train(&mut model, &data, &cfg) {
            Ok(h) => println!(
                "{name:<6} iou {:>6.4}   ({} params, {:.2}% of dense)",
                h.final_iou.unwrap(),
                h.param_count,
                100.0 * h.compression_rate
            ),
            Err(e) => println!("{name:<6} failed: {e}"),
        }
    }
}
