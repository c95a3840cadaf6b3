//! Scratch probe for training hyperparameters (temporary).

use sinerank::nn::{
    build_model, gen_occupancy_task, task_model_specs, train, Activation, LayerKind,
    OccupancyShape, TrainConfig,
};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let grid: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(16);
    let lr: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.1);
    let batch: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(512);
    let epochs: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(200);
    let kind: String = args.get(5).cloned().unwrap_or("all".into());
    let k: usize = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(1);
    let omega: f64 = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(200.0);
    let seed: u64 = args.get(8).map(|s| s.parse().unwrap()).unwrap_or(1);

    let data = gen_occupancy_task(OccupancyShape::Sphere, grid);
    let mut cfg = TrainConfig::for_task(data.task_kind, data.len(), seed);
    cfg.learning_rate = lr;
    cfg.batch_size = batch.min(data.len());
    cfg.epochs = epochs;

    let run = |kname: &str, lk: LayerKind, w: Option<f64>| {
        let specs = task_model_specs(3, &[256, 256], lk, k, w, Activation::Gaussian);
        let mut model = build_model(&specs, seed).unwrap();
        let t0 = std::time::Instant::now();
        // chunked training to watch the trajectory
        let mut peak = (0.0f64, 0usize);
        let mut done = 0usize;
        let chunk = 10usize;
        let mut failed = None;
        let mut last_loss = f64::NAN;
        while done < cfg.epochs {
            let mut c = cfg;
            c.epochs = chunk.min(cfg.epochs - done);
            c.seed = cfg.seed.wrapping_add(done as u64);
            match train(&mut model, &data, &c) {
                Ok(h) => {
                    done += c.epochs;
                    last_loss = *h.loss.last().unwrap();
                    let iou = h.final_iou.unwrap();
                    if iou > peak.0 {
                        peak = (iou, done);
                    }
                    if done % 50 == 0 {
                        println!("  {kname} ep{done}: iou={iou:.4} loss={last_loss:.5}");
                    }
                }
                Err(e) => {
                    failed = Some(format!("{e} (after {done} epochs)"));
                    break;
                }
            }
        }
        match failed {
            None => println!(
                "grid={grid} lr={lr} B={batch} ep={epochs} k={k} w={omega} seed={seed} {kname}: peak_iou={:.4}@ep{} lossN={last_loss:.5} ({:.0}s)",
                peak.0, peak.1,
                t0.elapsed().as_secs_f64()
            ),
            Some(e) => println!(
                "grid={grid} lr={lr} B={batch} ep={epochs} k={k} w={omega} seed={seed} {kname}: FAILED {e}, peak_iou={:.4}@ep{}",
                peak.0, peak.1
            ),
        }
    };
    match kind.as_str() {
        "dense" => run("dense", LayerKind::Dense, None),
        "plain" => run("plain", LayerKind::LowrankPlain, None),
        "sine" => run("sine", LayerKind::LowrankSine, Some(omega)),
        _ => {
            run("dense", LayerKind::Dense, None);
            run("plain", LayerKind::LowrankPlain, None);
            run("sine", LayerKind::LowrankSine, Some(omega));
        }
    }
}
