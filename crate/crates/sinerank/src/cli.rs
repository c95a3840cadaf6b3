//! Command-line surface: spectra, heatmaps, bound verification, rank-lift
//! search, and paired training runs, each with a reproducible manifest.
//!
//! Every command honors `--seed` (default 42, never wall-clock entropy) and
//! writes `run.json` beside its outputs. Re-running with a manifest's flags
//! reproduces every non-manifest output bitwise on the same platform.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::init::{labels, rng_stream, sample_factors, InitScheme};
use crate::io::{ensure_dir, quantize_min_max, write_pgm, CsvTable, RunManifest};
use crate::lowrank;
use crate::matrix::{DenseMatrix, FnKind};
use crate::nn::{
    self, gen_image_task, gen_occupancy_task, ImagePattern, LayerKind, OccupancyShape,
    TaskDataset, TaskKind, TrainConfig,
};
use crate::spectrum::{singular_values_csv, SpectrumReport};
use crate::svd::RankTolerance;
use crate::theory::{self, OmegaSearchResult, VerifyReport};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "sinerank",
    version,
    about = "Spectral reports and desk-scale training for sine-activated low-rank matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Singular-value spectra of phi(omega * U V^T) per nonlinearity and frequency
    Spectrum(SpectrumArgs),
    /// Weight-magnitude heatmaps: full-rank vs U V^T vs sin(omega * U V^T)
    Heatmap(HeatmapArgs),
    /// Randomized verification of the rank and norm bounds
    Verify(VerifyArgs),
    /// Search a frequency grid for the smallest rank-lifting omega
    FindOmega0(FindOmega0Args),
    /// Train a coordinate network; optionally compare plain vs sine low-rank
    Train(TrainArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 256)]
    pub m: usize,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Frequencies to sweep
    #[arg(long = "omega-list", value_delimiter = ',', default_value = "1,10,100,1000,10000")]
    pub omega_list: Vec<f64>,
    /// Nonlinearities to compare
    #[arg(long, value_delimiter = ',', default_value = "sine,relu,sigmoid,tanh,identity")]
    pub fns: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[arg(long, default_value_t = 128)]
    pub m: usize,
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Sine frequencies to render
    #[arg(long, value_delimiter = ',', default_value = "100,2000")]
    pub omega: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 10000)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FindOmega0Args {
    #[arg(long, default_value_t = 128)]
    pub m: usize,
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Explicit ascending grid; defaults to 40 geometric points in [1, 1e6]
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// `occupancy` (sphere volume) or `image` (checker target)
    #[arg(long, default_value = "occupancy")]
    pub task: String,
    /// Grid points per axis (images use grid x grid)
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Hidden layer widths
    #[arg(long, value_delimiter = ',', default_value = "256,256")]
    pub layers: Vec<usize>,
    /// Rank of the low-rank hidden layers; 0 trains the dense baseline
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Sine frequency; defaults per rank (200, 100, 50, 20 for 1, 2, 3-5, 6+)
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Run plain and sine variants from the same seed and emit a paired summary
    #[arg(long, default_value_t = false)]
    pub compare: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Dispatches a parsed command. Returns `Ok(true)` when all requested checks
/// passed; `Ok(false)` makes the binary exit nonzero.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Spectrum(args) => run_spectrum(&args).map(|_| true),
        Command::Heatmap(args) => run_heatmap(&args).map(|_| true),
        Command::Verify(args) => run_verify(&args),
        Command::FindOmega0(args) => run_find_omega0(&args).map(|_| true),
        Command::Train(args) => run_train(&args).map(|_| true),
    }
}

fn write_output(
    dir: &Path,
    name: &str,
    bytes: &[u8],
    manifest: &mut RunManifest,
) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, bytes)?;
    manifest.record_output(&path);
    Ok(path)
}

fn omega_file_tag(omega: f64) -> String {
    // filesystem-friendly: 1000 -> "1000", 0.5 -> "0p5"
    format!("{omega}").replace('.', "p").replace('-', "m")
}

#[derive(Serialize)]
struct SpectrumSummaryEntry {
    #[serde(rename = "fn")]
    fn_kind: String,
    omega: f64,
    stable_rank: f64,
    numerical_rank: usize,
    sigma_max: f64,
}

pub fn run_spectrum(args: &SpectrumArgs) -> Result<()> {
    let start = Instant::now();
    ensure_dir(&args.out)?;
    let mut manifest = RunManifest::new("spectrum", args.seed);
    manifest.flag("m", args.m);
    manifest.flag("n", args.n);
    manifest.flag("k", args.k);
    manifest.flag(
        "omega-list",
        args.omega_list
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.flag("fns", args.fns.join(","));
    manifest.flag("seed", args.seed);
    manifest.flag("out", args.out.display());

    let fns: Vec<FnKind> = args
        .fns
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<_>>>()?;
    let scheme = InitScheme::kaiming(args.seed);
    let (u, v) = sample_factors(args.m, args.n, args.k, &scheme)?;

    let mut summary = Vec::new();
    let mut sweep_csv = CsvTable::new(&["omega", "stable_rank", "numerical_rank", "sigma_max", "fn"]);

    // Baseline U V^T, labeled identity, once.
    let baseline = SpectrumReport::compute(&u.matmul(&v.transpose())?, RankTolerance::Default);
    write_output(
        &args.out,
        "spectrum_identity.csv",
        singular_values_csv(&baseline.sv_normalized).as_bytes(),
        &mut manifest,
    )?;
    sweep_csv.row(&[
        "0".into(),
        baseline.stable_rank.to_string(),
        baseline.numerical_rank.to_string(),
        baseline.operator_norm.to_string(),
        "identity".into(),
    ]);
    summary.push(SpectrumSummaryEntry {
        fn_kind: "identity".into(),
        omega: 0.0,
        stable_rank: baseline.stable_rank,
        numerical_rank: baseline.numerical_rank,
        sigma_max: baseline.operator_norm,
    });

    for &omega in &args.omega_list {
        let reports = theory::nonlinearity_spectrum_compare(&u, &v, omega, &fns)?;
        for (kind, report) in &reports {
            if *kind == FnKind::Identity {
                continue; // baseline already emitted
            }
            if !fns.contains(kind) {
                continue;
            }
            let name = format!("spectrum_{}_w{}.csv", kind.name(), omega_file_tag(omega));
            write_output(
                &args.out,
                &name,
                singular_values_csv(&report.sv_normalized).as_bytes(),
                &mut manifest,
            )?;
            sweep_csv.row(&[
                omega.to_string(),
                report.stable_rank.to_string(),
                report.numerical_rank.to_string(),
                report.operator_norm.to_string(),
                kind.name().into(),
            ]);
            summary.push(SpectrumSummaryEntry {
                fn_kind: kind.name().into(),
                omega,
                stable_rank: report.stable_rank,
                numerical_rank: report.numerical_rank,
                sigma_max: report.operator_norm,
            });
        }
    }

    write_output(
        &args.out,
        "spectrum_summary.csv",
        sweep_csv.finish().as_bytes(),
        &mut manifest,
    )?;
    write_output(
        &args.out,
        "spectrum_summary.json",
        serde_json::to_string_pretty(&summary)?.as_bytes(),
        &mut manifest,
    )?;
    manifest.wall_seconds = start.elapsed().as_secs_f64();
    manifest.write(&args.out)?;
    Ok(())
}

#[derive(Serialize)]
struct HeatmapSummary {
    full_rank: SpectrumReport,
    plain: SpectrumReport,
    sine: Vec<(f64, SpectrumReport)>,
}

pub fn run_heatmap(args: &HeatmapArgs) -> Result<()> {
    let start = Instant::now();
    ensure_dir(&args.out)?;
    let mut manifest = RunManifest::new("heatmap", args.seed);
    manifest.flag("m", args.m);
    manifest.flag("n", args.n);
    manifest.flag("k", args.k);
    manifest.flag(
        "omega",
        args.omega
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.flag("seed", args.seed);
    manifest.flag("out", args.out.display());

    let full = {
        let bound = (6.0 / args.n as f64).sqrt();
        let mut rng = rng_stream(args.seed, labels::FULL_RANK);
        crate::init::sample_uniform(args.m, args.n, bound, &mut rng)
    };
    let scheme = InitScheme::uniform_pm_one_over_n(args.seed);
    let (u, v) = sample_factors(args.m, args.n, args.k, &scheme)?;
    let plain = u.matmul(&v.transpose())?;

    let emit_image = |mat: &DenseMatrix, name: &str, manifest: &mut RunManifest| -> Result<()> {
        let abs: Vec<f64> = mat.entries().iter().map(|v| v.abs()).collect();
        let bytes = quantize_min_max(&abs);
        let path = args.out.join(name);
        write_pgm(&path, mat.cols(), mat.rows(), &bytes)?;
        manifest.record_output(&path);
        Ok(())
    };

    emit_image(&full, "heatmap_full.pgm", &mut manifest)?;
    emit_image(&plain, "heatmap_plain.pgm", &mut manifest)?;
    let mut sine_reports = Vec::new();
    for &omega in &args.omega {
        let modulated = plain.sine_modulate(omega);
        emit_image(
            &modulated,
            &format!("heatmap_sine_w{}.pgm", omega_file_tag(omega)),
            &mut manifest,
        )?;
        sine_reports.push((omega, SpectrumReport::compute(&modulated, RankTolerance::Default)));
    }

    let summary = HeatmapSummary {
        full_rank: SpectrumReport::compute(&full, RankTolerance::Default),
        plain: SpectrumReport::compute(&plain, RankTolerance::Default),
        sine: sine_reports,
    };
    write_output(
        &args.out,
        "heatmap.json",
        serde_json::to_string_pretty(&summary)?.as_bytes(),
        &mut manifest,
    )?;
    manifest.wall_seconds = start.elapsed().as_secs_f64();
    manifest.write(&args.out)?;
    Ok(())
}

pub fn run_verify(args: &VerifyArgs) -> Result<bool> {
    let start = Instant::now();
    ensure_dir(&args.out)?;
    let mut manifest = RunManifest::new("verify", args.seed);
    manifest.flag("trials", args.trials);
    manifest.flag("seed", args.seed);
    manifest.flag("out", args.out.display());

    if args.trials < 1 {
        return Err(Error::InvalidModelSpec("trials must be >= 1".into()));
    }
    let report: VerifyReport = theory::verify_bounds(args.trials, args.seed, (8, 256));
    write_output(
        &args.out,
        "verify.json",
        serde_json::to_string_pretty(&report)?.as_bytes(),
        &mut manifest,
    )?;
    manifest.wall_seconds = start.elapsed().as_secs_f64();
    manifest.write(&args.out)?;
    println!(
        "prop1 {}/{} (skipped {}), lemma_frob_lower {}/{} (skipped {}), lemma_op_upper {}/{}",
        report.prop1.passed,
        report.prop1.checked,
        report.prop1.skipped,
        report.lemma_frob_lower.passed,
        report.lemma_frob_lower.checked,
        report.lemma_frob_lower.skipped,
        report.lemma_op_upper.passed,
        report.lemma_op_upper.checked,
    );
    Ok(report.all_passed)
}

pub fn run_find_omega0(args: &FindOmega0Args) -> Result<OmegaSearchResult> {
    let start = Instant::now();
    ensure_dir(&args.out)?;
    let mut manifest = RunManifest::new("find-omega0", args.seed);
    manifest.flag("m", args.m);
    manifest.flag("n", args.n);
    manifest.flag("k", args.k);
    manifest.flag("seed", args.seed);
    if let Some(grid) = &args.grid {
        manifest.flag(
            "grid",
            grid.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
        );
    }
    manifest.flag("out", args.out.display());

    let scheme = InitScheme::uniform_pm_one_over_n(args.seed);
    let (u, v) = sample_factors(args.m, args.n, args.k, &scheme)?;
    let grid = match &args.grid {
        Some(g) => g.clone(),
        None => theory::default_omega_grid(),
    };
    let result = theory::find_omega0(&u, &v, &grid)?;
    write_output(
        &args.out,
        "omega0.json",
        serde_json::to_string_pretty(&result)?.as_bytes(),
        &mut manifest,
    )?;
    manifest.wall_seconds = start.elapsed().as_secs_f64();
    manifest.write(&args.out)?;
    match result.omega0 {
        Some(w) => println!("base rank {}, lift at omega0 = {w}", result.base_rank),
        None => println!("base rank {}, no lift on this grid", result.base_rank),
    }
    Ok(result)
}

/// Summary of one training run, serialized beside its loss CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub variant: String,
    pub task: String,
    pub grid: usize,
    pub k: usize,
    pub omega: Option<f64>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub final_metric: f64,
    pub metric_name: String,
    pub param_count: usize,
    pub compression_rate: f64,
}

#[derive(Debug, Serialize)]
struct CompareSummary {
    task: String,
    k: usize,
    omega: f64,
    seed: u64,
    metric_name: String,
    plain: RunSummary,
    sine: RunSummary,
    delta: f64,
}

pub(crate) fn default_lr(task: TaskKind) -> f64 {
    TrainConfig::for_task(task, 256 * 256, 0).learning_rate
}

fn build_dataset(task: TaskKind, grid: usize) -> TaskDataset {
    match task {
        TaskKind::Occupancy => gen_occupancy_task(OccupancyShape::Sphere, grid),
        TaskKind::ImageFit => gen_image_task(ImagePattern::Checker, grid, grid),
    }
}

/// One full training run; returns the summary and writes CSV, summary JSON,
/// and the predicted grid (PGM for images, raw voxels + sidecar for volumes).
#[allow(clippy::too_many_arguments)]
fn run_one_training(
    dir: &Path,
    variant: &str,
    task: TaskKind,
    data: &TaskDataset,
    args: &TrainArgs,
    kind: LayerKind,
    omega: Option<f64>,
    manifest: &mut RunManifest,
) -> Result<RunSummary> {
    let activation = nn::Activation::Gaussian;
    let specs = nn::task_model_specs(data.dim(), &args.layers, kind, args.k, omega, activation);
    let mut model = nn::build_model(&specs, args.seed)?;
    let mut cfg = TrainConfig::for_task(task, data.len(), args.seed);
    cfg.epochs = args.epochs;
    if let Some(lr) = args.lr {
        cfg.learning_rate = lr;
    }

    let history = match nn::train(&mut model, data, &cfg) {
        Ok(h) => h,
        Err(Error::NonFiniteLoss { epoch, partial }) => {
            // keep the partial loss curve on disk, then propagate
            let name = format!("loss_{variant}.csv");
            write_output(dir, &name, partial.loss_csv().as_bytes(), manifest)?;
            return Err(Error::NonFiniteLoss { epoch, partial });
        }
        Err(e) => return Err(e),
    };

    write_output(
        dir,
        &format!("loss_{variant}.csv"),
        history.loss_csv().as_bytes(),
        manifest,
    )?;

    let preds = nn::predict_all(&model, data)?;
    match task {
        TaskKind::ImageFit => {
            let bytes: Vec<u8> = preds
                .iter()
                .map(|p| (p.clamp(0.0, 1.0) * 255.0).round() as u8)
                .collect();
            let path = dir.join(format!("pred_{variant}.pgm"));
            write_pgm(&path, data.grid_shape[1], data.grid_shape[0], &bytes)?;
            manifest.record_output(&path);
        }
        TaskKind::Occupancy => {
            let bits: Vec<u8> = preds.iter().map(|&z| if z > 0.0 { 1 } else { 0 }).collect();
            let path = dir.join(format!("pred_{variant}.vox"));
            std::fs::write(&path, &bits)?;
            manifest.record_output(&path);
            let sidecar = serde_json::json!({
                "grid_shape": data.grid_shape,
                "threshold": 0.5,
            });
            write_output(
                dir,
                &format!("pred_{variant}.vox.json"),
                serde_json::to_string_pretty(&sidecar)?.as_bytes(),
                manifest,
            )?;
        }
    }

    let (metric_name, final_metric) = match task {
        TaskKind::ImageFit => ("psnr", history.final_psnr.unwrap()),
        TaskKind::Occupancy => ("iou", history.final_iou.unwrap()),
    };
    let summary = RunSummary {
        variant: variant.to_string(),
        task: match task {
            TaskKind::ImageFit => "image".into(),
            TaskKind::Occupancy => "occupancy".into(),
        },
        grid: args.grid,
        k: args.k,
        omega,
        epochs: args.epochs,
        learning_rate: args.lr.unwrap_or_else(|| default_lr(task)),
        seed: args.seed,
        final_metric,
        metric_name: metric_name.into(),
        param_count: history.param_count,
        compression_rate: history.compression_rate,
    };
    write_output(
        dir,
        &format!("summary_{variant}.json"),
        serde_json::to_string_pretty(&summary)?.as_bytes(),
        manifest,
    )?;
    Ok(summary)
}

pub fn run_train(args: &TrainArgs) -> Result<()> {
    let start = Instant::now();
    ensure_dir(&args.out)?;
    let task = match args.task.trim().to_ascii_lowercase().as_str() {
        "occupancy" => TaskKind::Occupancy,
        "image" => TaskKind::ImageFit,
        other => {
            return Err(Error::InvalidModelSpec(format!(
                "unknown task `{other}` (expected occupancy|image)"
            )))
        }
    };
    if args.grid < 8 {
        return Err(Error::InvalidModelSpec("grid must be at least 8".into()));
    }
    let mut manifest = RunManifest::new("train", args.seed);
    manifest.flag("task", &args.task);
    manifest.flag("grid", args.grid);
    manifest.flag(
        "layers",
        args.layers
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.flag("k", args.k);
    if let Some(w) = args.omega {
        manifest.flag("omega", w);
    }
    manifest.flag("epochs", args.epochs);
    if let Some(lr) = args.lr {
        manifest.flag("lr", lr);
    }
    manifest.flag("seed", args.seed);
    manifest.flag("compare", args.compare);
    manifest.flag("out", args.out.display());

    let data = build_dataset(task, args.grid);

    if args.compare {
        if args.k == 0 {
            return Err(Error::InvalidModelSpec(
                "--compare needs a low-rank k >= 1".into(),
            ));
        }
        let omega = args
            .omega
            .unwrap_or_else(|| nn::default_omega_for_rank(args.k));
        // plain and sine variants from the same seed, run as independent jobs
        let jobs: Vec<(&str, LayerKind, Option<f64>)> = vec![
            ("plain", LayerKind::LowrankPlain, None),
            ("sine", LayerKind::LowrankSine, Some(omega)),
        ];
        let results: Vec<Result<(RunSummary, RunManifest)>> = jobs
            .into_par_iter()
            .map(|(variant, kind, w)| {
                let mut sub_manifest = RunManifest::new("train", args.seed);
                let summary =
                    run_one_training(&args.out, variant, task, &data, args, kind, w, &mut sub_manifest)?;
                Ok((summary, sub_manifest))
            })
            .collect();
        let mut summaries = Vec::new();
        for r in results {
            let (summary, sub_manifest) = r?;
            for path in sub_manifest.outputs {
                manifest.outputs.push(path);
            }
            summaries.push(summary);
        }
        manifest.outputs.sort();
        let plain = summaries.iter().find(|s| s.variant == "plain").unwrap().clone();
        let sine = summaries.iter().find(|s| s.variant == "sine").unwrap().clone();
        let compare = CompareSummary {
            task: plain.task.clone(),
            k: args.k,
            omega,
            seed: args.seed,
            metric_name: plain.metric_name.clone(),
            delta: sine.final_metric - plain.final_metric,
            plain,
            sine,
        };
        write_output(
            &args.out,
            "compare.json",
            serde_json::to_string_pretty(&compare)?.as_bytes(),
            &mut manifest,
        )?;
        println!(
            "{}: plain {:.4} vs sine {:.4} (delta {:+.4})",
            compare.metric_name,
            compare.plain.final_metric,
            compare.sine.final_metric,
            compare.delta
        );
    } else {
        let (variant, kind, omega) = if args.k == 0 {
            ("dense", LayerKind::Dense, None)
        } else {
            (
                "sine",
                LayerKind::LowrankSine,
                Some(args.omega.unwrap_or_else(|| nn::default_omega_for_rank(args.k))),
            )
        };
        let summary =
            run_one_training(&args.out, variant, task, &data, args, kind, omega, &mut manifest)?;
        println!(
            "{} {}: {:.4} ({} params, {:.2}% of dense)",
            summary.variant,
            summary.metric_name,
            summary.final_metric,
            summary.param_count,
            100.0 * summary.compression_rate
        );
    }

    manifest.wall_seconds = start.elapsed().as_secs_f64();
    manifest.write(&args.out)?;
    Ok(())
}

/// Convenience used by tests and examples: paired plain/sine comparison via
/// the library path (no files), returning `(plain, sine)` final metrics.
pub fn paired_metrics(
    task: TaskKind,
    grid: usize,
    widths: &[usize],
    k: usize,
    omega: f64,
    epochs: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let data = build_dataset(task, grid);
    let run = |kind: LayerKind, omega: Option<f64>| -> Result<f64> {
        let specs =
            nn::task_model_specs(data.dim(), widths, kind, k, omega, nn::Activation::Gaussian);
        let mut model = nn::build_model(&specs, seed)?;
        let mut cfg = TrainConfig::for_task(task, data.len(), seed);
        cfg.epochs = epochs;
        let history = nn::train(&mut model, &data, &cfg)?;
        Ok(history.final_metric().unwrap())
    };
    let plain = run(LayerKind::LowrankPlain, None)?;
    let sine = run(LayerKind::LowrankSine, Some(omega))?;
    Ok((plain, sine))
}

/// Dense-baseline metric for the same protocol.
pub fn dense_metric(
    task: TaskKind,
    grid: usize,
    widths: &[usize],
    epochs: usize,
    seed: u64,
) -> Result<f64> {
    let data = build_dataset(task, grid);
    let specs = nn::task_model_specs(
        data.dim(),
        widths,
        LayerKind::Dense,
        0,
        None,
        nn::Activation::Gaussian,
    );
    let mut model = nn::build_model(&specs, seed)?;
    let mut cfg = TrainConfig::for_task(task, data.len(), seed);
    cfg.epochs = epochs;
    let history = nn::train(&mut model, &data, &cfg)?;
    Ok(history.final_metric().unwrap())
}

// Re-exported for integration tests that need the exact materialization the
// heatmap command uses.
pub fn heatmap_full_rank_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let bound = (6.0 / n as f64).sqrt();
    let mut rng = rng_stream(seed, labels::FULL_RANK);
    crate::init::sample_uniform(m, n, bound, &mut rng)
}

/// Whole-model compression rate for the occupancy architecture at rank `k`,
/// matching `lowrank::param_count` layer by layer.
pub fn occupancy_compression_rate(widths: &[usize], in_dim: usize, k: usize) -> f64 {
    let specs = nn::task_model_specs(
        in_dim,
        widths,
        LayerKind::LowrankPlain,
        k,
        None,
        nn::Activation::Gaussian,
    );
    let low: usize = specs
        .iter()
        .map(|s| match s.kind {
            LayerKind::Dense => s.out_dim * s.in_dim + s.out_dim,
            _ => lowrank::param_count(s.out_dim, s.in_dim, s.k.unwrap()),
        })
        .sum();
    let dense: usize = specs
        .iter()
        .map(|s| s.out_dim * s.in_dim + s.out_dim)
        .sum();
    low as f64 / dense as f64
}
